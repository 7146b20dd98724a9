#include "dpusim/cycle_model.hpp"

#include <algorithm>
#include <charconv>

namespace dpusim {

void PipelineConfig::validate() const {
  detail::require(saturation_tasklets >= 1, "saturation_tasklets must be at least 1");
  detail::require(saturation_tasklets <= stages, "saturation_tasklets cannot exceed stages");
  detail::require(max_tasklets >= saturation_tasklets, "max_tasklets below saturation_tasklets");
  detail::require(frequency_hz > 0, "frequency must be positive");
}

Unroll Unroll::parse(std::string_view text) {
  if (text == "auto" || text == "full") return full();
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || v == 0)
    throw ContractViolation("bad unroll factor '" + std::string(text) + "'");
  return by(v);
}

std::uint64_t Unroll::body_copies(std::uint64_t iterations) const noexcept {
  if (is_full()) return iterations;
  return std::min<std::uint64_t>(factor_, iterations);
}

std::string Unroll::label() const {
  if (is_full()) return "auto";
  if (factor_ == 1) return "none";
  return "x" + std::to_string(factor_);
}

std::uint64_t LoopModel::trips(std::uint64_t iterations) const noexcept {
  if (iterations == 0) return 0;
  if (unroll.is_full()) return 1;
  return (iterations + unroll.factor() - 1) / unroll.factor();
}

std::uint64_t LoopModel::control_instructions(std::uint64_t iterations) const noexcept {
  return trips(iterations) * control_overhead_per_iteration;
}

double LoopModel::overhead_per_iteration(std::uint64_t iterations) const noexcept {
  if (iterations == 0) return 0;
  return static_cast<double>(control_instructions(iterations)) / static_cast<double>(iterations);
}

std::uint64_t cycles_of(const InstructionTrace& trace) noexcept { return trace.total_instructions(); }

ThroughputReport throughput_mops(double per_element_cycles, unsigned tasklets,
                                 const PipelineConfig& cfg) {
  cfg.validate();
  if (tasklets < 1 || tasklets > cfg.max_tasklets)
    throw ContractViolation("tasklets " + std::to_string(tasklets) + " outside [1," +
                            std::to_string(cfg.max_tasklets) + "]");
  detail::require(per_element_cycles > 0, "per-element cycles must be positive");
  double occupancy = static_cast<double>(std::min(tasklets, cfg.saturation_tasklets)) /
                     static_cast<double>(cfg.saturation_tasklets);
  return {tasklets, per_element_cycles, cfg.frequency_hz * occupancy / per_element_cycles / 1e6};
}

std::vector<ThroughputReport> tasklet_sweep(double per_element_cycles, const PipelineConfig& cfg) {
  std::vector<ThroughputReport> out;
  out.reserve(cfg.max_tasklets);
  for (unsigned t = 1; t <= cfg.max_tasklets; ++t) out.push_back(throughput_mops(per_element_cycles, t, cfg));
  return out;
}

double speedup(const ThroughputReport& baseline, const ThroughputReport& optimized) {
  detail::require(baseline.mops > 0, "speedup against a zero baseline");
  return optimized.mops / baseline.mops;
}

void emit_loop_control(Machine& m, std::uint64_t trips, std::uint32_t overhead_per_trip) {
  if (overhead_per_trip == 0) return;
  for (std::uint64_t t = 0; t < trips; ++t) {
    for (std::uint32_t i = 1; i < overhead_per_trip; ++i) m.exec_alu(Opcode::ADD, static_cast<Word32>(t), 1);
    m.exec_cond_jump(t + 1 < trips);
  }
}

double seconds_at_saturation(std::uint64_t cycles, const PipelineConfig& cfg) {
  cfg.validate();
  return static_cast<double>(cycles) / cfg.frequency_hz;
}

}  // namespace dpusim
