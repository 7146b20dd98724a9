#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dpusim/isa.hpp"

namespace dpusim {

struct PipelineConfig {
  unsigned stages = 14;
  unsigned saturation_tasklets = 11;
  unsigned max_tasklets = 16;
  double frequency_hz = 400e6;

  void validate() const;
};

/// Unroll factor of an inner loop; `full` removes the loop entirely.
class Unroll {
 public:
  constexpr Unroll() = default;
  static constexpr Unroll by(std::uint32_t factor) { return Unroll(factor); }
  static constexpr Unroll full() { return Unroll(0); }

  /// Accepts "1", "64", "128", any positive integer, or "auto"/"full".
  static Unroll parse(std::string_view text);

  constexpr bool is_full() const noexcept { return factor_ == 0; }
  constexpr std::uint32_t factor() const noexcept { return factor_; }
  /// Copies of the loop body emitted for a loop of `iterations` trips.
  std::uint64_t body_copies(std::uint64_t iterations) const noexcept;
  std::string label() const;

  friend constexpr bool operator==(Unroll, Unroll) = default;

 private:
  constexpr explicit Unroll(std::uint32_t f) : factor_(f) {}
  std::uint32_t factor_ = 1;
};

struct LoopModel {
  std::uint32_t control_overhead_per_iteration = 2;
  Unroll unroll{};

  /// Number of times the loop-control instructions execute.
  std::uint64_t trips(std::uint64_t iterations) const noexcept;
  std::uint64_t control_instructions(std::uint64_t iterations) const noexcept;
  /// Amortized control cost per iteration.
  double overhead_per_iteration(std::uint64_t iterations) const noexcept;
};

struct ThroughputReport {
  unsigned tasklets = 0;
  double cycles_per_element = 0;
  double mops = 0;
};

std::uint64_t cycles_of(const InstructionTrace& trace) noexcept;

ThroughputReport throughput_mops(double per_element_cycles, unsigned tasklets,
                                 const PipelineConfig& cfg = {});

/// MOPS for every tasklet count 1..max_tasklets.
std::vector<ThroughputReport> tasklet_sweep(double per_element_cycles,
                                            const PipelineConfig& cfg = {});

double speedup(const ThroughputReport& baseline, const ThroughputReport& optimized);

/// Records `trips` executions of a loop-control sequence (counter updates
/// followed by the back-edge branch) on `m`.
void emit_loop_control(Machine& m, std::uint64_t trips, std::uint32_t overhead_per_trip);

/// Wall time of `cycles` single-thread-equivalent slots at full pipeline occupancy.
double seconds_at_saturation(std::uint64_t cycles, const PipelineConfig& cfg = {});

}  // namespace dpusim
