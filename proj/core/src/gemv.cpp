#include "dpusim/gemv.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

namespace dpusim {

namespace {

constexpr std::uint32_t kRowControl = 3;

// Dot product of one INT8 row with the vector: eight elements per pair of
// LOAD64 in a rolled loop, then a byte-wise tail.
Word32 int8_row_dot(Machine& m, std::span<const std::int8_t> row, std::span<const std::int8_t> vec) {
  constexpr auto S = Signedness::Signed;
  const std::uint64_t half = m.memory_config().wram_bytes / 2;
  const std::uint64_t chunk = (half - 8) / 8 * 8;
  Word32 acc = m.exec_alu(Opcode::MOVE, 0);
  for (std::size_t first = 0; first < row.size(); first += chunk) {
    std::size_t n = std::min<std::size_t>(chunk, row.size() - first);
    m.stage_to_wram(0, std::as_bytes(row.subspan(first, n)));
    m.stage_to_wram(half, std::as_bytes(vec.subspan(first, n)));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
      Word64 da = m.load64(i), db = m.load64(half + i);
      for (int h = 0; h < 2; ++h) {
        Word32 x = static_cast<Word32>(da >> (32 * h)), y = static_cast<Word32>(db >> (32 * h));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, S, x, y));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kShSh, S, x, y));
        x = m.exec_alu(Opcode::LSR, x, 16);
        y = m.exec_alu(Opcode::LSR, y, 16);
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, S, x, y));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kShSh, S, x, y));
      }
    }
    for (; i < n; ++i) {
      Word32 x = m.load8(i), y = m.load8(half + i);
      acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, S, x, y));
    }
  }
  emit_loop_control(m, row.size() / 8, 3);
  emit_loop_control(m, row.size() % 8, 2);
  return acc;
}

void finish_row(Machine& m, Word32 acc) {
  m.store32(0, acc);
  emit_loop_control(m, 1, kRowControl);
}

template <class RowFn>
GemvRun run_partitioned(const GemvPlan& plan, RowFn&& row_fn) {
  GemvRun run;
  run.result.assign(plan.rows, 0);
  run.dpu_cycles.assign(plan.dpu_count, 0);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t d = next++; d < plan.dpu_count; d = next++) {
      Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
      const auto& rr = plan.rows_per_dpu[d];
      for (std::uint64_t r = rr.begin; r < rr.begin + rr.count; ++r) {
        Word32 acc = row_fn(m, r);
        finish_row(m, acc);
        run.result[r] = as_signed(acc);
      }
      run.dpu_cycles[d] = cycles_of(m.trace());
    }
  };
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned nthreads = std::min<unsigned>(hw, plan.dpu_count);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return run;
}

}  // namespace

std::string_view to_string(GemvDType t) noexcept { return t == GemvDType::Int8 ? "int8" : "int4"; }
std::string_view to_string(GemvScenario s) noexcept { return s == GemvScenario::MV ? "MV" : "V"; }

GemvDType parse_gemv_dtype(std::string_view s) {
  if (s == "int8") return GemvDType::Int8;
  if (s == "int4") return GemvDType::Int4Bsdp;
  throw ContractViolation("unknown gemv dtype '" + std::string(s) + "'");
}

GemvScenario parse_scenario(std::string_view s) {
  if (s == "MV" || s == "mv") return GemvScenario::MV;
  if (s == "V" || s == "v") return GemvScenario::V;
  throw ContractViolation("unknown scenario '" + std::string(s) + "'");
}

std::uint64_t GemvPlan::max_rows_per_dpu() const noexcept {
  std::uint64_t m = 0;
  for (const auto& r : rows_per_dpu) m = std::max(m, r.count);
  return m;
}

std::uint64_t GemvPlan::matrix_bytes() const noexcept {
  return dtype == GemvDType::Int8 ? rows * cols : rows * cols / 2;
}

std::uint64_t GemvPlan::vector_bytes() const noexcept { return dtype == GemvDType::Int8 ? cols : cols / 2; }

GemvPlan plan_gemv(std::uint64_t rows, std::uint64_t cols, std::uint32_t dpu_count, GemvDType dtype) {
  if (dpu_count < 1) throw ContractViolation("gemv needs at least one DPU");
  if (rows < dpu_count) throw ContractViolation("fewer rows than DPUs");
  if (cols < 1) throw ContractViolation("gemv needs at least one column");
  if (dtype == GemvDType::Int4Bsdp && cols % 32 != 0) throw ContractViolation("INT4 columns must be a multiple of 32");
  GemvPlan p;
  p.rows = rows;
  p.cols = cols;
  p.dpu_count = dpu_count;
  p.dtype = dtype;
  p.rows_per_dpu.reserve(dpu_count);
  std::uint64_t base = rows / dpu_count, extra = rows % dpu_count, at = 0;
  for (std::uint32_t d = 0; d < dpu_count; ++d) {
    std::uint64_t n = base + (d < extra ? 1 : 0);
    p.rows_per_dpu.push_back({at, n});
    at += n;
  }
  return p;
}

GemvRun run_gemv_functional(const GemvPlan& plan, std::span<const std::int8_t> matrix,
                            std::span<const std::int8_t> vector) {
  if (plan.dtype != GemvDType::Int8) throw ContractViolation("plan is not INT8");
  if (matrix.size() != plan.rows * plan.cols || vector.size() != plan.cols)
    throw ContractViolation("matrix/vector shape does not match plan");
  return run_partitioned(plan, [&](Machine& m, std::uint64_t r) {
    return int8_row_dot(m, matrix.subspan(r * plan.cols, plan.cols), vector);
  });
}

GemvRun run_gemv_functional(const GemvPlan& plan, std::span<const BitPlaneVector> matrix_rows,
                            const BitPlaneVector& vector) {
  if (plan.dtype != GemvDType::Int4Bsdp) throw ContractViolation("plan is not INT4");
  if (matrix_rows.size() != plan.rows || vector.length != plan.cols)
    throw ContractViolation("matrix/vector shape does not match plan");
  for (const auto& row : matrix_rows)
    if (row.length != plan.cols) throw ContractViolation("matrix row length does not match plan");
  return run_partitioned(plan, [&](Machine& m, std::uint64_t r) { return bsdp_dot(m, matrix_rows[r], vector); });
}

std::vector<BitPlaneVector> encode_int4_rows(std::span<const std::int8_t> matrix, std::uint64_t rows,
                                             std::uint64_t cols) {
  if (matrix.size() != rows * cols) throw ContractViolation("matrix size does not match shape");
  std::vector<BitPlaneVector> out;
  out.reserve(rows);
  for (std::uint64_t r = 0; r < rows; ++r)
    out.push_back(transpose_to_bitplanes(matrix.subspan(r * cols, cols), Signedness::Signed));
  return out;
}

std::uint64_t gemv_row_cycles(GemvDType dtype, std::uint64_t cols) {
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  if (dtype == GemvDType::Int8) {
    std::vector<std::int8_t> zeros(cols, 0);
    finish_row(m, int8_row_dot(m, zeros, zeros));
  } else {
    if (cols == 0 || cols % 32 != 0) throw ContractViolation("INT4 columns must be a multiple of 32");
    BitPlaneVector z;
    z.length = cols;
    z.signedness = Signedness::Signed;
    for (auto& p : z.planes) p.assign(cols / 32, 0);
    finish_row(m, bsdp_dot(m, z, z));
  }
  return cycles_of(m.trace());
}

TimingBreakdown estimate_gemv(const GemvPlan& plan, GemvScenario scenario, const RankSet& ranks,
                              const GemvEnvironment& env) {
  if (plan.dpu_count > usable_dpus(ranks, env.topology))
    throw ContractViolation("plan uses " + std::to_string(plan.dpu_count) + " DPUs but the rank set has " +
                            std::to_string(usable_dpus(ranks, env.topology)));
  TimingBreakdown t;
  t.scenario = scenario;
  const std::uint64_t cycles = plan.max_rows_per_dpu() * gemv_row_cycles(plan.dtype, plan.cols);
  t.compute_s = seconds_at_saturation(cycles, env.pipeline);
  if (scenario == GemvScenario::MV)
    t.matrix_transfer_s = transfer_time(plan.matrix_bytes(), ranks, Direction::HostToPim, env.placement,
                                        env.transfer, env.topology);
  t.vector_transfer_s = transfer_time(plan.vector_bytes() * plan.dpu_count, ranks, Direction::HostToPim,
                                      env.placement, env.transfer, env.topology);
  t.result_transfer_s =
      transfer_time(plan.rows * 4, ranks, Direction::PimToHost, env.placement, env.transfer, env.topology);
  const double ops = 2.0 * static_cast<double>(plan.rows) * static_cast<double>(plan.cols);
  t.gops = ops / t.total_s() / 1e9;
  return t;
}

}  // namespace dpusim
