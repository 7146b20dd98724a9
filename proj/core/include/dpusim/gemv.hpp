#pragma once

// Row-block GEMV across DPUs: planning, functional execution, and timing.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpusim/bsdp.hpp"
#include "dpusim/cycle_model.hpp"
#include "dpusim/transfer_model.hpp"

namespace dpusim {

enum class GemvDType : std::uint8_t { Int8, Int4Bsdp };
enum class GemvScenario : std::uint8_t { MV, V };

std::string_view to_string(GemvDType t) noexcept;
std::string_view to_string(GemvScenario s) noexcept;
GemvDType parse_gemv_dtype(std::string_view s);
GemvScenario parse_scenario(std::string_view s);

struct RowRange {
  std::uint64_t begin = 0;
  std::uint64_t count = 0;

  friend bool operator==(const RowRange&, const RowRange&) = default;
};

struct GemvPlan {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint32_t dpu_count = 0;
  std::vector<RowRange> rows_per_dpu;
  GemvDType dtype = GemvDType::Int8;

  std::uint64_t max_rows_per_dpu() const noexcept;
  /// Bytes of matrix storage (INT4 packs two elements per byte).
  std::uint64_t matrix_bytes() const noexcept;
  /// Bytes of vector storage sent to each DPU.
  std::uint64_t vector_bytes() const noexcept;
};

GemvPlan plan_gemv(std::uint64_t rows, std::uint64_t cols, std::uint32_t dpu_count, GemvDType dtype);

struct GemvRun {
  std::vector<std::int32_t> result;
  std::vector<std::uint64_t> dpu_cycles;
};

/// INT8: row-major matrix and vector of signed bytes.
GemvRun run_gemv_functional(const GemvPlan& plan, std::span<const std::int8_t> matrix,
                            std::span<const std::int8_t> vector);
/// INT4: rows and vector already transposed to bit planes by the host.
GemvRun run_gemv_functional(const GemvPlan& plan, std::span<const BitPlaneVector> matrix_rows,
                            const BitPlaneVector& vector);

/// Encodes each row of a signed INT4 matrix (values in [-8,7]) to bit planes.
std::vector<BitPlaneVector> encode_int4_rows(std::span<const std::int8_t> matrix, std::uint64_t rows,
                                             std::uint64_t cols);

/// DPU cycles for one row of length `cols`; the kernels have no data-dependent control.
std::uint64_t gemv_row_cycles(GemvDType dtype, std::uint64_t cols);

struct TimingBreakdown {
  GemvScenario scenario = GemvScenario::V;
  double matrix_transfer_s = 0;
  double vector_transfer_s = 0;
  double compute_s = 0;
  double result_transfer_s = 0;
  double gops = 0;

  double total_s() const noexcept { return matrix_transfer_s + vector_transfer_s + compute_s + result_transfer_s; }
};

struct GemvEnvironment {
  TransferCalibration transfer{};
  ServerTopology topology{};
  PipelineConfig pipeline{};
  BufferPlacement placement = BufferPlacement::local();
};

TimingBreakdown estimate_gemv(const GemvPlan& plan, GemvScenario scenario, const RankSet& ranks,
                              const GemvEnvironment& env = {});

/// Published CPU reference points, for report annotation only.
inline constexpr double kServerInt8GopsCeiling = 220.0;
inline constexpr double kServerInt8GopsTypical = 200.0;

}  // namespace dpusim
