#pragma once

// Bit-serial dot product over 4-bit integers stored as bit planes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dpusim/isa.hpp"
#include "dpusim/mul_kernels.hpp"

namespace dpusim {

/// planes[j][w] bit t holds bit j of element 32*w + t.
struct BitPlaneVector {
  std::array<std::vector<Word32>, 4> planes;
  std::uint64_t length = 0;
  Signedness signedness = Signedness::Unsigned;

  std::uint64_t blocks() const noexcept { return length / 32; }
  int element(std::uint64_t i) const;
  std::vector<std::int8_t> reconstruct() const;
};

BitPlaneVector transpose_to_bitplanes(std::span<const std::int8_t> values, Signedness signedness);

enum class BsdpLoadSchedule : std::uint8_t {
  Reload32,  // one LOAD32 per A plane, B planes reloaded for every A plane (20 loads/block)
  Paired64,  // two planes per LOAD64 for each operand (4 loads/block)
};

struct BsdpConfig {
  BsdpLoadSchedule schedule = BsdpLoadSchedule::Reload32;
  std::uint32_t outer_unroll = 8;
  std::uint32_t control_overhead = 3;
  /// Reject inputs whose worst-case sum could wrap the 32-bit accumulator.
  bool exact = true;
};

std::uint32_t bsdp_loads_per_block(BsdpLoadSchedule s) noexcept;
/// Instructions per 32-element block excluding loop control.
std::uint32_t bsdp_block_instructions(BsdpLoadSchedule s) noexcept;
/// Largest element count for which exact mode is guaranteed not to wrap.
std::uint64_t bsdp_exact_max_elements() noexcept;

Word32 bsdp_dot(Machine& m, const BitPlaneVector& a, const BitPlaneVector& b, const BsdpConfig& cfg = {});
KernelResult bsdp_dot(const BitPlaneVector& a, const BitPlaneVector& b, const BsdpConfig& cfg = {});

// Byte-per-element dot products for comparison. The baseline issues one
// multiply per element in a rolled loop; the optimized form loads 8 elements
// per operand with LOAD64 and is unrolled 128 times.
Word32 native_dot_baseline(Machine& m, std::span<const std::int8_t> a, std::span<const std::int8_t> b);
Word32 native_dot_optimized(Machine& m, std::span<const std::int8_t> a, std::span<const std::int8_t> b);
KernelResult native_dot_baseline(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
KernelResult native_dot_optimized(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

inline constexpr std::uint32_t kNativeOptimizedUnroll = 128;

// Encoded buffer: 16-byte header {magic u32, signedness u32, element count u64}
// followed by little-endian words, four plane words per 32-element block.
inline constexpr std::uint32_t kBitPlaneMagic = 0x50445342;  // "BSDP"

std::vector<std::uint8_t> encode_bitplanes(const BitPlaneVector& v);
BitPlaneVector decode_bitplanes(std::span<const std::uint8_t> bytes);
void save_bitplanes(const std::filesystem::path& path, const BitPlaneVector& v);
BitPlaneVector load_bitplanes(const std::filesystem::path& path);

}  // namespace dpusim
