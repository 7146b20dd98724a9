#pragma once

// Integer add/multiply routines expressed as DPU instruction streams.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpusim/cycle_model.hpp"
#include "dpusim/isa.hpp"

namespace dpusim {

struct KernelResult {
  std::vector<Word32> outputs;
  InstructionTrace trace;
};

/// Bytes of |v| under wrapping negation; x[0] is least significant.
struct ByteDecomposition {
  std::uint8_t x[4] = {0, 0, 0, 0};
  bool source_sign = false;

  Word32 recompose() const noexcept;
};

ByteDecomposition decompose_abs(Word32 v) noexcept;

// Shift-and-add multiply via MUL_STEP. The Machine overload runs the routine
// body only (swap test, setup, steps, result move, return).
Word32 mulsi3(Machine& m, Word32 a, Word32 b);
KernelResult mulsi3(Word32 a, Word32 b);

KernelResult mul_int8_native(std::int8_t a, std::int8_t b);

/// Multiplies the 8 packed bytes of `block` by `scalar` (truncating to 8 bits).
/// `width` 4 loads each half with LOAD32, 8 uses a single LOAD64.
/// outputs = {low word, high word} of the result block.
KernelResult mul_int8_blocked(Word64 block, std::int8_t scalar, unsigned width);

// Decomposed INT32 multiply: 10 unsigned byte products, shifted accumulation
// and sign fix-up. At most 26 instructions.
Word32 dim_mul_int32(Machine& m, Word32 a, Word32 b);
KernelResult dim_mul_int32(Word32 a, Word32 b);

inline constexpr unsigned kDimMaxInstructions = 26;

enum class ArithOp : std::uint8_t { Add, Mul };
enum class DType : std::uint8_t { Int8, Int32 };
enum class Variant : std::uint8_t { Baseline, NI, NIx4, NIx8, DIM };

std::string_view to_string(ArithOp op) noexcept;
std::string_view to_string(DType t) noexcept;
std::string_view to_string(Variant v) noexcept;
ArithOp parse_arith_op(std::string_view s);
DType parse_dtype(std::string_view s);
Variant parse_variant(std::string_view s);

struct MicrokernelConfig {
  ArithOp op = ArithOp::Add;
  DType dtype = DType::Int8;
  Variant variant = Variant::Baseline;
  Unroll unroll{};
  std::uint32_t block_bytes = 1024;
  MemoryConfig memory{};
};

/// Throws ContractViolation for combinations that do not exist (e.g. DIM on INT8).
void validate_microkernel(const MicrokernelConfig& cfg);

std::uint32_t element_bytes(DType t) noexcept;
/// Bytes consumed per inner-loop iteration.
std::uint32_t iteration_stride_bytes(const MicrokernelConfig& cfg);
LoopModel microkernel_loop_model(const MicrokernelConfig& cfg);
/// Static instruction count of the linked kernel for this configuration.
std::uint64_t microkernel_program_size(const MicrokernelConfig& cfg);

struct MicrokernelResult {
  std::vector<std::uint8_t> buffer;  // updated elements, little-endian
  InstructionTrace trace;
  std::uint64_t elements = 0;
  std::uint64_t program_instructions = 0;
  /// Cycles per element with every MUL_STEP sequence at its maximum length.
  double worst_case_cycles_per_element = 0;

  double cycles_per_element() const noexcept;
};

/// buffer[i] op= scalar over a little-endian element buffer, processed in
/// WRAM-sized blocks. Throws IramOverflow when the unrolled kernel does not link.
MicrokernelResult update_microkernel(std::span<const std::uint8_t> buffer, Word32 scalar,
                                     const MicrokernelConfig& cfg);

}  // namespace dpusim
