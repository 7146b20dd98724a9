#pragma once

// Instruction subset of the DPU core used by the kernel library.
//
// Every instruction issues in one slot of the revolver pipeline; memory wait
// effects are not modelled here but folded into the cycle model. A Machine
// owns its registers-by-value convention (callers pass words around) plus a
// flat WRAM/MRAM image and an InstructionTrace that every exec call appends to.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpusim/error.hpp"

namespace dpusim {

using Word32 = std::uint32_t;
using Word64 = std::uint64_t;

constexpr std::int32_t as_signed(Word32 w) noexcept { return static_cast<std::int32_t>(w); }
constexpr Word32 as_word(std::int32_t v) noexcept { return static_cast<Word32>(v); }

/// The d-register view used by MUL_STEP: multiplier in `low`, accumulator in `high`.
struct RegisterPair {
  Word32 low = 0;
  Word32 high = 0;

  friend constexpr bool operator==(const RegisterPair&, const RegisterPair&) = default;
};

enum class Opcode : std::uint8_t {
  ADD,
  SUB,
  AND,
  XOR,
  LSL,
  LSR,
  LSL_ADD,
  LSL_SUB,
  CAO,
  MUL_SL_SL,
  MUL_SH_SL,
  MUL_SL_SH,
  MUL_SH_SH,
  MUL_STEP,
  MOVE,
  LOAD8,
  LOAD32,
  LOAD64,
  STORE8,
  STORE32,
  STORE64,
  JUMP,
  COND_JUMP,
};

inline constexpr std::size_t kOpcodeCount = static_cast<std::size_t>(Opcode::COND_JUMP) + 1;

std::string_view opcode_name(Opcode op) noexcept;

/// Byte lanes read by the MUL_Sx_Sy family: SL selects bits 0..7, SH bits 8..15.
enum class ByteLane : std::uint8_t { Low, High };
enum class Signedness : std::uint8_t { Unsigned, Signed };

struct ByteMulVariant {
  ByteLane lhs = ByteLane::Low;
  ByteLane rhs = ByteLane::Low;

  Opcode opcode() const noexcept;
};

inline constexpr ByteMulVariant kSlSl{ByteLane::Low, ByteLane::Low};
inline constexpr ByteMulVariant kShSl{ByteLane::High, ByteLane::Low};
inline constexpr ByteMulVariant kSlSh{ByteLane::Low, ByteLane::High};
inline constexpr ByteMulVariant kShSh{ByteLane::High, ByteLane::High};

/// Ordered, run-length-encoded record of executed instructions.
///
/// A histogram is always kept; the ordered run list can be switched off for
/// long simulations where only counts matter.
class InstructionTrace {
 public:
  struct Entry {
    Opcode opcode;
    std::uint64_t count;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  enum class Mode : std::uint8_t { Ordered, CountsOnly };

  InstructionTrace() = default;
  explicit InstructionTrace(Mode mode) : mode_(mode) {}

  void record(Opcode op, std::uint64_t n = 1);
  /// Appends `times` repetitions of `other`'s instruction counts.
  void append(const InstructionTrace& other, std::uint64_t times = 1);
  void clear();

  std::uint64_t total_instructions() const noexcept { return total_; }
  std::uint64_t count(Opcode op) const noexcept { return counts_[static_cast<std::size_t>(op)]; }
  const std::array<std::uint64_t, kOpcodeCount>& counts() const noexcept { return counts_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  Mode mode() const noexcept { return mode_; }
  bool empty() const noexcept { return total_ == 0; }

  /// Count of multiply-class instructions (byte multiplies and MUL_STEP).
  std::uint64_t multiply_instructions() const noexcept;

 private:
  Mode mode_ = Mode::Ordered;
  std::vector<Entry> entries_;
  std::array<std::uint64_t, kOpcodeCount> counts_{};
  std::uint64_t total_ = 0;
};

struct MemoryConfig {
  std::uint64_t mram_bytes = 64ull << 20;
  std::uint64_t wram_bytes = 64ull << 10;
  std::uint64_t iram_bytes = 24ull << 10;
  std::uint64_t instruction_size_bytes = 6;

  /// Throws ContractViolation unless IRAM holds a whole number of instructions.
  void validate() const;
  std::uint64_t iram_capacity_instructions() const;
};

bool check_iram_fit(std::uint64_t instruction_count, const MemoryConfig& cfg = {});

struct MulStepResult {
  RegisterPair state;
  bool exited = false;
};

/// One simulated DPU: an instruction-level executor over WRAM/MRAM images.
///
/// Memory is allocated on first touch so that short-lived machines used by
/// single-operation kernels stay cheap.
class Machine {
 public:
  explicit Machine(MemoryConfig cfg = {},
                   InstructionTrace::Mode mode = InstructionTrace::Mode::Ordered);

  const MemoryConfig& memory_config() const noexcept { return cfg_; }
  const InstructionTrace& trace() const noexcept { return trace_; }
  InstructionTrace take_trace();

  // ALU: ADD, SUB, AND, XOR, LSL, LSR, MOVE (b ignored for MOVE).
  Word32 exec_alu(Opcode op, Word32 a, Word32 b = 0);
  Word32 exec_lsl_add(Word32 acc, Word32 src, unsigned shift);
  Word32 exec_lsl_sub(Word32 acc, Word32 src, unsigned shift);
  Word32 exec_cao(Word32 a);
  Word32 exec_mul_byte(ByteMulVariant variant, Signedness sign, Word32 a, Word32 b);
  MulStepResult exec_mul_step(RegisterPair state, Word32 multiplicand, unsigned shift);
  void exec_jump();
  /// Records a conditional branch; the caller evaluates the condition.
  bool exec_cond_jump(bool taken);

  Word32 load8(std::uint64_t wram_addr);
  Word32 load32(std::uint64_t wram_addr);
  Word64 load64(std::uint64_t wram_addr);
  void store8(std::uint64_t wram_addr, Word32 value);
  void store32(std::uint64_t wram_addr, Word32 value);
  void store64(std::uint64_t wram_addr, Word64 value);

  // Untimed staging (DMA between MRAM/host and WRAM); never traced.
  void stage_to_wram(std::uint64_t wram_addr, std::span<const std::byte> bytes);
  void stage_from_wram(std::uint64_t wram_addr, std::span<std::byte> out);
  std::span<std::byte> mram();

 private:
  std::byte* wram_at(std::uint64_t addr, std::uint64_t width);

  MemoryConfig cfg_;
  InstructionTrace trace_;
  std::vector<std::byte> wram_;
  std::vector<std::byte> mram_;
};

}  // namespace dpusim
