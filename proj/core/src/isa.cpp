#include "dpusim/isa.hpp"

#include <bit>
#include <cstring>
#include <string>

namespace dpusim {

namespace {

constexpr std::string_view kNames[kOpcodeCount] = {
    "ADD",       "SUB",       "AND",       "XOR",       "LSL",      "LSR",
    "LSL_ADD",   "LSL_SUB",   "CAO",       "MUL_SL_SL", "MUL_SH_SL", "MUL_SL_SH",
    "MUL_SH_SH", "MUL_STEP",  "MOVE",      "LOAD8",     "LOAD32",   "LOAD64",
    "STORE8",    "STORE32",   "STORE64",   "JUMP",      "COND_JUMP",
};

void check_shift(unsigned shift) {
  if (shift > 31) throw ContractViolation("shift amount " + std::to_string(shift) + " outside [0,31]");
}

Word32 select_byte(Word32 w, ByteLane lane) {
  return lane == ByteLane::Low ? (w & 0xFFu) : ((w >> 8) & 0xFFu);
}

}  // namespace

std::string_view opcode_name(Opcode op) noexcept { return kNames[static_cast<std::size_t>(op)]; }

Opcode ByteMulVariant::opcode() const noexcept {
  if (lhs == ByteLane::Low) return rhs == ByteLane::Low ? Opcode::MUL_SL_SL : Opcode::MUL_SL_SH;
  return rhs == ByteLane::Low ? Opcode::MUL_SH_SL : Opcode::MUL_SH_SH;
}

// ---- InstructionTrace ----

void InstructionTrace::record(Opcode op, std::uint64_t n) {
  if (n == 0) return;
  counts_[static_cast<std::size_t>(op)] += n;
  total_ += n;
  if (mode_ == Mode::CountsOnly) return;
  if (!entries_.empty() && entries_.back().opcode == op)
    entries_.back().count += n;
  else
    entries_.push_back({op, n});
}

void InstructionTrace::append(const InstructionTrace& other, std::uint64_t times) {
  if (times == 0 || other.empty()) return;
  if (mode_ == Mode::Ordered && other.mode_ == Mode::Ordered && times <= 4) {
    for (std::uint64_t t = 0; t < times; ++t)
      for (const auto& e : other.entries_) record(e.opcode, e.count);
    return;
  }
  // Bulk append degrades to a histogram merge, in canonical opcode order.
  for (std::size_t i = 0; i < kOpcodeCount; ++i)
    record(static_cast<Opcode>(i), other.counts_[i] * times);
}

void InstructionTrace::clear() {
  entries_.clear();
  counts_.fill(0);
  total_ = 0;
}

std::uint64_t InstructionTrace::multiply_instructions() const noexcept {
  return count(Opcode::MUL_SL_SL) + count(Opcode::MUL_SH_SL) + count(Opcode::MUL_SL_SH) +
         count(Opcode::MUL_SH_SH) + count(Opcode::MUL_STEP);
}

// ---- MemoryConfig ----

void MemoryConfig::validate() const {
  detail::require(instruction_size_bytes > 0, "instruction size must be positive");
  detail::require(iram_bytes % instruction_size_bytes == 0,
                  "IRAM size must be a whole number of instructions");
  detail::require(wram_bytes > 0 && mram_bytes > 0, "memory sizes must be positive");
}

std::uint64_t MemoryConfig::iram_capacity_instructions() const {
  validate();
  return iram_bytes / instruction_size_bytes;
}

bool check_iram_fit(std::uint64_t instruction_count, const MemoryConfig& cfg) {
  return instruction_count <= cfg.iram_capacity_instructions();
}

// ---- Machine ----

Machine::Machine(MemoryConfig cfg, InstructionTrace::Mode mode) : cfg_(cfg), trace_(mode) {
  cfg_.validate();
}

InstructionTrace Machine::take_trace() {
  InstructionTrace out(trace_.mode());
  std::swap(out, trace_);
  return out;
}

Word32 Machine::exec_alu(Opcode op, Word32 a, Word32 b) {
  Word32 r = 0;
  switch (op) {
    case Opcode::ADD: r = a + b; break;
    case Opcode::SUB: r = a - b; break;
    case Opcode::AND: r = a & b; break;
    case Opcode::XOR: r = a ^ b; break;
    case Opcode::LSL: check_shift(b); r = a << b; break;
    case Opcode::LSR: check_shift(b); r = a >> b; break;
    case Opcode::MOVE: r = a; break;
    default:
      throw ContractViolation("exec_alu: " + std::string(opcode_name(op)) + " is not an ALU opcode");
  }
  trace_.record(op);
  return r;
}

Word32 Machine::exec_lsl_add(Word32 acc, Word32 src, unsigned shift) {
  check_shift(shift);
  trace_.record(Opcode::LSL_ADD);
  return acc + (src << shift);
}

Word32 Machine::exec_lsl_sub(Word32 acc, Word32 src, unsigned shift) {
  check_shift(shift);
  trace_.record(Opcode::LSL_SUB);
  return acc - (src << shift);
}

Word32 Machine::exec_cao(Word32 a) {
  trace_.record(Opcode::CAO);
  return static_cast<Word32>(std::popcount(a));
}

Word32 Machine::exec_mul_byte(ByteMulVariant variant, Signedness sign, Word32 a, Word32 b) {
  Word32 x = select_byte(a, variant.lhs);
  Word32 y = select_byte(b, variant.rhs);
  trace_.record(variant.opcode());
  if (sign == Signedness::Unsigned) return x * y;
  auto sx = static_cast<std::int32_t>(static_cast<std::int8_t>(x));
  auto sy = static_cast<std::int32_t>(static_cast<std::int8_t>(y));
  return as_word(sx * sy);
}

MulStepResult Machine::exec_mul_step(RegisterPair state, Word32 multiplicand, unsigned shift) {
  check_shift(shift);
  trace_.record(Opcode::MUL_STEP);
  if (state.low & 1u) state.high += multiplicand << shift;
  state.low >>= 1;
  return {state, state.low == 0};
}

void Machine::exec_jump() { trace_.record(Opcode::JUMP); }

bool Machine::exec_cond_jump(bool taken) {
  trace_.record(Opcode::COND_JUMP);
  return taken;
}

std::byte* Machine::wram_at(std::uint64_t addr, std::uint64_t width) {
  if (addr + width > cfg_.wram_bytes || addr + width < addr)
    throw ContractViolation("WRAM access out of range at " + std::to_string(addr));
  if (wram_.empty()) wram_.resize(cfg_.wram_bytes);
  return wram_.data() + addr;
}

Word32 Machine::load8(std::uint64_t addr) {
  auto* p = wram_at(addr, 1);
  trace_.record(Opcode::LOAD8);
  return static_cast<Word32>(std::to_integer<std::uint8_t>(*p));
}

Word32 Machine::load32(std::uint64_t addr) {
  auto* p = wram_at(addr, 4);
  trace_.record(Opcode::LOAD32);
  Word32 v;
  std::memcpy(&v, p, 4);
  return v;
}

Word64 Machine::load64(std::uint64_t addr) {
  auto* p = wram_at(addr, 8);
  trace_.record(Opcode::LOAD64);
  Word64 v;
  std::memcpy(&v, p, 8);
  return v;
}

void Machine::store8(std::uint64_t addr, Word32 value) {
  auto* p = wram_at(addr, 1);
  trace_.record(Opcode::STORE8);
  *p = static_cast<std::byte>(value & 0xFFu);
}

void Machine::store32(std::uint64_t addr, Word32 value) {
  auto* p = wram_at(addr, 4);
  trace_.record(Opcode::STORE32);
  std::memcpy(p, &value, 4);
}

void Machine::store64(std::uint64_t addr, Word64 value) {
  auto* p = wram_at(addr, 8);
  trace_.record(Opcode::STORE64);
  std::memcpy(p, &value, 8);
}

void Machine::stage_to_wram(std::uint64_t addr, std::span<const std::byte> bytes) {
  if (bytes.empty()) return;
  std::memcpy(wram_at(addr, bytes.size()), bytes.data(), bytes.size());
}

void Machine::stage_from_wram(std::uint64_t addr, std::span<std::byte> out) {
  if (out.empty()) return;
  std::memcpy(out.data(), wram_at(addr, out.size()), out.size());
}

std::span<std::byte> Machine::mram() {
  if (mram_.empty()) mram_.resize(cfg_.mram_bytes);
  return mram_;
}

}  // namespace dpusim
