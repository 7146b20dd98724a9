#include "dpusim/mul_kernels.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace dpusim {

namespace {

// Static code outside the unrolled loop body: runtime start-up, tasklet
// barrier, MRAM staging loop and the loop-control skeleton.
constexpr std::uint64_t kFixedProgramInstructions = 96;
// Linked-in copy of the shift-and-add routine (setup, 32 steps, exit).
constexpr std::uint64_t kMulsi3RoutineInstructions = 40;

void mul_word_bytes(Machine& m, Word32 w, std::uint64_t addr, Word32 scalar) {
  m.store8(addr, m.exec_mul_byte(kSlSl, Signedness::Signed, w, scalar));
  m.store8(addr + 1, m.exec_mul_byte(kShSl, Signedness::Signed, w, scalar));
  w = m.exec_alu(Opcode::LSR, w, 16);
  m.store8(addr + 2, m.exec_mul_byte(kSlSl, Signedness::Signed, w, scalar));
  m.store8(addr + 3, m.exec_mul_byte(kShSl, Signedness::Signed, w, scalar));
}

void run_iteration(Machine& m, const MicrokernelConfig& cfg, std::uint64_t addr, Word32 scalar) {
  const bool i8 = cfg.dtype == DType::Int8;
  if (cfg.op == ArithOp::Add) {
    Word32 v = i8 ? m.load8(addr) : m.load32(addr);
    v = m.exec_alu(Opcode::ADD, v, scalar);
    i8 ? m.store8(addr, v) : m.store32(addr, v);
    return;
  }
  switch (cfg.variant) {
    case Variant::Baseline: {
      Word32 v = i8 ? m.load8(addr) : m.load32(addr);
      Word32 arg = m.exec_alu(Opcode::MOVE, i8 ? (scalar & 0xFFu) : scalar);
      m.exec_jump();
      Word32 r = mulsi3(m, v, arg);
      i8 ? m.store8(addr, r) : m.store32(addr, r);
      break;
    }
    case Variant::NI: {
      Word32 v = m.load8(addr);
      m.store8(addr, m.exec_mul_byte(kSlSl, Signedness::Signed, v, scalar));
      break;
    }
    case Variant::NIx4:
      mul_word_bytes(m, m.load32(addr), addr, scalar);
      break;
    case Variant::NIx8: {
      Word64 d = m.load64(addr);
      mul_word_bytes(m, static_cast<Word32>(d), addr, scalar);
      mul_word_bytes(m, static_cast<Word32>(d >> 32), addr + 4, scalar);
      break;
    }
    case Variant::DIM: {
      Word32 v = m.load32(addr);
      m.store32(addr, dim_mul_int32(m, v, scalar));
      break;
    }
  }
}

std::uint64_t static_body_instructions(const MicrokernelConfig& cfg) {
  if (cfg.op == ArithOp::Add) return 3;
  switch (cfg.variant) {
    case Variant::Baseline: return 4;
    case Variant::NI: return 3;
    case Variant::NIx4: return 10;
    case Variant::NIx8: return 19;
    case Variant::DIM: return 2 + 27;  // both abs branches and the negation are emitted
  }
  return 0;
}

}  // namespace

Word32 ByteDecomposition::recompose() const noexcept {
  return Word32{x[0]} | (Word32{x[1]} << 8) | (Word32{x[2]} << 16) | (Word32{x[3]} << 24);
}

ByteDecomposition decompose_abs(Word32 v) noexcept {
  ByteDecomposition d;
  d.source_sign = (v >> 31) != 0;
  Word32 u = d.source_sign ? Word32{0} - v : v;
  for (int i = 0; i < 4; ++i) d.x[i] = static_cast<std::uint8_t>(u >> (8 * i));
  return d;
}

Word32 mulsi3(Machine& m, Word32 a, Word32 b) {
  // jgtu: the smaller unsigned operand becomes the multiplier
  bool swap = m.exec_cond_jump(a < b);
  Word32 mcand = m.exec_alu(Opcode::MOVE, swap ? b : a);
  Word32 mult = m.exec_alu(Opcode::MOVE, swap ? a : b);
  RegisterPair d{mult, m.exec_alu(Opcode::MOVE, 0)};
  for (unsigned i = 0; i < 32; ++i) {
    auto step = m.exec_mul_step(d, mcand, i);
    d = step.state;
    if (step.exited) break;
  }
  Word32 r = m.exec_alu(Opcode::MOVE, d.high);
  m.exec_jump();
  return r;
}

KernelResult mulsi3(Word32 a, Word32 b) {
  Machine m;
  Word32 r = mulsi3(m, a, b);
  return {{r}, m.take_trace()};
}

KernelResult mul_int8_native(std::int8_t a, std::int8_t b) {
  Machine m;
  Word32 r = m.exec_mul_byte(kSlSl, Signedness::Signed, as_word(a), as_word(b));
  return {{r}, m.take_trace()};
}

KernelResult mul_int8_blocked(Word64 block, std::int8_t scalar, unsigned width) {
  if (width != 4 && width != 8) throw ContractViolation("blocked width must be 4 or 8");
  Machine m;
  std::byte raw[8];
  std::memcpy(raw, &block, 8);
  m.stage_to_wram(0, raw);
  Word32 s = as_word(scalar);
  if (width == 8) {
    Word64 d = m.load64(0);
    mul_word_bytes(m, static_cast<Word32>(d), 0, s);
    mul_word_bytes(m, static_cast<Word32>(d >> 32), 4, s);
  } else {
    mul_word_bytes(m, m.load32(0), 0, s);
    mul_word_bytes(m, m.load32(4), 4, s);
  }
  m.stage_from_wram(0, raw);
  Word64 out;
  std::memcpy(&out, raw, 8);
  return {{static_cast<Word32>(out), static_cast<Word32>(out >> 32)}, m.take_trace()};
}

Word32 dim_mul_int32(Machine& m, Word32 a, Word32 b) {
  constexpr auto U = Signedness::Unsigned;
  Word32 sign = m.exec_alu(Opcode::XOR, a, b);
  Word32 ua = m.exec_alu(Opcode::MOVE, a);
  if (as_signed(a) < 0) ua = m.exec_alu(Opcode::SUB, 0, a);
  Word32 ub = m.exec_alu(Opcode::MOVE, b);
  if (as_signed(b) < 0) ub = m.exec_alu(Opcode::SUB, 0, b);
  Word32 xh = m.exec_alu(Opcode::LSR, ua, 16);
  Word32 yh = m.exec_alu(Opcode::LSR, ub, 16);

  Word32 acc = m.exec_mul_byte(kSlSl, U, ua, ub);                        // x0y0
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kSlSh, U, ua, ub), 8);       // x0y1
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kShSl, U, ua, ub), 8);       // x1y0
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kSlSl, U, ua, yh), 16);      // x0y2
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kShSh, U, ua, ub), 16);      // x1y1
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kSlSl, U, xh, ub), 16);      // x2y0
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kSlSh, U, ua, yh), 24);      // x0y3
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kShSl, U, ua, yh), 24);      // x1y2
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kSlSh, U, xh, ub), 24);      // x2y1
  acc = m.exec_lsl_add(acc, m.exec_mul_byte(kShSl, U, xh, ub), 24);      // x3y0

  if (as_signed(sign) < 0) acc = m.exec_alu(Opcode::SUB, 0, acc);
  return acc;
}

KernelResult dim_mul_int32(Word32 a, Word32 b) {
  Machine m;
  Word32 r = dim_mul_int32(m, a, b);
  return {{r}, m.take_trace()};
}

std::string_view to_string(ArithOp op) noexcept { return op == ArithOp::Add ? "add" : "mul"; }
std::string_view to_string(DType t) noexcept { return t == DType::Int8 ? "int8" : "int32"; }

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::NI: return "ni";
    case Variant::NIx4: return "nix4";
    case Variant::NIx8: return "nix8";
    case Variant::DIM: return "dim";
  }
  return "?";
}

ArithOp parse_arith_op(std::string_view s) {
  if (s == "add") return ArithOp::Add;
  if (s == "mul") return ArithOp::Mul;
  throw ContractViolation("unknown op '" + std::string(s) + "'");
}

DType parse_dtype(std::string_view s) {
  if (s == "int8") return DType::Int8;
  if (s == "int32") return DType::Int32;
  throw ContractViolation("unknown dtype '" + std::string(s) + "'");
}

Variant parse_variant(std::string_view s) {
  for (auto v : {Variant::Baseline, Variant::NI, Variant::NIx4, Variant::NIx8, Variant::DIM})
    if (to_string(v) == s) return v;
  throw ContractViolation("unknown variant '" + std::string(s) + "'");
}

void validate_microkernel(const MicrokernelConfig& cfg) {
  if (cfg.op == ArithOp::Add && cfg.variant != Variant::Baseline)
    throw ContractViolation("addition only has the baseline variant");
  if (cfg.dtype == DType::Int8 && cfg.variant == Variant::DIM)
    throw ContractViolation("DIM applies to int32 only");
  if (cfg.dtype == DType::Int32 &&
      (cfg.variant == Variant::NI || cfg.variant == Variant::NIx4 || cfg.variant == Variant::NIx8))
    throw ContractViolation("native byte variants apply to int8 only");
  detail::require(cfg.block_bytes > 0 && cfg.block_bytes <= cfg.memory.wram_bytes,
                  "block must fit in WRAM");
  detail::require(cfg.block_bytes % iteration_stride_bytes(cfg) == 0,
                  "block size must be a multiple of the iteration stride");
}

std::uint32_t element_bytes(DType t) noexcept { return t == DType::Int8 ? 1 : 4; }

std::uint32_t iteration_stride_bytes(const MicrokernelConfig& cfg) {
  switch (cfg.variant) {
    case Variant::NIx4: return 4;
    case Variant::NIx8: return 8;
    default: return element_bytes(cfg.dtype);
  }
}

LoopModel microkernel_loop_model(const MicrokernelConfig& cfg) {
  // byte-stride loops fold pointer and counter into one register
  std::uint32_t overhead = iteration_stride_bytes(cfg) == 1 ? 2 : 3;
  return {overhead, cfg.unroll};
}

std::uint64_t microkernel_program_size(const MicrokernelConfig& cfg) {
  std::uint64_t iters = cfg.block_bytes / iteration_stride_bytes(cfg);
  std::uint64_t size = kFixedProgramInstructions + cfg.unroll.body_copies(iters) * static_body_instructions(cfg);
  if (cfg.op == ArithOp::Mul && cfg.variant == Variant::Baseline) size += kMulsi3RoutineInstructions;
  return size;
}

double MicrokernelResult::cycles_per_element() const noexcept {
  if (elements == 0) return 0;
  return static_cast<double>(cycles_of(trace)) / static_cast<double>(elements);
}

MicrokernelResult update_microkernel(std::span<const std::uint8_t> buffer, Word32 scalar,
                                     const MicrokernelConfig& cfg) {
  validate_microkernel(cfg);
  const std::uint32_t stride = iteration_stride_bytes(cfg);
  if (buffer.size() % stride != 0)
    throw ContractViolation("buffer length must be a multiple of " + std::to_string(stride) + " bytes");

  MicrokernelResult res;
  res.program_instructions = microkernel_program_size(cfg);
  if (!check_iram_fit(res.program_instructions, cfg.memory))
    throw IramOverflow("kernel does not link: " + std::to_string(res.program_instructions) +
                       " instructions exceed IRAM capacity of " +
                       std::to_string(cfg.memory.iram_capacity_instructions()));

  res.buffer.assign(buffer.begin(), buffer.end());
  res.elements = buffer.size() / element_bytes(cfg.dtype);

  Machine m(cfg.memory, InstructionTrace::Mode::CountsOnly);
  const LoopModel loop = microkernel_loop_model(cfg);
  for (std::size_t off = 0; off < res.buffer.size(); off += cfg.block_bytes) {
    std::size_t len = std::min<std::size_t>(cfg.block_bytes, res.buffer.size() - off);
    auto block = std::as_writable_bytes(std::span(res.buffer).subspan(off, len));
    m.stage_to_wram(0, block);
    const std::uint64_t iters = len / stride;
    for (std::uint64_t i = 0; i < iters; ++i) run_iteration(m, cfg, i * stride, scalar);
    emit_loop_control(m, loop.trips(iters), loop.control_overhead_per_iteration);
    m.stage_from_wram(0, block);
  }
  res.trace = m.take_trace();

  double cycles = static_cast<double>(cycles_of(res.trace));
  if (cfg.op == ArithOp::Mul && cfg.variant == Variant::Baseline && res.elements > 0) {
    double max_steps = cfg.dtype == DType::Int8 ? 8 : 32;
    cycles += static_cast<double>(res.elements) * max_steps -
              static_cast<double>(res.trace.count(Opcode::MUL_STEP));
  }
  res.worst_case_cycles_per_element = res.elements ? cycles / static_cast<double>(res.elements) : 0;
  return res;
}

}  // namespace dpusim
