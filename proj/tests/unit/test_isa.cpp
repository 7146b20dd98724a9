#include <doctest.h>

#include <bit>
#include <random>

#include "dpusim/isa.hpp"

using namespace dpusim;

TEST_SUITE("isa") {

TEST_CASE("alu wraps and shifts") {
  Machine m;
  CHECK(m.exec_alu(Opcode::ADD, 0xFFFFFFFFu, 1) == 0u);
  CHECK(m.exec_alu(Opcode::AND, 0b1100, 0b1010) == 0b1000u);
  CHECK(m.exec_alu(Opcode::LSR, 0x80000000u, 31) == 1u);
  CHECK(m.exec_alu(Opcode::LSL, 1, 31) == 0x80000000u);
  CHECK(m.exec_alu(Opcode::XOR, 0xF0F0u, 0xFFFFu) == 0x0F0Fu);
  CHECK(m.exec_alu(Opcode::SUB, 0, 1) == 0xFFFFFFFFu);
  CHECK(m.exec_alu(Opcode::MOVE, 42, 7) == 42u);
  CHECK(m.trace().total_instructions() == 7);
}

TEST_CASE("shift range is enforced") {
  Machine m;
  CHECK_THROWS_AS(m.exec_alu(Opcode::LSL, 1, 32), ContractViolation);
  CHECK_THROWS_AS(m.exec_alu(Opcode::LSR, 1, 99), ContractViolation);
  CHECK_THROWS_AS(m.exec_lsl_add(0, 1, 32), ContractViolation);
  CHECK_THROWS_AS(m.exec_mul_step({1, 0}, 1, 32), ContractViolation);
  CHECK_THROWS_AS(m.exec_alu(Opcode::CAO, 1, 1), ContractViolation);
  CHECK(m.trace().empty());
}

TEST_CASE("lsl_add examples") {
  Machine m;
  CHECK(m.exec_lsl_add(0, 3, 2) == 12u);
  CHECK(m.exec_lsl_add(10, 0, 5) == 10u);
  CHECK(m.exec_lsl_add(0xFFFFFFF0u, 1, 4) == 0u);
  CHECK(m.exec_lsl_sub(12, 3, 2) == 0u);
  CHECK(m.trace().count(Opcode::LSL_ADD) == 3);
  CHECK(m.trace().count(Opcode::LSL_SUB) == 1);
}

TEST_CASE("cao examples and complement property") {
  Machine m;
  CHECK(m.exec_cao(0) == 0u);
  CHECK(m.exec_cao(0xFFFFFFFFu) == 32u);
  CHECK(m.exec_cao(0xA5A5A5A5u) == 16u);
  std::mt19937 rng(7);
  for (int i = 0; i < 10000; ++i) {
    Word32 a = rng();
    CHECK(m.exec_cao(a) + m.exec_cao(~a) == 32u);
  }
}

TEST_CASE("byte multiply examples") {
  Machine m;
  CHECK(m.exec_mul_byte(kSlSl, Signedness::Signed, 7, 3) == 21u);
  CHECK(m.exec_mul_byte(kSlSl, Signedness::Signed, 0xFF, 2) == 0xFFFFFFFEu);
  // high lane is bits 8..15
  CHECK(m.exec_mul_byte(kShSl, Signedness::Unsigned, 0x0000C800u, 2) == 400u);
  CHECK(m.exec_mul_byte(kShSl, Signedness::Unsigned, 0x00C80000u, 2) == 0u);
  CHECK(m.exec_mul_byte(kSlSh, Signedness::Unsigned, 5, 0x0300) == 15u);
  CHECK(m.exec_mul_byte(kShSh, Signedness::Signed, 0xFF00, 0x8000) == 128u);
  CHECK(m.trace().count(Opcode::MUL_SL_SL) == 2);
  CHECK(m.trace().count(Opcode::MUL_SH_SL) == 2);
  CHECK(m.trace().count(Opcode::MUL_SL_SH) == 1);
  CHECK(m.trace().count(Opcode::MUL_SH_SH) == 1);
}

TEST_CASE("byte multiply is exhaustive over all byte pairs") {
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  for (Word32 x = 0; x < 256; ++x)
    for (Word32 y = 0; y < 256; ++y) {
      // noise in the unused bytes must not matter
      Word32 a = x | 0xABCD0000u, b = y | 0x12340000u;
      REQUIRE(m.exec_mul_byte(kSlSl, Signedness::Unsigned, a, b) == x * y);
      REQUIRE(m.exec_mul_byte(kShSh, Signedness::Unsigned, a << 8, b << 8) == x * y);
      int sx = static_cast<std::int8_t>(x), sy = static_cast<std::int8_t>(y);
      REQUIRE(as_signed(m.exec_mul_byte(kSlSl, Signedness::Signed, a, b)) == sx * sy);
      REQUIRE(as_signed(m.exec_mul_byte(kShSl, Signedness::Signed, a << 8, b)) == sx * sy);
    }
  CHECK(m.trace().total_instructions() == 4 * 65536);
}

TEST_CASE("mul_step examples") {
  Machine m;
  auto s1 = m.exec_mul_step({5, 0}, 3, 0);
  CHECK(s1.state == RegisterPair{2, 3});
  CHECK_FALSE(s1.exited);
  auto s2 = m.exec_mul_step(s1.state, 3, 1);
  CHECK(s2.state == RegisterPair{1, 3});
  CHECK_FALSE(s2.exited);
  auto s3 = m.exec_mul_step(s2.state, 3, 2);
  CHECK(s3.state == RegisterPair{0, 15});
  CHECK(s3.exited);
  CHECK(m.trace().count(Opcode::MUL_STEP) == 3);
}

TEST_CASE("chained mul_step multiplies on random pairs") {
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000000; ++i) {
    Word32 a = static_cast<Word32>(rng()), b = static_cast<Word32>(rng() >> (rng() % 32));
    RegisterPair d{b, 0};
    for (unsigned s = 0; s < 32; ++s) {
      auto r = m.exec_mul_step(d, a, s);
      d = r.state;
      if (r.exited) break;
    }
    if (d.high != static_cast<Word32>(std::uint64_t{a} * b)) {
      FAIL("mismatch for a=" << a << " b=" << b);
    }
  }
}

TEST_CASE("iram fit") {
  MemoryConfig cfg;
  CHECK(cfg.iram_capacity_instructions() == 4096);
  CHECK(check_iram_fit(0));
  CHECK(check_iram_fit(4096));
  CHECK_FALSE(check_iram_fit(4097));
  MemoryConfig eight{.instruction_size_bytes = 8};
  CHECK(eight.iram_capacity_instructions() == 3072);
  CHECK_FALSE(check_iram_fit(3073, eight));
  MemoryConfig bad{.instruction_size_bytes = 7};
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("trace run-length encoding and totals") {
  InstructionTrace t;
  t.record(Opcode::ADD);
  t.record(Opcode::ADD);
  t.record(Opcode::LOAD8, 3);
  t.record(Opcode::ADD);
  REQUIRE(t.entries().size() == 3);
  CHECK(t.entries()[0] == InstructionTrace::Entry{Opcode::ADD, 2});
  CHECK(t.entries()[1] == InstructionTrace::Entry{Opcode::LOAD8, 3});
  std::uint64_t sum = 0;
  for (const auto& e : t.entries()) sum += e.count;
  CHECK(sum == t.total_instructions());
  CHECK(t.count(Opcode::ADD) == 3);

  InstructionTrace big(InstructionTrace::Mode::CountsOnly);
  big.append(t, 1000);
  CHECK(big.total_instructions() == 6000);
  CHECK(big.entries().empty());
}

TEST_CASE("every exec appends exactly one instruction") {
  Machine m;
  std::uint64_t before = 0;
  auto step = [&] {
    CHECK(m.trace().total_instructions() == before + 1);
    before = m.trace().total_instructions();
  };
  m.exec_alu(Opcode::ADD, 1, 2); step();
  m.exec_lsl_add(1, 2, 3); step();
  m.exec_cao(5); step();
  m.exec_mul_byte(kSlSl, Signedness::Signed, 1, 2); step();
  m.exec_mul_step({3, 0}, 1, 0); step();
  m.exec_jump(); step();
  m.exec_cond_jump(true); step();
  m.store32(16, 0xDEADBEEF); step();
  CHECK(m.load32(16) == 0xDEADBEEFu); step();
  CHECK(m.load8(16) == 0xEFu); step();
  m.store64(24, 0x0102030405060708ull); step();
  CHECK(m.load64(24) == 0x0102030405060708ull); step();
  m.store8(40, 0x1FF); step();
  CHECK(m.load8(40) == 0xFFu); step();
}

TEST_CASE("wram bounds and staging") {
  Machine m;
  CHECK_THROWS_AS(m.load32(65534), ContractViolation);
  std::byte data[4] = {std::byte{1}, std::byte{2}, std::byte{3}, std::byte{4}};
  m.stage_to_wram(100, data);
  CHECK(m.trace().empty());
  CHECK(m.load32(100) == 0x04030201u);
  CHECK(m.mram().size() == 64u << 20);
}

}  // TEST_SUITE
