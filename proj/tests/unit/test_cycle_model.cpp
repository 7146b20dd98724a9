#include <doctest.h>

#include "dpusim/cycle_model.hpp"

using namespace dpusim;

TEST_SUITE("cycle_model") {

TEST_CASE("throughput examples") {
  CHECK(throughput_mops(5.0, 11).mops == doctest::Approx(80.0));
  CHECK(throughput_mops(3.0, 11).mops == doctest::Approx(133.333).epsilon(1e-4));
  CHECK(throughput_mops(5.0, 16).mops == doctest::Approx(80.0));
  CHECK(throughput_mops(5.0, 1).mops == doctest::Approx(80.0 / 11));
}

TEST_CASE("tasklet sweep rises then plateaus") {
  auto sweep = tasklet_sweep(4.0);
  REQUIRE(sweep.size() == 16);
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].mops >= sweep[i - 1].mops);
  for (std::size_t i = 10; i < sweep.size(); ++i) CHECK(sweep[i].mops == doctest::Approx(sweep[10].mops));
  CHECK(sweep[9].mops < sweep[10].mops);
}

TEST_CASE("speedup is independent of tasklet count") {
  for (unsigned t = 1; t <= 16; ++t) {
    auto a = throughput_mops(14.0, t), b = throughput_mops(2.75, t);
    CHECK(speedup(a, b) == doctest::Approx(14.0 / 2.75));
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(throughput_mops(0.0, 11), ContractViolation);
  CHECK_THROWS_AS(throughput_mops(1.0, 0), ContractViolation);
  CHECK_THROWS_AS(throughput_mops(1.0, 17), ContractViolation);
  PipelineConfig bad;
  bad.frequency_hz = 0;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("unroll parsing and loop model") {
  CHECK(Unroll::parse("auto").is_full());
  CHECK(Unroll::parse("full").is_full());
  CHECK(Unroll::parse("64") == Unroll::by(64));
  CHECK_THROWS_AS(Unroll::parse("0"), ContractViolation);
  CHECK_THROWS_AS(Unroll::parse("x"), ContractViolation);
  CHECK(Unroll::by(1).label() == "none");
  CHECK(Unroll::by(64).label() == "x64");
  CHECK(Unroll::full().label() == "auto");

  LoopModel rolled{2, Unroll::by(1)};
  CHECK(rolled.trips(1024) == 1024);
  CHECK(rolled.control_instructions(1024) == 2048);
  CHECK(rolled.overhead_per_iteration(1024) == doctest::Approx(2.0));
  LoopModel x64{3, Unroll::by(64)};
  CHECK(x64.trips(1024) == 16);
  CHECK(x64.trips(1000) == 16);
  CHECK(x64.overhead_per_iteration(1024) == doctest::Approx(3.0 / 64));
  LoopModel full{2, Unroll::full()};
  CHECK(full.trips(1024) == 1);
  CHECK(Unroll::full().body_copies(1024) == 1024);
  CHECK(Unroll::by(64).body_copies(1024) == 64);
  CHECK(Unroll::by(64).body_copies(10) == 10);
}

TEST_CASE("loop control emission") {
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  emit_loop_control(m, 10, 3);
  CHECK(m.trace().total_instructions() == 30);
  CHECK(m.trace().count(Opcode::COND_JUMP) == 10);
  CHECK(m.trace().count(Opcode::ADD) == 20);
  CHECK(cycles_of(m.trace()) == 30);
}

TEST_CASE("saturation time") {
  CHECK(seconds_at_saturation(400'000'000) == doctest::Approx(1.0));
}

}  // TEST_SUITE
