#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dpusim/config.hpp"

using namespace dpusim;

TEST_SUITE("config") {

TEST_CASE("empty text gives defaults") {
  auto c = parse_model_config("# nothing\n\n");
  CHECK(c.pipeline.saturation_tasklets == 11);
  CHECK(c.topology.total_dpus() == 2551);
  CHECK(c.transfer.write.aggregate_cap_gbps == 36.0);
}

TEST_CASE("keys override defaults") {
  auto c = parse_model_config("pipeline.frequency_hz = 350e6  # slower part\n"
                              "transfer.read.cross_numa_penalty=0.5\n"
                              "topology.disabled_dpus = 0\n");
  CHECK(c.pipeline.frequency_hz == 350e6);
  CHECK(c.transfer.read.cross_numa_penalty == 0.5);
  CHECK(c.topology.total_dpus() == 2560);
}

TEST_CASE("errors name the line") {
  try {
    parse_model_config("pipeline.stages = 14\nbogus.key = 1\n", "x.conf");
    FAIL("expected an error");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("x.conf:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model_config("pipeline.stages = fourteen\n"), ContractViolation);
  CHECK_THROWS_AS(parse_model_config("pipeline.stages\n"), ContractViolation);
  CHECK_THROWS_AS(parse_model_config("pipeline.saturation_tasklets = 20\n"), ContractViolation);
  CHECK_THROWS_AS(load_model_config("/nonexistent/dpusim.conf"), ContractViolation);
}

TEST_CASE("entries round trip") {
  ModelConfig c;
  c.transfer.write.dimm_rate_gbps = 11.5;
  c.memory.wram_bytes = 1 << 15;
  std::string text;
  for (const auto& [k, v] : c.entries()) text += k + " = " + v + "\n";
  auto back = parse_model_config(text);
  CHECK(back.entries() == c.entries());
}

TEST_CASE("shipped calibration file equals the defaults") {
  auto path = std::filesystem::path(DPUSIM_SOURCE_DIR) / "config" / "default_calibration.conf";
  REQUIRE(std::filesystem::exists(path));
  CHECK(load_model_config(path).entries() == ModelConfig{}.entries());
}

}  // TEST_SUITE
