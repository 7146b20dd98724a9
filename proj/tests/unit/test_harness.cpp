#include <doctest.h>

#include <sstream>

#include "harness.hpp"

using namespace dpusim;
using namespace dpusim::bench;

namespace {

BenchConfig small(const std::string& sub) {
  BenchConfig c;
  c.subcommand = sub;
  c.seed = 42;
  c.arith.elements = 4096;
  c.arith.unrolls = {"1", "64"};
  c.bsdp.length = 1024;
  c.gemv.sizes = {"256M", "1G"};
  c.gemv.verify_size = "64K";
  c.gemv.verify_cols = 256;
  c.gemv.verify_max_dpus = 4;
  return c;
}

std::string render(const Report& r, OutputFormat f) {
  std::ostringstream os;
  write_report(os, r, f);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("sizes") {
  CHECK(parse_size("4096") == 4096);
  CHECK(parse_size("64K") == 65536);
  CHECK(parse_size("64M") == 64ull << 20);
  CHECK(parse_size("128G") == 128ull << 30);
  CHECK_THROWS_AS(parse_size("12Q"), ContractViolation);
  CHECK_THROWS_AS(parse_size("G"), ContractViolation);
  CHECK_THROWS_AS(parse_format("xml"), ContractViolation);
}

TEST_CASE("reports are deterministic and pass their oracles") {
  for (const char* sub : {"arith", "bsdp", "transfer", "gemv"}) {
    CAPTURE(sub);
    auto a = run_bench(small(sub)), b = run_bench(small(sub));
    CHECK(a.ok());
    CHECK(a.oracle_checks == b.oracle_checks);
    for (auto f : {OutputFormat::Table, OutputFormat::Json, OutputFormat::Csv})
      CHECK(render(a, f) == render(b, f));
    auto j = to_json(a);
    CHECK(j["tool"] == "dpusim");
    CHECK(j["calibration"].contains("transfer.write.aggregate_cap_gbps"));
    CHECK(j["config"]["seed"] == 42);
  }
}

TEST_CASE("csv has one line per case plus a header") {
  auto r = run_bench(small("transfer"));
  auto csv = render(r, OutputFormat::Csv);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.cases.size() + 1);
}

TEST_CASE("arith marks kernels that do not link") {
  auto c = small("arith");
  c.arith.ops = {"mul"};
  c.arith.dtypes = {"int32"};
  c.arith.variants = {"dim"};
  c.arith.unrolls = {"auto"};
  auto r = run_bench(c);
  REQUIRE(r.cases.size() == 1);
  CHECK(r.cases[0]["status"] == "does not link");
}

TEST_CASE("invalid selections are usage errors") {
  auto c = small("arith");
  c.arith.variants = {"dim"};
  c.arith.dtypes = {"int8"};
  CHECK_THROWS_AS(run_bench(c), ContractViolation);
  auto b = small("bsdp");
  b.bsdp.length = 100;
  CHECK_THROWS_AS(run_bench(b), ContractViolation);
  auto t = small("transfer");
  t.transfer.max_ranks = 41;
  CHECK_THROWS_AS(run_bench(t), ContractViolation);
  auto g = small("gemv");
  g.gemv.verify_size = "128M";
  CHECK_THROWS_AS(run_bench(g), ContractViolation);
}

}  // TEST_SUITE
