#include <doctest.h>

#include <filesystem>
#include <random>

#include "dpusim/bsdp.hpp"

using namespace dpusim;

namespace {

std::vector<std::int8_t> random_int4(std::size_t n, Signedness s, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(s == Signedness::Signed ? -8 : 0, s == Signedness::Signed ? 7 : 15);
  std::vector<std::int8_t> v(n);
  for (auto& x : v) x = static_cast<std::int8_t>(d(rng));
  return v;
}

std::int64_t naive_dot(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::int64_t{a[i]} * b[i];
  return s;
}

std::int32_t dot(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b, Signedness s,
                 const BsdpConfig& cfg = {}) {
  auto r = bsdp_dot(transpose_to_bitplanes(a, s), transpose_to_bitplanes(b, s), cfg);
  return as_signed(r.outputs[0]);
}

}  // namespace

TEST_SUITE("bsdp") {

TEST_CASE("transpose layout is lsb-first") {
  std::vector<std::int8_t> v(32, 0);
  v[0] = 1;
  v[1] = 2;
  v[31] = 15;
  auto p = transpose_to_bitplanes(v, Signedness::Unsigned);
  CHECK(p.blocks() == 1);
  CHECK(p.planes[0][0] == 0x80000001u);
  CHECK(p.planes[1][0] == 0x80000002u);
  CHECK(p.planes[3][0] == 0x80000000u);
  CHECK(p.element(1) == 2);
  CHECK(p.element(31) == 15);
}

TEST_CASE("transpose round trip") {
  std::mt19937 rng(1);
  for (auto s : {Signedness::Unsigned, Signedness::Signed}) {
    auto v = random_int4(32 * 17, s, rng);
    CHECK(transpose_to_bitplanes(v, s).reconstruct() == v);
  }
}

TEST_CASE("transpose rejects bad input") {
  std::vector<std::int8_t> v(33, 0);
  CHECK_THROWS_AS(transpose_to_bitplanes(v, Signedness::Unsigned), ContractViolation);
  std::vector<std::int8_t> big(32, 0);
  big[3] = 16;
  CHECK_THROWS_AS(transpose_to_bitplanes(big, Signedness::Unsigned), ContractViolation);
  big[3] = 8;
  CHECK_THROWS_AS(transpose_to_bitplanes(big, Signedness::Signed), ContractViolation);
  big[3] = -1;
  CHECK_THROWS_AS(transpose_to_bitplanes(big, Signedness::Unsigned), ContractViolation);
}

TEST_CASE("dot product examples") {
  std::vector<std::int8_t> ones(32, 1), fifteen(32, 15), zeros(32, 0);
  CHECK(dot(ones, ones, Signedness::Unsigned) == 32);
  CHECK(dot(fifteen, fifteen, Signedness::Unsigned) == 7200);
  CHECK(dot(zeros, fifteen, Signedness::Unsigned) == 0);
  std::vector<std::int8_t> m8(32, -8), p7(32, 7), m1(32, -1);
  CHECK(dot(m8, m8, Signedness::Signed) == 2048);
  CHECK(dot(m8, p7, Signedness::Signed) == -1792);
  CHECK(dot(m1, ones, Signedness::Signed) == -32);
}

TEST_CASE("matches naive dot product") {
  std::mt19937 rng(2);
  for (auto s : {Signedness::Unsigned, Signedness::Signed})
    for (std::size_t blocks : {1u, 2u, 7u, 8u, 9u, 64u, 257u}) {
      auto a = random_int4(32 * blocks, s, rng), b = random_int4(32 * blocks, s, rng);
      REQUIRE(dot(a, b, s) == naive_dot(a, b));
      BsdpConfig paired;
      paired.schedule = BsdpLoadSchedule::Paired64;
      REQUIRE(dot(a, b, s, paired) == naive_dot(a, b));
    }
}

TEST_CASE("exhaustive over constant blocks") {
  for (auto s : {Signedness::Unsigned, Signedness::Signed}) {
    int lo = s == Signedness::Signed ? -8 : 0, hi = lo + 15;
    for (int x = lo; x <= hi; ++x)
      for (int y = lo; y <= hi; ++y) {
        std::vector<std::int8_t> a(32, static_cast<std::int8_t>(x)), b(32, static_cast<std::int8_t>(y));
        REQUIRE(dot(a, b, s) == 32 * x * y);
      }
  }
}

TEST_CASE("bilinearity") {
  std::mt19937 rng(3);
  // keep sums inside the unsigned int4 range
  std::uniform_int_distribution<int> d(0, 7);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int8_t> a1(256), a2(256), sum(256), b(256);
    for (int i = 0; i < 256; ++i) {
      a1[i] = static_cast<std::int8_t>(d(rng));
      a2[i] = static_cast<std::int8_t>(d(rng));
      sum[i] = static_cast<std::int8_t>(a1[i] + a2[i]);
      b[i] = static_cast<std::int8_t>(d(rng) * 2);
    }
    auto s = Signedness::Unsigned;
    REQUIRE(dot(sum, b, s) == dot(a1, b, s) + dot(a2, b, s));
    REQUIRE(dot(a1, b, s) == dot(b, a1, s));
  }
}

TEST_CASE("signed and unsigned agree on non-negative inputs") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> d(0, 7);
  std::vector<std::int8_t> a(512), b(512);
  for (int i = 0; i < 512; ++i) {
    a[i] = static_cast<std::int8_t>(d(rng));
    b[i] = static_cast<std::int8_t>(d(rng));
  }
  CHECK(dot(a, b, Signedness::Signed) == dot(a, b, Signedness::Unsigned));
}

TEST_CASE("instruction count is data independent and affine in blocks") {
  std::mt19937 rng(5);
  auto count = [&](std::size_t blocks, Signedness s) {
    auto a = random_int4(32 * blocks, s, rng), b = random_int4(32 * blocks, s, rng);
    return bsdp_dot(transpose_to_bitplanes(a, s), transpose_to_bitplanes(b, s)).trace.total_instructions();
  };
  for (auto s : {Signedness::Unsigned, Signedness::Signed}) {
    CHECK(count(16, s) == count(16, s));
    auto c8 = count(8, s), c16 = count(16, s), c24 = count(24, s), c80 = count(80, s);
    CHECK(c16 - c8 == c24 - c16);
    CHECK(c80 - c8 == 9 * (c16 - c8));
    CHECK(c16 - c8 == 8 * bsdp_block_instructions(BsdpLoadSchedule::Reload32) + 3);
  }
  CHECK(bsdp_block_instructions(BsdpLoadSchedule::Reload32) == 68);
  CHECK(bsdp_loads_per_block(BsdpLoadSchedule::Reload32) == 20);
  CHECK(bsdp_loads_per_block(BsdpLoadSchedule::Paired64) == 4);
}

TEST_CASE("cost per element against native byte dot products") {
  std::mt19937 rng(6);
  const std::size_t n = 8192;
  auto a = random_int4(n, Signedness::Signed, rng), b = random_int4(n, Signedness::Signed, rng);
  auto bs = bsdp_dot(transpose_to_bitplanes(a, Signedness::Signed), transpose_to_bitplanes(b, Signedness::Signed));
  auto base = native_dot_baseline(a, b);
  auto opt = native_dot_optimized(a, b);
  CHECK(as_signed(base.outputs[0]) == naive_dot(a, b));
  CHECK(as_signed(opt.outputs[0]) == naive_dot(a, b));
  CHECK(as_signed(bs.outputs[0]) == naive_dot(a, b));
  double cb = double(cycles_of(bs.trace)) / n;
  double c0 = double(cycles_of(base.trace)) / n;
  double c1 = double(cycles_of(opt.trace)) / n;
  CHECK(cb < c1);
  CHECK(c1 < c0);
}

TEST_CASE("exact mode bound") {
  CHECK(bsdp_exact_max_elements() == (0x7FFFFFFFull / 225));
  BitPlaneVector huge;
  huge.length = (bsdp_exact_max_elements() / 32 + 1) * 32;
  for (auto& p : huge.planes) p.assign(huge.length / 32, 0);
  CHECK_THROWS_AS(bsdp_dot(huge, huge), ContractViolation);
}

TEST_CASE("mismatched operands are rejected") {
  std::vector<std::int8_t> a(32, 1), b(64, 1);
  auto pa = transpose_to_bitplanes(a, Signedness::Unsigned);
  CHECK_THROWS_AS(bsdp_dot(pa, transpose_to_bitplanes(b, Signedness::Unsigned)), ContractViolation);
  CHECK_THROWS_AS(bsdp_dot(pa, transpose_to_bitplanes(a, Signedness::Signed)), ContractViolation);
}

TEST_CASE("encode and decode") {
  std::mt19937 rng(7);
  auto v = random_int4(96, Signedness::Signed, rng);
  auto p = transpose_to_bitplanes(v, Signedness::Signed);
  auto bytes = encode_bitplanes(p);
  CHECK(bytes.size() == 16 + 3 * 4 * 4);
  CHECK(bytes[0] == 0x42);
  CHECK(bytes[3] == 0x50);
  CHECK(decode_bitplanes(bytes).reconstruct() == v);

  auto bad = bytes;
  bad[0] ^= 1;
  CHECK_THROWS_AS(decode_bitplanes(bad), ContractViolation);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_bitplanes(bytes), ContractViolation);

  auto path = std::filesystem::temp_directory_path() / "dpusim_bitplanes_test.bin";
  save_bitplanes(path, p);
  CHECK(load_bitplanes(path).reconstruct() == v);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
