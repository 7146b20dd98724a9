// Host-side cost of simulating the kernels (not modeled DPU time).

#include <benchmark/benchmark.h>

#include <random>

#include "dpusim/bsdp.hpp"
#include "dpusim/gemv.hpp"
#include "dpusim/mul_kernels.hpp"

using namespace dpusim;

namespace {

std::vector<Word32> random_words(std::size_t n) {
  std::mt19937 rng(1);
  std::vector<Word32> v(n);
  for (auto& x : v) x = rng();
  return v;
}

std::vector<std::int8_t> random_nibbles(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(-8, 7);
  std::vector<std::int8_t> v(n);
  for (auto& x : v) x = static_cast<std::int8_t>(d(rng));
  return v;
}

void BM_Mulsi3(benchmark::State& state) {
  auto w = random_words(4096);
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mulsi3(m, w[i % 4096], w[(i + 1) % 4096]));
    ++i;
  }
  state.counters["mul_steps/op"] =
      benchmark::Counter(static_cast<double>(m.trace().count(Opcode::MUL_STEP)), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Mulsi3);

void BM_DimMul(benchmark::State& state) {
  auto w = random_words(4096);
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dim_mul_int32(m, w[i % 4096], w[(i + 1) % 4096]));
    ++i;
  }
}
BENCHMARK(BM_DimMul);

void BM_BsdpDot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = transpose_to_bitplanes(random_nibbles(n, 1), Signedness::Signed);
  auto b = transpose_to_bitplanes(random_nibbles(n, 2), Signedness::Signed);
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  for (auto _ : state) benchmark::DoNotOptimize(bsdp_dot(m, a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BsdpDot)->Arg(1024)->Arg(8192);

void BM_NativeDotOptimized(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_nibbles(n, 1), b = random_nibbles(n, 2);
  Machine m(MemoryConfig{}, InstructionTrace::Mode::CountsOnly);
  for (auto _ : state) benchmark::DoNotOptimize(native_dot_optimized(m, a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_NativeDotOptimized)->Arg(1024)->Arg(8192);

void BM_GemvInt8(benchmark::State& state) {
  const std::uint64_t rows = 64, cols = static_cast<std::uint64_t>(state.range(0));
  std::mt19937 rng(3);
  std::vector<std::int8_t> mat(rows * cols), vec(cols);
  for (auto& x : mat) x = static_cast<std::int8_t>(rng());
  for (auto& x : vec) x = static_cast<std::int8_t>(rng());
  auto plan = plan_gemv(rows, cols, 4, GemvDType::Int8);
  for (auto _ : state) benchmark::DoNotOptimize(run_gemv_functional(plan, mat, vec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * cols));
}
BENCHMARK(BM_GemvInt8)->Arg(4096)->Arg(65536);

void BM_Microkernel(benchmark::State& state) {
  std::vector<std::uint8_t> buf(1 << 16);
  std::mt19937 rng(4);
  for (auto& x : buf) x = static_cast<std::uint8_t>(rng());
  MicrokernelConfig cfg{ArithOp::Mul, DType::Int8, static_cast<Variant>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(update_microkernel(buf, 3, cfg));
  state.SetLabel(std::string(to_string(cfg.variant)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(BM_Microkernel)->DenseRange(0, 3);

}  // namespace

BENCHMARK_MAIN();
