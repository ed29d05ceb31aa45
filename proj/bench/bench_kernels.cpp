#include <benchmark/benchmark.h>

#include <vector>

#include "pgadget/kernels.hpp"

namespace {

using pgadget::CMatrix;
using pgadget::Complex;

// A coupling term h (x) |T><T| on (system qubit, clock of length L), embedded
// into system (x) clock (x) clock.
struct EmbedCase {
  std::vector<int> dims;
  std::vector<int> support{0, 1};
  CMatrix block;

  explicit EmbedCase(int length) : dims{2, length, length} {
    block = CMatrix::Random(2 * length, 2 * length);
    block = (block + block.adjoint()).eval();
  }
};

void BM_EmbedParallel(benchmark::State& state) {
  EmbedCase c(static_cast<int>(state.range(0)));
  const auto n = static_cast<Eigen::Index>(2 * state.range(0) * state.range(0));
  CMatrix out = CMatrix::Zero(n, n);
  for (auto _ : state) {
    pgadget::kernels::embed_accumulate(c.dims, c.support, c.block, Complex(1.0), out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EmbedSerial(benchmark::State& state) {
  EmbedCase c(static_cast<int>(state.range(0)));
  const auto n = static_cast<Eigen::Index>(2 * state.range(0) * state.range(0));
  CMatrix out = CMatrix::Zero(n, n);
  for (auto _ : state) {
    pgadget::kernels::serial::embed_accumulate(c.dims, c.support, c.block, Complex(1.0), out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_TripletsParallel(benchmark::State& state) {
  EmbedCase c(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pgadget::kernels::embed_triplets(c.dims, c.support, c.block, Complex(1.0)));
}

void BM_TripletsSerial(benchmark::State& state) {
  EmbedCase c(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(pgadget::kernels::serial::embed_triplets(c.dims, c.support, c.block, Complex(1.0)));
}

void BM_TilingParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pgadget::kernels::tiling_diagonal(static_cast<int>(state.range(0))));
}

void BM_TilingSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(pgadget::kernels::serial::tiling_diagonal(static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_EmbedParallel)->Arg(8)->Arg(16)->Arg(20);
BENCHMARK(BM_EmbedSerial)->Arg(8)->Arg(16);
BENCHMARK(BM_TripletsParallel)->Arg(16)->Arg(32);
BENCHMARK(BM_TripletsSerial)->Arg(16)->Arg(32);
BENCHMARK(BM_TilingParallel)->Arg(6)->Arg(10);
BENCHMARK(BM_TilingSerial)->Arg(6)->Arg(10);

BENCHMARK_MAIN();
