// Micro benchmarks at SBI-like sizes (320x240 frames).

#include <random>

#include <benchmark/benchmark.h>

#include "dmdbg/dmd.hpp"
#include "dmdbg/imaging.hpp"
#include "dmdbg/metrics.hpp"
#include "dmdbg/pipeline.hpp"
#include "dmdbg/synth.hpp"

namespace {

constexpr int kRows = 240;
constexpr int kCols = 320;

Eigen::MatrixXd random_snapshots(Eigen::Index frames) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  Eigen::MatrixXd p(Eigen::Index{3} * kRows * kCols, frames);
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, j) = dist(rng);
  return p;
}

dmdbg::FrameSequence moving_square(int frames) {
  dmdbg::SynthOptions options;
  options.frames = frames;
  options.width = kCols;
  options.height = kRows;
  return dmdbg::make_sequence(dmdbg::synthesize(options).frames);
}

void BM_CrossGram(benchmark::State& state) {
  const Eigen::MatrixXd p = random_snapshots(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dmdbg::cross_gram(p, p));
}
BENCHMARK(BM_CrossGram)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const Eigen::MatrixXd p = random_snapshots(state.range(0));
  const dmdbg::DmdOptions options{dmdbg::kDefaultRankTol, dmdbg::kDefaultDeltaT, false};
  for (auto _ : state) benchmark::DoNotOptimize(dmdbg::decompose(p, options));
}
BENCHMARK(BM_Decompose)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ExtractBackground(benchmark::State& state) {
  const dmdbg::FrameSequence seq = moving_square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dmdbg::extract_background(seq));
}
BENCHMARK(BM_ExtractBackground)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_MedianBaseline(benchmark::State& state) {
  const dmdbg::FrameSequence seq = moving_square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dmdbg::median_baseline(seq));
}
BENCHMARK(BM_MedianBaseline)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Cqm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> byte(0, 255);
  dmdbg::Frame a(kRows, kCols), b(kRows, kCols);
  for (auto& v : a.rgb) v = static_cast<std::uint8_t>(byte(rng));
  for (auto& v : b.rgb) v = static_cast<std::uint8_t>(byte(rng));
  for (auto _ : state) benchmark::DoNotOptimize(dmdbg::cqm(a, b));
}
BENCHMARK(BM_Cqm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
