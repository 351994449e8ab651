#include <benchmark/benchmark.h>

#include <vector>

#include "lbpopt/dataset.hpp"
#include "lbpopt/features.hpp"
#include "lbpopt/lbp.hpp"
#include "lbpopt/linalg.hpp"
#include "lbpopt/transform.hpp"

using namespace lbpopt;

namespace {

const Corpus& corpus() {
  static const Corpus c = [] {
    const std::vector<Recipe> recipes{Recipe::horizontal_edges, Recipe::flat_noise};
    return generate_synthetic(recipes, 100, 64, 42);
  }();
  return c;
}

const std::vector<GrayImage>& images() {
  static const std::vector<GrayImage> imgs = corpus().flat_images();
  return imgs;
}

const std::vector<LbpCodeMap>& code_maps() {
  static const std::vector<LbpCodeMap> maps = encode_images(images(), Exec::serial);
  return maps;
}

const DenseMatrix& difference() {
  static const DenseMatrix d = [] {
    const auto& maps = code_maps();
    const std::size_t half = maps.size() / 2;
    const std::span<const LbpCodeMap> all(maps);
    return class_difference(mean_E(all.first(half), Exec::serial), mean_E(all.subspan(half), Exec::serial)).values;
  }();
  return d;
}

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_EncodeImages(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(encode_images(images(), policy(state)));
  label(state);
}

void BM_MeanE(benchmark::State& state) {
  const std::span<const LbpCodeMap> maps(code_maps());
  for (auto _ : state) benchmark::DoNotOptimize(mean_E(maps, policy(state)));
  label(state);
}

void BM_Gram(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gram(difference(), policy(state)));
  label(state);
}

void BM_ExtractBatch(benchmark::State& state) {
  const TransformSet set{Method::optimal, corpus().classes, {fit_optimal_transforms({64, difference()}, 16)}};
  for (auto _ : state) benchmark::DoNotOptimize(extract_batch(images(), set, policy(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_EncodeImages)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanE)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
