// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "clothfit/fitting.hpp"
#include "clothfit/rendering.hpp"
#include "clothfit/representations.hpp"
#include "clothfit/tailoring.hpp"

namespace {

using namespace clothfit;

const BodyModel& toy() {
  static const BodyModel model = make_toy_model(ToyModelSpec{});
  return model;
}

struct Scene {
  BodyParams gt;
  BodyParams init;
  RepBundle bundle;
  PosedBody posed;
};

Scene scene(int size) {
  const BodyParams gt = sample_ground_truth(toy(), 1, size);
  const BodyParams init = perturb_params(gt, 2);
  return {gt, init, synthesize_targets(toy(), gt, size, size), forward(toy(), init.beta, init.theta)};
}

void BM_Forward(benchmark::State& state) {
  const BodyParams p = sample_ground_truth(toy(), 1, 128);
  for (auto _ : state) benchmark::DoNotOptimize(forward(toy(), p.beta, p.theta));
}
BENCHMARK(BM_Forward);

void BM_RasterizeHard(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Scene s = scene(size);
  const Camera cam = Camera::from_params(s.init, size, size);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_hard(s.posed.vertices, toy().faces(), cam));
}
BENCHMARK(BM_RasterizeHard)->Arg(128)->Arg(256);

void BM_RasterizeSoft(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Scene s = scene(size);
  const Camera cam = Camera::from_params(s.init, size, size);
  const double sigma = default_soft_sigma(size);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_soft(s.posed.vertices, toy().faces(), cam, sigma));
}
BENCHMARK(BM_RasterizeSoft)->Arg(128)->Arg(256);

void BM_ObjectiveGradient(benchmark::State& state) {
  const Scene s = scene(128);
  FitConfig cfg;
  cfg.soft_sigma = default_soft_sigma(128);
  for (auto _ : state) benchmark::DoNotOptimize(objective_gradient(toy(), s.bundle, s.init, ParamMask::all(), cfg));
}
BENCHMARK(BM_ObjectiveGradient)->Unit(benchmark::kMillisecond);

void BM_Fit40(benchmark::State& state) {
  const Scene s = scene(128);
  FitConfig cfg;
  cfg.soft_sigma = default_soft_sigma(128);
  for (auto _ : state) benchmark::DoNotOptimize(fit(toy(), s.bundle, s.init, cfg));
}
BENCHMARK(BM_Fit40)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_BlurDown16(benchmark::State& state) {
  Image matte = Image::Zero(512, 512);
  matte.block(128, 160, 256, 192) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(blur_down16(matte));
}
BENCHMARK(BM_BlurDown16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
