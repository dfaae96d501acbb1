// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <cstdio>
#include <memory>
#include <random>

#include "clothfit/body_model.hpp"
#include "clothfit/errors.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/representations.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

struct Synth {
  std::uint64_t seed = 0;
  int count = 1;
  int render_size = 128;
  bool heatmaps = false;
  int jobs = 1;
  std::string model;
  std::string out;
  std::string config;
  OptionSet options;

  explicit Synth(CLI::App* app) : options(app) {
    options.add("seed", seed, "Run seed");
    options.add("count", count, "Number of scenes");
    options.add("render-size", render_size, "Square render size in pixels");
    options.flag("heatmaps", heatmaps, "Also store Gaussian joint heatmaps");
    options.add("jobs", jobs, "Scenes generated in parallel");
    options.add("model", model, "Body model JSON (default: the procedural toy model)");
    options.add("out", out, "Output directory");
    app->add_option("--config", config, "JSON file with option values");
  }

  int run() {
    options.resolve();
    if (out.empty()) throw ValidationError("synth: --out is required");
    if (count < 1) throw ValidationError("synth: --count must be at least 1");
    if (render_size < 16) throw ValidationError("synth: --render-size must be at least 16");
    const BodyModel body = model.empty() ? make_toy_model(ToyModelSpec{}) : io::load_model(model);
    const fs::path root(out);
    ensure_dir(root);
    io::save_model(root / "model.json", body);

    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> seeds;
    for (int i = 0; i < count; ++i) {
      const std::uint64_t gt_seed = rng();
      const std::uint64_t init_seed = rng();
      seeds.emplace_back(gt_seed, init_seed);
    }
    SynthOptions synth_options;
    synth_options.heatmaps = heatmaps;
    parallel_for(count, jobs, [&](int i) {
      char name[32];
      std::snprintf(name, sizeof name, "scene_%04d", i);
      const fs::path dir = root / name;
      ensure_dir(dir / "bundle");
      const BodyParams gt = sample_ground_truth(body, seeds[i].first, render_size);
      const BodyParams init = perturb_params(gt, seeds[i].second);
      save_bundle(synthesize_targets(body, gt, render_size, render_size, synth_options), dir / "bundle");
      io::save_params(dir / "gt_params.json", gt);
      io::save_params(dir / "init_params.json", init);
    });
    write_config(root, "synth", options.dump());
    std::printf("synth: wrote %d scene(s) to %s\n", count, root.string().c_str());
    return 0;
  }
};

}  // namespace

Runner add_synth(CLI::App& root) {
  CLI::App* app = root.add_subcommand("synth", "Generate a toy model, ground truth and target bundles");
  auto state = std::make_shared<Synth>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
