// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>

#include "clothfit/errors.hpp"
#include "clothfit/fit_io.hpp"
#include "clothfit/fitting.hpp"
#include "clothfit/image_io.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/rendering.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

struct Sample {
  std::string name;
  fs::path bundle;
  std::optional<fs::path> init;
  fs::path out;
};

struct Fit {
  std::string model;
  std::string bundle;
  std::string init;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  FitFlags fit_flags;
  OptionSet options;

  explicit Fit(CLI::App* app) : options(app) {
    options.add("model", model, "Body model JSON");
    options.add("bundle", bundle, "Bundle directory, or a synth output with scene_* directories");
    options.add("init", init, "Initial parameters JSON (single bundle only)");
    options.add("out", out, "Output directory");
    options.add("seed", seed, "Run seed");
    options.add("jobs", jobs, "Bundles fitted in parallel");
    fit_flags.add(options);
    app->add_option("--config", config, "JSON file with option values");
  }

  std::vector<Sample> samples() const {
    const fs::path root(bundle);
    const std::vector<fs::path> scenes = scene_dirs(root);
    if (fs::exists(root / "mask.pgm") || scenes.empty()) {
      Sample s{"", root, std::nullopt, fs::path(out)};
      if (!init.empty()) s.init = fs::path(init);
      return {s};
    }
    if (!init.empty()) throw ValidationError("fit: --init applies to a single bundle");
    std::vector<Sample> out_samples;
    for (const fs::path& scene : scenes) {
      Sample s{scene.filename().string(), scene / "bundle", std::nullopt, fs::path(out) / scene.filename()};
      if (fs::exists(scene / "mask.pgm")) s.bundle = scene;
      if (fs::is_regular_file(scene / "init_params.json")) s.init = scene / "init_params.json";
      out_samples.push_back(s);
    }
    return out_samples;
  }

  int run() {
    options.resolve();
    if (bundle.empty() || out.empty()) throw ValidationError("fit: --bundle and --out are required");
    const FitConfig cfg = fit_flags.resolve(options);
    const BodyModel body = io::load_model(locate_model(model, bundle));
    const std::vector<Sample> todo = samples();
    ensure_dir(out);

    std::vector<double> ratios(todo.size());
    std::vector<FitConfig> used(todo.size(), cfg);
    parallel_for(static_cast<int>(todo.size()), jobs, [&](int i) {
      const Sample& s = todo[static_cast<std::size_t>(i)];
      const RepBundle target = load_bundle(s.bundle);
      const FitConfig sample_cfg = fit_flags.for_height(cfg, target.height());
      used[static_cast<std::size_t>(i)] = sample_cfg;
      const BodyParams start = s.init ? io::load_params(*s.init) : initialize_params(target, body, cfg.init);
      start.validate(body);
      const FitReport report = fit(body, target, start, sample_cfg);

      ensure_dir(s.out);
      io::write_json(s.out / "report.json", io::fit_report_to_json(report, false));
      io::write_json(s.out / "timing.json", {{"wall_time_s", report.wall_time_s}});
      io::save_params(s.out / "params.json", report.final_params);
      const PosedBody posed = forward(body, report.final_params);
      io::save_obj(s.out / "mesh.obj", posed.vertices, body.faces());
      const Camera cam = Camera::from_params(report.final_params, target.height(), target.width());
      io::write_pgm(s.out / "mask.pgm", rasterize_hard(posed.vertices, body.faces(), cam).silhouette);
      const double initial = report.initial_loss();
      ratios[static_cast<std::size_t>(i)] = initial > 0.0 ? report.best_loss() / initial : 0.0;
    });

    json resolved = options.dump();
    resolved["fit"] = io::fit_config_to_json(used.front());
    write_config(out, "fit", resolved);
    for (std::size_t i = 0; i < todo.size(); ++i) {
      std::printf("fit %s: best/initial loss %.4f\n", todo[i].name.empty() ? "bundle" : todo[i].name.c_str(),
                  ratios[i]);
    }
    return 0;
  }
};

}  // namespace

Runner add_fit(CLI::App& root) {
  CLI::App* app = root.add_subcommand("fit", "Fit body parameters to target bundles");
  auto state = std::make_shared<Fit>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
