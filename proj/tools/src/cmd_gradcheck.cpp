// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <cstdio>
#include <memory>

#include "clothfit/errors.hpp"
#include "clothfit/fit_io.hpp"
#include "clothfit/fitting.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit_cli/cli.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

constexpr double kCameraTolerance = 1e-6;
constexpr double kSecantTolerance = 0.05;

struct GradCheck {
  std::string model;
  std::string bundle;
  std::string params;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  FitFlags fit_flags;
  OptionSet options;

  explicit GradCheck(CLI::App* app) : options(app) {
    options.add("model", model, "Body model JSON");
    options.add("bundle", bundle, "Bundle directory");
    options.add("params", params, "Parameters to check at (default: moment initialisation)");
    options.add("seed", seed, "Seed of the random secant direction");
    options.add("epsilon", epsilon, "Secant step");
    options.add("out", out, "Output directory");
    fit_flags.add(options);
    app->add_option("--config", config, "JSON file with option values");
  }

  int run() {
    options.resolve();
    if (bundle.empty() || out.empty()) throw ValidationError("gradcheck: --bundle and --out are required");
    const BodyModel body = io::load_model(locate_model(model, bundle));
    const RepBundle target = load_bundle(bundle);
    const FitConfig cfg = fit_flags.for_height(fit_flags.resolve(options), target.height());
    const BodyParams at = params.empty() ? initialize_params(target, body, cfg.init) : io::load_params(find_params(params));
    at.validate(body);
    const GradientCheck check = check_gradients(body, target, at, ParamMask::all(), cfg, seed, epsilon);
    const bool camera_ok = check.camera_rel_error < kCameraTolerance;
    const bool secant_ok = check.secant_rel_error < kSecantTolerance;

    const fs::path dir(out);
    ensure_dir(dir);
    io::write_json(dir / "gradcheck.json", {{"camera_rel_error", check.camera_rel_error},
                                            {"secant_rel_error", check.secant_rel_error},
                                            {"directional", check.directional},
                                            {"secant", check.secant},
                                            {"camera_ok", camera_ok},
                                            {"secant_ok", secant_ok}});
    json resolved = options.dump();
    resolved["fit"] = io::fit_config_to_json(cfg);
    write_config(dir, "gradcheck", resolved);
    std::printf("gradcheck: camera %.3g (%s), secant %.3g (%s)\n", check.camera_rel_error, camera_ok ? "ok" : "FAIL",
                check.secant_rel_error, secant_ok ? "ok" : "FAIL");
    return camera_ok && secant_ok ? kExitOk : kExitCheckFailed;
  }
};

}  // namespace

Runner add_gradcheck(CLI::App& root) {
  CLI::App* app = root.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  auto state = std::make_shared<GradCheck>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
