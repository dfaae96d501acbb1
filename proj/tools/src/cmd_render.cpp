// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <memory>

#include "clothfit/errors.hpp"
#include "clothfit/fit_io.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/representations.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

struct Render {
  std::string model;
  std::string params;
  std::string out;
  std::string config;
  int render_size = 128;
  bool heatmaps = false;
  OptionSet options;

  explicit Render(CLI::App* app) : options(app) {
    options.add("model", model, "Body model JSON");
    options.add("params", params, "Parameters JSON, or a directory holding params.json / gt_params.json");
    options.add("render-size", render_size, "Square render size in pixels");
    options.flag("heatmaps", heatmaps, "Also write Gaussian joint heatmaps");
    options.add("out", out, "Output directory");
    app->add_option("--config", config, "JSON file with option values");
  }

  int run() {
    options.resolve();
    if (model.empty() || params.empty() || out.empty()) {
      throw ValidationError("render: --model, --params and --out are required");
    }
    const BodyModel body = io::load_model(model);
    const BodyParams p = io::load_params(find_params(params));
    p.validate(body);
    const fs::path dir(out);
    ensure_dir(dir);
    SynthOptions synth_options;
    synth_options.heatmaps = heatmaps;
    save_bundle(synthesize_targets(body, p, render_size, render_size, synth_options), dir);
    io::save_params(dir / "params.json", p);
    io::save_obj(dir / "mesh.obj", forward(body, p).vertices, body.faces());
    write_config(dir, "render", options.dump());
    std::printf("render: wrote mask, depth and joints to %s\n", dir.string().c_str());
    return 0;
  }
};

}  // namespace

Runner add_render(CLI::App& root) {
  CLI::App* app = root.add_subcommand("render", "Render silhouette, depth and joints of given parameters");
  auto state = std::make_shared<Render>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
