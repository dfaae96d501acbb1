// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <memory>

#include "clothfit/errors.hpp"
#include "clothfit/metrics.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/rendering.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

struct Pair {
  std::string name;
  fs::path pred;
  fs::path gt;
};

MetricSample compare(const BodyModel& body, const BodyParams& pred, const BodyParams& gt, int size, double unit) {
  const PosedBody p = forward(body, pred);
  const PosedBody g = forward(body, gt);
  MetricSample s;
  s.mpjpe = unit * mpjpe(p.joints, g.joints);
  s.pa_mpjpe = unit * pa_mpjpe(p.joints, g.joints);
  s.mvpe = unit * mvpe(p.vertices, g.vertices, p.joints.row(0).transpose(), g.joints.row(0).transpose());
  const Image pm = rasterize_hard(p.vertices, body.faces(), Camera::from_params(pred, size, size)).silhouette;
  const Image gm = rasterize_hard(g.vertices, body.faces(), Camera::from_params(gt, size, size)).silhouette;
  s.iou = iou(pm, gm);
  return s;
}

struct Eval {
  std::string model;
  std::string pred;
  std::string gt;
  std::string out;
  std::string config;
  int render_size = 128;
  OptionSet options;

  explicit Eval(CLI::App* app) : options(app) {
    options.add("model", model, "Body model JSON");
    options.add("pred", pred, "Predicted parameters: a file, a directory, or a root of scene_* directories");
    options.add("gt", gt, "Ground-truth parameters, same layout as --pred");
    options.add("render-size", render_size, "Square render size for silhouette IoU");
    options.add("out", out, "Output metrics JSON file");
    app->add_option("--config", config, "JSON file with option values");
  }

  std::vector<Pair> pairs() const {
    const std::vector<fs::path> pred_scenes = scene_dirs(pred);
    const std::vector<fs::path> gt_scenes = scene_dirs(gt);
    if (pred_scenes.empty() || gt_scenes.empty()) return {{"", find_params(pred), find_params(gt)}};
    std::vector<Pair> out_pairs;
    for (const fs::path& scene : pred_scenes) {
      const fs::path other = fs::path(gt) / scene.filename();
      out_pairs.push_back({scene.filename().string(), find_params(scene), find_params(other)});
    }
    return out_pairs;
  }

  int run() {
    options.resolve();
    if (pred.empty() || gt.empty() || out.empty()) throw ValidationError("eval: --pred, --gt and --out are required");
    const BodyModel body = io::load_model(locate_model(model, gt));
    const double unit = body.units_to_mm() > 0.0 ? body.units_to_mm() : 1.0;
    std::vector<MetricSample> samples;
    json rows = json::array();
    for (const Pair& p : pairs()) {
      const BodyParams a = io::load_params(p.pred);
      const BodyParams b = io::load_params(p.gt);
      a.validate(body);
      b.validate(body);
      samples.push_back(compare(body, a, b, render_size, unit));
      const MetricSample& s = samples.back();
      rows.push_back({{"name", p.name}, {"mpjpe", s.mpjpe}, {"pa_mpjpe", s.pa_mpjpe}, {"mvpe", s.mvpe}, {"iou", s.iou}});
    }
    const MetricReport report = summarize(samples, body.units_to_mm() > 0.0);
    const json doc = {{"units", report.millimetres ? "mm" : "model"},
                      {"count", samples.size()},
                      {"mpjpe", report.mpjpe},
                      {"pa_mpjpe", report.pa_mpjpe},
                      {"mvpe", report.mvpe},
                      {"miou", report.miou},
                      {"samples", rows}};
    const fs::path out_path(out);
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    io::write_json(out_path, doc);
    json resolved = options.dump();
    resolved["subcommand"] = "eval";
    io::write_json(out_path.parent_path() / (out_path.stem().string() + ".config.json"), resolved);
    std::printf("eval: %zu sample(s), MPJPE %.6g, PA-MPJPE %.6g, mIoU %.6g\n", samples.size(), report.mpjpe,
                report.pa_mpjpe, report.miou);
    return 0;
  }
};

}  // namespace

Runner add_eval(CLI::App& root) {
  CLI::App* app = root.add_subcommand("eval", "Compare predicted and ground-truth parameters");
  auto state = std::make_shared<Eval>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
