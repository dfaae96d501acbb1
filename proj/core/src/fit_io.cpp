// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/fit_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "clothfit/errors.hpp"
#include "clothfit/model_io.hpp"

namespace clothfit::io {
namespace {

using nlohmann::json;

json mask_to_json(const ParamMask& m) {
  return {{"beta", m.beta},
          {"global_orient", m.global_orient},
          {"body_pose", m.body_pose},
          {"scale", m.scale},
          {"translation", m.translation}};
}

void check_keys(const json& doc, std::initializer_list<const char*> allowed, const std::string& origin,
                const std::string& where) {
  if (!doc.is_object()) throw IoError(IoErrorKind::Schema, origin, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : doc.items()) {
    if (!ok.count(key)) throw IoError(IoErrorKind::Schema, origin, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_into(const json& doc, const char* key, T& out, const std::string& origin) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError(IoErrorKind::Schema, origin, std::string("bad value for '") + key + "'");
  }
}

ParamMask mask_from_json(const json& doc, const std::string& origin) {
  check_keys(doc, {"beta", "global_orient", "body_pose", "scale", "translation"}, origin, "stage mask");
  ParamMask m;
  read_into(doc, "beta", m.beta, origin);
  read_into(doc, "global_orient", m.global_orient, origin);
  read_into(doc, "body_pose", m.body_pose, origin);
  read_into(doc, "scale", m.scale, origin);
  read_into(doc, "translation", m.translation, origin);
  return m;
}

}  // namespace

json loss_to_json(const LossBreakdown& loss) {
  return {{"depth", loss.depth}, {"mask", loss.mask}, {"joints", loss.joints}, {"total", loss.total}};
}

json fit_config_to_json(const FitConfig& cfg) {
  json stages = json::array();
  for (const Stage& s : cfg.stages) stages.push_back({{"mask", mask_to_json(s.mask)}, {"iterations", s.iterations}});
  return {
      {"iterations", cfg.iterations},
      {"optimizer", cfg.optimizer == Optimizer::Adam ? "adam" : "gradient_descent"},
      {"step_size", cfg.step_size},
      {"adam_beta1", cfg.adam_beta1},
      {"adam_beta2", cfg.adam_beta2},
      {"adam_epsilon", cfg.adam_epsilon},
      {"fd_steps",
       {{"beta", cfg.fd_steps.beta},
        {"theta", cfg.fd_steps.theta},
        {"scale_rel", cfg.fd_steps.scale_rel},
        {"translation", cfg.fd_steps.translation}}},
      {"units",
       {{"beta", cfg.units.beta},
        {"theta", cfg.units.theta},
        {"scale_rel", cfg.units.scale_rel},
        {"translation_rel", cfg.units.translation_rel}}},
      {"stages", stages},
      {"soft_sigma", cfg.soft_sigma},
      {"weights",
       {{"lambda_d", cfg.weights.lambda_d}, {"lambda_m", cfg.weights.lambda_m}, {"lambda_j", cfg.weights.lambda_j}}},
      {"init", {{"clamp_degenerate", cfg.init.clamp_degenerate}, {"min_scale", cfg.init.min_scale}}},
  };
}

FitConfig fit_config_from_json(const json& doc, FitConfig cfg, const std::string& origin) {
  check_keys(doc,
             {"iterations", "optimizer", "step_size", "adam_beta1", "adam_beta2", "adam_epsilon", "fd_steps", "units",
              "stages", "soft_sigma", "weights", "init"},
             origin, "fit config");
  if (doc.contains("iterations")) {
    int n = 0;
    read_into(doc, "iterations", n, origin);
    cfg.with_iterations(n);
  }
  if (doc.contains("optimizer")) {
    std::string name;
    read_into(doc, "optimizer", name, origin);
    if (name == "adam") {
      cfg.optimizer = Optimizer::Adam;
    } else if (name == "gradient_descent") {
      cfg.optimizer = Optimizer::GradientDescent;
    } else {
      throw IoError(IoErrorKind::Schema, origin, "optimizer must be 'adam' or 'gradient_descent'");
    }
  }
  read_into(doc, "step_size", cfg.step_size, origin);
  read_into(doc, "adam_beta1", cfg.adam_beta1, origin);
  read_into(doc, "adam_beta2", cfg.adam_beta2, origin);
  read_into(doc, "adam_epsilon", cfg.adam_epsilon, origin);
  read_into(doc, "soft_sigma", cfg.soft_sigma, origin);
  if (doc.contains("fd_steps")) {
    const json& f = doc.at("fd_steps");
    check_keys(f, {"beta", "theta", "scale_rel", "translation"}, origin, "fd_steps");
    read_into(f, "beta", cfg.fd_steps.beta, origin);
    read_into(f, "theta", cfg.fd_steps.theta, origin);
    read_into(f, "scale_rel", cfg.fd_steps.scale_rel, origin);
    read_into(f, "translation", cfg.fd_steps.translation, origin);
  }
  if (doc.contains("units")) {
    const json& u = doc.at("units");
    check_keys(u, {"beta", "theta", "scale_rel", "translation_rel"}, origin, "units");
    read_into(u, "beta", cfg.units.beta, origin);
    read_into(u, "theta", cfg.units.theta, origin);
    read_into(u, "scale_rel", cfg.units.scale_rel, origin);
    read_into(u, "translation_rel", cfg.units.translation_rel, origin);
  }
  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    check_keys(w, {"lambda_d", "lambda_m", "lambda_j"}, origin, "weights");
    read_into(w, "lambda_d", cfg.weights.lambda_d, origin);
    read_into(w, "lambda_m", cfg.weights.lambda_m, origin);
    read_into(w, "lambda_j", cfg.weights.lambda_j, origin);
  }
  if (doc.contains("init")) {
    const json& i = doc.at("init");
    check_keys(i, {"clamp_degenerate", "min_scale"}, origin, "init");
    read_into(i, "clamp_degenerate", cfg.init.clamp_degenerate, origin);
    read_into(i, "min_scale", cfg.init.min_scale, origin);
  }
  if (doc.contains("stages")) {
    const json& stages = doc.at("stages");
    if (!stages.is_array()) throw IoError(IoErrorKind::Schema, origin, "stages must be an array");
    cfg.stages.clear();
    for (const json& s : stages) {
      check_keys(s, {"mask", "iterations"}, origin, "stage");
      Stage stage;
      if (s.contains("mask")) stage.mask = mask_from_json(s.at("mask"), origin);
      read_into(s, "iterations", stage.iterations, origin);
      cfg.stages.push_back(stage);
    }
  }
  return cfg;
}

json fit_report_to_json(const FitReport& report, bool include_timing) {
  json trace = json::array();
  for (const IterationRecord& r : report.trace) {
    trace.push_back({{"iteration", r.iteration},
                     {"stage", r.stage},
                     {"loss", loss_to_json(r.loss)},
                     {"objective", r.objective},
                     {"best_total", r.best_total},
                     {"gradient_norm", r.gradient_norm},
                     {"step_halved", r.step_halved}});
  }
  json doc = {{"initial", params_to_json(report.initial)},
              {"final", params_to_json(report.final_params)},
              {"initial_loss", report.initial_loss()},
              {"best_loss", report.best_loss()},
              {"best_iteration", report.best_iteration},
              {"converged", report.converged},
              {"trace", trace}};
  if (include_timing) doc["wall_time_s"] = report.wall_time_s;
  return doc;
}

void save_obj(const std::filesystem::path& path, const Vertices& vertices, const Faces& faces) {
  std::ofstream out(path);
  if (!out) throw IoError(IoErrorKind::MissingFile, path.string(), "cannot open for writing");
  char line[128];
  for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
    std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", vertices(v, 0), vertices(v, 1), vertices(v, 2));
    out << line;
  }
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    out << "f " << faces(f, 0) + 1 << ' ' << faces(f, 1) + 1 << ' ' << faces(f, 2) + 1 << '\n';
  }
}

}  // namespace clothfit::io
