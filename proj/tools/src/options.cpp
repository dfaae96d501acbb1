// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "options.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "clothfit/errors.hpp"
#include "clothfit/fit_io.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/rendering.hpp"

namespace clothfit::cli {

CLI::Option* OptionSet::flag(const std::string& name, bool& value, const std::string& help) {
  CLI::Option* opt = app_->add_flag("--" + name, value, help);
  entries_.push_back({name, opt, [&value](const json& v) { value = v.get<bool>(); },
                      [&value]() { return json(value); }});
  return opt;
}

void OptionSet::resolve() {
  // --config is registered by the caller under this name.
  CLI::Option* config_opt = app_->get_option_no_throw("--config");
  if (config_opt == nullptr || config_opt->count() == 0) return;
  config_path_ = config_opt->as<std::string>();
  config_ = io::read_json(config_path_);
  if (!config_.is_object()) throw IoError(IoErrorKind::Schema, config_path_, "config must be a JSON object");
  for (const auto& [key, value] : config_.items()) {
    if (key == "fit" || key == "subcommand" || key == "config") continue;
    const bool known = std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == key; });
    if (!known) throw IoError(IoErrorKind::Schema, config_path_, "unknown option '" + key + "'");
  }
  for (Entry& e : entries_) {
    if (e.option->count() > 0 || !config_.contains(e.name)) continue;
    try {
      e.set(config_.at(e.name));
    } catch (const json::exception&) {
      throw IoError(IoErrorKind::Schema, config_path_, "bad value for '" + e.name + "'");
    }
  }
}

bool OptionSet::given(const std::string& name) const {
  for (const Entry& e : entries_) {
    if (e.name == name) return e.option->count() > 0;
  }
  return false;
}

const json& OptionSet::fit_section() const {
  static const json null_json;
  return config_.contains("fit") ? config_.at("fit") : null_json;
}

json OptionSet::dump() const {
  json out = json::object();
  for (const Entry& e : entries_) out[e.name] = e.get();
  return out;
}

void FitFlags::add(OptionSet& options) {
  options.add("iters", iters, "Optimisation iterations");
  options.add("lambda-d", lambda_d, "Depth loss weight");
  options.add("lambda-m", lambda_m, "Mask loss weight");
  options.add("lambda-j", lambda_j, "Joint loss weight");
  options.add("soft-sigma", soft_sigma, "Soft silhouette width in pixels (0: 1 px per 256 rows)");
}

FitConfig FitFlags::resolve(const OptionSet& options) {
  FitConfig cfg;
  if (!options.fit_section().is_null()) cfg = io::fit_config_from_json(options.fit_section(), cfg, "config:fit");
  auto chosen = [&](const char* name) { return options.given(name) || options.from_config(name); };
  if (chosen("iters") || options.fit_section().is_null() || !options.fit_section().contains("iterations")) {
    cfg.with_iterations(iters);
  }
  auto take = [&](const char* name, double flag_value, double& target) {
    if (chosen(name)) target = flag_value;
  };
  take("lambda-d", lambda_d, cfg.weights.lambda_d);
  take("lambda-m", lambda_m, cfg.weights.lambda_m);
  take("lambda-j", lambda_j, cfg.weights.lambda_j);
  const bool sigma_in_section = !options.fit_section().is_null() && options.fit_section().contains("soft_sigma");
  auto_sigma = !sigma_in_section && !(chosen("soft-sigma") && soft_sigma > 0.0);
  if (!auto_sigma && chosen("soft-sigma") && soft_sigma > 0.0) cfg.soft_sigma = soft_sigma;
  cfg.validate();
  iters = cfg.iterations;
  lambda_d = cfg.weights.lambda_d;
  lambda_m = cfg.weights.lambda_m;
  lambda_j = cfg.weights.lambda_j;
  if (!auto_sigma) soft_sigma = cfg.soft_sigma;
  return cfg;
}

FitConfig FitFlags::for_height(FitConfig cfg, int height) const {
  if (auto_sigma) cfg.soft_sigma = default_soft_sigma(height);
  return cfg;
}

void write_config(const fs::path& dir, const std::string& subcommand, json doc) {
  doc["subcommand"] = subcommand;
  io::write_json(dir / "config.json", doc);
}

std::vector<fs::path> scene_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("scene_", 0) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs < 1) throw ValidationError("--jobs must be at least 1");
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(jobs, std::max(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

fs::path find_params(const fs::path& path) {
  if (fs::is_regular_file(path)) return path;
  for (const char* name : {"params.json", "gt_params.json"}) {
    if (fs::is_regular_file(path / name)) return path / name;
  }
  throw IoError(IoErrorKind::MissingFile, (path / "params.json").string(), "no parameter file");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoErrorKind::MissingFile, dir.string(), "cannot create directory: " + ec.message());
}

fs::path locate_model(const std::string& given, const fs::path& near) {
  if (!given.empty()) return given;
  fs::path dir = fs::is_regular_file(near) ? near.parent_path() : near;
  for (int up = 0; up < 3 && !dir.empty(); ++up, dir = dir.parent_path()) {
    if (fs::is_regular_file(dir / "model.json")) return dir / "model.json";
  }
  throw ValidationError("--model is required (no model.json found near " + near.string() + ")");
}

}  // namespace clothfit::cli
