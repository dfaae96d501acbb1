// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clothfit/fitting.hpp"

namespace clothfit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Flags of one subcommand, mirrored by the keys of an optional JSON config.
/// Values given on the command line win over the config file, which wins
/// over the defaults.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& value, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + name, value, help)->capture_default_str();
    entries_.push_back({name, opt, [&value](const json& v) { value = v.get<T>(); },
                        [&value]() { return json(value); }});
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help);

  /// Reads --config (if given) and fills every option not set on the command line.
  void resolve();

  bool given(const std::string& name) const;
  bool from_config(const std::string& name) const { return config_.contains(name); }
  /// The "fit" object of the config file, or null.
  const json& fit_section() const;

  /// Fully resolved values, keyed by flag name.
  json dump() const;

 private:
  struct Entry {
    std::string name;
    CLI::Option* option;
    std::function<void(const json&)> set;
    std::function<json()> get;
  };

  CLI::App* app_;
  std::vector<Entry> entries_;
  std::string config_path_;
  json config_ = json::object();
};

/// Shared fit flags: iterations, loss weights and soft-silhouette width.
struct FitFlags {
  int iters = 40;
  double lambda_d = 5.0;
  double lambda_m = 5.0;
  double lambda_j = 10.0;
  double soft_sigma = 0.0;  // 0: scaled from the render height
  bool auto_sigma = true;

  void add(OptionSet& options);
  /// Config "fit" section, then any of these given by flag or config key.
  FitConfig resolve(const OptionSet& options);
  /// `cfg` with the soft width scaled to `height` rows unless it was set explicitly.
  FitConfig for_height(FitConfig cfg, int height) const;
};

/// Writes `doc` as `dir`/config.json, adding the subcommand name.
void write_config(const fs::path& dir, const std::string& subcommand, json doc);

/// Sorted scene_* subdirectories of `root`.
std::vector<fs::path> scene_dirs(const fs::path& root);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

/// A regular file, or `dir`/params.json, or `dir`/gt_params.json.
fs::path find_params(const fs::path& path);

void ensure_dir(const fs::path& dir);

/// `given` if set, else the first model.json in `near` or up to two parents.
fs::path locate_model(const std::string& given, const fs::path& near);

}  // namespace clothfit::cli
