// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "clothfit/body_model.hpp"
#include "clothfit/fitting.hpp"

namespace clothfit::io {

nlohmann::json fit_config_to_json(const FitConfig& cfg);

/// Overlays the keys present in `doc` onto `base`. Unknown keys are a schema
/// error. Setting "iterations" without "stages" rebuilds the default schedule.
FitConfig fit_config_from_json(const nlohmann::json& doc, FitConfig base = {},
                               const std::string& origin = "<memory>");

/// Trace, initial and final parameters, best iteration and convergence.
/// `wall_time_s` is written only when `include_timing` is set.
nlohmann::json fit_report_to_json(const FitReport& report, bool include_timing = true);

nlohmann::json loss_to_json(const LossBreakdown& loss);

/// Wavefront OBJ, one-based face indices, %.9g coordinates.
void save_obj(const std::filesystem::path& path, const Vertices& vertices, const Faces& faces);

}  // namespace clothfit::io
