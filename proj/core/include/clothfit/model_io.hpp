// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "clothfit/body_model.hpp"

namespace clothfit::io {

// Model document keys: template_vertices, faces, shape_basis (V x 3 x B),
// joint_regressor, skinning_weights, kinematic_parents, meta{V,F,J,B,version},
// plus optional pose_basis and meta.units_to_mm. Arrays are row-major.
nlohmann::json model_to_json(const BodyModel& model);
BodyModel model_from_json(const nlohmann::json& doc, const std::string& origin = "<memory>");
void save_model(const std::filesystem::path& path, const BodyModel& model);
BodyModel load_model(const std::filesystem::path& path);

// {"beta": [...], "theta": [[x,y,z], ...], "scale": s, "translation": [tx, ty]}
nlohmann::json params_to_json(const BodyParams& params);
BodyParams params_from_json(const nlohmann::json& doc, const std::string& origin = "<memory>");
void save_params(const std::filesystem::path& path, const BodyParams& params);
BodyParams load_params(const std::filesystem::path& path);

/// Parses a JSON file, mapping failures onto IoError kinds.
nlohmann::json read_json(const std::filesystem::path& path);
/// Writes `doc` with a stable layout (2-space indent, trailing newline).
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace clothfit::io
