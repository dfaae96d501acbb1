// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/model_io.hpp"

#include <fstream>

#include "clothfit/errors.hpp"

namespace clothfit::io {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& origin, const std::string& what) {
  throw IoError(IoErrorKind::Schema, origin, what);
}

const json& require(const json& doc, const char* key, const std::string& origin) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(origin, std::string("missing key '") + key + "'");
  return doc.at(key);
}

double number(const json& v, const std::string& origin, const char* what) {
  if (!v.is_number()) schema_error(origin, std::string(what) + " must be numeric");
  return v.get<double>();
}

template <typename Matrix>
Matrix matrix_from_rows(const json& rows, Eigen::Index cols, const std::string& origin, const char* key) {
  if (!rows.is_array()) schema_error(origin, std::string(key) + " must be an array of rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError(IoErrorKind::DimensionMismatch, origin,
                    std::string(key) + " row " + std::to_string(r) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), c) =
          static_cast<typename Matrix::Scalar>(number(row[static_cast<std::size_t>(c)], origin, key));
    }
  }
  return m;
}

template <typename Matrix>
json rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoErrorKind::MissingFile, path.string(), "");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(IoErrorKind::Schema, path.string(), e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError(IoErrorKind::MissingFile, path.string(), "cannot open for writing");
  out << doc.dump(2) << '\n';
}

json model_to_json(const BodyModel& model) {
  const auto& d = model.data();
  const int V = model.num_vertices();
  const int B = model.num_shape();
  json doc;
  doc["template_vertices"] = rows_to_json(d.template_vertices);
  doc["faces"] = rows_to_json(d.faces);
  json basis = json::array();
  for (int v = 0; v < V; ++v) {
    json per_axis = json::array();
    for (int a = 0; a < 3; ++a) {
      json coeffs = json::array();
      for (int b = 0; b < B; ++b) coeffs.push_back(d.shape_basis(3 * v + a, b));
      per_axis.push_back(std::move(coeffs));
    }
    basis.push_back(std::move(per_axis));
  }
  doc["shape_basis"] = std::move(basis);
  doc["joint_regressor"] = rows_to_json(d.joint_regressor);
  doc["skinning_weights"] = rows_to_json(d.skinning_weights);
  doc["kinematic_parents"] = d.kinematic_parents;
  if (d.pose_basis) doc["pose_basis"] = rows_to_json(*d.pose_basis);
  doc["meta"] = {{"V", V}, {"F", model.num_faces()}, {"J", model.num_joints()}, {"B", B},
                 {"version", d.version}};
  if (d.units_to_mm > 0.0) doc["meta"]["units_to_mm"] = d.units_to_mm;
  return doc;
}

BodyModel model_from_json(const json& doc, const std::string& origin) {
  const json& meta = require(doc, "meta", origin);
  auto meta_int = [&](const char* key) {
    const json& v = require(meta, key, origin);
    if (!v.is_number_integer()) schema_error(origin, std::string("meta.") + key + " must be an integer");
    return v.get<Eigen::Index>();
  };
  const Eigen::Index V = meta_int("V");
  const Eigen::Index F = meta_int("F");
  const Eigen::Index J = meta_int("J");
  const Eigen::Index B = meta_int("B");

  BodyModelData data;
  data.template_vertices = matrix_from_rows<Vertices>(require(doc, "template_vertices", origin), 3, origin,
                                                      "template_vertices");
  data.faces = matrix_from_rows<Faces>(require(doc, "faces", origin), 3, origin, "faces");
  data.joint_regressor =
      matrix_from_rows<Eigen::MatrixXd>(require(doc, "joint_regressor", origin), V, origin, "joint_regressor");
  data.skinning_weights =
      matrix_from_rows<Eigen::MatrixXd>(require(doc, "skinning_weights", origin), J, origin, "skinning_weights");

  const json& parents = require(doc, "kinematic_parents", origin);
  if (!parents.is_array()) schema_error(origin, "kinematic_parents must be an array");
  for (const json& p : parents) {
    if (!p.is_number_integer()) schema_error(origin, "kinematic_parents entries must be integers");
    data.kinematic_parents.push_back(p.get<int>());
  }

  const json& basis = require(doc, "shape_basis", origin);
  if (!basis.is_array() || static_cast<Eigen::Index>(basis.size()) != V) {
    throw IoError(IoErrorKind::DimensionMismatch, origin, "shape_basis must have V entries");
  }
  data.shape_basis.resize(3 * V, B);
  for (Eigen::Index v = 0; v < V; ++v) {
    const json& per_axis = basis[static_cast<std::size_t>(v)];
    if (!per_axis.is_array() || per_axis.size() != 3) {
      throw IoError(IoErrorKind::DimensionMismatch, origin, "shape_basis entries must be 3 x B");
    }
    for (int a = 0; a < 3; ++a) {
      const json& coeffs = per_axis[static_cast<std::size_t>(a)];
      if (!coeffs.is_array() || static_cast<Eigen::Index>(coeffs.size()) != B) {
        throw IoError(IoErrorKind::DimensionMismatch, origin, "shape_basis entries must be 3 x B");
      }
      for (Eigen::Index b = 0; b < B; ++b)
        data.shape_basis(3 * v + a, b) = number(coeffs[static_cast<std::size_t>(b)], origin, "shape_basis");
    }
  }
  if (doc.contains("pose_basis")) {
    data.pose_basis = matrix_from_rows<Eigen::MatrixXd>(doc.at("pose_basis"), 9 * (J - 1), origin, "pose_basis");
  }
  if (meta.contains("version")) data.version = meta.at("version").is_string() ? meta.at("version").get<std::string>()
                                                                               : meta.at("version").dump();
  if (meta.contains("units_to_mm")) data.units_to_mm = number(meta.at("units_to_mm"), origin, "units_to_mm");

  if (data.template_vertices.rows() != V || data.faces.rows() != F || data.joint_regressor.rows() != J ||
      data.skinning_weights.rows() != V || static_cast<Eigen::Index>(data.kinematic_parents.size()) != J) {
    throw IoError(IoErrorKind::DimensionMismatch, origin, "array sizes disagree with meta{V,F,J,B}");
  }
  return BodyModel(std::move(data));
}

void save_model(const std::filesystem::path& path, const BodyModel& model) {
  write_json(path, model_to_json(model));
}

BodyModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path), path.string());
}

json params_to_json(const BodyParams& params) {
  json doc;
  doc["beta"] = std::vector<double>(params.beta.data(), params.beta.data() + params.beta.size());
  doc["theta"] = rows_to_json(params.theta);
  doc["scale"] = params.scale;
  doc["translation"] = {params.translation.x(), params.translation.y()};
  return doc;
}

BodyParams params_from_json(const json& doc, const std::string& origin) {
  const json& beta_j = require(doc, "beta", origin);
  if (!beta_j.is_array()) schema_error(origin, "beta must be an array");
  Eigen::VectorXd beta(static_cast<Eigen::Index>(beta_j.size()));
  for (std::size_t i = 0; i < beta_j.size(); ++i) beta(static_cast<Eigen::Index>(i)) = number(beta_j[i], origin, "beta");
  AxisAngles theta = matrix_from_rows<AxisAngles>(require(doc, "theta", origin), 3, origin, "theta");
  const double scale = number(require(doc, "scale", origin), origin, "scale");
  const json& t = require(doc, "translation", origin);
  if (!t.is_array() || t.size() != 2) schema_error(origin, "translation must be [tx, ty]");
  const Eigen::Vector2d translation(number(t[0], origin, "translation"), number(t[1], origin, "translation"));
  return BodyParams::make(std::move(beta), std::move(theta), scale, translation);
}

void save_params(const std::filesystem::path& path, const BodyParams& params) {
  write_json(path, params_to_json(params));
}

BodyParams load_params(const std::filesystem::path& path) {
  return params_from_json(read_json(path), path.string());
}

}  // namespace clothfit::io
