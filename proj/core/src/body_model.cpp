// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/body_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

constexpr double kSumTolerance = 1e-6;

void check(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("body model: " + message);
}

void check_shape(bool ok, const std::string& message) {
  if (!ok) throw ShapeError("body model: " + message);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace

BodyModel::BodyModel(BodyModelData data) : data_(std::move(data)) {
  const Eigen::Index V = data_.template_vertices.rows();
  const Eigen::Index J = static_cast<Eigen::Index>(data_.kinematic_parents.size());
  const Eigen::Index B = data_.shape_basis.cols();

  check(V >= 3, "needs at least 3 vertices");
  check(J >= 1, "needs at least one joint");
  check(data_.faces.rows() >= 1, "needs at least one face");
  check_shape(data_.shape_basis.rows() == 3 * V, "shape_basis must be 3V x B");
  check_shape(data_.joint_regressor.rows() == J && data_.joint_regressor.cols() == V,
              "joint_regressor must be J x V");
  check_shape(data_.skinning_weights.rows() == V && data_.skinning_weights.cols() == J,
              "skinning_weights must be V x J");
  check(all_finite(data_.template_vertices) && all_finite(data_.shape_basis) &&
            all_finite(data_.joint_regressor) && all_finite(data_.skinning_weights),
        "non-finite values");

  for (Eigen::Index j = 0; j < J; ++j) {
    const auto row = data_.joint_regressor.row(j);
    check((row.array() >= 0.0).all(), "joint_regressor row " + std::to_string(j) + " has negative entries");
    check(std::abs(row.sum() - 1.0) <= kSumTolerance,
          "joint_regressor row " + std::to_string(j) + " does not sum to 1");
  }
  for (Eigen::Index v = 0; v < V; ++v) {
    const auto row = data_.skinning_weights.row(v);
    check((row.array() >= 0.0).all(), "skinning_weights row " + std::to_string(v) + " has negative entries");
    check(std::abs(row.sum() - 1.0) <= kSumTolerance,
          "skinning_weights row " + std::to_string(v) + " does not sum to 1");
  }

  check(data_.kinematic_parents[0] == kRootParent, "parent[0] must be the root sentinel");
  for (Eigen::Index j = 1; j < J; ++j) {
    const int p = data_.kinematic_parents[j];
    check(p >= 0 && p < j, "parent[" + std::to_string(j) + "] must satisfy 0 <= parent < j");
  }

  for (Eigen::Index f = 0; f < data_.faces.rows(); ++f) {
    const auto face = data_.faces.row(f);
    check((face.array() >= 0).all() && (face.array() < V).all(),
          "face " + std::to_string(f) + " index out of range");
    check(face(0) != face(1) && face(1) != face(2) && face(0) != face(2),
          "face " + std::to_string(f) + " is degenerate");
  }

  if (data_.pose_basis) {
    check_shape(data_.pose_basis->rows() == 3 * V && data_.pose_basis->cols() == 9 * (J - 1),
                "pose_basis must be 3V x 9(J-1)");
    check(all_finite(*data_.pose_basis), "non-finite pose_basis");
  }
  check(std::isfinite(data_.units_to_mm) && data_.units_to_mm >= 0.0, "units_to_mm must be >= 0");

  template_joints_ = data_.joint_regressor * data_.template_vertices;

  joint_shape_basis_.resize(3 * J, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Eigen::Map<const Vertices> disp(data_.shape_basis.col(b).data(), V, 3);
    const JointPositions jd = data_.joint_regressor * disp;
    for (Eigen::Index j = 0; j < J; ++j)
      for (int a = 0; a < 3; ++a) joint_shape_basis_(3 * j + a, b) = jd(j, a);
  }

  rest_height_ = data_.template_vertices.col(1).maxCoeff() - data_.template_vertices.col(1).minCoeff();

  skin_offsets_.reserve(static_cast<std::size_t>(V) + 1);
  skin_offsets_.push_back(0);
  for (Eigen::Index v = 0; v < V; ++v) {
    for (Eigen::Index j = 0; j < J; ++j) {
      const double w = data_.skinning_weights(v, j);
      if (w != 0.0) skin_entries_.push_back({static_cast<int>(j), w});
    }
    skin_offsets_.push_back(skin_entries_.size());
  }
}

bool operator==(const BodyModel& a, const BodyModel& b) {
  const auto& x = a.data_;
  const auto& y = b.data_;
  if (x.pose_basis.has_value() != y.pose_basis.has_value()) return false;
  if (x.pose_basis && *x.pose_basis != *y.pose_basis) return false;
  return x.template_vertices == y.template_vertices && x.faces == y.faces &&
         x.shape_basis == y.shape_basis && x.joint_regressor == y.joint_regressor &&
         x.skinning_weights == y.skinning_weights && x.kinematic_parents == y.kinematic_parents &&
         x.units_to_mm == y.units_to_mm && x.version == y.version;
}

// ---------------------------------------------------------------------------

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  Eigen::Matrix3d k;
  k << 0.0, -axis_angle.z(), axis_angle.y(),
       axis_angle.z(), 0.0, -axis_angle.x(),
       -axis_angle.y(), axis_angle.x(), 0.0;
  if (angle < 1e-8) {
    // sin(a)/a -> 1, (1 - cos a)/a^2 -> 1/2
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Eigen::Matrix3d::Identity() + s * k + c * k * k;
}

Eigen::Vector3d canonicalize_axis_angle(const Eigen::Vector3d& axis_angle) {
  constexpr double pi = std::numbers::pi;
  const double angle = axis_angle.norm();
  if (angle <= pi) return axis_angle;
  const Eigen::Vector3d axis = axis_angle / angle;
  double wrapped = std::fmod(angle, 2.0 * pi);
  if (wrapped > pi) return -(2.0 * pi - wrapped) * axis;
  return wrapped * axis;
}

BodyParams BodyParams::make(Eigen::VectorXd beta, AxisAngles theta, double scale,
                            Eigen::Vector2d translation) {
  BodyParams p;
  p.beta = std::move(beta);
  p.theta = std::move(theta);
  p.scale = scale;
  p.translation = translation;
  if (!p.beta.allFinite() || !p.theta.allFinite() || !std::isfinite(scale) ||
      !translation.allFinite()) {
    throw ValidationError("body params: non-finite value");
  }
  if (!(scale > 0.0)) throw ValidationError("body params: scale must be > 0");
  p.canonicalize();
  return p;
}

BodyParams BodyParams::rest(const BodyModel& model, double scale, const Eigen::Vector2d& translation) {
  return make(Eigen::VectorXd::Zero(model.num_shape()), AxisAngles::Zero(model.num_joints(), 3),
              scale, translation);
}

void BodyParams::canonicalize() {
  for (Eigen::Index j = 0; j < theta.rows(); ++j) {
    const Eigen::Vector3d w = theta.row(j).transpose();
    theta.row(j) = canonicalize_axis_angle(w).transpose();
  }
}

void BodyParams::validate(const BodyModel& model) const {
  if (beta.size() != model.num_shape()) {
    throw ShapeError("body params: beta has " + std::to_string(beta.size()) + " entries, model has " +
                     std::to_string(model.num_shape()));
  }
  if (theta.rows() != model.num_joints()) {
    throw ShapeError("body params: theta has " + std::to_string(theta.rows()) + " rows, model has " +
                     std::to_string(model.num_joints()) + " joints");
  }
  if (!beta.allFinite() || !theta.allFinite() || !std::isfinite(scale) || !translation.allFinite()) {
    throw ValidationError("body params: non-finite value");
  }
  if (!(scale > 0.0)) throw ValidationError("body params: scale must be > 0");
}

// ---------------------------------------------------------------------------

namespace {

void check_pose_inputs(const BodyModel& model, const Eigen::VectorXd& beta, const AxisAngles& theta) {
  if (beta.size() != model.num_shape() || theta.rows() != model.num_joints()) {
    throw ShapeError("forward: beta/theta dimensions do not match the model");
  }
  if (!beta.allFinite() || !theta.allFinite()) throw ValidationError("forward: non-finite input");
}

JointPositions rest_joints(const BodyModel& model, const Eigen::VectorXd& beta) {
  const int J = model.num_joints();
  JointPositions joints = model.template_joints();
  if (beta.size() > 0) {
    const Eigen::VectorXd delta = model.joint_shape_basis() * beta;
    for (int j = 0; j < J; ++j)
      for (int a = 0; a < 3; ++a) joints(j, a) += delta(3 * j + a);
  }
  return joints;
}

// Per-joint world rotation and joint displacement from the rest position.
// Working with (R - I) and displacements keeps the identity pose exact.
struct Chain {
  std::vector<Eigen::Matrix3d> rotation;
  std::vector<Eigen::Matrix3d> rotation_minus_identity;
  std::vector<Eigen::Vector3d> displacement;
};

Chain kinematic_chain(const BodyModel& model, const AxisAngles& theta, const JointPositions& rest) {
  const int J = model.num_joints();
  const auto& parents = model.kinematic_parents();
  Chain chain;
  chain.rotation.resize(J);
  chain.rotation_minus_identity.resize(J);
  chain.displacement.resize(J);
  for (int j = 0; j < J; ++j) {
    const Eigen::Matrix3d local = rodrigues(theta.row(j).transpose());
    const int p = parents[j];
    if (p == kRootParent) {
      chain.rotation[j] = local;
      chain.displacement[j].setZero();
    } else {
      chain.rotation[j] = chain.rotation[p] * local;
      const Eigen::Vector3d bone = (rest.row(j) - rest.row(p)).transpose();
      chain.displacement[j] = chain.displacement[p] + chain.rotation_minus_identity[p] * bone;
    }
    chain.rotation_minus_identity[j] = chain.rotation[j] - Eigen::Matrix3d::Identity();
  }
  return chain;
}

}  // namespace

Vertices shaped_vertices(const BodyModel& model, const Eigen::VectorXd& beta) {
  if (beta.size() != model.num_shape()) throw ShapeError("shaped_vertices: beta dimension mismatch");
  Vertices shaped = model.template_vertices();
  if (beta.size() > 0) {
    const Eigen::VectorXd delta = model.shape_basis() * beta;
    shaped += Eigen::Map<const Vertices>(delta.data(), model.num_vertices(), 3);
  }
  return shaped;
}

JointPositions posed_joints(const BodyModel& model, const Eigen::VectorXd& beta,
                            const AxisAngles& theta) {
  check_pose_inputs(model, beta, theta);
  const JointPositions rest = rest_joints(model, beta);
  const Chain chain = kinematic_chain(model, theta, rest);
  JointPositions out = rest;
  for (int j = 0; j < model.num_joints(); ++j) out.row(j) += chain.displacement[j].transpose();
  return out;
}

PosedBody forward(const BodyModel& model, const Eigen::VectorXd& beta, const AxisAngles& theta) {
  check_pose_inputs(model, beta, theta);
  const int V = model.num_vertices();
  const int J = model.num_joints();

  Vertices shaped = shaped_vertices(model, beta);
  const JointPositions rest = rest_joints(model, beta);
  const Chain chain = kinematic_chain(model, theta, rest);

  if (const auto& pose_basis = model.data().pose_basis; pose_basis && J > 1) {
    Eigen::VectorXd feature(9 * (J - 1));
    for (int j = 1; j < J; ++j) {
      const Eigen::Matrix3d d = rodrigues(theta.row(j).transpose()) - Eigen::Matrix3d::Identity();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) feature(9 * (j - 1) + 3 * r + c) = d(r, c);
    }
    const Eigen::VectorXd delta = *pose_basis * feature;
    shaped += Eigen::Map<const Vertices>(delta.data(), V, 3);
  }

  PosedBody out;
  out.vertices.resize(V, 3);
  for (int v = 0; v < V; ++v) {
    const Eigen::Vector3d x = shaped.row(v).transpose();
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
    for (const auto& e : model.skin(v)) {
      const Eigen::Vector3d local = x - rest.row(e.joint).transpose();
      offset += e.weight * (chain.rotation_minus_identity[e.joint] * local + chain.displacement[e.joint]);
    }
    out.vertices.row(v) = (x + offset).transpose();
  }
  out.joints = rest;
  for (int j = 0; j < J; ++j) out.joints.row(j) += chain.displacement[j].transpose();
  return out;
}

PosedBody forward(const BodyModel& model, const BodyParams& params) {
  return forward(model, params.beta, params.theta);
}

}  // namespace clothfit
