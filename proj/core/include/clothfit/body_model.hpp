// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace clothfit {

inline constexpr int kRootParent = -1;

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using JointPositions = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using AxisAngles = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Raw arrays of a body model, before validation.
struct BodyModelData {
  Vertices template_vertices;       // V x 3
  Faces faces;                      // F x 3, counterclockwise (outward normals)
  Eigen::MatrixXd shape_basis;      // 3V x B, row 3*v + axis
  Eigen::MatrixXd joint_regressor;  // J x V
  Eigen::MatrixXd skinning_weights; // V x J
  std::vector<int> kinematic_parents;
  /// Optional pose-corrective basis, 3V x 9(J-1), driven by (R_j - I) of joints 1..J-1.
  std::optional<Eigen::MatrixXd> pose_basis;
  /// Millimetres per model unit; 0 when the model is unitless.
  double units_to_mm = 0.0;
  std::string version = "1";
};

/// Validated, immutable SMPL-style body model.
///
/// Shape blendshapes are linear in beta; the pose is an axis-angle rotation
/// per joint composed along the kinematic tree and applied by linear blend
/// skinning. Joint 0 carries the global orientation.
class BodyModel {
 public:
  /// Throws ValidationError if any invariant is violated.
  explicit BodyModel(BodyModelData data);

  int num_vertices() const noexcept { return static_cast<int>(data_.template_vertices.rows()); }
  int num_faces() const noexcept { return static_cast<int>(data_.faces.rows()); }
  int num_joints() const noexcept { return static_cast<int>(data_.kinematic_parents.size()); }
  int num_shape() const noexcept { return static_cast<int>(data_.shape_basis.cols()); }

  const BodyModelData& data() const noexcept { return data_; }
  const Vertices& template_vertices() const noexcept { return data_.template_vertices; }
  const Faces& faces() const noexcept { return data_.faces; }
  const Eigen::MatrixXd& shape_basis() const noexcept { return data_.shape_basis; }
  const Eigen::MatrixXd& joint_regressor() const noexcept { return data_.joint_regressor; }
  const Eigen::MatrixXd& skinning_weights() const noexcept { return data_.skinning_weights; }
  const std::vector<int>& kinematic_parents() const noexcept { return data_.kinematic_parents; }
  double units_to_mm() const noexcept { return data_.units_to_mm; }

  /// Rest-pose joints of the template (beta = 0).
  const JointPositions& template_joints() const noexcept { return template_joints_; }
  /// d(joints)/d(beta), (3J) x B, row 3*j + axis.
  const Eigen::MatrixXd& joint_shape_basis() const noexcept { return joint_shape_basis_; }
  /// Extent of the rest-pose template along the image-vertical (y) axis.
  double rest_height() const noexcept { return rest_height_; }

  struct SkinEntry {
    int joint;
    double weight;
  };
  /// Nonzero skinning weights of vertex v.
  std::span<const SkinEntry> skin(int v) const noexcept {
    return {skin_entries_.data() + skin_offsets_[v], skin_entries_.data() + skin_offsets_[v + 1]};
  }

  friend bool operator==(const BodyModel& a, const BodyModel& b);

 private:
  BodyModelData data_;
  JointPositions template_joints_;
  Eigen::MatrixXd joint_shape_basis_;
  double rest_height_ = 0.0;
  std::vector<SkinEntry> skin_entries_;
  std::vector<std::size_t> skin_offsets_;
};

/// The optimised quantities: shape, pose, weak-perspective scale and image translation.
struct BodyParams {
  Eigen::VectorXd beta;        // B
  AxisAngles theta;            // J x 3, radians; row 0 is the global orientation
  double scale = 1.0;          // pixels per model unit
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();  // pixels

  /// Canonicalises every axis-angle and validates scale > 0 and finiteness.
  static BodyParams make(Eigen::VectorXd beta, AxisAngles theta, double scale,
                         Eigen::Vector2d translation);
  /// Rest pose, mean shape.
  static BodyParams rest(const BodyModel& model, double scale, const Eigen::Vector2d& translation);

  void canonicalize();
  /// Throws ShapeError / ValidationError.
  void validate(const BodyModel& model) const;

  bool operator==(const BodyParams&) const = default;
};

struct PosedBody {
  Vertices vertices;      // V x 3
  JointPositions joints;  // J x 3
};

/// Rotation matrix of an axis-angle vector (Rodrigues formula).
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis_angle);

/// Maps an axis-angle to the equivalent one with magnitude in [0, pi].
Eigen::Vector3d canonicalize_axis_angle(const Eigen::Vector3d& axis_angle);

/// Full forward pass: shape blendshapes, kinematic chain, linear blend skinning.
PosedBody forward(const BodyModel& model, const Eigen::VectorXd& beta, const AxisAngles& theta);
PosedBody forward(const BodyModel& model, const BodyParams& params);

/// Posed joints only; skips skinning.
JointPositions posed_joints(const BodyModel& model, const Eigen::VectorXd& beta,
                            const AxisAngles& theta);

/// Shaped (unposed) vertices, template + shape_basis * beta.
Vertices shaped_vertices(const BodyModel& model, const Eigen::VectorXd& beta);

struct ToyModelSpec {
  int target_vertices = 900;  // upper bound on V
  int num_joints = 24;
  int num_shape = 10;
  std::uint64_t seed = 7;
};

/// Procedural humanoid (tapered capsule limbs, ellipsoid torso and head) in a
/// y-down, z-forward frame, roughly one unit tall. Deterministic in `spec`.
BodyModel make_toy_model(const ToyModelSpec& spec);

}  // namespace clothfit
