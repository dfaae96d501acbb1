// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "clothfit/body_model.hpp"
#include "clothfit/losses.hpp"
#include "clothfit/representations.hpp"

namespace clothfit {

/// Which parameter groups an optimisation stage may move.
struct ParamMask {
  bool beta = false;
  bool global_orient = false;  // theta row 0
  bool body_pose = false;      // theta rows 1..J-1
  bool scale = false;
  bool translation = false;

  static ParamMask all() { return {true, true, true, true, true}; }
  static ParamMask camera_and_orient() { return {false, true, false, true, true}; }
  bool any() const { return beta || global_orient || body_pose || scale || translation; }
  bool operator==(const ParamMask&) const = default;
};

struct Stage {
  ParamMask mask;
  int iterations = 0;
};

enum class Optimizer { Adam, GradientDescent };

/// Central-difference steps per group.
struct FdSteps {
  double beta = 1e-3;
  double theta = 1e-3;         // rad
  double scale_rel = 1e-4;     // times the initial scale
  double translation = 0.25;   // px
};

/// Per-group units of the optimiser's search space: x = x0 + unit * z.
struct StepUnits {
  double beta = 3.0;
  double theta = 1.0;
  double scale_rel = 1.0;        // times the initial scale
  double translation_rel = 0.5;  // times the initial scale, in px
};

struct InitOptions {
  /// Clamp the scale of a degenerate (single-row) silhouette to `min_scale`
  /// instead of throwing InitError.
  bool clamp_degenerate = false;
  double min_scale = 1.0;
};

struct FitConfig {
  int iterations = 40;
  Optimizer optimizer = Optimizer::Adam;
  double step_size = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  FdSteps fd_steps;
  StepUnits units;
  std::vector<Stage> stages = default_stages(40);
  double soft_sigma = 1.0;  // px
  LossWeights weights;
  InitOptions init;

  /// Camera and global orientation for a quarter of the budget, then everything.
  static std::vector<Stage> default_stages(int iterations);
  /// Sets `iterations` and the matching default schedule.
  FitConfig& with_iterations(int n);
  /// iterations >= 1, stage counts sum to iterations, positive steps and units.
  void validate() const;
};

/// Number of scalar parameters: B + 3J + 1 + 2.
int param_count(const BodyModel& model);
/// [beta | theta row-major | scale | tx, ty]
Eigen::VectorXd pack_params(const BodyParams& params);
BodyParams unpack_params(const Eigen::VectorXd& x, int num_shape, int num_joints);
/// Per-entry activity of `mask` in the packed layout.
std::vector<bool> active_entries(const ParamMask& mask, int num_shape, int num_joints);

/// Moment-based start: rest pose, mean shape, scale from the silhouette's
/// bounding-box height over the model's rest height, translation placing the
/// rest-pose silhouette centroid on the observed one.
BodyParams initialize_params(const RepBundle& bundle, const BodyModel& model, const InitOptions& options = {});

struct ObjectiveValue {
  LossBreakdown hard;     // tracked loss, hard render
  double soft_mask = 0.0; // L_M against the soft render
  double objective = 0.0; // lambda_d L_D + lambda_m L_M(soft) + lambda_j L_J
};

/// Loss terms at `params` with the bundle's resolution.
ObjectiveValue evaluate_objective(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                                  const FitConfig& cfg);

struct ObjectiveGradient {
  ObjectiveValue value;
  Eigen::VectorXd gradient;  // packed layout, zero on inactive entries
};

/// Gradient of the optimised objective. L_J is differentiated analytically
/// in (s, t) and through joint Jacobians (central differences of forward
/// kinematics) in (beta, theta); L_M and L_D by central differences through
/// the soft and hard renders. `reference_scale` sets the scale step; 0 uses
/// params.scale. Throws NumericError if a probe stays non-finite after one
/// halving of its step.
ObjectiveGradient objective_gradient(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                                     const ParamMask& mask, const FitConfig& cfg, double reference_scale = 0.0);

struct IterationRecord {
  int iteration = 0;
  int stage = 0;
  LossBreakdown loss;          // hard render
  double objective = 0.0;
  double best_total = 0.0;     // best hard total up to and including this entry
  double gradient_norm = 0.0;  // 0 for the final entry
  bool step_halved = false;
};

struct FitReport {
  BodyParams initial;
  BodyParams final_params;  // best iterate
  std::vector<IterationRecord> trace;  // iterations + 1 entries
  int best_iteration = 0;
  double wall_time_s = 0.0;
  bool converged = false;

  double initial_loss() const { return trace.front().loss.total; }
  double best_loss() const { return trace.back().best_total; }
};

/// Staged optimisation returning the best iterate by hard-render total loss.
FitReport fit(const BodyModel& model, const RepBundle& bundle, const BodyParams& init, const FitConfig& cfg);

struct GradientCheck {
  double camera_rel_error = 0.0;   // L_J analytic vs central differences in (s, t)
  double secant_rel_error = 0.0;   // directional derivative vs loss secant
  double directional = 0.0;
  double secant = 0.0;
};

/// Both checks at `params`; the secant uses a random unit direction over
/// `mask` drawn from `seed` and step `epsilon`.
GradientCheck check_gradients(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                              const ParamMask& mask, const FitConfig& cfg, std::uint64_t seed,
                              double epsilon = 1e-4);

}  // namespace clothfit
