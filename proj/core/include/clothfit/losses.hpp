// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "clothfit/image.hpp"
#include "clothfit/rendering.hpp"
#include "clothfit/representations.hpp"

namespace clothfit {

struct LossWeights {
  double lambda_d = 5.0;
  double lambda_m = 5.0;
  double lambda_j = 10.0;

  /// Nonnegative, finite and not all zero.
  void validate() const;
};

struct LossBreakdown {
  double depth = 0.0;   // L_D
  double mask = 0.0;    // L_M
  double joints = 0.0;  // L_J
  double total = 0.0;
};

/// Mean |G_d - P_d| over pixels where either map is positive; 0 on an empty union.
double loss_depth_fit(const Image& target, DepthPolarity target_polarity, const Image& rendered,
                      DepthPolarity rendered_polarity);

/// Mean |G_m - P_m| over all pixels.
double loss_mask_fit(const Image& target, const Image& rendered);

/// Confidence-weighted mean of per-joint Euclidean distances. 0 if all confidences are 0.
double loss_joints_fit(const JointTargets& target, const Points2d& rendered);

/// lambda_d * L_D + lambda_m * L_M + lambda_j * L_J against a hard render.
LossBreakdown total_fit_loss(const RepBundle& bundle, const RenderOutput& render, const LossWeights& w);

/// Mean squared error over every heatmap entry.
double loss_pose_train(const Heatmaps& predicted, const Heatmaps& target);

/// Scale-aware log-depth loss over the foreground:
///   d_i = log gt_i - log pred_i,  L = sqrt(mean(d^2) - 0.5 * mean(d)^2).
/// Throws DomainError if either map is nonpositive on the foreground.
double loss_depth_train(const Image& predicted, const Image& target, const Image& foreground);

/// Mean absolute difference.
double loss_mask_train(const Image& target, const Image& predicted);

}  // namespace clothfit
