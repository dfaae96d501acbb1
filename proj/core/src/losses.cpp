// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/losses.hpp"

#include <algorithm>
#include <cmath>

#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

void same_size(const Image& a, const Image& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(std::string(what) + ": image sizes differ");
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {lambda_d, lambda_m, lambda_j}) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("loss weights must be finite and nonnegative");
  }
  if (lambda_d == 0.0 && lambda_m == 0.0 && lambda_j == 0.0) {
    throw ValidationError("at least one loss weight must be positive");
  }
}

double loss_depth_fit(const Image& target, DepthPolarity target_polarity, const Image& rendered,
                      DepthPolarity rendered_polarity) {
  if (target_polarity != rendered_polarity) {
    throw PolarityMismatchError("loss_depth_fit: target is " + std::string(to_string(target_polarity)) +
                                " but render is " + std::string(to_string(rendered_polarity)));
  }
  same_size(target, rendered, "loss_depth_fit");
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double g = target.data()[i];
    const double p = rendered.data()[i];
    if (g > 0.0 || p > 0.0) {
      sum += std::abs(g - p);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double loss_mask_fit(const Image& target, const Image& rendered) {
  same_size(target, rendered, "loss_mask_fit");
  return (target - rendered).abs().mean();
}

double loss_joints_fit(const JointTargets& target, const Points2d& rendered) {
  if (target.coords.rows() != rendered.rows()) throw ShapeError("loss_joints_fit: joint counts differ");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < rendered.rows(); ++k) {
    const double c = target.confidence(k);
    if (c == 0.0) continue;
    num += c * (target.coords.row(k) - rendered.row(k)).norm();
    den += c;
  }
  return den == 0.0 ? 0.0 : num / den;
}

LossBreakdown total_fit_loss(const RepBundle& bundle, const RenderOutput& render, const LossWeights& w) {
  LossBreakdown out;
  out.depth = loss_depth_fit(bundle.depth(), bundle.polarity(), render.depth, render.polarity);
  out.mask = loss_mask_fit(bundle.silhouette(), render.silhouette);
  out.joints = loss_joints_fit(bundle.joints(), render.joints2d);
  out.total = w.lambda_d * out.depth + w.lambda_m * out.mask + w.lambda_j * out.joints;
  return out;
}

double loss_pose_train(const Heatmaps& predicted, const Heatmaps& target) {
  if (predicted.channels.size() != target.channels.size() || predicted.channels.empty()) {
    throw ShapeError("loss_pose_train: channel counts differ");
  }
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t k = 0; k < target.channels.size(); ++k) {
    same_size(predicted.channels[k], target.channels[k], "loss_pose_train");
    sum += (predicted.channels[k] - target.channels[k]).square().sum();
    count += static_cast<double>(target.channels[k].size());
  }
  return sum / count;
}

double loss_depth_train(const Image& predicted, const Image& target, const Image& foreground) {
  same_size(predicted, target, "loss_depth_train");
  same_size(predicted, foreground, "loss_depth_train");
  double s1 = 0.0;
  double s2 = 0.0;
  long n = 0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (!(foreground.data()[i] >= 0.5)) continue;
    const double d = predicted.data()[i];
    const double g = target.data()[i];
    if (!(d > 0.0) || !(g > 0.0)) throw DomainError("loss_depth_train: depth must be positive on the foreground");
    const double delta = std::log(g) - std::log(d);
    s1 += delta;
    s2 += delta * delta;
    ++n;
  }
  if (n == 0) return 0.0;
  const double mean = s1 / static_cast<double>(n);
  const double mean_sq = s2 / static_cast<double>(n);
  return std::sqrt(std::max(0.0, mean_sq - 0.5 * mean * mean));
}

double loss_mask_train(const Image& target, const Image& predicted) {
  same_size(target, predicted, "loss_mask_train");
  return (target - predicted).abs().mean();
}

}  // namespace clothfit
