// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/representations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

void check_unit_range(const Image& image, const char* what) {
  if (!image.allFinite() || (image < 0.0).any() || (image > 1.0).any()) {
    throw ValidationError(std::string("bundle: ") + what + " must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(DepthPolarity polarity) {
  return polarity == DepthPolarity::NearZero ? "near_zero" : "far_zero";
}

RepBundle::RepBundle(JointTargets joints, Image depth, DepthPolarity polarity, Image silhouette,
                     std::optional<Heatmaps> heatmaps)
    : joints_(std::move(joints)),
      depth_(std::move(depth)),
      polarity_(polarity),
      silhouette_(std::move(silhouette)),
      heatmaps_(std::move(heatmaps)) {
  if (depth_.rows() != silhouette_.rows() || depth_.cols() != silhouette_.cols()) {
    throw ShapeError("bundle: depth and silhouette sizes differ");
  }
  check_unit_range(depth_, "depth");
  check_unit_range(silhouette_, "silhouette");
  if (joints_.confidence.size() != joints_.coords.rows()) {
    throw ShapeError("bundle: one confidence per joint required");
  }
  if (!joints_.coords.allFinite()) throw ValidationError("bundle: non-finite joint coordinates");
  if ((joints_.confidence.array() < 0.0).any() || (joints_.confidence.array() > 1.0).any() ||
      !joints_.confidence.allFinite()) {
    throw ValidationError("bundle: joint confidences must lie in [0, 1]");
  }
  if (heatmaps_) {
    if (static_cast<int>(heatmaps_->channels.size()) != kHeatmapChannels) {
      throw ShapeError("bundle: heatmaps must have exactly 24 channels");
    }
    for (const Image& h : heatmaps_->channels) {
      if (h.rows() != silhouette_.rows() || h.cols() != silhouette_.cols()) {
        throw ShapeError("bundle: heatmap size differs from silhouette");
      }
    }
  }
}

RepBundle RepBundle::from_heatmaps(Heatmaps heatmaps, Image depth, DepthPolarity polarity,
                                   Image silhouette, double temperature) {
  if (static_cast<int>(heatmaps.channels.size()) != kHeatmapChannels) {
    throw ShapeError("bundle: heatmaps must have exactly 24 channels");
  }
  JointTargets joints;
  joints.coords.resize(kHeatmapChannels, 2);
  joints.confidence.resize(kHeatmapChannels);
  for (int k = 0; k < kHeatmapChannels; ++k) {
    const SoftArgmax s = soft_argmax(heatmaps.channels[k], temperature);
    joints.coords(k, 0) = s.x;
    joints.coords(k, 1) = s.y;
    joints.confidence(k) = s.confidence;
  }
  return RepBundle(std::move(joints), std::move(depth), polarity, std::move(silhouette),
                   std::move(heatmaps));
}

SoftArgmax soft_argmax(const Image& heatmap, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("soft_argmax: temperature must be > 0");
  if (heatmap.size() == 0) throw ShapeError("soft_argmax: empty heatmap");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < heatmap.size(); ++i) {
    const double v = heatmap.data()[i];
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) throw ValidationError("soft_argmax: heatmap has no finite value");

  SoftArgmax out;
  if (hi == lo) {
    out.x = 0.5 * (heatmap.cols() - 1);
    out.y = 0.5 * (heatmap.rows() - 1);
    out.confidence = 0.0;
    return out;
  }
  const double inv_range = 1.0 / (hi - lo);
  const double exponent = 1.0 / temperature;
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (Eigen::Index y = 0; y < heatmap.rows(); ++y) {
    for (Eigen::Index x = 0; x < heatmap.cols(); ++x) {
      const double v = heatmap(y, x);
      if (!std::isfinite(v)) continue;
      const double a = (v - lo) * inv_range;
      if (a <= 0.0) continue;
      const double w = std::pow(a, exponent);
      total += w;
      sx += w * static_cast<double>(x);
      sy += w * static_cast<double>(y);
    }
  }
  out.x = sx / total;
  out.y = sy / total;
  out.confidence = std::clamp(hi, 0.0, 1.0);
  return out;
}

Image gaussian_heatmap(int height, int width, double x, double y, double stddev) {
  Image out(height, width);
  const double inv = 1.0 / (2.0 * stddev * stddev);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const double dx = c - x;
      const double dy = r - y;
      out(r, c) = std::exp(-(dx * dx + dy * dy) * inv);
    }
  return out;
}

RepBundle synthesize_targets(const BodyModel& model, const BodyParams& gt, int height, int width,
                             const SynthOptions& options) {
  RenderOutput render = render_body(model, gt, height, width);
  JointTargets joints{render.joints2d, Eigen::VectorXd::Ones(render.joints2d.rows())};
  if (!options.heatmaps) {
    return RepBundle(std::move(joints), std::move(render.depth), render.polarity,
                     std::move(render.silhouette));
  }
  if (model.num_joints() != kHeatmapChannels) {
    throw ShapeError("synthesize_targets: heatmap encoding needs a 24-joint model");
  }
  Heatmaps maps;
  for (int j = 0; j < kHeatmapChannels; ++j) {
    maps.channels.push_back(
        gaussian_heatmap(height, width, joints.coords(j, 0), joints.coords(j, 1), options.heatmap_stddev));
  }
  return RepBundle(std::move(joints), std::move(render.depth), render.polarity,
                   std::move(render.silhouette), std::move(maps));
}

BodyParams sample_ground_truth(const BodyModel& model, std::uint64_t seed, int render_size) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  Eigen::VectorXd beta(model.num_shape());
  for (Eigen::Index b = 0; b < beta.size(); ++b) beta(b) = 0.8 * normal(rng);

  AxisAngles theta = AxisAngles::Zero(model.num_joints(), 3);
  theta(0, 0) = 0.10 * uniform(rng);  // slight lean toward/away from the camera
  theta(0, 1) = 0.40 * uniform(rng);  // turn about the vertical axis
  theta(0, 2) = 0.10 * uniform(rng);  // in-plane tilt
  for (int j = 1; j < model.num_joints(); ++j)
    for (int a = 0; a < 3; ++a) theta(j, a) = 0.20 * normal(rng);

  const double height_px = 0.72 * render_size * (1.0 + 0.08 * uniform(rng));
  const double scale = height_px / model.rest_height();
  const Eigen::Vector2d translation(0.5 * render_size + 0.04 * render_size * uniform(rng),
                                    0.5 * render_size + 0.04 * render_size * uniform(rng));
  return BodyParams::make(std::move(beta), std::move(theta), scale, translation);
}

BodyParams perturb_params(const BodyParams& gt, std::uint64_t seed, const PerturbSpec& spec) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  BodyParams out = gt;
  for (Eigen::Index b = 0; b < out.beta.size(); ++b) out.beta(b) += spec.beta_stddev * normal(rng);

  std::vector<int> candidates(static_cast<std::size_t>(std::max<Eigen::Index>(0, gt.theta.rows() - 1)));
  std::iota(candidates.begin(), candidates.end(), 1);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int count = std::min<int>(spec.perturbed_joints, static_cast<int>(candidates.size()));
  for (int i = 0; i < count; ++i)
    for (int a = 0; a < 3; ++a) out.theta(candidates[i], a) += spec.theta_stddev * normal(rng);

  const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  out.scale = gt.scale * (1.0 + sign * spec.scale_error);
  out.canonicalize();
  return out;
}

}  // namespace clothfit
