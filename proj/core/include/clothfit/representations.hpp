// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "clothfit/body_model.hpp"
#include "clothfit/image.hpp"
#include "clothfit/rendering.hpp"

namespace clothfit {

/// Number of joint heatmap channels produced by the joint decoder.
inline constexpr int kHeatmapChannels = 24;

struct JointTargets {
  Points2d coords;            // J x 2 pixels
  Eigen::VectorXd confidence; // J, each in [0, 1]
};

struct Heatmaps {
  std::vector<Image> channels;  // one H x W map per joint
};

/// One image's target representations: joints, normalised depth and silhouette.
/// Joints are always available as coordinates; heatmaps are kept when supplied.
class RepBundle {
 public:
  /// Validates shared size, value ranges and confidence bounds.
  RepBundle(JointTargets joints, Image depth, DepthPolarity polarity, Image silhouette,
            std::optional<Heatmaps> heatmaps = std::nullopt);

  /// Builds coordinates from 24 heatmaps by soft-argmax.
  static RepBundle from_heatmaps(Heatmaps heatmaps, Image depth, DepthPolarity polarity,
                                 Image silhouette, double temperature = 1.0);

  const JointTargets& joints() const noexcept { return joints_; }
  const Image& depth() const noexcept { return depth_; }
  DepthPolarity polarity() const noexcept { return polarity_; }
  const Image& silhouette() const noexcept { return silhouette_; }
  const std::optional<Heatmaps>& heatmaps() const noexcept { return heatmaps_; }
  int height() const noexcept { return static_cast<int>(silhouette_.rows()); }
  int width() const noexcept { return static_cast<int>(silhouette_.cols()); }

 private:
  JointTargets joints_;
  Image depth_;
  DepthPolarity polarity_;
  Image silhouette_;
  std::optional<Heatmaps> heatmaps_;
};

struct SoftArgmax {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
};

/// Expected pixel position under weights proportional to a^(1/temperature),
/// where a is the min-max normalised activation (a softmax over log a / T).
/// A flat heatmap yields the image centre with confidence 0; otherwise the
/// confidence is the peak raw activation clamped to [0, 1].
SoftArgmax soft_argmax(const Image& heatmap, double temperature);

/// Gaussian heatmap with unit peak centred at (x, y).
Image gaussian_heatmap(int height, int width, double x, double y, double stddev);

struct SynthOptions {
  bool heatmaps = false;
  double heatmap_stddev = 2.0;
};

/// Synthetic provider: renders ground truth with the hard rasteriser.
RepBundle synthesize_targets(const BodyModel& model, const BodyParams& gt, int height, int width,
                             const SynthOptions& options = {});

/// Random plausible ground truth that keeps the body inside a square render.
BodyParams sample_ground_truth(const BodyModel& model, std::uint64_t seed, int render_size);

struct PerturbSpec {
  int perturbed_joints = 6;
  double theta_stddev = 0.15;  // rad
  double beta_stddev = 0.5;
  double scale_error = 0.10;   // relative, sign drawn at random
};

/// Initial estimate derived from ground truth by the perturbation recipe above.
BodyParams perturb_params(const BodyParams& gt, std::uint64_t seed, const PerturbSpec& spec = {});

// Bundle directory: joints.json, depth.pfm, depth.meta.json, mask.pgm and the
// optional heatmaps.bin with heatmaps.meta.json. All binary data little-endian.
void save_bundle(const RepBundle& bundle, const std::filesystem::path& dir);
RepBundle load_bundle(const std::filesystem::path& dir);

std::string_view to_string(DepthPolarity polarity);

}  // namespace clothfit
