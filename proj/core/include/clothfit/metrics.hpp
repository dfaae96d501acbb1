// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Core>

#include "clothfit/body_model.hpp"
#include "clothfit/image.hpp"

namespace clothfit {

using Points3d = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Mean per-joint Euclidean distance after subtracting joint 0 from both sets.
double mpjpe(const Points3d& pred, const Points3d& gt);

struct Similarity {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Points3d aligned;  // scale * R * pred + t
};

/// Least-squares similarity (det R = +1) mapping `pred` onto `gt`.
/// Throws AlignmentError for fewer than 3 points or rank < 2 configurations.
Similarity procrustes_align(const Points3d& pred, const Points3d& gt);

/// Mean per-joint error after Procrustes alignment (no extra root alignment).
double pa_mpjpe(const Points3d& pred, const Points3d& gt);

/// Mean vertex error after aligning the root joints, or after Procrustes when
/// `procrustes` is set (the joints are then unused).
double mvpe(const Points3d& pred_vertices, const Points3d& gt_vertices,
            const Eigen::Vector3d& pred_root, const Eigen::Vector3d& gt_root, bool procrustes = false);

/// |A and B| / |A or B| after thresholding at 0.5; two empty masks give 1.
double iou(const Image& a, const Image& b);
double miou(const std::vector<Image>& a, const std::vector<Image>& b);

struct MetricSample {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double mvpe = 0.0;
  double iou = 0.0;
};

struct MetricReport {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double mvpe = 0.0;
  double miou = 0.0;
  bool millimetres = false;  // distances were converted with the model's unit scale
  std::vector<MetricSample> samples;
};

/// Averages per-sample metrics in order.
MetricReport summarize(std::vector<MetricSample> samples, bool millimetres);

}  // namespace clothfit
