// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clothfit/errors.hpp"
#include "clothfit/losses.hpp"
#include "helpers.hpp"

namespace clothfit {
namespace {

using testing_support::random_image;

JointTargets targets(const Points2d& coords, double conf = 1.0) {
  return {coords, Eigen::VectorXd::Constant(coords.rows(), conf)};
}

// Direct sums, independent of the library's loops.
double union_l1(const Image& g, const Image& p) {
  double s = 0.0;
  int n = 0;
  for (int y = 0; y < g.rows(); ++y)
    for (int x = 0; x < g.cols(); ++x)
      if (g(y, x) > 0 || p(y, x) > 0) {
        s += std::fabs(g(y, x) - p(y, x));
        ++n;
      }
  return n ? s / n : 0.0;
}

double scale_invariant(const Image& pred, const Image& gt, const Image& fg) {
  std::vector<double> d;
  for (int y = 0; y < gt.rows(); ++y)
    for (int x = 0; x < gt.cols(); ++x)
      if (fg(y, x) >= 0.5) d.push_back(std::log(gt(y, x) / pred(y, x)));
  double m = 0.0, m2 = 0.0;
  for (double v : d) {
    m += v / d.size();
    m2 += v * v / d.size();
  }
  return std::sqrt(m2 - 0.5 * m * m);
}

TEST(LossWeights, DefaultsAndValidation) {
  const LossWeights w;
  EXPECT_EQ(w.lambda_d, 5.0);
  EXPECT_EQ(w.lambda_m, 5.0);
  EXPECT_EQ(w.lambda_j, 10.0);
  EXPECT_NO_THROW(w.validate());
  EXPECT_THROW((LossWeights{0, 0, 0}.validate()), ValidationError);
  EXPECT_THROW((LossWeights{-1, 1, 1}.validate()), ValidationError);
  EXPECT_THROW((LossWeights{NAN, 1, 1}.validate()), ValidationError);
}

TEST(JointsFit, ThreeFourFive) {
  Points2d t(1, 2), r(1, 2);
  t << 10, 10;
  r << 13, 14;
  EXPECT_DOUBLE_EQ(loss_joints_fit(targets(t), r), 5.0);
}

TEST(JointsFit, ConfidenceWeighting) {
  Points2d t = Points2d::Zero(3, 2), r(3, 2);
  r << 3, 4, 6, 8, 100, 0;
  JointTargets jt{t, Eigen::Vector3d(1.0, 0.5, 0.0)};
  EXPECT_DOUBLE_EQ(loss_joints_fit(jt, r), (5.0 + 0.5 * 10.0) / 1.5);
  jt.confidence.setZero();
  EXPECT_EQ(loss_joints_fit(jt, r), 0.0);
  EXPECT_THROW(loss_joints_fit(jt, Points2d::Zero(2, 2)), ShapeError);
}

TEST(JointsFit, WeightedTotalExample) {
  // L_J = 2 px with lambda_j = 10 contributes 20.
  Points2d t = Points2d::Zero(24, 2);
  Points2d r = t;
  r.col(0).array() += 2.0;
  Image sil = Image::Zero(32, 32);
  sil.block(8, 8, 8, 8) = 1.0;
  const RepBundle b(targets(t), sil * 0.5, DepthPolarity::NearZero, sil);
  const RenderOutput render{sil, sil * 0.5, r, DepthPolarity::NearZero};
  const LossBreakdown lb = total_fit_loss(b, render, LossWeights{});
  EXPECT_DOUBLE_EQ(lb.joints, 2.0);
  EXPECT_EQ(lb.depth, 0.0);
  EXPECT_EQ(lb.mask, 0.0);
  EXPECT_DOUBLE_EQ(lb.total, 20.0);
}

TEST(DepthFit, UnionSupportAndOracle) {
  Image g = Image::Zero(4, 4), p = Image::Zero(4, 4);
  EXPECT_EQ(loss_depth_fit(g, DepthPolarity::NearZero, p, DepthPolarity::NearZero), 0.0);
  g(0, 0) = 0.4;
  p(1, 1) = 0.2;
  EXPECT_DOUBLE_EQ(loss_depth_fit(g, DepthPolarity::NearZero, p, DepthPolarity::NearZero), 0.3);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Image a = (random_image(rng, 24, 20) - 0.4).max(0.0);
    const Image b = (random_image(rng, 24, 20) - 0.4).max(0.0);
    EXPECT_NEAR(loss_depth_fit(a, DepthPolarity::FarZero, b, DepthPolarity::FarZero), union_l1(a, b), 1e-12);
  }
}

TEST(DepthFit, PolarityMismatchThrows) {
  const Image z = Image::Zero(4, 4);
  EXPECT_THROW(loss_depth_fit(z, DepthPolarity::NearZero, z, DepthPolarity::FarZero), PolarityMismatchError);
}

TEST(MaskFit, MeanAbsoluteOverAllPixels) {
  Image g = Image::Zero(4, 4), p = Image::Zero(4, 4);
  g.block(0, 0, 2, 2) = 1.0;
  EXPECT_DOUBLE_EQ(loss_mask_fit(g, p), 0.25);
  EXPECT_EQ(loss_mask_fit(g, g), 0.0);
  EXPECT_THROW(loss_mask_fit(g, Image::Zero(4, 5)), ShapeError);
}

TEST(PoseTrain, MeanSquaredError) {
  Heatmaps a{{Image::Zero(4, 4), Image::Zero(4, 4)}};
  Heatmaps b{{Image::Constant(4, 4, 0.5), Image::Zero(4, 4)}};
  EXPECT_DOUBLE_EQ(loss_pose_train(a, b), 0.125);
  EXPECT_EQ(loss_pose_train(a, a), 0.0);
  EXPECT_THROW(loss_pose_train(a, Heatmaps{{Image::Zero(4, 4)}}), ShapeError);
}

TEST(DepthTrain, UniformScaleClosedForm) {
  std::mt19937_64 rng(2);
  const Image gt = random_image(rng, 16, 16) + 0.1;
  const Image fg = Image::Ones(16, 16);
  for (double c : {0.5, 1.0, 2.0, 10.0}) {
    const double expect = std::fabs(std::log(c)) / std::sqrt(2.0);
    EXPECT_NEAR(loss_depth_train(gt * c, gt, fg), expect, 1e-9) << c;
  }
}

TEST(DepthTrain, MatchesOracleAndIgnoresBackground) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Image gt = random_image(rng, 20, 16) + 0.05;
    const Image pred = random_image(rng, 20, 16) + 0.05;
    const Image fg = (random_image(rng, 20, 16) > 0.3).cast<double>();
    EXPECT_NEAR(loss_depth_train(pred, gt, fg), scale_invariant(pred, gt, fg), 1e-12);
    Image pred_bg = pred;
    for (int k = 0; k < pred_bg.size(); ++k)
      if (fg.data()[k] < 0.5) pred_bg.data()[k] = -1.0;
    EXPECT_EQ(loss_depth_train(pred_bg, gt, fg), loss_depth_train(pred, gt, fg));
  }
}

TEST(DepthTrain, NonPositiveDepthIsDomainError) {
  Image gt = Image::Ones(4, 4);
  Image pred = Image::Ones(4, 4);
  pred(2, 2) = 0.0;
  EXPECT_THROW(loss_depth_train(pred, gt, Image::Ones(4, 4)), DomainError);
  gt(1, 1) = -0.5;
  EXPECT_THROW(loss_depth_train(Image::Ones(4, 4), gt, Image::Ones(4, 4)), DomainError);
  EXPECT_EQ(loss_depth_train(pred, Image::Ones(4, 4), Image::Zero(4, 4)), 0.0);
}

TEST(MaskTrain, MeanAbsolute) {
  EXPECT_DOUBLE_EQ(loss_mask_train(Image::Ones(3, 3), Image::Constant(3, 3, 0.25)), 0.75);
}

}  // namespace
}  // namespace clothfit
