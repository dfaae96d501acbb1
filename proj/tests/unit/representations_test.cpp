// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "clothfit/errors.hpp"
#include "clothfit/image_io.hpp"
#include "clothfit/losses.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/representations.hpp"
#include "helpers.hpp"

namespace clothfit {
namespace {

using testing_support::TempDir;

const BodyModel& toy() {
  static const BodyModel model = make_toy_model(ToyModelSpec{});
  return model;
}

IoErrorKind load_error(const std::filesystem::path& dir) {
  try {
    load_bundle(dir);
  } catch (const IoError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load_bundle succeeded";
  return IoErrorKind::Schema;
}

TEST(SoftArgmax, OneHot) {
  Image h = Image::Zero(32, 40);
  h(20, 10) = 1.0;
  for (double t : {0.1, 1.0, 3.0}) {
    const SoftArgmax s = soft_argmax(h, t);
    EXPECT_DOUBLE_EQ(s.x, 10.0);
    EXPECT_DOUBLE_EQ(s.y, 20.0);
    EXPECT_DOUBLE_EQ(s.confidence, 1.0);
  }
}

TEST(SoftArgmax, SymmetricPeaks) {
  Image h = Image::Zero(16, 16);
  h(0, 0) = 1.0;
  h(10, 0) = 1.0;
  const SoftArgmax s = soft_argmax(h, 1.0);
  EXPECT_NEAR(s.y, 5.0, 1e-12);
  EXPECT_NEAR(s.x, 0.0, 1e-12);
}

TEST(SoftArgmax, GaussianBlobCentre) {
  const Image h = gaussian_heatmap(48, 64, 31.5, 17.25, 2.0);
  // Brute-force weighted mean of the sampled blob.
  double sw = 0, sx = 0, sy = 0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) {
      const double w = std::exp(-((x - 31.5) * (x - 31.5) + (y - 17.25) * (y - 17.25)) / 8.0);
      sw += w;
      sx += w * x;
      sy += w * y;
    }
  const SoftArgmax s = soft_argmax(h, 1.0);
  EXPECT_NEAR(s.x, 31.5, 0.05);
  EXPECT_NEAR(s.y, 17.25, 0.05);
  EXPECT_NEAR(s.x, sx / sw, 1e-3);
  EXPECT_NEAR(s.y, sy / sw, 1e-3);
}

TEST(SoftArgmax, FlatMapGivesCentreWithZeroConfidence) {
  const SoftArgmax s = soft_argmax(Image::Constant(20, 30, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(s.x, 14.5);
  EXPECT_DOUBLE_EQ(s.y, 9.5);
  EXPECT_EQ(s.confidence, 0.0);
}

TEST(SoftArgmax, IsolatedGaussiansWithinTenthPixel) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(8.0, 56.0);
  for (int i = 0; i < 50; ++i) {
    const double x = ux(rng), y = ux(rng);
    const SoftArgmax s = soft_argmax(gaussian_heatmap(64, 64, x, y, 2.0), 1.0);
    EXPECT_LT(std::hypot(s.x - x, s.y - y), 0.1);
  }
}

TEST(SoftArgmax, RejectsBadTemperature) {
  EXPECT_THROW(soft_argmax(Image::Zero(4, 4), 0.0), ValidationError);
}

TEST(RepBundle, ValidatesInputs) {
  JointTargets j{Points2d::Zero(2, 2), Eigen::VectorXd::Ones(2)};
  const Image ok = Image::Zero(16, 16);
  EXPECT_NO_THROW(RepBundle(j, ok, DepthPolarity::NearZero, ok));
  EXPECT_THROW(RepBundle(j, Image::Zero(16, 17), DepthPolarity::NearZero, ok), ShapeError);
  EXPECT_THROW(RepBundle(j, Image::Constant(16, 16, 1.5), DepthPolarity::NearZero, ok), ValidationError);
  JointTargets bad_conf = j;
  bad_conf.confidence(1) = 1.2;
  EXPECT_THROW(RepBundle(bad_conf, ok, DepthPolarity::NearZero, ok), ValidationError);
  Heatmaps few{std::vector<Image>(23, ok)};
  EXPECT_THROW(RepBundle(j, ok, DepthPolarity::NearZero, ok, few), ShapeError);
}

TEST(SynthesizeTargets, SelfConsistentAtGroundTruth) {
  const BodyParams gt = sample_ground_truth(toy(), 3, 128);
  const RepBundle b = synthesize_targets(toy(), gt, 128, 128);
  const RenderOutput r = render_body(toy(), gt, 128, 128);
  const LossBreakdown l = total_fit_loss(b, r, LossWeights{});
  EXPECT_EQ(l.depth, 0.0);
  EXPECT_EQ(l.mask, 0.0);
  EXPECT_EQ(l.joints, 0.0);
  EXPECT_TRUE((b.joints().confidence.array() == 1.0).all());
}

TEST(SynthesizeTargets, HeatmapRoundTrip) {
  const BodyParams gt = sample_ground_truth(toy(), 4, 128);
  SynthOptions opt;
  opt.heatmaps = true;
  const RepBundle b = synthesize_targets(toy(), gt, 128, 128, opt);
  ASSERT_TRUE(b.heatmaps().has_value());
  ASSERT_EQ(b.heatmaps()->channels.size(), 24u);
  const Points2d direct = project_joints(forward(toy(), gt).joints, Camera::from_params(gt, 128, 128));
  for (int k = 0; k < 24; ++k) {
    const SoftArgmax s = soft_argmax(b.heatmaps()->channels[k], 1.0);
    const bool interior = direct(k, 0) >= 8 && direct(k, 0) <= 119 && direct(k, 1) >= 8 && direct(k, 1) <= 119;
    if (interior) EXPECT_LT(std::hypot(s.x - direct(k, 0), s.y - direct(k, 1)), 0.1) << "joint " << k;
  }
}

TEST(SynthesizeTargets, SeedsGiveDifferentBundles) {
  const RepBundle a = synthesize_targets(toy(), sample_ground_truth(toy(), 1, 64), 64, 64);
  const RepBundle b = synthesize_targets(toy(), sample_ground_truth(toy(), 2, 64), 64, 64);
  EXPECT_GT((a.silhouette() - b.silhouette()).abs().sum(), 0.0);
}

TEST(SampleGroundTruth, StaysInsideRender) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const BodyParams gt = sample_ground_truth(toy(), seed, 128);
    const RenderOutput r = render_body(toy(), gt, 128, 128);
    EXPECT_EQ(r.silhouette.row(0).sum() + r.silhouette.row(127).sum(), 0.0) << seed;
    EXPECT_EQ(r.silhouette.col(0).sum() + r.silhouette.col(127).sum(), 0.0) << seed;
  }
}

TEST(PerturbParams, FollowsRecipe) {
  const BodyParams gt = sample_ground_truth(toy(), 5, 128);
  const BodyParams init = perturb_params(gt, 9);
  EXPECT_NEAR(std::abs(init.scale / gt.scale - 1.0), 0.10, 1e-12);
  int moved = 0;
  for (int j = 0; j < toy().num_joints(); ++j) moved += (init.theta.row(j) - gt.theta.row(j)).norm() > 0.0;
  EXPECT_LE(moved, 6);
  EXPECT_GE(moved, 1);
  EXPECT_EQ(init.translation, gt.translation);
  EXPECT_TRUE(perturb_params(gt, 9) == init);
}

TEST(BundleIo, RoundTrip) {
  const BodyParams gt = sample_ground_truth(toy(), 6, 96);
  SynthOptions opt;
  opt.heatmaps = true;
  const RepBundle b = synthesize_targets(toy(), gt, 96, 96, opt);
  TempDir dir("bundle");
  save_bundle(b, dir.path());
  const RepBundle c = load_bundle(dir.path());
  EXPECT_LE((b.depth() - c.depth()).abs().maxCoeff(), std::ldexp(1.0, -20));
  EXPECT_EQ((b.silhouette() - c.silhouette()).abs().maxCoeff(), 0.0);
  EXPECT_EQ(b.joints().coords, c.joints().coords);
  EXPECT_EQ(b.joints().confidence, c.joints().confidence);
  EXPECT_EQ(c.polarity(), DepthPolarity::NearZero);
  ASSERT_TRUE(c.heatmaps().has_value());
  for (int k = 0; k < 24; ++k) {
    EXPECT_LE((b.heatmaps()->channels[k] - c.heatmaps()->channels[k]).abs().maxCoeff(), 1e-7);
  }
}

TEST(BundleIo, ConfidenceSurvivesRoundTrip) {
  JointTargets j{Points2d::Constant(3, 2, 4.25), Eigen::Vector3d(1.0, 0.5, 0.0)};
  const RepBundle b(j, Image::Zero(16, 16), DepthPolarity::FarZero, Image::Zero(16, 16));
  TempDir dir("conf");
  save_bundle(b, dir.path());
  const RepBundle c = load_bundle(dir.path());
  EXPECT_EQ(c.joints().confidence, j.confidence);
  EXPECT_EQ(c.polarity(), DepthPolarity::FarZero);
}

class BundleErrors : public ::testing::Test {
 protected:
  void SetUp() override {
    save_bundle(synthesize_targets(toy(), sample_ground_truth(toy(), 8, 64), 64, 64), dir.path());
  }
  TempDir dir{"errors"};
};

TEST_F(BundleErrors, MissingMask) {
  std::filesystem::remove(dir.path() / "mask.pgm");
  try {
    load_bundle(dir.path());
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.kind(), IoErrorKind::MissingFile);
    EXPECT_NE(std::string(e.what()).find("mask.pgm"), std::string::npos);
  }
}

TEST_F(BundleErrors, SixteenBitMaskUnsupported) {
  std::ofstream out(dir.path() / "mask.pgm", std::ios::binary);
  out << "P5\n64 64\n65535\n" << std::string(64 * 64 * 2, '\0');
  out.close();
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::UnsupportedFormat);
}

TEST_F(BundleErrors, SizeMismatch) {
  io::write_pgm(dir.path() / "mask.pgm", Image::Zero(48, 64));
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::DimensionMismatch);
}

TEST_F(BundleErrors, MissingPolarity) {
  io::write_json(dir.path() / "depth.meta.json", {{"normalized", true}});
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::PolarityTag);
  io::write_json(dir.path() / "depth.meta.json", {{"polarity", "sideways"}, {"normalized", true}});
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::PolarityTag);
}

TEST_F(BundleErrors, MalformedPfmHeader) {
  std::ofstream out(dir.path() / "depth.pfm", std::ios::binary);
  out << "Pf\nsixty four\n-1.0\n";
  out.close();
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::MalformedHeader);
}

TEST_F(BundleErrors, BadJointsSchema) {
  std::ofstream(dir.path() / "joints.json") << "{\"x\": 1}";
  EXPECT_EQ(load_error(dir.path()), IoErrorKind::Schema);
}

}  // namespace
}  // namespace clothfit
