// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clothfit/errors.hpp"
#include "clothfit/rendering.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace clothfit {
namespace {

const BodyModel& toy() {
  static const BodyModel model = make_toy_model(ToyModelSpec{});
  return model;
}

BodyParams toy_params(int size) {
  const BodyModel& m = toy();
  const double s = 0.7 * size / m.rest_height();
  return BodyParams::rest(m, s, {size / 2.0, size / 2.0});
}

// Two triangles spanning [x0, x1] x [y0, y1] at depth z.
void add_quad(Vertices& v, Faces& f, double x0, double y0, double x1, double y1, double z) {
  const int base = static_cast<int>(v.rows());
  v.conservativeResize(base + 4, 3);
  v.row(base + 0) << x0, y0, z;
  v.row(base + 1) << x1, y0, z;
  v.row(base + 2) << x1, y1, z;
  v.row(base + 3) << x0, y1, z;
  const int fb = static_cast<int>(f.rows());
  f.conservativeResize(fb + 2, 3);
  f.row(fb + 0) << base + 0, base + 2, base + 1;
  f.row(fb + 1) << base + 0, base + 3, base + 2;
}

// Soft silhouette straight from its definition, every face, explicit cutoff.
double soft_oracle(const Vertices& v, const Faces& f, const Camera& cam, double sigma, int x, int y) {
  double prod = 1.0;
  for (int k = 0; k < f.rows(); ++k) {
    Eigen::Vector2d p[3];
    for (int i = 0; i < 3; ++i) p[i] = oracle::project(v.row(f(k, i)).transpose(), cam.scale, cam.translation);
    const double cross = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
    if (cross == 0.0) continue;
    const Eigen::Vector2d q(x, y);
    double dist = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d a = p[i], b = p[(i + 1) % 3];
      const double e = ((b - a).x() * (q - a).y() - (b - a).y() * (q - a).x()) * (cross > 0 ? 1.0 : -1.0);
      if (e < 0.0) inside = false;
      const double t = std::clamp((q - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
      dist = std::min(dist, (q - (a + t * (b - a))).norm());
    }
    const double d = inside ? dist : -dist;
    if (d < -3.0 * sigma) continue;
    prod *= 1.0 - 1.0 / (1.0 + std::exp(-d / sigma));
  }
  return 1.0 - prod;
}

TEST(ProjectJoints, DropsDepth) {
  JointPositions j(2, 3);
  j << 0, 0, 5.0, 1, 0, -3.0;
  const Points2d p = project_joints(j, Camera::make(100.0, {128, 128}, 256, 256));
  EXPECT_EQ(p(0, 0), 128.0);
  EXPECT_EQ(p(0, 1), 128.0);
  const Points2d q = project_joints(j, Camera::make(100.0, {0, 0}, 256, 256));
  EXPECT_EQ(q(1, 0), 100.0);
  EXPECT_EQ(q(1, 1), 0.0);
}

TEST(ProjectJoints, MatchesHomogeneousOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    JointPositions j(24, 3);
    for (Eigen::Index i = 0; i < j.size(); ++i) j.data()[i] = u(rng);
    const Camera cam = Camera::make(50.0 + 20.0 * u(rng), {100 + 10 * u(rng), 90 + 10 * u(rng)}, 200, 200);
    const Points2d p = project_joints(j, cam);
    for (int k = 0; k < 24; ++k) {
      const Eigen::Vector2d o = oracle::project(j.row(k).transpose(), cam.scale, cam.translation);
      EXPECT_NEAR(p(k, 0), o.x(), 1e-9);
      EXPECT_NEAR(p(k, 1), o.y(), 1e-9);
    }
  }
}

TEST(Camera, ValidatesArguments) {
  EXPECT_THROW(Camera::make(1.0, {0, 0}, 15, 32), ValidationError);
  EXPECT_THROW(Camera::make(0.0, {0, 0}, 32, 32), ValidationError);
  EXPECT_THROW(Camera::make(std::nan(""), {0, 0}, 32, 32), ValidationError);
}

TEST(RasterizeHard, FlatQuadCoversHalfOpenSquare) {
  Vertices v(0, 3);
  Faces f(0, 3);
  add_quad(v, f, 4, 4, 8, 8, 1.0);
  const RenderOutput r = rasterize_hard(v, f, Camera::make(1.0, {0, 0}, 16, 16));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool in = x >= 4 && x < 8 && y >= 4 && y < 8;
      EXPECT_EQ(r.silhouette(y, x), in ? 1.0 : 0.0) << x << "," << y;
      EXPECT_EQ(r.depth(y, x), 0.0);
    }
  EXPECT_EQ(r.silhouette.sum(), 16.0);
}

TEST(RasterizeHard, TwoDepthLevels) {
  Vertices v(0, 3);
  Faces f(0, 3);
  add_quad(v, f, 2, 2, 6, 6, 1.0);
  add_quad(v, f, 10, 10, 14, 14, 2.0);
  const RenderOutput r = rasterize_hard(v, f, Camera::make(1.0, {0, 0}, 16, 16));
  EXPECT_EQ(r.depth(3, 3), 0.0);
  EXPECT_EQ(r.depth(11, 11), 1.0);
  EXPECT_EQ(r.silhouette(11, 11), 1.0);
}

TEST(RasterizeHard, NearestSurfaceWins) {
  Vertices v(0, 3);
  Faces f(0, 3);
  add_quad(v, f, 2, 2, 10, 10, 3.0);
  add_quad(v, f, 4, 4, 8, 8, 1.0);
  add_quad(v, f, 12, 12, 14, 14, 5.0);
  const RenderOutput r = rasterize_hard(v, f, Camera::make(1.0, {0, 0}, 16, 16));
  EXPECT_EQ(r.depth(5, 5), 0.0);
  EXPECT_DOUBLE_EQ(r.depth(3, 3), 0.5);
  EXPECT_EQ(r.depth(13, 13), 1.0);
}

TEST(RasterizeHard, SharedEdgesCoverEachPixelOnce) {
  // A fan of triangles around (8, 8) tiles the square [2, 14)^2 exactly.
  Vertices v(9, 3);
  v << 8, 8, 0, 2, 2, 0, 8, 2, 0, 14, 2, 0, 14, 8, 0, 14, 14, 0, 8, 14, 0, 2, 14, 0, 2, 8, 0;
  Faces f(8, 3);
  for (int i = 0; i < 8; ++i) f.row(i) << 0, 1 + i, 1 + (i + 1) % 8;
  const Camera cam = Camera::make(1.0, {0, 0}, 16, 16);
  Image count = Image::Zero(16, 16);
  for (int i = 0; i < 8; ++i) {
    try {
      count += rasterize_hard(v, f.row(i), cam).silhouette;
    } catch (const EmptyRenderError&) {
    }
  }
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool in = x >= 2 && x < 14 && y >= 2 && y < 14;
      EXPECT_EQ(count(y, x), in ? 1.0 : 0.0) << x << "," << y;
    }
}

TEST(RasterizeHard, MatchesBruteForceOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Vertices v;
    Faces f;
    testing_support::random_mesh(rng, 12, v, f);
    const double s = 20.0;
    const Eigen::Vector2d t(32.0, 32.0);
    const RenderOutput r = rasterize_hard(v, f, Camera::make(s, t, 64, 64));
    const oracle::RasterResult o = oracle::raster(v, f.cast<int>(), s, t, 64, 64);
    double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        ASSERT_EQ(r.silhouette(y, x) == 1.0, o.covered[y][x]) << "trial " << trial << " at " << x << "," << y;
        if (o.covered[y][x]) {
          zmin = std::min(zmin, o.z[y][x]);
          zmax = std::max(zmax, o.z[y][x]);
        }
      }
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        if (o.covered[y][x]) EXPECT_NEAR(r.depth(y, x), (o.z[y][x] - zmin) / (zmax - zmin), 1e-9);
      }
  }
}

TEST(RasterizeHard, ToyBodyMatchesOracleCount) {
  const BodyParams p = toy_params(96);
  const PosedBody body = forward(toy(), p);
  const RenderOutput r = rasterize_hard(body.vertices, toy().faces(), Camera::from_params(p, 96, 96));
  const oracle::RasterResult o =
      oracle::raster(body.vertices, toy().faces().cast<int>(), p.scale, p.translation, 96, 96);
  int count = 0;
  for (const auto& row : o.covered)
    for (bool c : row) count += c;
  EXPECT_EQ(r.silhouette.sum(), count);
}

TEST(RasterizeHard, DepthNormalisedToUnitRange) {
  const BodyParams p = toy_params(128);
  const RenderOutput r = render_body(toy(), p, 128, 128);
  double lo = 2.0, hi = -1.0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      if (r.silhouette(y, x) < 0.5) {
        EXPECT_EQ(r.depth(y, x), 0.0);
        continue;
      }
      lo = std::min(lo, r.depth(y, x));
      hi = std::max(hi, r.depth(y, x));
    }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
  EXPECT_EQ(r.polarity, DepthPolarity::NearZero);
}

TEST(RasterizeHard, IntegerShiftIsExact) {
  const BodyParams p = toy_params(128);
  BodyParams q = p;
  q.translation += Eigen::Vector2d(5.0, -3.0);
  const RenderOutput a = render_body(toy(), p, 128, 128);
  const RenderOutput b = render_body(toy(), q, 128, 128);
  for (int y = 3; y < 128; ++y)
    for (int x = 0; x + 5 < 128; ++x) {
      ASSERT_EQ(b.silhouette(y - 3, x + 5), a.silhouette(y, x));
      ASSERT_EQ(b.depth(y - 3, x + 5), a.depth(y, x));
    }
}

TEST(RasterizeHard, CoverageGrowsWithScale) {
  BodyParams p = toy_params(128);
  double previous = 0.0;
  for (double f : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    BodyParams q = p;
    q.scale = p.scale * f;
    const double area = render_body(toy(), q, 128, 128).silhouette.sum();
    EXPECT_GE(area, previous);
    previous = area;
  }
}

TEST(RasterizeHard, OffscreenMeshThrows) {
  BodyParams p = toy_params(64);
  p.translation = {-500.0, -500.0};
  EXPECT_THROW(render_body(toy(), p, 64, 64), EmptyRenderError);
}

TEST(RasterizeHard, RegionPassMatchesFullRender) {
  const BodyParams p = toy_params(64);
  const PosedBody body = forward(toy(), p);
  const Camera cam = Camera::from_params(p, 64, 64);
  Image full(64, 64), part = Image::Constant(64, 64, -7.0);
  rasterize_zbuffer(body.vertices, toy().faces(), cam, PixelRect::full(64, 64), full);
  const PixelRect rect{10, 20, 40, 50};
  rasterize_zbuffer(body.vertices, toy().faces(), cam, rect, part);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const bool in = x >= rect.x0 && x <= rect.x1 && y >= rect.y0 && y <= rect.y1;
      EXPECT_EQ(part(y, x), in ? full(y, x) : -7.0);
    }
}

TEST(RasterizeSoft, MatchesDefinition) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    Vertices v;
    Faces f;
    testing_support::random_mesh(rng, 6, v, f);
    const Camera cam = Camera::make(10.0, {16.0, 16.0}, 32, 32);
    for (double sigma : {0.5, 1.0, 2.0}) {
      const Image m = rasterize_soft(v, f, cam, sigma);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) EXPECT_NEAR(m(y, x), soft_oracle(v, f, cam, sigma, x, y), 1e-12);
    }
  }
}

TEST(RasterizeSoft, InteriorSaturatesAndEdgeIsHalf) {
  Vertices v(3, 3);
  v << 2, 2, 0, 30, 2, 0, 2, 30, 0;
  Faces f(1, 3);
  f << 0, 1, 2;
  const Image m = rasterize_soft(v, f, Camera::make(1.0, {0, 0}, 32, 32), 1.0);
  EXPECT_GT(m(11, 11), 0.99);
  EXPECT_NEAR(m(2, 10), 0.5, 1e-6);
  EXPECT_NEAR(m(10, 2), 0.5, 1e-6);
  EXPECT_EQ(m(31, 31), 0.0);
}

TEST(RasterizeSoft, ConvergesToHardSilhouette) {
  const BodyParams p = toy_params(256);
  const PosedBody body = forward(toy(), p);
  const Camera cam = Camera::from_params(p, 256, 256);
  const Image hard = rasterize_hard(body.vertices, toy().faces(), cam).silhouette;
  const Image sharp = rasterize_soft(body.vertices, toy().faces(), cam, 0.05);
  const double differing = ((sharp >= 0.5).cast<double>() - hard).abs().sum();
  EXPECT_LT(differing, 0.02 * 256 * 256);

  double previous = std::numeric_limits<double>::infinity();
  for (double sigma : {2.0, 1.0, 0.5, 0.1}) {
    const double gap = (rasterize_soft(body.vertices, toy().faces(), cam, sigma) - hard).abs().sum();
    EXPECT_LE(gap, previous) << "sigma " << sigma;
    previous = gap;
  }
}

TEST(RasterizeSoft, RegionPassMatchesFullRender) {
  const BodyParams p = toy_params(64);
  const PosedBody body = forward(toy(), p);
  const Camera cam = Camera::from_params(p, 64, 64);
  const Image full = rasterize_soft(body.vertices, toy().faces(), cam, 0.75);
  Image part = Image::Constant(64, 64, -1.0);
  const PixelRect rect{5, 30, 60, 41};
  rasterize_soft(body.vertices, toy().faces(), cam, 0.75, rect, part);
  for (int y = rect.y0; y <= rect.y1; ++y)
    for (int x = rect.x0; x <= rect.x1; ++x) EXPECT_EQ(part(y, x), full(y, x));
  EXPECT_EQ(part(0, 0), -1.0);
}

TEST(RasterizeSoft, RejectsNonPositiveSigma) {
  const BodyParams p = toy_params(64);
  const PosedBody body = forward(toy(), p);
  EXPECT_THROW(rasterize_soft(body.vertices, toy().faces(), Camera::from_params(p, 64, 64), 0.0), ValidationError);
}

TEST(SoftSigma, ScalesWithHeight) {
  EXPECT_EQ(default_soft_sigma(256), 1.0);
  EXPECT_EQ(default_soft_sigma(128), 0.5);
}

}  // namespace
}  // namespace clothfit
