// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "clothfit/body_model.hpp"
#include "clothfit/image.hpp"

namespace clothfit {

using Points2d = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Weak-perspective camera: p = scale * (x, y) + translation, z is dropped.
struct Camera {
  double scale = 1.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();
  int height = 256;
  int width = 256;

  /// Validates H, W >= 16 and scale > 0.
  static Camera make(double scale, const Eigen::Vector2d& translation, int height, int width);
  static Camera from_params(const BodyParams& params, int height, int width) {
    return make(params.scale, params.translation, height, width);
  }
};

/// Which end of the normalised depth range the nearest surface maps to.
enum class DepthPolarity { NearZero, FarZero };

struct RenderOutput {
  Image silhouette;   // H x W in [0, 1]
  Image depth;        // H x W in [0, 1], background 0
  Points2d joints2d;  // J x 2 pixel coordinates
  DepthPolarity polarity = DepthPolarity::NearZero;
};

/// Pixel coordinates of `joints`. d/dscale = (x, y); d/dtranslation = identity.
Points2d project_joints(const JointPositions& joints, const Camera& cam);

/// Z-buffered rasterisation. A pixel is covered iff its centre lies inside a
/// projected triangle (top-left rule on edges). Depth is camera z of the
/// nearest surface, affinely normalised over the foreground so the nearest
/// pixel is 0 and the farthest 1. Exact z ties go to the lower face index.
/// Throws EmptyRenderError if no pixel is covered.
RenderOutput rasterize_hard(const Vertices& vertices, const Faces& faces, const Camera& cam);

/// Logistic soft silhouette:
///   m(p) = 1 - prod_f (1 - sigmoid(d_f(p) / sigma))
/// with d_f the signed distance (positive inside) to projected triangle f.
/// Triangles farther than 3 sigma from p contribute a factor of 1.
Image rasterize_soft(const Vertices& vertices, const Faces& faces, const Camera& cam, double sigma);

/// Soft-silhouette width for a given render height: 1 px at 256, proportional otherwise.
double default_soft_sigma(int render_height);

/// Inclusive pixel rectangle.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  static PixelRect full(int height, int width) { return {0, 0, width - 1, height - 1}; }
  bool empty() const noexcept { return x1 < x0 || y1 < y0; }
};

// Region-restricted passes. Each pixel inside `rect` receives exactly the value
// the full-image pass would give it; pixels outside are left untouched.

/// Nearest camera z per pixel (+inf on background) into `zbuf` (H x W).
void rasterize_zbuffer(const Vertices& vertices, const Faces& faces, const Camera& cam, const PixelRect& rect,
                       Image& zbuf);
/// Soft silhouette values into `out` (H x W).
void rasterize_soft(const Vertices& vertices, const Faces& faces, const Camera& cam, double sigma,
                    const PixelRect& rect, Image& out);
/// Silhouette and normalised depth from a z-buffer. Throws EmptyRenderError if empty.
RenderOutput resolve_depth(const Image& zbuf);

/// Hard render of a posed body, with projected joints filled in.
RenderOutput render_body(const BodyModel& model, const BodyParams& params, int height, int width);

}  // namespace clothfit
