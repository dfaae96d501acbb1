// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/rendering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Projected triangle in translation-free screen space (q = scale * (x, y)).
// Pixel centres are compared as (px - tx, py - ty), which keeps integer
// shifts of the translation exact.
struct ScreenTriangle {
  Eigen::Vector2d a, b, c;
  double za, zb, zc;
  double area2;  // twice the signed area, > 0 after orientation fix
};

double edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

// Edges whose interior lies to the right (+x) or, when horizontal, below (+y).
bool top_left(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double dy = b.y() - a.y();
  const double dx = b.x() - a.x();
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

bool covers(double e, bool is_top_left) { return e > 0.0 || (e == 0.0 && is_top_left); }

ScreenTriangle project_face(const Vertices& vertices, const Faces& faces, Eigen::Index f, double scale) {
  ScreenTriangle t;
  const auto va = vertices.row(faces(f, 0));
  const auto vb = vertices.row(faces(f, 1));
  const auto vc = vertices.row(faces(f, 2));
  t.a = {scale * va(0), scale * va(1)};
  t.b = {scale * vb(0), scale * vb(1)};
  t.c = {scale * vc(0), scale * vc(1)};
  t.za = va(2);
  t.zb = vb(2);
  t.zc = vc(2);
  t.area2 = edge(t.a, t.b, t.c.x(), t.c.y());
  if (t.area2 < 0.0) {
    std::swap(t.b, t.c);
    std::swap(t.zb, t.zc);
    t.area2 = -t.area2;
  }
  return t;
}

// Conservative column range of row `py` where every edge value, as a linear
// function of px, can reach at least -slack_i (edges given as (a, b) pairs,
// value = (b.x - a.x)(py - a.y) - (b.y - a.y)(px - a.x)). Off by at most one
// pixel in the inclusive direction; the exact per-pixel test decides.
void row_span(const ScreenTriangle& t, double py, const double slack[3], double tx, int& x0, int& x1) {
  const Eigen::Vector2d* pts[3][2] = {{&t.a, &t.b}, {&t.b, &t.c}, {&t.c, &t.a}};
  double lo = -kInf;
  double hi = kInf;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d& a = *pts[i][0];
    const Eigen::Vector2d& b = *pts[i][1];
    const double slope = -(b.y() - a.y());                            // d value / d px
    const double at_zero = (b.x() - a.x()) * (py - a.y()) + (b.y() - a.y()) * a.x();  // value at px = 0
    const double need = -slack[i] - at_zero;                           // slope * px >= need
    if (slope > 0.0) {
      lo = std::max(lo, need / slope);
    } else if (slope < 0.0) {
      hi = std::min(hi, need / slope);
    } else if (need > 0.0) {
      x0 = 1;
      x1 = 0;
      return;
    }
  }
  if (lo > -kInf) x0 = std::max(x0, static_cast<int>(std::floor(lo + tx)) - 1);
  if (hi < kInf) x1 = std::min(x1, static_cast<int>(std::ceil(hi + tx)) + 1);
}

void check_camera(const Camera& cam) {
  if (cam.height < 16 || cam.width < 16) throw ValidationError("camera: image must be at least 16x16");
  if (!(cam.scale > 0.0) || !std::isfinite(cam.scale) || !cam.translation.allFinite()) {
    throw ValidationError("camera: scale must be positive and finite");
  }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unit-normal form of the line through (p, q): distance = a x + b y + c,
// positive on the interior side of a counterclockwise (area2 > 0) triangle.
struct Line {
  double a, b, c, inv_a;

  Line(const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    const double dx = q.x() - p.x();
    const double dy = q.y() - p.y();
    const double inv_len = 1.0 / std::sqrt(dx * dx + dy * dy);
    a = -dy * inv_len;
    b = dx * inv_len;
    c = (dy * p.x() - dx * p.y()) * inv_len;
    inv_a = a != 0.0 ? 1.0 / a : 0.0;
  }
};

struct Segment {
  double ax, ay, dx, dy, inv_len2;

  Segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
      : ax(a.x()), ay(a.y()), dx(b.x() - a.x()), dy(b.y() - a.y()) {
    const double len2 = dx * dx + dy * dy;
    inv_len2 = len2 > 0.0 ? 1.0 / len2 : 0.0;
  }

  double squared_distance(double px, double py) const {
    const double qx = px - ax;
    const double qy = py - ay;
    const double t = std::clamp((qx * dx + qy * dy) * inv_len2, 0.0, 1.0);
    const double ex = qx - t * dx;
    const double ey = qy - t * dy;
    return ex * ex + ey * ey;
  }
};

}  // namespace

Camera Camera::make(double scale, const Eigen::Vector2d& translation, int height, int width) {
  Camera cam{scale, translation, height, width};
  check_camera(cam);
  return cam;
}

Points2d project_joints(const JointPositions& joints, const Camera& cam) {
  Points2d out(joints.rows(), 2);
  for (Eigen::Index j = 0; j < joints.rows(); ++j) {
    out(j, 0) = cam.scale * joints(j, 0) + cam.translation.x();
    out(j, 1) = cam.scale * joints(j, 1) + cam.translation.y();
  }
  return out;
}

void rasterize_zbuffer(const Vertices& vertices, const Faces& faces, const Camera& cam, const PixelRect& rect,
                       Image& zbuf) {
  check_camera(cam);
  if (zbuf.rows() != cam.height || zbuf.cols() != cam.width) throw ShapeError("rasterize_zbuffer: buffer size");
  const double tx = cam.translation.x();
  const double ty = cam.translation.y();
  const PixelRect r{std::max(rect.x0, 0), std::max(rect.y0, 0), std::min(rect.x1, cam.width - 1),
                    std::min(rect.y1, cam.height - 1)};
  if (r.empty()) return;
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) zbuf(y, x) = kInf;

  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const ScreenTriangle t = project_face(vertices, faces, f, cam.scale);
    if (t.area2 == 0.0) continue;
    const double min_x = std::min({t.a.x(), t.b.x(), t.c.x()}) + tx;
    const double max_x = std::max({t.a.x(), t.b.x(), t.c.x()}) + tx;
    const double min_y = std::min({t.a.y(), t.b.y(), t.c.y()}) + ty;
    const double max_y = std::max({t.a.y(), t.b.y(), t.c.y()}) + ty;
    // One pixel of slack absorbs rounding in the bbox; the edge test decides.
    const int x0 = std::max(r.x0, static_cast<int>(std::floor(min_x)) - 1);
    const int x1 = std::min(r.x1, static_cast<int>(std::ceil(max_x)) + 1);
    const int y0 = std::max(r.y0, static_cast<int>(std::floor(min_y)) - 1);
    const int y1 = std::min(r.y1, static_cast<int>(std::ceil(max_y)) + 1);
    if (x0 > x1 || y0 > y1) continue;

    const bool tl_ab = top_left(t.a, t.b);
    const bool tl_bc = top_left(t.b, t.c);
    const bool tl_ca = top_left(t.c, t.a);
    const double no_slack[3] = {0.0, 0.0, 0.0};
    for (int y = y0; y <= y1; ++y) {
      const double py = y - ty;
      int xs = x0, xe = x1;
      row_span(t, py, no_slack, tx, xs, xe);
      for (int x = xs; x <= xe; ++x) {
        const double px = x - tx;
        const double e_bc = edge(t.b, t.c, px, py);
        const double e_ca = edge(t.c, t.a, px, py);
        const double e_ab = edge(t.a, t.b, px, py);
        if (!covers(e_bc, tl_bc) || !covers(e_ca, tl_ca) || !covers(e_ab, tl_ab)) continue;
        const double z = (e_bc * t.za + e_ca * t.zb + e_ab * t.zc) / t.area2;
        if (z < zbuf(y, x)) zbuf(y, x) = z;
      }
    }
  }
}

RenderOutput resolve_depth(const Image& zbuf) {
  double z_min = kInf;
  double z_max = -kInf;
  for (Eigen::Index i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data()[i];
    if (z == kInf) continue;
    z_min = std::min(z_min, z);
    z_max = std::max(z_max, z);
  }
  if (z_min == kInf) throw EmptyRenderError("rasterize_hard: mesh covers no pixel of the image");

  RenderOutput out;
  out.silhouette = Image::Zero(zbuf.rows(), zbuf.cols());
  out.depth = Image::Zero(zbuf.rows(), zbuf.cols());
  const double range = z_max - z_min;
  for (Eigen::Index i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data()[i];
    if (z == kInf) continue;
    out.silhouette.data()[i] = 1.0;
    out.depth.data()[i] = range > 0.0 ? (z - z_min) / range : 0.0;
  }
  out.polarity = DepthPolarity::NearZero;
  return out;
}

RenderOutput rasterize_hard(const Vertices& vertices, const Faces& faces, const Camera& cam) {
  check_camera(cam);
  Image zbuf(cam.height, cam.width);
  rasterize_zbuffer(vertices, faces, cam, PixelRect::full(cam.height, cam.width), zbuf);
  return resolve_depth(zbuf);
}

void rasterize_soft(const Vertices& vertices, const Faces& faces, const Camera& cam, double sigma,
                    const PixelRect& rect, Image& out) {
  check_camera(cam);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("rasterize_soft: sigma must be > 0");
  if (out.rows() != cam.height || out.cols() != cam.width) throw ShapeError("rasterize_soft: buffer size");
  const double tx = cam.translation.x();
  const double ty = cam.translation.y();
  const double reach = 3.0 * sigma;
  const double inv_sigma = 1.0 / sigma;
  const PixelRect r{std::max(rect.x0, 0), std::max(rect.y0, 0), std::min(rect.x1, cam.width - 1),
                    std::min(rect.y1, cam.height - 1)};
  if (r.empty()) return;

  // Product of (1 - sigmoid(d / sigma)) = sigmoid(-d / sigma), accumulated in `out`.
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) out(y, x) = 1.0;
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const ScreenTriangle t = project_face(vertices, faces, f, cam.scale);
    if (t.area2 == 0.0) continue;
    const double min_x = std::min({t.a.x(), t.b.x(), t.c.x()}) + tx - reach;
    const double max_x = std::max({t.a.x(), t.b.x(), t.c.x()}) + tx + reach;
    const double min_y = std::min({t.a.y(), t.b.y(), t.c.y()}) + ty - reach;
    const double max_y = std::max({t.a.y(), t.b.y(), t.c.y()}) + ty + reach;
    const int x0 = std::max(r.x0, static_cast<int>(std::ceil(min_x)));
    const int x1 = std::min(r.x1, static_cast<int>(std::floor(max_x)));
    const int y0 = std::max(r.y0, static_cast<int>(std::ceil(min_y)));
    const int y1 = std::min(r.y1, static_cast<int>(std::floor(max_y)));
    if (x0 > x1 || y0 > y1) continue;

    const Segment seg_ab(t.a, t.b), seg_bc(t.b, t.c), seg_ca(t.c, t.a);
    const Line lines[3] = {Line(t.a, t.b), Line(t.b, t.c), Line(t.c, t.a)};
    for (int y = y0; y <= y1; ++y) {
      const double py = y - ty;
      // Columns where every line distance is >= -reach.
      double lo = x0, hi = x1;
      double k[3];
      for (int i = 0; i < 3; ++i) {
        k[i] = lines[i].b * py + lines[i].c;
        const double bound = (-reach - k[i]) * lines[i].inv_a + tx;
        if (lines[i].a > 0.0) lo = std::max(lo, std::floor(bound) - 1.0);
        else if (lines[i].a < 0.0) hi = std::min(hi, std::ceil(bound) + 1.0);
        else if (k[i] < -reach) hi = lo - 1.0;
      }
      const int xs = static_cast<int>(lo);
      const int xe = static_cast<int>(hi);
      for (int x = xs; x <= xe; ++x) {
        const double px = x - tx;
        // Signed distances to the three supporting lines, positive inside.
        const double d_line = std::min({lines[0].a * px + k[0], lines[1].a * px + k[1], lines[2].a * px + k[2]});
        double d;
        if (d_line >= 0.0) {
          d = d_line;
        } else {
          if (d_line < -reach) continue;  // the triangle lies beyond that line
          d = -std::sqrt(std::min({seg_ab.squared_distance(px, py), seg_bc.squared_distance(px, py),
                                   seg_ca.squared_distance(px, py)}));
          if (d < -reach) continue;
        }
        out(y, x) *= logistic(-d * inv_sigma);
      }
    }
  }
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) out(y, x) = 1.0 - out(y, x);
}

Image rasterize_soft(const Vertices& vertices, const Faces& faces, const Camera& cam, double sigma) {
  check_camera(cam);
  Image out(cam.height, cam.width);
  rasterize_soft(vertices, faces, cam, sigma, PixelRect::full(cam.height, cam.width), out);
  return out;
}

double default_soft_sigma(int render_height) { return render_height / 256.0; }

RenderOutput render_body(const BodyModel& model, const BodyParams& params, int height, int width) {
  params.validate(model);
  const Camera cam = Camera::from_params(params, height, width);
  const PosedBody body = forward(model, params);
  RenderOutput out = rasterize_hard(body.vertices, model.faces(), cam);
  out.joints2d = project_joints(body.joints, cam);
  return out;
}

}  // namespace clothfit
