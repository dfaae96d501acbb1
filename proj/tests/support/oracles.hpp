// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Slow reference implementations used only by the tests. None of them call
// into the library's numerical code.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace oracle {

using Grid = std::vector<std::vector<double>>;  // [row][col]
using Planes = std::vector<Grid>;               // [channel][row][col]

inline Grid grid(int h, int w, double fill = 0.0) { return Grid(h, std::vector<double>(w, fill)); }

// Mirror without edge repeat, by walking back and forth.
inline int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// Bilinear value at continuous (x, y) as a tent-weighted sum over every
// source pixel, after clamping (x, y) into the image.
inline double tent_sample(const Grid& g, double x, double y) {
  const int h = static_cast<int>(g.size());
  const int w = static_cast<int>(g[0].size());
  x = std::clamp(x, 0.0, w - 1.0);
  y = std::clamp(y, 0.0, h - 1.0);
  double acc = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const double wy = std::max(0.0, 1.0 - std::abs(i - y));
      const double wx = std::max(0.0, 1.0 - std::abs(j - x));
      acc += wy * wx * g[i][j];
    }
  return acc;
}

inline Grid downsample(const Grid& g, int s) {
  const int h = static_cast<int>(g.size()) / s;
  const int w = static_cast<int>(g[0].size()) / s;
  Grid out = grid(h, w);
  for (int Y = 0; Y < h; ++Y)
    for (int X = 0; X < w; ++X) out[Y][X] = tent_sample(g, s * (X + 0.5) - 0.5, s * (Y + 0.5) - 0.5);
  return out;
}

inline Grid upsample2(const Grid& g) {
  const int h = 2 * static_cast<int>(g.size());
  const int w = 2 * static_cast<int>(g[0].size());
  Grid out = grid(h, w);
  for (int Y = 0; Y < h; ++Y)
    for (int X = 0; X < w; ++X) out[Y][X] = tent_sample(g, (X + 0.5) / 2.0 - 0.5, (Y + 0.5) / 2.0 - 0.5);
  return out;
}

// Dense 2D Gaussian convolution with mirrored borders.
inline Grid blur(const Grid& g, double sigma, int radius) {
  const int h = static_cast<int>(g.size());
  const int w = static_cast<int>(g[0].size());
  double norm = 0.0;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  Grid out = grid(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
          const double k = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) / norm;
          acc += k * g[mirror(y + dy, h)][mirror(x + dx, w)];
        }
      out[y][x] = acc;
    }
  return out;
}

inline Grid blur_down16(const Grid& matte) { return downsample(blur(matte, 8.0, 24), 16); }

// Band where the (clipped) square window sees foreground but is not all foreground.
inline Grid boundary(const Grid& matte, int r) {
  const int h = static_cast<int>(matte.size());
  const int w = static_cast<int>(matte[0].size());
  Grid out = grid(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool any = false, all = true;
      for (int i = std::max(0, y - r); i <= std::min(h - 1, y + r); ++i)
        for (int j = std::max(0, x - r); j <= std::min(w - 1, x + r); ++j) {
          const bool fg = matte[i][j] >= 0.5;
          any = any || fg;
          all = all && fg;
        }
      out[y][x] = (any && !all) ? 1.0 : 0.0;
    }
  return out;
}

// out[co][y][x] = relu(bias[co] + sum kernel[ky][kx][ci][co] * in[ci][y+ky-r][x+kx-r]).
inline Planes conv_relu(const Planes& in, int k, int cout, const std::vector<double>& kernel,
                        const std::vector<double>& bias) {
  const int cin = static_cast<int>(in.size());
  const int h = static_cast<int>(in[0].size());
  const int w = static_cast<int>(in[0][0].size());
  const int r = k / 2;
  Planes out(cout, grid(h, w));
  for (int co = 0; co < cout; ++co)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = bias[co];
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx)
            for (int ci = 0; ci < cin; ++ci) {
              const double wgt = kernel[((ky * k + kx) * cin + ci) * cout + co];
              acc += wgt * in[ci][mirror(y + ky - r, h)][mirror(x + kx - r, w)];
            }
        out[co][y][x] = std::max(0.0, acc);
      }
  return out;
}

inline double mean_abs(const Grid& a, const Grid& b) {
  double s = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j, ++n) s += std::abs(a[i][j] - b[i][j]);
  return s / n;
}

inline double loss_cm(const Grid& coarse, const Grid& matte) {
  const Grid t = blur_down16(matte);
  double s = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].size(); ++j, ++n) s += (coarse[i][j] - t[i][j]) * (coarse[i][j] - t[i][j]);
  return 0.5 * s / n;
}

inline double loss_edge(const Grid& edge, const Grid& matte, int r) {
  const Grid m = boundary(matte, r);
  double s = 0.0, count = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      s += m[i][j] * std::abs(edge[i][j] - matte[i][j]);
      count += m[i][j];
    }
  return s / std::max(1.0, count);
}

// SSIM with per-pixel weighted window statistics (11x11 Gaussian, sigma 1.5).
inline double ssim(const Grid& a, const Grid& b) {
  const int h = static_cast<int>(a.size());
  const int w = static_cast<int>(a[0].size());
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int r = 5;
  double norm = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
  double total = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const double k = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)) / norm;
          const double va = a[mirror(y + dy, h)][mirror(x + dx, w)];
          const double vb = b[mirror(y + dy, h)][mirror(x + dx, w)];
          ma += k * va;
          mb += k * vb;
          saa += k * va * va;
          sbb += k * vb * vb;
          sab += k * va * vb;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  return total / (h * w);
}

inline double kl(const Grid& p, const Grid& q) {
  const double eps = 1e-6;
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[i].size(); ++j) {
      sp += p[i][j] + eps;
      sq += q[i][j] + eps;
    }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[i].size(); ++j) {
      const double pi = (p[i][j] + eps) / sp;
      const double qi = (q[i][j] + eps) / sq;
      d += pi * std::log(pi / qi);
    }
  return d;
}

inline double loss_cut(const Grid& cut, const Grid& matte) {
  return mean_abs(cut, matte) + (1.0 - ssim(cut, matte)) + kl(matte, cut);
}

inline double loss_cloth(const Grid& coarse, const Grid& edge, const Grid& cut, const Grid& matte, int r) {
  return 4.0 * loss_edge(edge, matte, r) + 4.0 * loss_cut(cut, matte) + 2.0 * loss_cm(coarse, matte);
}

// ---- geometry ----

// Rotation from a unit quaternion built out of the axis-angle vector.
inline Eigen::Matrix3d quaternion_rotation(const Eigen::Vector3d& aa) {
  const double angle = aa.norm();
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
  if (angle > 0.0) {
    const double s = std::sin(angle / 2.0) / angle;
    w = std::cos(angle / 2.0);
    x = aa.x() * s;
    y = aa.y() * s;
    z = aa.z() * s;
  }
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
       2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
       2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

struct Posed {
  Eigen::MatrixXd vertices;  // V x 3
  Eigen::MatrixXd joints;    // J x 3
};

// Linear blend skinning with 4x4 homogeneous transforms along the tree.
// `pose_basis` may be empty.
inline Posed skin(const Eigen::MatrixXd& templ, const Eigen::MatrixXd& shape_basis, const Eigen::MatrixXd& regressor,
                  const Eigen::MatrixXd& weights, const std::vector<int>& parents, const Eigen::MatrixXd& pose_basis,
                  const Eigen::VectorXd& beta, const Eigen::MatrixXd& theta) {
  const int V = static_cast<int>(templ.rows());
  const int J = static_cast<int>(parents.size());
  Eigen::MatrixXd shaped = templ;
  for (int v = 0; v < V; ++v)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < beta.size(); ++b) shaped(v, a) += shape_basis(3 * v + a, b) * beta(b);
  const Eigen::MatrixXd rest = regressor * shaped;

  std::vector<Eigen::Matrix3d> rot(J);
  for (int j = 0; j < J; ++j) rot[j] = quaternion_rotation(theta.row(j).transpose());
  if (pose_basis.size() > 0) {
    for (int v = 0; v < V; ++v)
      for (int a = 0; a < 3; ++a) {
        double d = 0.0;
        for (int j = 1; j < J; ++j)
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
              const double f = rot[j](r, c) - (r == c ? 1.0 : 0.0);
              d += pose_basis(3 * v + a, 9 * (j - 1) + 3 * r + c) * f;
            }
        shaped(v, a) += d;
      }
  }

  std::vector<Eigen::Matrix4d> world(J);
  for (int j = 0; j < J; ++j) {
    Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
    local.topLeftCorner<3, 3>() = rot[j];
    const Eigen::Vector3d offset =
        parents[j] < 0 ? Eigen::Vector3d(rest.row(j).transpose()) : Eigen::Vector3d((rest.row(j) - rest.row(parents[j])).transpose());
    local.topRightCorner<3, 1>() = offset;
    world[j] = parents[j] < 0 ? local : Eigen::Matrix4d(world[parents[j]] * local);
  }
  Posed out;
  out.joints.resize(J, 3);
  for (int j = 0; j < J; ++j) out.joints.row(j) = world[j].topRightCorner<3, 1>().transpose();
  out.vertices = Eigen::MatrixXd::Zero(V, 3);
  for (int v = 0; v < V; ++v) {
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (int j = 0; j < J; ++j) {
      if (weights(v, j) == 0.0) continue;
      Eigen::Matrix4d unbind = Eigen::Matrix4d::Identity();
      unbind.topRightCorner<3, 1>() = -rest.row(j).transpose();
      Eigen::Vector4d p;
      p << shaped.row(v).transpose(), 1.0;
      acc += weights(v, j) * (world[j] * unbind * p);
    }
    out.vertices.row(v) = acc.head<3>().transpose();
  }
  return out;
}

// Weak perspective as a 2x4 homogeneous projection.
inline Eigen::Vector2d project(const Eigen::Vector3d& p, double s, const Eigen::Vector2d& t) {
  Eigen::Matrix<double, 2, 4> P;
  P << s, 0, 0, t.x(), 0, s, 0, t.y();
  Eigen::Vector4d h;
  h << p, 1.0;
  return P * h;
}

struct RasterResult {
  std::vector<std::vector<bool>> covered;
  Grid z;  // camera z of the nearest covering face, +inf elsewhere
};

// O(H W F) point-in-triangle test in absolute pixel coordinates. A point on an
// edge counts when that edge is a top or left edge of the triangle.
inline RasterResult raster(const Eigen::MatrixXd& verts, const Eigen::MatrixXi& faces, double s,
                           const Eigen::Vector2d& t, int h, int w) {
  RasterResult out{std::vector<std::vector<bool>>(h, std::vector<bool>(w, false)),
                   grid(h, w, std::numeric_limits<double>::infinity())};
  for (int f = 0; f < faces.rows(); ++f) {
    Eigen::Vector2d p[3];
    double z[3];
    for (int k = 0; k < 3; ++k) {
      p[k] = project(verts.row(faces(f, k)).transpose(), s, t);
      z[k] = verts(faces(f, k), 2);
    }
    const double cross = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
    if (cross == 0.0) continue;
    if (cross < 0.0) {
      std::swap(p[1], p[2]);
      std::swap(z[1], z[2]);
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        bool inside = true;
        double bary[3];
        for (int k = 0; k < 3 && inside; ++k) {
          const Eigen::Vector2d& a = p[k];
          const Eigen::Vector2d& b = p[(k + 1) % 3];
          const double e = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
          const bool top_or_left = (b.y() < a.y()) || (b.y() == a.y() && b.x() > a.x());
          inside = e > 0.0 || (e == 0.0 && top_or_left);
          bary[(k + 2) % 3] = e;
        }
        if (!inside) continue;
        out.covered[y][x] = true;
        const double sum = bary[0] + bary[1] + bary[2];
        const double depth = (bary[0] * z[0] + bary[1] * z[1] + bary[2] * z[2]) / sum;
        out.z[y][x] = std::min(out.z[y][x], depth);
      }
  }
  return out;
}

// Least-squares similarity via Horn's quaternion method; returns the aligned
// copy of `a` (N x 3) onto `b`.
inline Eigen::MatrixXd horn_align(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::RowVector3d ca = a.colwise().mean();
  const Eigen::RowVector3d cb = b.colwise().mean();
  const Eigen::MatrixXd A = a.rowwise() - ca;
  const Eigen::MatrixXd B = b.rowwise() - cb;
  const Eigen::Matrix3d S = A.transpose() * B;
  const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
  const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
  const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);
  Eigen::Matrix4d N;
  N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(N);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
       2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
       2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  const Eigen::MatrixXd RA = A * R.transpose();
  const double scale = (RA.array() * B.array()).sum() / A.squaredNorm();
  return (scale * RA).rowwise() + cb;
}

inline double mean_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) s += (a.row(i) - b.row(i)).norm();
  return s / a.rows();
}

}  // namespace oracle
