// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Procedural stand-in for a learned body model. The skeleton follows the
// 24-joint SMPL ordering; with fewer joints the missing ones are folded into
// their nearest existing ancestor, so the geometry is always a full humanoid.
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "clothfit/body_model.hpp"
#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

constexpr int kFullJoints = 24;

constexpr std::array<int, kFullJoints> kParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

// y down, z away from the camera; +x is the body's left side.
Eigen::Vector3d canonical_joint(int j) {
  const double c = std::cos(40.0 * std::numbers::pi / 180.0);
  const double s = std::sin(40.0 * std::numbers::pi / 180.0);
  static const std::array<Eigen::Vector3d, kFullJoints> table = [&] {
    std::array<Eigen::Vector3d, kFullJoints> t;
    t[0] = {0.0, 0.0, 0.0};
    t[1] = {0.08, 0.05, 0.0};
    t[2] = {-0.08, 0.05, 0.0};
    t[3] = {0.0, -0.09, 0.01};
    t[4] = {0.09, 0.27, 0.0};
    t[5] = {-0.09, 0.27, 0.0};
    t[6] = {0.0, -0.17, 0.01};
    t[7] = {0.09, 0.46, 0.01};
    t[8] = {-0.09, 0.46, 0.01};
    t[9] = {0.0, -0.25, 0.0};
    t[10] = {0.10, 0.50, -0.08};
    t[11] = {-0.10, 0.50, -0.08};
    t[12] = {0.0, -0.33, 0.0};
    t[13] = {0.045, -0.30, 0.0};
    t[14] = {-0.045, -0.30, 0.0};
    t[15] = {0.0, -0.39, -0.01};
    t[16] = {0.15, -0.30, 0.0};
    t[17] = {-0.15, -0.30, 0.0};
    t[18] = {0.15 + 0.17 * c, -0.30 + 0.17 * s, 0.0};
    t[19] = {-(0.15 + 0.17 * c), -0.30 + 0.17 * s, 0.0};
    t[20] = {t[18].x() + 0.15 * c, t[18].y() + 0.15 * s, 0.0};
    t[21] = {-(t[18].x() + 0.15 * c), t[18].y() + 0.15 * s, 0.0};
    t[22] = {t[20].x() + 0.06 * c, t[20].y() + 0.06 * s, 0.0};
    t[23] = {-(t[20].x() + 0.06 * c), t[20].y() + 0.06 * s, 0.0};
    return t;
  }();
  return table[j];
}

enum class PartKind { Torso, Head, Arm, Leg };

struct Tube {
  PartKind kind;
  std::vector<int> nodes;      // canonical joint ids along the limb
  std::vector<double> radii;   // one per node
  int start_driver;            // canonical joint skinning the start cap
};

struct Ellipsoid {
  PartKind kind;
  Eigen::Vector3d center;
  Eigen::Vector3d radii;
};

struct VertexInfo {
  PartKind kind;
  Eigen::Vector3d axis_point;  // nearest point on the part's centre line
  std::map<int, double> weights;  // canonical joint -> weight
};

class MeshBuilder {
 public:
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<VertexInfo> info;

  int add_vertex(const Eigen::Vector3d& p, VertexInfo vi) {
    vertices.push_back(p);
    info.push_back(std::move(vi));
    return static_cast<int>(vertices.size()) - 1;
  }

  // Connects `rings` consecutive rings of `segments` vertices (starting at
  // `first_ring`) with poles at both ends, then fixes the winding so the part
  // encloses positive volume.
  void stitch(int south, int first_ring, int rings, int segments, int north) {
    const std::size_t face_begin = faces.size();
    auto at = [&](int r, int k) { return first_ring + r * segments + (k % segments); };
    for (int k = 0; k < segments; ++k) faces.push_back({south, at(0, k + 1), at(0, k)});
    for (int r = 0; r + 1 < rings; ++r) {
      for (int k = 0; k < segments; ++k) {
        faces.push_back({at(r, k), at(r, k + 1), at(r + 1, k + 1)});
        faces.push_back({at(r, k), at(r + 1, k + 1), at(r + 1, k)});
      }
    }
    for (int k = 0; k < segments; ++k) faces.push_back({north, at(rings - 1, k), at(rings - 1, k + 1)});

    // Poles bracket the rings: south < rings < north.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = south; i <= north; ++i) centroid += vertices[i];
    centroid /= static_cast<double>(north - south + 1);
    double volume = 0.0;
    for (std::size_t f = face_begin; f < faces.size(); ++f) {
      const auto& t = faces[f];
      volume += (vertices[t[0]] - centroid).dot((vertices[t[1]] - centroid).cross(vertices[t[2]] - centroid));
    }
    if (volume < 0.0) {
      for (std::size_t f = face_begin; f < faces.size(); ++f) std::swap(faces[f][1], faces[f][2]);
    }
  }
};

// Orthonormal pair perpendicular to `t`.
std::pair<Eigen::Vector3d, Eigen::Vector3d> perpendicular_frame(const Eigen::Vector3d& t) {
  Eigen::Vector3d helper = std::abs(t.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  Eigen::Vector3d u = t.cross(helper).normalized();
  Eigen::Vector3d w = t.cross(u).normalized();
  return {u, w};
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void add_ellipsoid(MeshBuilder& mesh, const Ellipsoid& e, int rings, int segments,
                   const std::function<std::map<int, double>(const Eigen::Vector3d&)>& weights) {
  auto make_info = [&](const Eigen::Vector3d& p) {
    Eigen::Vector3d axis = e.center;
    axis.y() = p.y();
    return VertexInfo{e.kind, axis, weights(p)};
  };
  const Eigen::Vector3d top = e.center - Eigen::Vector3d(0, e.radii.y(), 0);
  const Eigen::Vector3d bottom = e.center + Eigen::Vector3d(0, e.radii.y(), 0);
  const int south = mesh.add_vertex(top, make_info(top));
  const int first = static_cast<int>(mesh.vertices.size());
  for (int r = 1; r <= rings; ++r) {
    const double phi = std::numbers::pi * r / (rings + 1);
    for (int k = 0; k < segments; ++k) {
      const double a = 2.0 * std::numbers::pi * k / segments;
      const Eigen::Vector3d p = e.center + Eigen::Vector3d(e.radii.x() * std::sin(phi) * std::cos(a),
                                                           -e.radii.y() * std::cos(phi),
                                                           e.radii.z() * std::sin(phi) * std::sin(a));
      mesh.add_vertex(p, make_info(p));
    }
  }
  const int north = mesh.add_vertex(bottom, make_info(bottom));
  mesh.stitch(south, first, rings, segments, north);
}

struct TubeSample {
  Eigen::Vector3d center;
  Eigen::Vector3d tangent;
  double radius;
};

class Polyline {
 public:
  explicit Polyline(const Tube& tube) : tube_(tube) {
    for (int n : tube.nodes) points_.push_back(canonical_joint(n));
    arc_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i)
      arc_.push_back(arc_.back() + (points_[i] - points_[i - 1]).norm());
  }

  double length() const { return arc_.back(); }
  std::size_t segments() const { return points_.size() - 1; }
  double node_arc(std::size_t i) const { return arc_[i]; }
  Eigen::Vector3d direction(std::size_t seg) const {
    return (points_[seg + 1] - points_[seg]).normalized();
  }
  double blend_half_width(std::size_t node) const {
    double h = 1e9;
    if (node > 0) h = std::min(h, arc_[node] - arc_[node - 1]);
    if (node + 1 < arc_.size()) h = std::min(h, arc_[node + 1] - arc_[node]);
    return 0.3 * h;
  }

  TubeSample at(double s) const {
    s = std::clamp(s, 0.0, length());
    std::size_t seg = 0;
    while (seg + 1 < segments() && s > arc_[seg + 1]) ++seg;
    const double len = arc_[seg + 1] - arc_[seg];
    const double t = len > 0 ? (s - arc_[seg]) / len : 0.0;
    TubeSample out;
    out.center = points_[seg] + t * (points_[seg + 1] - points_[seg]);
    out.radius = tube_.radii[seg] + t * (tube_.radii[seg + 1] - tube_.radii[seg]);
    // Smooth the tangent across interior nodes.
    Eigen::Vector3d tangent = direction(seg);
    for (std::size_t node = 1; node < points_.size() - 1; ++node) {
      const double h = blend_half_width(node);
      const double d = s - arc_[node];
      if (std::abs(d) < h) {
        const double mix = 0.5 * (d / h + 1.0);
        tangent = ((1.0 - mix) * direction(node - 1) + mix * direction(node)).normalized();
      }
    }
    out.tangent = tangent;
    return out;
  }

  // Skinning along the limb: each segment follows its start joint, with linear
  // blends of half-width h around interior nodes and at the two ends.
  std::map<int, double> weights(double s) const {
    std::vector<int> drivers;
    drivers.push_back(tube_.start_driver);
    for (int n : tube_.nodes) drivers.push_back(n);
    // drivers[k] owns arc interval (node_{k-1}, node_k); drivers[0] is before node 0,
    // drivers.back() is beyond the last node.
    std::map<int, double> w;
    const std::size_t nodes = arc_.size();
    std::size_t region = 0;
    while (region < nodes && s > arc_[region]) ++region;
    // region in [0, nodes]: driver index for arc s.
    double own = 1.0;
    const auto blend = [&](std::size_t node, std::size_t other_driver) {
      const double h = blend_half_width(node);
      const double d = std::abs(s - arc_[node]);
      if (d < h) {
        const double share = 0.5 * (1.0 - d / h);
        w[drivers[other_driver]] += share;
        own -= share;
      }
    };
    if (region > 0) blend(region - 1, region - 1);
    if (region < nodes) blend(region, region + 1);
    w[drivers[region]] += own;
    return w;
  }

 private:
  const Tube& tube_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<double> arc_;
};

void add_tube(MeshBuilder& mesh, const Tube& tube, int rings, int segments) {
  const Polyline line(tube);
  const double length = line.length();
  const double r0 = tube.radii.front();
  const double r1 = tube.radii.back();

  struct Ring {
    double s;          // arc parameter (may be outside [0, length] on caps)
    Eigen::Vector3d center;
    Eigen::Vector3d tangent;
    double radius;
  };
  std::vector<Ring> ring_list;
  const int cap = std::max(1, rings / 6);
  const int body = std::max(0, rings - 2 * cap);
  for (int i = 1; i <= cap; ++i) {
    const double phi = 0.5 * std::numbers::pi * i / cap;
    const TubeSample a = line.at(0.0);
    const double along = -r0 * std::cos(phi);
    ring_list.push_back({along, a.center + along * a.tangent, a.tangent, r0 * std::sin(phi)});
  }
  for (int i = 1; i <= body; ++i) {
    const double s = length * i / (body + 1);
    const TubeSample a = line.at(s);
    ring_list.push_back({s, a.center, a.tangent, a.radius});
  }
  for (int i = cap; i >= 1; --i) {
    const double phi = 0.5 * std::numbers::pi * i / cap;
    const TubeSample a = line.at(length);
    const double along = r1 * std::cos(phi);
    ring_list.push_back({length + along, a.center + along * a.tangent, a.tangent, r1 * std::sin(phi)});
  }

  // Parallel-transported frame to avoid twisting between rings.
  auto [u, w] = perpendicular_frame(ring_list.front().tangent);
  Eigen::Vector3d prev_t = ring_list.front().tangent;

  const TubeSample start = line.at(0.0);
  const TubeSample end = line.at(length);
  const Eigen::Vector3d south_p = start.center - r0 * start.tangent;
  const Eigen::Vector3d north_p = end.center + r1 * end.tangent;

  const int south = mesh.add_vertex(south_p, {tube.kind, start.center, line.weights(-r0)});
  const int first = static_cast<int>(mesh.vertices.size());
  for (const Ring& ring : ring_list) {
    const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(prev_t, ring.tangent);
    u = (q * u).normalized();
    w = ring.tangent.cross(u).normalized();
    u = w.cross(ring.tangent).normalized();
    prev_t = ring.tangent;
    for (int k = 0; k < segments; ++k) {
      const double a = 2.0 * std::numbers::pi * k / segments;
      const Eigen::Vector3d p = ring.center + ring.radius * (std::cos(a) * u + std::sin(a) * w);
      mesh.add_vertex(p, {tube.kind, ring.center, line.weights(ring.s)});
    }
  }
  const int north = mesh.add_vertex(north_p, {tube.kind, end.center, line.weights(length + r1)});
  mesh.stitch(south, first, static_cast<int>(ring_list.size()), segments, north);
}

}  // namespace

BodyModel make_toy_model(const ToyModelSpec& spec) {
  if (spec.target_vertices < 100) throw ValidationError("toy model: target_vertices must be >= 100");
  if (spec.num_joints < 8 || spec.num_joints > kFullJoints)
    throw ValidationError("toy model: num_joints must be in [8, 24]");
  if (spec.num_shape < 2 || spec.num_shape > 10)
    throw ValidationError("toy model: num_shape must be in [2, 10]");
  if (spec.num_joints > spec.target_vertices)
    throw ValidationError("toy model: more joints than vertices");

  const int J = spec.num_joints;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(0.95, 1.05);

  auto effective = [J](int c) {
    while (c >= J) c = kParents[c];
    return c;
  };

  std::vector<Tube> tubes = {
      {PartKind::Arm, {13, 16, 18, 20, 22}, {0.045, 0.045, 0.036, 0.028, 0.024}, 9},
      {PartKind::Arm, {14, 17, 19, 21, 23}, {0.045, 0.045, 0.036, 0.028, 0.024}, 9},
      {PartKind::Leg, {1, 4, 7, 10}, {0.068, 0.05, 0.037, 0.028}, 0},
      {PartKind::Leg, {2, 5, 8, 11}, {0.068, 0.05, 0.037, 0.028}, 0},
  };
  for (auto& t : tubes) {
    const double f = jitter(rng);
    for (double& r : t.radii) r *= f;
  }
  const Ellipsoid torso{PartKind::Torso, {0.0, -0.125, 0.01},
                        {0.13 * jitter(rng), 0.20, 0.085 * jitter(rng)}};
  const Ellipsoid head{PartKind::Head, {0.0, -0.43, -0.005},
                       {0.062 * jitter(rng), 0.10, 0.07 * jitter(rng)}};

  // Vertex budget: parts are rings x segments + 2 poles.
  const int parts = static_cast<int>(tubes.size()) + 2;
  const int segments = spec.target_vertices < 300 ? 4 : (spec.target_vertices < 1500 ? 8 : 12);
  const int ring_budget = (spec.target_vertices - 2 * parts) / segments;
  std::vector<double> extent;
  for (const auto& t : tubes) extent.push_back(Polyline(t).length() + t.radii.front() + t.radii.back());
  extent.push_back(2.0 * torso.radii.y());
  extent.push_back(2.0 * head.radii.y());
  const double total_extent = [&] { double s = 0; for (double e : extent) s += e; return s; }();
  std::vector<int> rings;
  int used = 0;
  for (double e : extent) {
    rings.push_back(std::max(2, static_cast<int>(std::floor(ring_budget * e / total_extent))));
    used += rings.back();
  }
  if (used * segments + 2 * parts > spec.target_vertices)
    throw ValidationError("toy model: target_vertices too small for the humanoid template");

  MeshBuilder mesh;
  for (std::size_t i = 0; i < tubes.size(); ++i) add_tube(mesh, tubes[i], rings[i], segments);

  // Torso: blend the spine joints by height.
  const std::array<std::pair<int, double>, 4> spine = {
      std::pair{0, 0.03}, std::pair{3, -0.08}, std::pair{6, -0.17}, std::pair{9, -0.26}};
  add_ellipsoid(mesh, torso, rings[tubes.size()], segments, [&](const Eigen::Vector3d& p) {
    std::map<int, double> w;
    if (p.y() >= spine.front().second) {
      w[spine.front().first] = 1.0;
    } else if (p.y() <= spine.back().second) {
      w[spine.back().first] = 1.0;
    } else {
      for (std::size_t i = 0; i + 1 < spine.size(); ++i) {
        const auto [ja, ya] = spine[i];
        const auto [jb, yb] = spine[i + 1];
        if (p.y() <= ya && p.y() >= yb) {
          const double t = (ya - p.y()) / (ya - yb);
          w[ja] += 1.0 - t;
          w[jb] += t;
          break;
        }
      }
    }
    return w;
  });
  add_ellipsoid(mesh, head, rings[tubes.size() + 1], segments, [&](const Eigen::Vector3d& p) {
    const double t = clamp01((-0.36 - p.y()) / 0.05);
    std::map<int, double> w;
    w[12] += 1.0 - t;
    w[15] += t;
    return w;
  });

  const int V = static_cast<int>(mesh.vertices.size());
  BodyModelData data;
  data.template_vertices.resize(V, 3);
  for (int v = 0; v < V; ++v) data.template_vertices.row(v) = mesh.vertices[v].transpose();
  data.faces.resize(static_cast<Eigen::Index>(mesh.faces.size()), 3);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (int k = 0; k < 3; ++k) data.faces(static_cast<Eigen::Index>(f), k) = mesh.faces[f][k];

  data.kinematic_parents.assign(kParents.begin(), kParents.begin() + J);

  data.skinning_weights = Eigen::MatrixXd::Zero(V, J);
  for (int v = 0; v < V; ++v) {
    double total = 0.0;
    for (const auto& [joint, weight] : mesh.info[v].weights) {
      if (weight <= 0.0) continue;
      data.skinning_weights(v, effective(joint)) += weight;
      total += weight;
    }
    data.skinning_weights.row(v) /= total;
  }

  // Each joint regresses from its nearest template vertices (inverse-distance weights).
  constexpr int kNearest = 8;
  data.joint_regressor = Eigen::MatrixXd::Zero(J, V);
  for (int j = 0; j < J; ++j) {
    const Eigen::Vector3d target = canonical_joint(j);
    std::vector<std::pair<double, int>> dist(V);
    for (int v = 0; v < V; ++v) dist[v] = {(mesh.vertices[v] - target).norm(), v};
    std::partial_sort(dist.begin(), dist.begin() + kNearest, dist.end());
    double total = 0.0;
    for (int k = 0; k < kNearest; ++k) total += 1.0 / (dist[k].first + 0.01);
    for (int k = 0; k < kNearest; ++k)
      data.joint_regressor(j, dist[k].second) = (1.0 / (dist[k].first + 0.01)) / total;
  }

  // Shape basis: a few interpretable directions followed by seeded smooth fields.
  const int B = spec.num_shape;
  data.shape_basis = Eigen::MatrixXd::Zero(3 * V, B);
  const Eigen::Vector3d left_shoulder = canonical_joint(16);
  const Eigen::Vector3d right_shoulder = canonical_joint(17);
  std::uniform_real_distribution<double> freq(2.0, 6.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int b = 0; b < B; ++b) {
    std::array<double, 3> k{};
    std::array<double, 3> ph{};
    if (b >= 5) {
      for (int a = 0; a < 3; ++a) {
        k[a] = freq(rng);
        ph[a] = phase(rng);
      }
    }
    for (int v = 0; v < V; ++v) {
      const Eigen::Vector3d p = mesh.vertices[v];
      const VertexInfo& vi = mesh.info[v];
      Eigen::Vector3d d = Eigen::Vector3d::Zero();
      switch (b) {
        case 0:  // stature
          d.y() = 0.06 * p.y();
          break;
        case 1:  // girth
          d = 0.15 * (p - vi.axis_point);
          break;
        case 2:  // width
          d.x() = 0.05 * p.x();
          break;
        case 3:  // leg length
          if (vi.kind == PartKind::Leg) d.y() = 0.06 * std::max(0.0, p.y() - 0.05);
          break;
        case 4:  // arm length
          if (vi.kind == PartKind::Arm) d = 0.08 * (p - (p.x() > 0 ? left_shoulder : right_shoulder));
          break;
        default:
          for (int a = 0; a < 3; ++a) d[a] = 0.008 * std::sin(k[a] * p[(a + 1) % 3] + ph[a]);
          break;
      }
      for (int a = 0; a < 3; ++a) data.shape_basis(3 * v + a, b) = d[a];
    }
  }

  data.version = "toy-1";
  return BodyModel(std::move(data));
}

}  // namespace clothfit
