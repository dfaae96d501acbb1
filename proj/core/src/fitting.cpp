// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/fitting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "clothfit/errors.hpp"
#include "clothfit/rendering.hpp"

namespace clothfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
  int num_shape;
  int num_joints;
  int theta0() const { return num_shape; }
  int scale() const { return num_shape + 3 * num_joints; }
  int tx() const { return scale() + 1; }
  int size() const { return scale() + 3; }
};

enum class Group { Beta, Theta, Scale, Translation };

Group group_of(const Layout& L, int k) {
  if (k < L.theta0()) return Group::Beta;
  if (k < L.scale()) return Group::Theta;
  if (k == L.scale()) return Group::Scale;
  return Group::Translation;
}

// d L_J / d p_k for each joint, zero where the residual vanishes.
Points2d joint_loss_gradient(const JointTargets& target, const Points2d& rendered) {
  Points2d grad = Points2d::Zero(rendered.rows(), 2);
  const double den = target.confidence.sum();
  if (den == 0.0) return grad;
  for (Eigen::Index k = 0; k < rendered.rows(); ++k) {
    const Eigen::RowVector2d r = rendered.row(k) - target.coords.row(k);
    const double n = r.norm();
    if (n == 0.0 || target.confidence(k) == 0.0) continue;
    grad.row(k) = target.confidence(k) * r / (n * den);
  }
  return grad;
}

// Depth loss straight from a z-buffer, matching loss_depth_fit(resolve_depth(zbuf)).
double depth_loss_from_zbuffer(const Image& zbuf, const Image& target) {
  double z_min = kInf;
  double z_max = -kInf;
  for (Eigen::Index i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data()[i];
    if (z == kInf) continue;
    z_min = std::min(z_min, z);
    z_max = std::max(z_max, z);
  }
  if (z_min == kInf) throw EmptyRenderError("rasterize_hard: mesh covers no pixel of the image");
  const double range = z_max - z_min;
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data()[i];
    const double p = z == kInf ? 0.0 : (range > 0.0 ? (z - z_min) / range : 0.0);
    const double g = target.data()[i];
    if (g > 0.0 || p > 0.0) {
      sum += std::abs(g - p);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

// Caches the renders at one parameter point so that probes only re-rasterise
// the pixels their moved faces can reach.
class Evaluator {
 public:
  Evaluator(const BodyModel& model, const RepBundle& bundle, const FitConfig& cfg)
      : model_(model), bundle_(bundle), cfg_(cfg), H_(bundle.height()), W_(bundle.width()) {
    if (bundle.joints().coords.rows() != model.num_joints()) {
      throw ShapeError("fit: bundle has " + std::to_string(bundle.joints().coords.rows()) + " joints, model has " +
                       std::to_string(model.num_joints()));
    }
    if (bundle.polarity() != DepthPolarity::NearZero) {
      throw PolarityMismatchError("fit: target depth is far_zero but renders are near_zero");
    }
    soft_margin_ = static_cast<int>(std::ceil(3.0 * cfg.soft_sigma)) + 2;
  }

  ObjectiveValue set_base(const BodyParams& params) {
    base_ = params;
    body_ = forward(model_, params);
    cam_ = Camera::from_params(params, H_, W_);
    zbuf_.resize(H_, W_);
    rasterize_zbuffer(body_.vertices, model_.faces(), cam_, PixelRect::full(H_, W_), zbuf_);
    soft_.resize(H_, W_);
    rasterize_soft(body_.vertices, model_.faces(), cam_, cfg_.soft_sigma, PixelRect::full(H_, W_), soft_);
    mask_abs_ = (bundle_.silhouette() - soft_).abs();
    mask_abs_sum_ = mask_abs_.sum();

    RenderOutput hard = resolve_depth(zbuf_);
    hard.joints2d = project_joints(body_.joints, cam_);
    joints2d_ = hard.joints2d;

    ObjectiveValue v;
    v.hard = total_fit_loss(bundle_, hard, cfg_.weights);
    v.soft_mask = mask_abs_sum_ / static_cast<double>(H_ * W_);
    v.objective = combine(v.hard.depth, v.soft_mask, v.hard.joints);
    if (!std::isfinite(v.objective)) throw NumericError("objective is not finite at the current parameters");
    base_depth_ = v.hard.depth;
    return v;
  }

  double combine(double depth, double mask, double joints) const {
    const LossWeights& w = cfg_.weights;
    return w.lambda_d * depth + w.lambda_m * mask + w.lambda_j * joints;
  }

  struct Probe {
    double depth;
    double mask;
    JointPositions joints;
  };

  // Losses with the parameter at packed index k shifted by `delta`.
  Probe probe(const Layout& L, int k, double delta) {
    BodyParams p = base_;
    Probe out;
    const Group g = group_of(L, k);
    if (g == Group::Scale || g == Group::Translation) {
      if (g == Group::Scale) p.scale += delta;
      else p.translation(k - L.tx()) += delta;
      if (!(p.scale > 0.0)) throw NumericError("probe: scale must stay positive");
      const Camera cam = Camera::from_params(p, H_, W_);
      render_region(body_.vertices, cam, PixelRect::full(H_, W_), PixelRect::full(H_, W_), out);
      out.joints = body_.joints;
      return out;
    }
    if (g == Group::Beta) {
      p.beta(k) += delta;
    } else {
      const int j = (k - L.theta0()) / 3;
      p.theta(j, (k - L.theta0()) % 3) += delta;
    }
    PosedBody moved = forward(model_, p.beta, p.theta);
    out.joints = std::move(moved.joints);

    // Faces with any moved vertex, at both positions.
    const Vertices& a = body_.vertices;
    const Vertices& b = moved.vertices;
    std::vector<char> changed(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index v = 0; v < a.rows(); ++v) changed[v] = (a.row(v) != b.row(v));
    double min_x = kInf, min_y = kInf, max_x = -kInf, max_y = -kInf;
    const Faces& faces = model_.faces();
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
      if (!changed[faces(f, 0)] && !changed[faces(f, 1)] && !changed[faces(f, 2)]) continue;
      for (int c = 0; c < 3; ++c) {
        for (const Vertices* verts : {&a, &b}) {
          const double x = cam_.scale * (*verts)(faces(f, c), 0);
          const double y = cam_.scale * (*verts)(faces(f, c), 1);
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
          min_y = std::min(min_y, y);
          max_y = std::max(max_y, y);
        }
      }
    }
    if (min_x == kInf) {
      out.depth = base_depth_;
      out.mask = mask_abs_sum_ / static_cast<double>(H_ * W_);
      return out;
    }
    if (!std::isfinite(min_x + max_x + min_y + max_y)) throw NumericError("probe: non-finite vertices");
    const double tx = cam_.translation.x();
    const double ty = cam_.translation.y();
    auto rect = [&](int margin) {
      return PixelRect{static_cast<int>(std::floor(min_x + tx)) - margin,
                       static_cast<int>(std::floor(min_y + ty)) - margin,
                       static_cast<int>(std::ceil(max_x + tx)) + margin,
                       static_cast<int>(std::ceil(max_y + ty)) + margin};
    };
    render_region(b, cam_, rect(2), rect(soft_margin_), out);
    return out;
  }

  const PosedBody& body() const { return body_; }
  const Points2d& joints2d() const { return joints2d_; }
  const BodyParams& base() const { return base_; }

 private:
  void render_region(const Vertices& verts, const Camera& cam, const PixelRect& hard_rect,
                     const PixelRect& soft_rect, Probe& out) {
    scratch_z_ = zbuf_;
    rasterize_zbuffer(verts, model_.faces(), cam, hard_rect, scratch_z_);
    out.depth = depth_loss_from_zbuffer(scratch_z_, bundle_.depth());

    scratch_soft_.resize(H_, W_);
    rasterize_soft(verts, model_.faces(), cam, cfg_.soft_sigma, soft_rect, scratch_soft_);
    const int x0 = std::max(0, soft_rect.x0), y0 = std::max(0, soft_rect.y0);
    const int x1 = std::min(W_ - 1, soft_rect.x1), y1 = std::min(H_ - 1, soft_rect.y1);
    double old_sum = 0.0, new_sum = 0.0;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        old_sum += mask_abs_(y, x);
        new_sum += std::abs(bundle_.silhouette()(y, x) - scratch_soft_(y, x));
      }
    out.mask = (mask_abs_sum_ - old_sum + new_sum) / static_cast<double>(H_ * W_);
  }

  const BodyModel& model_;
  const RepBundle& bundle_;
  const FitConfig& cfg_;
  int H_, W_;
  int soft_margin_ = 2;
  BodyParams base_;
  PosedBody body_;
  Camera cam_;
  Image zbuf_, soft_, mask_abs_, scratch_z_, scratch_soft_;
  double mask_abs_sum_ = 0.0;
  double base_depth_ = 0.0;
  Points2d joints2d_;
};

double fd_step(const Layout& L, int k, const FdSteps& steps, double reference_scale) {
  switch (group_of(L, k)) {
    case Group::Beta: return steps.beta;
    case Group::Theta: return steps.theta;
    case Group::Scale: return steps.scale_rel * reference_scale;
    case Group::Translation: return steps.translation;
  }
  return steps.theta;
}

double unit_of(const Layout& L, int k, const StepUnits& units, double reference_scale) {
  switch (group_of(L, k)) {
    case Group::Beta: return units.beta;
    case Group::Theta: return units.theta;
    case Group::Scale: return units.scale_rel * reference_scale;
    case Group::Translation: return units.translation_rel * reference_scale;
  }
  return 1.0;
}

// Gradient at the evaluator's current base point, whose value is `value`.
ObjectiveGradient gradient_at(Evaluator& ev, const ObjectiveValue& value, const Layout& L,
                              const std::vector<bool>& active, const FitConfig& cfg, double reference_scale,
                              const RepBundle& bundle) {
  ObjectiveGradient out;
  out.value = value;
  out.gradient = Eigen::VectorXd::Zero(L.size());
  const LossWeights& w = cfg.weights;
  const Points2d dLdp = joint_loss_gradient(bundle.joints(), ev.joints2d());
  const double s = ev.base().scale;

  for (int k = 0; k < L.size(); ++k) {
    if (!active[k]) continue;
    const Group g = group_of(L, k);
    double h = fd_step(L, k, cfg.fd_steps, reference_scale);
    Evaluator::Probe plus, minus;
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      try {
        plus = ev.probe(L, k, h);
        minus = ev.probe(L, k, -h);
        ok = std::isfinite(plus.depth) && std::isfinite(plus.mask) && std::isfinite(minus.depth) &&
             std::isfinite(minus.mask) && plus.joints.allFinite() && minus.joints.allFinite();
      } catch (const EmptyRenderError&) {
        ok = false;
      } catch (const NumericError&) {
        ok = false;
      }
      if (!ok) h *= 0.5;
    }
    if (!ok) throw NumericError("objective_gradient: non-finite loss at probe of parameter " + std::to_string(k));

    double joints_term = 0.0;
    if (g == Group::Scale) {
      for (Eigen::Index j = 0; j < dLdp.rows(); ++j)
        joints_term += dLdp(j, 0) * ev.body().joints(j, 0) + dLdp(j, 1) * ev.body().joints(j, 1);
    } else if (g == Group::Translation) {
      joints_term = dLdp.col(k - L.tx()).sum();
    } else {
      for (Eigen::Index j = 0; j < dLdp.rows(); ++j) {
        const double dx = s * (plus.joints(j, 0) - minus.joints(j, 0)) / (2.0 * h);
        const double dy = s * (plus.joints(j, 1) - minus.joints(j, 1)) / (2.0 * h);
        joints_term += dLdp(j, 0) * dx + dLdp(j, 1) * dy;
      }
    }
    out.gradient(k) = w.lambda_d * (plus.depth - minus.depth) / (2.0 * h) +
                      w.lambda_m * (plus.mask - minus.mask) / (2.0 * h) + w.lambda_j * joints_term;
  }
  return out;
}

// Evaluates a candidate; nullopt when the render is empty or the value non-finite.
std::optional<ObjectiveValue> try_evaluate(const BodyModel& model, const RepBundle& bundle, const BodyParams& p,
                                           const FitConfig& cfg) {
  if (!(p.scale > 0.0) || !p.beta.allFinite() || !p.theta.allFinite() || !p.translation.allFinite()) {
    return std::nullopt;
  }
  try {
    ObjectiveValue v = evaluate_objective(model, bundle, p, cfg);
    if (!std::isfinite(v.objective) || !std::isfinite(v.hard.total)) return std::nullopt;
    return v;
  } catch (const EmptyRenderError&) {
    return std::nullopt;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

std::optional<ObjectiveValue> try_set_base(Evaluator& ev, const BodyParams& p) {
  if (!(p.scale > 0.0) || !p.beta.allFinite() || !p.theta.allFinite() || !p.translation.allFinite()) {
    return std::nullopt;
  }
  try {
    ObjectiveValue v = ev.set_base(p);
    if (!std::isfinite(v.hard.total)) return std::nullopt;
    return v;
  } catch (const EmptyRenderError&) {
    return std::nullopt;
  } catch (const NumericError&) {
    return std::nullopt;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<Stage> FitConfig::default_stages(int iterations) {
  std::vector<Stage> stages;
  const int first = iterations / 4;
  if (first > 0) stages.push_back({ParamMask::camera_and_orient(), first});
  if (iterations - first > 0) stages.push_back({ParamMask::all(), iterations - first});
  return stages;
}

FitConfig& FitConfig::with_iterations(int n) {
  iterations = n;
  stages = default_stages(n);
  return *this;
}

void FitConfig::validate() const {
  if (iterations < 1) throw ValidationError("fit config: iterations must be >= 1");
  int total = 0;
  for (const Stage& s : stages) {
    if (s.iterations < 1) throw ValidationError("fit config: every stage needs >= 1 iteration");
    if (!s.mask.any()) throw ValidationError("fit config: a stage activates no parameter group");
    total += s.iterations;
  }
  if (total != iterations) {
    throw ValidationError("fit config: stage iterations sum to " + std::to_string(total) + ", expected " +
                          std::to_string(iterations));
  }
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(step_size) || !positive(soft_sigma) || !positive(adam_epsilon)) {
    throw ValidationError("fit config: step size, soft sigma and epsilon must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("fit config: moment decays must lie in [0, 1)");
  }
  for (double v : {fd_steps.beta, fd_steps.theta, fd_steps.scale_rel, fd_steps.translation, units.beta,
                   units.theta, units.scale_rel, units.translation_rel}) {
    if (!positive(v)) throw ValidationError("fit config: finite-difference steps and units must be positive");
  }
  weights.validate();
}

int param_count(const BodyModel& model) { return model.num_shape() + 3 * model.num_joints() + 3; }

Eigen::VectorXd pack_params(const BodyParams& params) {
  const Layout L{static_cast<int>(params.beta.size()), static_cast<int>(params.theta.rows())};
  Eigen::VectorXd x(L.size());
  x.head(L.num_shape) = params.beta;
  for (int j = 0; j < L.num_joints; ++j)
    for (int a = 0; a < 3; ++a) x(L.theta0() + 3 * j + a) = params.theta(j, a);
  x(L.scale()) = params.scale;
  x(L.tx()) = params.translation.x();
  x(L.tx() + 1) = params.translation.y();
  return x;
}

BodyParams unpack_params(const Eigen::VectorXd& x, int num_shape, int num_joints) {
  const Layout L{num_shape, num_joints};
  if (x.size() != L.size()) throw ShapeError("unpack_params: vector length does not match the model");
  BodyParams p;
  p.beta = x.head(num_shape);
  p.theta.resize(num_joints, 3);
  for (int j = 0; j < num_joints; ++j)
    for (int a = 0; a < 3; ++a) p.theta(j, a) = x(L.theta0() + 3 * j + a);
  p.scale = x(L.scale());
  p.translation = {x(L.tx()), x(L.tx() + 1)};
  return p;
}

std::vector<bool> active_entries(const ParamMask& mask, int num_shape, int num_joints) {
  const Layout L{num_shape, num_joints};
  std::vector<bool> active(static_cast<std::size_t>(L.size()), false);
  for (int k = 0; k < L.size(); ++k) {
    switch (group_of(L, k)) {
      case Group::Beta: active[k] = mask.beta; break;
      case Group::Theta: active[k] = (k - L.theta0()) < 3 ? mask.global_orient : mask.body_pose; break;
      case Group::Scale: active[k] = mask.scale; break;
      case Group::Translation: active[k] = mask.translation; break;
    }
  }
  return active;
}

BodyParams initialize_params(const RepBundle& bundle, const BodyModel& model, const InitOptions& options) {
  const Image& sil = bundle.silhouette();
  double sx = 0.0, sy = 0.0;
  long count = 0;
  int row_min = std::numeric_limits<int>::max(), row_max = -1;
  for (int y = 0; y < sil.rows(); ++y)
    for (int x = 0; x < sil.cols(); ++x) {
      if (!(sil(y, x) >= 0.5)) continue;
      sx += x;
      sy += y;
      ++count;
      row_min = std::min(row_min, y);
      row_max = std::max(row_max, y);
    }
  if (count == 0) throw InitError("initialize_params: silhouette has no foreground pixel");
  const Eigen::Vector2d centroid(sx / static_cast<double>(count), sy / static_cast<double>(count));

  double scale = static_cast<double>(row_max - row_min + 1) / model.rest_height();
  if (row_max == row_min) {
    if (!options.clamp_degenerate) throw InitError("initialize_params: silhouette spans a single row");
    scale = options.min_scale;
  }
  if (options.clamp_degenerate) scale = std::max(scale, options.min_scale);

  // Rest-pose silhouette centroid relative to the model origin, in model units.
  const Vertices& v = model.template_vertices();
  const Eigen::Vector2d lo(v.col(0).minCoeff(), v.col(1).minCoeff());
  const Eigen::Vector2d hi(v.col(0).maxCoeff(), v.col(1).maxCoeff());
  constexpr int kRef = 256;
  const double s_ref = 0.8 * kRef / std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const Eigen::Vector2d t_ref = Eigen::Vector2d(0.5 * (kRef - 1), 0.5 * (kRef - 1)) - s_ref * 0.5 * (lo + hi);
  const RenderOutput ref =
      rasterize_hard(v, model.faces(), Camera::make(s_ref, t_ref, kRef, kRef));
  double rx = 0.0, ry = 0.0, rn = 0.0;
  for (int y = 0; y < kRef; ++y)
    for (int x = 0; x < kRef; ++x)
      if (ref.silhouette(y, x) > 0.5) {
        rx += x;
        ry += y;
        rn += 1.0;
      }
  const Eigen::Vector2d offset = (Eigen::Vector2d(rx / rn, ry / rn) - t_ref) / s_ref;

  return BodyParams::rest(model, scale, centroid - scale * offset);
}

ObjectiveValue evaluate_objective(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                                  const FitConfig& cfg) {
  Evaluator ev(model, bundle, cfg);
  return ev.set_base(params);
}

ObjectiveGradient objective_gradient(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                                     const ParamMask& mask, const FitConfig& cfg, double reference_scale) {
  params.validate(model);
  const Layout L{model.num_shape(), model.num_joints()};
  Evaluator ev(model, bundle, cfg);
  const ObjectiveValue value = ev.set_base(params);
  const double s_ref = reference_scale > 0.0 ? reference_scale : params.scale;
  return gradient_at(ev, value, L, active_entries(mask, L.num_shape, L.num_joints), cfg, s_ref, bundle);
}

FitReport fit(const BodyModel& model, const RepBundle& bundle, const BodyParams& init, const FitConfig& cfg) {
  cfg.validate();
  init.validate(model);
  const auto start = std::chrono::steady_clock::now();
  const Layout L{model.num_shape(), model.num_joints()};
  const double s0 = init.scale;

  Eigen::VectorXd unit(L.size());
  for (int k = 0; k < L.size(); ++k) unit(k) = unit_of(L, k, cfg.units, s0);

  FitReport report;
  report.initial = init;
  Evaluator ev(model, bundle, cfg);
  Eigen::VectorXd x = pack_params(init);
  ObjectiveValue current = ev.set_base(init);

  Eigen::VectorXd best_x = x;
  double best_total = kInf;
  auto record = [&](int iteration, int stage, const ObjectiveValue& v, double gnorm, bool halved) {
    IterationRecord r;
    r.iteration = iteration;
    r.stage = stage;
    r.loss = v.hard;
    r.objective = v.objective;
    r.gradient_norm = gnorm;
    r.step_halved = halved;
    if (v.hard.total < best_total) {
      best_total = v.hard.total;
      best_x = x;
      report.best_iteration = iteration;
    }
    r.best_total = best_total;
    report.trace.push_back(r);
  };

  int iteration = 0;
  bool halved = false;
  for (std::size_t si = 0; si < cfg.stages.size(); ++si) {
    const Stage& stage = cfg.stages[si];
    const std::vector<bool> active = active_entries(stage.mask, L.num_shape, L.num_joints);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(L.size());
    Eigen::VectorXd v2 = Eigen::VectorXd::Zero(L.size());
    for (int it = 0; it < stage.iterations; ++it, ++iteration) {
      const ObjectiveGradient G = gradient_at(ev, current, L, active, cfg, s0, bundle);
      const Eigen::VectorXd gz = G.gradient.cwiseProduct(unit);
      record(iteration, static_cast<int>(si), G.value, gz.norm(), halved);
      halved = false;

      Eigen::VectorXd dz = Eigen::VectorXd::Zero(L.size());
      if (cfg.optimizer == Optimizer::Adam) {
        const int t = it + 1;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
        for (int k = 0; k < L.size(); ++k) {
          if (!active[k]) continue;
          m(k) = cfg.adam_beta1 * m(k) + (1.0 - cfg.adam_beta1) * gz(k);
          v2(k) = cfg.adam_beta2 * v2(k) + (1.0 - cfg.adam_beta2) * gz(k) * gz(k);
          dz(k) = -cfg.step_size * (m(k) / c1) / (std::sqrt(v2(k) / c2) + cfg.adam_epsilon);
        }
      } else {
        const double gmax = gz.cwiseAbs().maxCoeff();
        if (gmax > 0.0) {
          // Armijo backtracking on the optimised objective.
          double alpha = cfg.step_size / gmax;
          for (int tries = 0; tries < 8; ++tries, alpha *= 0.5) {
            const Eigen::VectorXd cand = x - alpha * gz.cwiseProduct(unit);
            const auto val = try_evaluate(model, bundle, unpack_params(cand, L.num_shape, L.num_joints), cfg);
            if (val && val->objective <= G.value.objective - 1e-4 * alpha * gz.squaredNorm()) {
              dz = -alpha * gz;
              break;
            }
          }
        }
      }

      // Reject steps that leave the image or produce non-finite values.
      std::optional<ObjectiveValue> accepted;
      for (const double fraction : {1.0, 0.5}) {
        const Eigen::VectorXd next = x + fraction * dz.cwiseProduct(unit);
        accepted = try_set_base(ev, unpack_params(next, L.num_shape, L.num_joints));
        if (accepted) {
          x = next;
          break;
        }
        halved = true;
      }
      current = accepted ? *accepted : ev.set_base(unpack_params(x, L.num_shape, L.num_joints));
    }
  }
  record(iteration, static_cast<int>(cfg.stages.size()) - 1, current, 0.0, halved);

  if (report.best_iteration == 0) {
    report.final_params = init;
  } else {
    report.final_params = unpack_params(best_x, L.num_shape, L.num_joints);
    report.final_params.canonicalize();
  }
  const auto& trace = report.trace;
  const double recent = trace[trace.size() > 5 ? trace.size() - 6 : 0].best_total;
  report.converged = best_total <= 1e-12 || (recent - best_total) <= 1e-3 * std::max(recent, 1e-12);
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

GradientCheck check_gradients(const BodyModel& model, const RepBundle& bundle, const BodyParams& params,
                              const ParamMask& mask, const FitConfig& cfg, std::uint64_t seed, double epsilon) {
  params.validate(model);
  GradientCheck out;
  const Layout L{model.num_shape(), model.num_joints()};

  // L_J in (s, t): analytic against central differences.
  const PosedBody body = forward(model, params);
  const auto lj = [&](double s, double tx, double ty) {
    return loss_joints_fit(bundle.joints(),
                           project_joints(body.joints, Camera::make(s, {tx, ty}, bundle.height(), bundle.width())));
  };
  const Points2d p = project_joints(body.joints, Camera::from_params(params, bundle.height(), bundle.width()));
  const Points2d dLdp = joint_loss_gradient(bundle.joints(), p);
  Eigen::Vector3d analytic(0.0, dLdp.col(0).sum(), dLdp.col(1).sum());
  for (Eigen::Index j = 0; j < dLdp.rows(); ++j)
    analytic(0) += dLdp(j, 0) * body.joints(j, 0) + dLdp(j, 1) * body.joints(j, 1);
  const double s = params.scale, tx = params.translation.x(), ty = params.translation.y();
  const double hs = 1e-6 * s, ht = 1e-4;
  const Eigen::Vector3d numeric((lj(s + hs, tx, ty) - lj(s - hs, tx, ty)) / (2.0 * hs),
                                (lj(s, tx + ht, ty) - lj(s, tx - ht, ty)) / (2.0 * ht),
                                (lj(s, tx, ty + ht) - lj(s, tx, ty - ht)) / (2.0 * ht));
  out.camera_rel_error = (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);

  // Directional derivative of the full objective against its secant.
  const ObjectiveGradient G = objective_gradient(model, bundle, params, mask, cfg, params.scale);
  const std::vector<bool> active = active_entries(mask, L.num_shape, L.num_joints);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(L.size());
  for (int k = 0; k < L.size(); ++k)
    if (active[k]) dir(k) = normal(rng);
  if (dir.norm() == 0.0) throw ValidationError("check_gradients: mask activates no parameter");
  dir /= dir.norm();
  for (int k = 0; k < L.size(); ++k) dir(k) *= unit_of(L, k, cfg.units, params.scale);

  const Eigen::VectorXd x = pack_params(params);
  const auto f = [&](double e) {
    return evaluate_objective(model, bundle, unpack_params(x + e * dir, L.num_shape, L.num_joints), cfg).objective;
  };
  out.directional = G.gradient.dot(dir);
  out.secant = (f(epsilon) - f(-epsilon)) / (2.0 * epsilon);
  out.secant_rel_error =
      std::abs(out.directional - out.secant) / std::max({std::abs(out.secant), std::abs(out.directional), 1e-12});
  return out;
}

}  // namespace clothfit
