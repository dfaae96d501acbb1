// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/metrics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "clothfit/errors.hpp"

namespace clothfit {
namespace {

void check_pair(const Points3d& a, const Points3d& b, const char* what) {
  if (a.rows() != b.rows()) throw ShapeError(std::string(what) + ": point counts differ");
  if (a.rows() == 0) throw ShapeError(std::string(what) + ": empty point set");
  if (!a.allFinite() || !b.allFinite()) throw ValidationError(std::string(what) + ": non-finite coordinates");
}

double mean_distance(const Points3d& a, const Points3d& b) {
  return (a - b).rowwise().norm().mean();
}

}  // namespace

double mpjpe(const Points3d& pred, const Points3d& gt) {
  check_pair(pred, gt, "mpjpe");
  const Points3d p = pred.rowwise() - pred.row(0);
  const Points3d g = gt.rowwise() - gt.row(0);
  return mean_distance(p, g);
}

Similarity procrustes_align(const Points3d& pred, const Points3d& gt) {
  check_pair(pred, gt, "procrustes_align");
  if (pred.rows() < 3) throw AlignmentError("procrustes_align: need at least 3 points");
  const Eigen::RowVector3d mu_p = pred.colwise().mean();
  const Eigen::RowVector3d mu_g = gt.colwise().mean();
  const Points3d p = pred.rowwise() - mu_p;
  const Points3d g = gt.rowwise() - mu_g;
  const double var_p = p.squaredNorm();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd_p(p.transpose() * p);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd_g(g.transpose() * g);
  const double tol_p = 1e-12 * std::max(1.0, svd_p.singularValues()(0));
  const double tol_g = 1e-12 * std::max(1.0, svd_g.singularValues()(0));
  if (svd_p.singularValues()(1) <= tol_p || svd_g.singularValues()(1) <= tol_g) {
    throw AlignmentError("procrustes_align: point set is degenerate (rank < 2)");
  }

  // Cross-covariance g^T p = U S V^T; R = U D V^T with D fixing the reflection.
  const Eigen::Matrix3d cov = g.transpose() * p;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d d = Eigen::Vector3d::Ones();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2) = -1.0;

  Similarity out;
  out.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  out.scale = svd.singularValues().dot(d) / var_p;
  out.translation = mu_g.transpose() - out.scale * out.rotation * mu_p.transpose();
  out.aligned = ((out.scale * pred * out.rotation.transpose()).rowwise() + out.translation.transpose());
  return out;
}

double pa_mpjpe(const Points3d& pred, const Points3d& gt) {
  return mean_distance(procrustes_align(pred, gt).aligned, gt);
}

double mvpe(const Points3d& pred_vertices, const Points3d& gt_vertices, const Eigen::Vector3d& pred_root,
            const Eigen::Vector3d& gt_root, bool procrustes) {
  check_pair(pred_vertices, gt_vertices, "mvpe");
  if (procrustes) return mean_distance(procrustes_align(pred_vertices, gt_vertices).aligned, gt_vertices);
  const Points3d p = pred_vertices.rowwise() - pred_root.transpose();
  const Points3d g = gt_vertices.rowwise() - gt_root.transpose();
  return mean_distance(p, g);
}

double iou(const Image& a, const Image& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("iou: mask sizes differ");
  long inter = 0;
  long uni = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool x = a.data()[i] >= 0.5;
    const bool y = b.data()[i] >= 0.5;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double miou(const std::vector<Image>& a, const std::vector<Image>& b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("miou: need equally many masks, at least one");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += iou(a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

MetricReport summarize(std::vector<MetricSample> samples, bool millimetres) {
  MetricReport out;
  out.millimetres = millimetres;
  if (!samples.empty()) {
    for (const MetricSample& s : samples) {
      out.mpjpe += s.mpjpe;
      out.pa_mpjpe += s.pa_mpjpe;
      out.mvpe += s.mvpe;
      out.miou += s.iou;
    }
    const double n = static_cast<double>(samples.size());
    out.mpjpe /= n;
    out.pa_mpjpe /= n;
    out.mvpe /= n;
    out.miou /= n;
  }
  out.samples = std::move(samples);
  return out;
}

}  // namespace clothfit
