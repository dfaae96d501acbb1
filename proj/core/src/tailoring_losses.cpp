// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "clothfit/errors.hpp"
#include "clothfit/tailoring.hpp"

namespace clothfit {
namespace {

constexpr double kSsimSigma = 1.5;
constexpr int kSsimRadius = 5;  // 11-tap window
constexpr double kC1 = 1e-4;    // (0.01 * L)^2, L = 1
constexpr double kC2 = 9e-4;    // (0.03 * L)^2
constexpr double kKlEps = 1e-6;

void require_same(const Image& a, const Image& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(std::string(what) + ": image sizes differ");
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  require_same(a, b, "ssim");
  const Image mu_a = gaussian_blur(a, kSsimSigma, kSsimRadius);
  const Image mu_b = gaussian_blur(b, kSsimSigma, kSsimRadius);
  const Image var_a = gaussian_blur(a * a, kSsimSigma, kSsimRadius) - mu_a * mu_a;
  const Image var_b = gaussian_blur(b * b, kSsimSigma, kSsimRadius) - mu_b * mu_b;
  const Image cov = gaussian_blur(a * b, kSsimSigma, kSsimRadius) - mu_a * mu_b;
  const Image num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
  const Image den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
  return (num / den).mean();
}

double kl_divergence(const Image& p, const Image& q) {
  require_same(p, q, "kl_divergence");
  if ((p < 0.0).any() || (q < 0.0).any()) throw DomainError("kl_divergence: inputs must be nonnegative");
  const Image pp = p + kKlEps;
  const Image qq = q + kKlEps;
  const double sp = pp.sum();
  const double sq = qq.sum();
  double kl = 0.0;
  for (Eigen::Index i = 0; i < pp.size(); ++i) {
    const double pi = pp.data()[i] / sp;
    const double qi = qq.data()[i] / sq;
    kl += pi * std::log(pi / qi);
  }
  return std::max(0.0, kl);
}

CutLoss loss_cut_terms(const Image& cut, const Image& matte) {
  require_same(cut, matte, "loss_cut");
  CutLoss out;
  out.l1 = (cut - matte).abs().mean();
  out.similarity = 1.0 - ssim(cut, matte);
  out.divergence = kl_divergence(matte, cut);
  out.total = out.l1 + out.similarity + out.divergence;
  return out;
}

double loss_cut(const Image& cut, const Image& matte) { return loss_cut_terms(cut, matte).total; }

ClothLoss loss_cloth_terms(const Image& coarse, const Image& edge, const Image& cut, const Image& matte,
                           int radius) {
  ClothLoss out;
  out.edge = loss_edge(edge, matte, radius);
  out.cut = loss_cut(cut, matte);
  out.coarse = loss_cm(coarse, matte);
  out.total = 4.0 * out.edge + 4.0 * out.cut + 2.0 * out.coarse;
  return out;
}

double loss_cloth(const Image& coarse, const Image& edge, const Image& cut, const Image& matte, int radius) {
  return loss_cloth_terms(coarse, edge, cut, matte, radius).total;
}

}  // namespace clothfit
