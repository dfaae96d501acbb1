// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clothfit/image.hpp"

namespace clothfit {

/// k x k convolution followed by ReLU. Kernel layout is [ky][kx][cin][cout].
struct ConvSpec {
  int size = 1;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> kernel;
  std::vector<double> bias;

  static ConvSpec zeros(int size, int in_channels, int out_channels);
  double& at(int ky, int kx, int ci, int co) { return kernel[index(ky, kx, ci, co)]; }
  double at(int ky, int kx, int ci, int co) const { return kernel[index(ky, kx, ci, co)]; }
  /// Odd size, matching buffer lengths, finite values.
  void validate() const;

 private:
  std::size_t index(int ky, int kx, int ci, int co) const {
    return ((static_cast<std::size_t>(ky) * size + kx) * in_channels + ci) * out_channels + co;
  }
};

using ConvWeights = std::map<std::string, ConvSpec>;

// Weights directory: manifest.json maps each name to {size, in_channels,
// out_channels, kernel, bias}, the last two naming raw little-endian float32
// files next to the manifest.
ConvWeights load_conv_weights(const std::filesystem::path& manifest);
void save_conv_weights(const std::filesystem::path& manifest, const ConvWeights& weights);

/// Mirror index without repeating the edge sample (…2 1 | 0 1 2 … n-1 | n-2 …).
int reflect101(int i, int n);

/// Shrinks by `factor` in {2, 4, 8, 16}. Output pixel (X, Y) samples the
/// source at ((X + 0.5) * factor - 0.5, (Y + 0.5) * factor - 0.5).
ImagePlane bilinear_downsample(const ImagePlane& image, int factor);

/// Doubles both sides. Output pixel (X, Y) samples the source at
/// ((X + 0.5) / 2 - 0.5, (Y + 0.5) / 2 - 0.5), clamped to the image.
ImagePlane bilinear_upsample_x2(const ImagePlane& image);

/// Separable normalised Gaussian, reflect101 borders.
Image gaussian_blur(const Image& image, double sigma, int radius);

/// Blur with sigma 8 px (radius 24), then downsample by 16.
Image blur_down16(const Image& matte);

/// Transition band of a matte: dilate(bin, r) and not erode(bin, r) with a
/// (2r+1)^2 square, bin = matte >= 0.5. Pixels outside the image are ignored.
Image boundary_mask(const Image& matte, int radius);

/// Boundary radius scaled from 5 px at 512 rows.
int default_boundary_radius(int height);

/// Progressive fusion: concat(prev, image, encoder) -> 3x3 conv (reflect101) -> ReLU.
ImagePlane fpf(const ImagePlane& prev, const ImagePlane& image, const ImagePlane& encoder, const ConvSpec& conv);

/// Detail fusion: concat(edge, upsampled cut) -> 1x1 conv -> ReLU.
ImagePlane fdf(const ImagePlane& edge, const ImagePlane& cut, const ConvSpec& conv);

/// Convolution (reflect101 padding) and ReLU on an already concatenated input.
ImagePlane conv_relu(const ImagePlane& input, const ConvSpec& conv);

/// B = C_r * I per pixel and channel.
ImagePlane apply_cut(const Image& cut, const ImagePlane& image);

// Tailoring losses. All reductions are pixel means.

/// 0.5 * mean (C_m - blur_down16(alpha))^2.
double loss_cm(const Image& coarse, const Image& matte);

/// Sum of m_d |H_r - alpha| over max(1, |m_d|).
double loss_edge(const Image& edge, const Image& matte, int radius);

/// Mean SSIM over an 11x11 Gaussian window (sigma 1.5), C1 = 1e-4, C2 = 9e-4.
double ssim(const Image& a, const Image& b);

/// KL(p || q) of the images normalised as (x + 1e-6) / sum(x + 1e-6).
double kl_divergence(const Image& p, const Image& q);

struct CutLoss {
  double l1 = 0.0;
  double similarity = 0.0;  // 1 - SSIM
  double divergence = 0.0;  // KL(alpha || C_r)
  double total = 0.0;
};
CutLoss loss_cut_terms(const Image& cut, const Image& matte);
double loss_cut(const Image& cut, const Image& matte);

struct ClothLoss {
  double edge = 0.0;
  double cut = 0.0;
  double coarse = 0.0;
  double total = 0.0;  // 4 edge + 4 cut + 2 coarse
};
ClothLoss loss_cloth_terms(const Image& coarse, const Image& edge, const Image& cut, const Image& matte,
                           int radius);
double loss_cloth(const Image& coarse, const Image& edge, const Image& cut, const Image& matte, int radius);

}  // namespace clothfit
