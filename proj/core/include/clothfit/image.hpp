// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace clothfit {

/// Single-channel raster, rows = image height, cols = image width.
/// Pixel (row y, col x) has its center at continuous coordinate (x, y).
using Image = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ValueRange { Unit, Unbounded };

/// Multi-channel raster stored height x width x channels (channel fastest).
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, int channels, double fill = 0.0,
             ValueRange range = ValueRange::Unbounded);

  static ImagePlane from_image(const Image& image, ValueRange range = ValueRange::Unit);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  ValueRange range() const noexcept { return range_; }
  void set_range(ValueRange range) noexcept { range_ = range; }

  double& operator()(int y, int x, int c) { return data_[index(y, x, c)]; }
  double operator()(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Image channel(int c) const;
  bool same_size(const ImagePlane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  ValueRange range_ = ValueRange::Unbounded;
  std::vector<double> data_;
};

/// Channel-wise concatenation; all inputs must share height and width.
ImagePlane concat_channels(std::span<const ImagePlane* const> planes);

}  // namespace clothfit
