// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/image.hpp"

#include <algorithm>
#include <cmath>

#include "clothfit/errors.hpp"

namespace clothfit {

ImagePlane::ImagePlane(int height, int width, int channels, double fill, ValueRange range)
    : height_(height), width_(width), channels_(channels), range_(range) {
  if (height < 1 || width < 1 || channels < 0) {
    throw ShapeError("image plane needs height, width >= 1 and channels >= 0");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImagePlane ImagePlane::from_image(const Image& image, ValueRange range) {
  ImagePlane plane(static_cast<int>(image.rows()), static_cast<int>(image.cols()), 1, 0.0, range);
  std::copy(image.data(), image.data() + image.size(), plane.data_.begin());
  return plane;
}

Image ImagePlane::channel(int c) const {
  if (c < 0 || c >= channels_) throw ShapeError("channel index out of range");
  Image out(height_, width_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out(y, x) = (*this)(y, x, c);
  return out;
}

bool ImagePlane::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ImagePlane concat_channels(std::span<const ImagePlane* const> planes) {
  if (planes.empty()) throw ShapeError("concat_channels: no inputs");
  const ImagePlane& first = *planes.front();
  int total = 0;
  for (const ImagePlane* p : planes) {
    if (!p->same_size(first)) throw ShapeError("concat_channels: inputs differ in height/width");
    total += p->channels();
  }
  ImagePlane out(first.height(), first.width(), total);
  for (int y = 0; y < first.height(); ++y) {
    for (int x = 0; x < first.width(); ++x) {
      int c_out = 0;
      for (const ImagePlane* p : planes)
        for (int c = 0; c < p->channels(); ++c) out(y, x, c_out++) = (*p)(y, x, c);
    }
  }
  return out;
}

}  // namespace clothfit
