// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "clothfit/body_model.hpp"
#include "clothfit/image.hpp"
#include "oracles.hpp"

namespace testing_support {

using clothfit::Image;
using clothfit::ImagePlane;

inline Image random_image(std::mt19937_64& rng, int h, int w, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image out(h, w);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = u(rng);
  return out;
}

inline ImagePlane random_plane(std::mt19937_64& rng, int h, int w, int c, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ImagePlane out(h, w, c);
  for (double& v : out.data()) v = u(rng);
  return out;
}

inline oracle::Grid to_grid(const Image& img) {
  oracle::Grid g = oracle::grid(static_cast<int>(img.rows()), static_cast<int>(img.cols()));
  for (int y = 0; y < img.rows(); ++y)
    for (int x = 0; x < img.cols(); ++x) g[y][x] = img(y, x);
  return g;
}

inline oracle::Planes to_planes(const ImagePlane& p) {
  oracle::Planes out(p.channels(), oracle::grid(p.height(), p.width()));
  for (int c = 0; c < p.channels(); ++c)
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x) out[c][y][x] = p(y, x, c);
  return out;
}

inline double max_diff(const Image& a, const oracle::Grid& g) {
  double m = 0.0;
  for (int y = 0; y < a.rows(); ++y)
    for (int x = 0; x < a.cols(); ++x) m = std::max(m, std::abs(a(y, x) - g[y][x]));
  return m;
}

inline double max_diff(const ImagePlane& a, const oracle::Planes& p) {
  double m = 0.0;
  for (int c = 0; c < a.channels(); ++c)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) m = std::max(m, std::abs(a(y, x, c) - p[c][y][x]));
  return m;
}

/// A handful of random triangles inside a 64x64 frame, with random depth.
inline void random_mesh(std::mt19937_64& rng, int faces, clothfit::Vertices& v, clothfit::Faces& f) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> spread(0.05, 0.6);
  v.resize(3 * faces, 3);
  f.resize(faces, 3);
  for (int i = 0; i < faces; ++i) {
    const double cx = pos(rng), cy = pos(rng), r = spread(rng);
    for (int k = 0; k < 3; ++k) {
      v(3 * i + k, 0) = cx + r * pos(rng);
      v(3 * i + k, 1) = cy + r * pos(rng);
      v(3 * i + k, 2) = pos(rng);
      f(i, k) = 3 * i + k;
    }
  }
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("clothfit_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_support
