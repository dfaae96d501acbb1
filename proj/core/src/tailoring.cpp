// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/tailoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "clothfit/errors.hpp"
#include "clothfit/model_io.hpp"

namespace fs = std::filesystem;

namespace clothfit {
namespace {

struct Tap {
  int i0;
  int i1;
  double w1;  // weight of i1; i0 gets 1 - w1
};

Tap clamp_tap(double src, int n) {
  src = std::clamp(src, 0.0, static_cast<double>(n - 1));
  const int i0 = std::min(static_cast<int>(std::floor(src)), n - 1);
  const int i1 = std::min(i0 + 1, n - 1);
  return {i0, i1, src - i0};
}

ImagePlane resample(const ImagePlane& image, int out_h, int out_w, const std::vector<Tap>& rows,
                    const std::vector<Tap>& cols) {
  ImagePlane out(out_h, out_w, image.channels(), 0.0, image.range());
  for (int Y = 0; Y < out_h; ++Y) {
    const Tap& ty = rows[Y];
    for (int X = 0; X < out_w; ++X) {
      const Tap& tx = cols[X];
      for (int c = 0; c < image.channels(); ++c) {
        const double top = (1.0 - tx.w1) * image(ty.i0, tx.i0, c) + tx.w1 * image(ty.i0, tx.i1, c);
        const double bottom = (1.0 - tx.w1) * image(ty.i1, tx.i0, c) + tx.w1 * image(ty.i1, tx.i1, c);
        out(Y, X, c) = (1.0 - ty.w1) * top + ty.w1 * bottom;
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

void require_same(const Image& a, const Image& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(std::string(what) + ": image sizes differ");
}

std::vector<double> read_floats(const fs::path& path, std::size_t count) {
  if (!fs::is_regular_file(path)) throw IoError(IoErrorKind::MissingFile, path.string(), "file not found");
  if (fs::file_size(path) != count * sizeof(float)) {
    throw IoError(IoErrorKind::DimensionMismatch, path.string(),
                  "expected " + std::to_string(count) + " float32 values");
  }
  std::ifstream in(path, std::ios::binary);
  std::vector<double> out(count);
  for (double& v : out) {
    std::uint32_t bits;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    v = f;
  }
  return out;
}

void write_floats(const fs::path& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  for (double v : values) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw IoError(IoErrorKind::MissingFile, path.string(), "write failed");
}

}  // namespace

ConvSpec ConvSpec::zeros(int size, int in_channels, int out_channels) {
  ConvSpec c;
  c.size = size;
  c.in_channels = in_channels;
  c.out_channels = out_channels;
  c.kernel.assign(static_cast<std::size_t>(size) * size * in_channels * out_channels, 0.0);
  c.bias.assign(static_cast<std::size_t>(out_channels), 0.0);
  return c;
}

void ConvSpec::validate() const {
  if (size < 1 || size % 2 == 0) throw ValidationError("conv: kernel size must be odd");
  if (in_channels < 1 || out_channels < 1) throw ShapeError("conv: channel counts must be positive");
  if (kernel.size() != static_cast<std::size_t>(size) * size * in_channels * out_channels ||
      bias.size() != static_cast<std::size_t>(out_channels)) {
    throw ShapeError("conv: buffer lengths do not match the declared shape");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(kernel.begin(), kernel.end(), finite) || !std::all_of(bias.begin(), bias.end(), finite)) {
    throw ValidationError("conv: non-finite weights");
  }
}

ConvWeights load_conv_weights(const fs::path& manifest) {
  const nlohmann::json doc = io::read_json(manifest);
  if (!doc.is_object()) throw IoError(IoErrorKind::Schema, manifest.string(), "manifest must be an object");
  const fs::path base = manifest.parent_path();
  ConvWeights out;
  for (const auto& [name, entry] : doc.items()) {
    ConvSpec c;
    try {
      c.size = entry.at("size").get<int>();
      c.in_channels = entry.at("in_channels").get<int>();
      c.out_channels = entry.at("out_channels").get<int>();
      if (c.size < 1 || c.in_channels < 1 || c.out_channels < 1) throw ShapeError("bad shape");
      c.kernel = read_floats(base / entry.at("kernel").get<std::string>(),
                             static_cast<std::size_t>(c.size) * c.size * c.in_channels * c.out_channels);
      c.bias = read_floats(base / entry.at("bias").get<std::string>(), static_cast<std::size_t>(c.out_channels));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(IoErrorKind::Schema, manifest.string(), name + ": " + e.what());
    } catch (const ShapeError& e) {
      throw IoError(IoErrorKind::Schema, manifest.string(), name + ": invalid kernel shape");
    }
    c.validate();
    out.emplace(name, std::move(c));
  }
  return out;
}

void save_conv_weights(const fs::path& manifest, const ConvWeights& weights) {
  const fs::path base = manifest.parent_path();
  if (!base.empty()) fs::create_directories(base);
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [name, c] : weights) {
    c.validate();
    const std::string kernel_file = name + ".kernel.f32";
    const std::string bias_file = name + ".bias.f32";
    write_floats(base / kernel_file, c.kernel);
    write_floats(base / bias_file, c.bias);
    doc[name] = {{"size", c.size},
                 {"in_channels", c.in_channels},
                 {"out_channels", c.out_channels},
                 {"kernel", kernel_file},
                 {"bias", bias_file}};
  }
  io::write_json(manifest, doc);
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ImagePlane bilinear_downsample(const ImagePlane& image, int factor) {
  if (factor != 2 && factor != 4 && factor != 8 && factor != 16) {
    throw ValidationError("bilinear_downsample: factor must be 2, 4, 8 or 16");
  }
  if (image.height() % factor != 0 || image.width() % factor != 0) {
    throw ValidationError("bilinear_downsample: image size must be divisible by the factor");
  }
  const int out_h = image.height() / factor;
  const int out_w = image.width() / factor;
  std::vector<Tap> rows(out_h), cols(out_w);
  for (int Y = 0; Y < out_h; ++Y) rows[Y] = clamp_tap((Y + 0.5) * factor - 0.5, image.height());
  for (int X = 0; X < out_w; ++X) cols[X] = clamp_tap((X + 0.5) * factor - 0.5, image.width());
  return resample(image, out_h, out_w, rows, cols);
}

ImagePlane bilinear_upsample_x2(const ImagePlane& image) {
  const int out_h = 2 * image.height();
  const int out_w = 2 * image.width();
  std::vector<Tap> rows(out_h), cols(out_w);
  for (int Y = 0; Y < out_h; ++Y) rows[Y] = clamp_tap((Y + 0.5) / 2.0 - 0.5, image.height());
  for (int X = 0; X < out_w; ++X) cols[X] = clamp_tap((X + 0.5) / 2.0 - 0.5, image.width());
  return resample(image, out_h, out_w, rows, cols);
}

Image gaussian_blur(const Image& image, double sigma, int radius) {
  if (!(sigma > 0.0) || radius < 0) throw ValidationError("gaussian_blur: sigma must be > 0 and radius >= 0");
  const auto k = gaussian_kernel(sigma, radius);
  const int H = static_cast<int>(image.rows());
  const int W = static_cast<int>(image.cols());
  Image tmp(H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += k[d + radius] * image(y, reflect101(x + d, W));
      tmp(y, x) = acc;
    }
  Image out(H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += k[d + radius] * tmp(reflect101(y + d, H), x);
      out(y, x) = acc;
    }
  return out;
}

Image blur_down16(const Image& matte) {
  if (matte.rows() % 16 != 0 || matte.cols() % 16 != 0) {
    throw ValidationError("blur_down16: image size must be divisible by 16");
  }
  const Image blurred = gaussian_blur(matte, 8.0, 24);
  return bilinear_downsample(ImagePlane::from_image(blurred), 16).channel(0);
}

Image boundary_mask(const Image& matte, int radius) {
  if (radius < 1) throw ValidationError("boundary_mask: radius must be >= 1");
  const int H = static_cast<int>(matte.rows());
  const int W = static_cast<int>(matte.cols());
  using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Mask bin(H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) bin(y, x) = matte(y, x) >= 0.5 ? 1 : 0;

  // Separable square max/min; windows are clipped to the image.
  auto pass = [&](const Mask& in, bool horizontal, bool take_max) {
    Mask out(H, W);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        std::uint8_t v = take_max ? 0 : 1;
        const int lo = std::max(0, (horizontal ? x : y) - radius);
        const int hi = std::min((horizontal ? W : H) - 1, (horizontal ? x : y) + radius);
        for (int i = lo; i <= hi; ++i) {
          const std::uint8_t s = horizontal ? in(y, i) : in(i, x);
          v = take_max ? std::max(v, s) : std::min(v, s);
        }
        out(y, x) = v;
      }
    return out;
  };
  const Mask dilated = pass(pass(bin, true, true), false, true);
  const Mask eroded = pass(pass(bin, true, false), false, false);
  Image out(H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) out(y, x) = (dilated(y, x) && !eroded(y, x)) ? 1.0 : 0.0;
  return out;
}

int default_boundary_radius(int height) {
  return std::max(1, static_cast<int>(std::lround(5.0 * height / 512.0)));
}

ImagePlane conv_relu(const ImagePlane& input, const ConvSpec& conv) {
  conv.validate();
  if (input.channels() != conv.in_channels) {
    throw ShapeError("conv: input has " + std::to_string(input.channels()) + " channels, kernel expects " +
                     std::to_string(conv.in_channels));
  }
  const int H = input.height();
  const int W = input.width();
  const int r = conv.size / 2;
  ImagePlane out(H, W, conv.out_channels);
  std::vector<double> acc(static_cast<std::size_t>(conv.out_channels));
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      std::copy(conv.bias.begin(), conv.bias.end(), acc.begin());
      for (int ky = 0; ky < conv.size; ++ky) {
        const int sy = reflect101(y + ky - r, H);
        for (int kx = 0; kx < conv.size; ++kx) {
          const int sx = reflect101(x + kx - r, W);
          for (int ci = 0; ci < conv.in_channels; ++ci) {
            const double v = input(sy, sx, ci);
            if (v == 0.0) continue;
            for (int co = 0; co < conv.out_channels; ++co) acc[co] += conv.at(ky, kx, ci, co) * v;
          }
        }
      }
      for (int co = 0; co < conv.out_channels; ++co) out(y, x, co) = std::max(0.0, acc[co]);
    }
  return out;
}

ImagePlane fpf(const ImagePlane& prev, const ImagePlane& image, const ImagePlane& encoder, const ConvSpec& conv) {
  if (conv.size != 3) throw ValidationError("fpf: kernel size must be 3");
  const ImagePlane* parts[] = {&prev, &image, &encoder};
  return conv_relu(concat_channels(parts), conv);
}

ImagePlane fdf(const ImagePlane& edge, const ImagePlane& cut, const ConvSpec& conv) {
  if (conv.size != 1) throw ValidationError("fdf: kernel size must be 1");
  const ImagePlane* parts[] = {&edge, &cut};
  return conv_relu(concat_channels(parts), conv);
}

ImagePlane apply_cut(const Image& cut, const ImagePlane& image) {
  if (cut.rows() != image.height() || cut.cols() != image.width()) {
    throw ShapeError("apply_cut: matte and image sizes differ");
  }
  ImagePlane out = image;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < image.channels(); ++c) out(y, x, c) *= cut(y, x);
  return out;
}

double loss_cm(const Image& coarse, const Image& matte) {
  const Image target = blur_down16(matte);
  require_same(coarse, target, "loss_cm");
  return 0.5 * (coarse - target).square().mean();
}

double loss_edge(const Image& edge, const Image& matte, int radius) {
  require_same(edge, matte, "loss_edge");
  const Image band = boundary_mask(matte, radius);
  const double count = band.sum();
  return (band * (edge - matte).abs()).sum() / std::max(1.0, count);
}

}  // namespace clothfit
