// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "clothfit/errors.hpp"

namespace clothfit::io {
namespace {

namespace fs = std::filesystem;

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::MissingFile, path.string(), "");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoErrorKind::MissingFile, path.string(), "cannot open for writing");
  return out;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch)) {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (token.empty()) throw IoError(IoErrorKind::MalformedHeader, path.string(), "truncated header");
  return token;
}

int parse_positive(const std::string& token, const fs::path& path, const char* field) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size() || v <= 0 || v > (1L << 30)) throw std::invalid_argument(field);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw IoError(IoErrorKind::MalformedHeader, path.string(), std::string("bad ") + field);
  }
}

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const fs::path& path) {
  PnmHeader h;
  h.magic = next_token(in, path);
  if (h.magic != "P5" && h.magic != "P6") {
    throw IoError(IoErrorKind::UnsupportedFormat, path.string(), "magic " + h.magic);
  }
  h.width = parse_positive(next_token(in, path), path, "width");
  h.height = parse_positive(next_token(in, path), path, "height");
  h.maxval = parse_positive(next_token(in, path), path, "maxval");
  // next_token consumed exactly one whitespace byte after maxval
  if (h.maxval > 255) {
    throw IoError(IoErrorKind::UnsupportedFormat, path.string(),
                  "maxval " + std::to_string(h.maxval) + " (only 8-bit supported)");
  }
  return h;
}

std::vector<std::uint8_t> read_bytes(std::istream& in, std::size_t count, const fs::path& path) {
  std::vector<std::uint8_t> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw IoError(IoErrorKind::MalformedHeader, path.string(), "truncated pixel data");
  }
  return bytes;
}

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

ImagePlane decode_pnm(std::istream& in, const PnmHeader& h, const fs::path& path) {
  const int channels = h.magic == "P6" ? 3 : 1;
  const auto bytes =
      read_bytes(in, static_cast<std::size_t>(h.width) * h.height * channels, path);
  ImagePlane out(h.height, h.width, channels, 0.0, ValueRange::Unit);
  const double inv = 1.0 / h.maxval;
  auto dst = out.data();
  for (std::size_t i = 0; i < bytes.size(); ++i) dst[i] = bytes[i] * inv;
  return out;
}

}  // namespace

ImagePlane read_pnm(const fs::path& path) {
  auto in = open_in(path);
  const PnmHeader h = read_pnm_header(in, path);
  return decode_pnm(in, h, path);
}

Image read_pgm(const fs::path& path) {
  auto in = open_in(path);
  const PnmHeader h = read_pnm_header(in, path);
  if (h.magic != "P5") throw IoError(IoErrorKind::UnsupportedFormat, path.string(), "expected P5");
  return decode_pnm(in, h, path).channel(0);
}

ImagePlane read_ppm(const fs::path& path) {
  auto in = open_in(path);
  const PnmHeader h = read_pnm_header(in, path);
  if (h.magic != "P6") throw IoError(IoErrorKind::UnsupportedFormat, path.string(), "expected P6");
  return decode_pnm(in, h, path);
}

void write_pgm(const fs::path& path, const Image& image) {
  auto out = open_out(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(image.size()));
  for (Eigen::Index i = 0; i < image.size(); ++i) bytes[i] = quantize(image.data()[i]);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_ppm(const fs::path& path, const ImagePlane& image) {
  if (image.channels() != 3) throw ShapeError("write_ppm expects 3 channels");
  auto out = open_out(path);
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<std::uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), quantize);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ImagePlane read_pfm(const fs::path& path) {
  auto in = open_in(path);
  std::string magic;
  if (!std::getline(in, magic)) throw IoError(IoErrorKind::MalformedHeader, path.string(), "empty");
  int channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    throw IoError(IoErrorKind::UnsupportedFormat, path.string(), "magic " + magic);
  }
  std::string dims_line;
  std::string scale_line;
  if (!std::getline(in, dims_line) || !std::getline(in, scale_line)) {
    throw IoError(IoErrorKind::MalformedHeader, path.string(), "truncated header");
  }
  std::istringstream dims(dims_line);
  std::string ws;
  std::string hs;
  dims >> ws >> hs;
  const int width = parse_positive(ws, path, "width");
  const int height = parse_positive(hs, path, "height");
  double scale = 0.0;
  try {
    scale = std::stod(scale_line);
  } catch (const std::exception&) {
    throw IoError(IoErrorKind::MalformedHeader, path.string(), "bad scale");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw IoError(IoErrorKind::MalformedHeader, path.string(), "bad scale");
  }
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  auto bytes = read_bytes(in, count * sizeof(float), path);
  ImagePlane out(height, width, channels, 0.0, ValueRange::Unbounded);
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;  // stored bottom-to-top
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t i = ((static_cast<std::size_t>(row) * width + x) * channels + c) * 4;
        std::uint8_t b[4] = {bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]};
        if (file_little != host_little) {
          std::swap(b[0], b[3]);
          std::swap(b[1], b[2]);
        }
        float f = 0.0f;
        std::memcpy(&f, b, 4);
        out(y, x, c) = f;
      }
    }
  }
  return out;
}

Image read_pfm_gray(const fs::path& path) {
  ImagePlane plane = read_pfm(path);
  if (plane.channels() != 1) {
    throw IoError(IoErrorKind::UnsupportedFormat, path.string(), "expected grayscale Pf");
  }
  return plane.channel(0);
}

void write_pfm(const fs::path& path, const ImagePlane& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ShapeError("write_pfm expects 1 or 3 channels");
  }
  static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");
  auto out = open_out(path);
  out << (image.channels() == 1 ? "Pf" : "PF") << '\n'
      << image.width() << ' ' << image.height() << '\n'
      << "-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(image.width()) * image.channels());
  for (int y = image.height() - 1; y >= 0; --y) {
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < image.channels(); ++c)
        row[static_cast<std::size_t>(x) * image.channels() + c] = static_cast<float>(image(y, x, c));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

void write_pfm(const fs::path& path, const Image& image) {
  write_pfm(path, ImagePlane::from_image(image, ValueRange::Unbounded));
}

}  // namespace clothfit::io
