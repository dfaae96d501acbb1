// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "clothfit/errors.hpp"
#include "clothfit/image_io.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/representations.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace clothfit {
namespace {

std::uint32_t to_little(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(bits);
  return bits;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError(IoErrorKind::MissingFile, path.string(), "file not found");
}

json joints_to_json(const JointTargets& joints) {
  json rows = json::array();
  for (Eigen::Index j = 0; j < joints.coords.rows(); ++j) {
    if (joints.confidence(j) == 1.0) {
      rows.push_back({joints.coords(j, 0), joints.coords(j, 1)});
    } else {
      rows.push_back({joints.coords(j, 0), joints.coords(j, 1), joints.confidence(j)});
    }
  }
  return rows;
}

JointTargets joints_from_json(const json& doc, const fs::path& path) {
  if (!doc.is_array()) throw IoError(IoErrorKind::Schema, path.string(), "expected an array of joints");
  JointTargets out;
  out.coords.resize(static_cast<Eigen::Index>(doc.size()), 2);
  out.confidence.resize(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t j = 0; j < doc.size(); ++j) {
    const json& row = doc[j];
    if (!row.is_array() || (row.size() != 2 && row.size() != 3)) {
      throw IoError(IoErrorKind::Schema, path.string(), "joint rows must be [x, y] or [x, y, c]");
    }
    for (const json& v : row) {
      if (!v.is_number()) throw IoError(IoErrorKind::Schema, path.string(), "joint entries must be numbers");
    }
    const auto k = static_cast<Eigen::Index>(j);
    out.coords(k, 0) = row[0].get<double>();
    out.coords(k, 1) = row[1].get<double>();
    out.confidence(k) = row.size() == 3 ? row[2].get<double>() : 1.0;
  }
  return out;
}

DepthPolarity read_polarity(const fs::path& path) {
  require_file(path);
  const json meta = io::read_json(path);
  if (!meta.is_object() || !meta.contains("polarity") || !meta["polarity"].is_string()) {
    throw IoError(IoErrorKind::PolarityTag, path.string(), "missing polarity tag");
  }
  const std::string tag = meta["polarity"].get<std::string>();
  if (meta.contains("normalized") && meta["normalized"] != true) {
    throw IoError(IoErrorKind::PolarityTag, path.string(), "depth must be normalized to [0, 1]");
  }
  if (tag == "near_zero") return DepthPolarity::NearZero;
  if (tag == "far_zero") return DepthPolarity::FarZero;
  throw IoError(IoErrorKind::PolarityTag, path.string(), "unknown polarity '" + tag + "'");
}

void write_heatmaps(const Heatmaps& maps, const fs::path& dir) {
  const int H = static_cast<int>(maps.channels.front().rows());
  const int W = static_cast<int>(maps.channels.front().cols());
  std::ofstream out(dir / "heatmaps.bin", std::ios::binary);
  for (const Image& channel : maps.channels) {
    for (Eigen::Index i = 0; i < channel.size(); ++i) {
      float f = static_cast<float>(channel.data()[i]);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      bits = to_little(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw IoError(IoErrorKind::MissingFile, (dir / "heatmaps.bin").string(), "write failed");
  io::write_json(dir / "heatmaps.meta.json",
                 {{"dtype", "float32"}, {"layout", "CHW"}, {"endian", "little"},
                  {"channels", maps.channels.size()}, {"height", H}, {"width", W}});
}

Heatmaps read_heatmaps(const fs::path& dir, int height, int width) {
  const fs::path meta_path = dir / "heatmaps.meta.json";
  const fs::path bin_path = dir / "heatmaps.bin";
  require_file(meta_path);
  const json meta = io::read_json(meta_path);
  int C = 0, H = 0, W = 0;
  try {
    if (meta.at("dtype") != "float32" || meta.at("layout") != "CHW" || meta.value("endian", "little") != "little") {
      throw IoError(IoErrorKind::UnsupportedFormat, meta_path.string(), "expected little-endian float32 CHW");
    }
    C = meta.at("channels").get<int>();
    H = meta.at("height").get<int>();
    W = meta.at("width").get<int>();
  } catch (const json::exception& e) {
    throw IoError(IoErrorKind::MalformedHeader, meta_path.string(), e.what());
  }
  if (C != kHeatmapChannels) throw IoError(IoErrorKind::DimensionMismatch, meta_path.string(), "expected 24 channels");
  if (H != height || W != width) {
    throw IoError(IoErrorKind::DimensionMismatch, meta_path.string(), "heatmap size differs from mask");
  }
  require_file(bin_path);
  const auto expected = static_cast<std::uintmax_t>(C) * H * W * sizeof(float);
  if (fs::file_size(bin_path) != expected) {
    throw IoError(IoErrorKind::DimensionMismatch, bin_path.string(), "payload size does not match header");
  }
  std::ifstream in(bin_path, std::ios::binary);
  Heatmaps maps;
  for (int c = 0; c < C; ++c) {
    Image channel(H, W);
    for (Eigen::Index i = 0; i < channel.size(); ++i) {
      std::uint32_t bits;
      in.read(reinterpret_cast<char*>(&bits), sizeof bits);
      bits = to_little(bits);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      channel.data()[i] = f;
    }
    maps.channels.push_back(std::move(channel));
  }
  if (!in) throw IoError(IoErrorKind::MalformedHeader, bin_path.string(), "truncated payload");
  return maps;
}

}  // namespace

void save_bundle(const RepBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_json(dir / "joints.json", joints_to_json(bundle.joints()));
  io::write_pfm(dir / "depth.pfm", bundle.depth());
  io::write_json(dir / "depth.meta.json",
                 {{"polarity", std::string(to_string(bundle.polarity()))}, {"normalized", true}});
  io::write_pgm(dir / "mask.pgm", bundle.silhouette());
  if (bundle.heatmaps()) write_heatmaps(*bundle.heatmaps(), dir);
}

RepBundle load_bundle(const fs::path& dir) {
  const fs::path joints_path = dir / "joints.json";
  const fs::path depth_path = dir / "depth.pfm";
  const fs::path mask_path = dir / "mask.pgm";
  for (const fs::path& p : {joints_path, depth_path, dir / "depth.meta.json", mask_path}) require_file(p);

  JointTargets joints = joints_from_json(io::read_json(joints_path), joints_path);
  const DepthPolarity polarity = read_polarity(dir / "depth.meta.json");
  Image depth = io::read_pfm_gray(depth_path);
  Image mask = io::read_pgm(mask_path);
  if (depth.rows() != mask.rows() || depth.cols() != mask.cols()) {
    throw IoError(IoErrorKind::DimensionMismatch, depth_path.string(),
                  "depth is " + std::to_string(depth.rows()) + "x" + std::to_string(depth.cols()) + " but mask is " +
                      std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()));
  }
  std::optional<Heatmaps> maps;
  if (fs::exists(dir / "heatmaps.bin") || fs::exists(dir / "heatmaps.meta.json")) {
    maps = read_heatmaps(dir, static_cast<int>(mask.rows()), static_cast<int>(mask.cols()));
  }
  return RepBundle(std::move(joints), std::move(depth), polarity, std::move(mask), std::move(maps));
}

}  // namespace clothfit
