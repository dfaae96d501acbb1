// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "clothfit/image.hpp"

namespace clothfit::io {

// 8-bit binary PGM (P5). Values are mapped to [0,1] by maxval; writing rounds v*255.
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& image);

// 8-bit binary PPM (P6) as a 3-channel plane in [0,1].
ImagePlane read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ImagePlane& image);

/// Reads either P5 or P6 depending on the magic number.
ImagePlane read_pnm(const std::filesystem::path& path);

// Portable float map. Writing emits little-endian (scale -1.0) with rows stored
// bottom-to-top as the format prescribes; reading accepts either byte order.
ImagePlane read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const ImagePlane& image);
Image read_pfm_gray(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Image& image);

}  // namespace clothfit::io
