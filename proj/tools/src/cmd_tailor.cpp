// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <memory>

#include "clothfit/errors.hpp"
#include "clothfit/image_io.hpp"
#include "clothfit/model_io.hpp"
#include "clothfit/tailoring.hpp"
#include "commands.hpp"
#include "options.hpp"

namespace clothfit::cli {
namespace {

constexpr int kFusionSteps = 4;  // 1/16 -> 1/8 -> 1/4 -> 1/2 -> 1

// Pass-through kernel: copies input channel `channel` at the kernel centre.
ConvSpec select_channel(int size, int in_channels, int channel) {
  ConvSpec c = ConvSpec::zeros(size, in_channels, 1);
  c.at(size / 2, size / 2, channel, 0) = 1.0;
  return c;
}

ConvWeights default_weights(int image_channels) {
  ConvWeights w;
  for (int k = 1; k <= kFusionSteps; ++k) {
    w["fpf_" + std::to_string(k)] = select_channel(3, 1 + image_channels + 1, 0);
  }
  w["edge"] = select_channel(3, image_channels + 1, image_channels);
  ConvSpec fuse = ConvSpec::zeros(1, 2, 1);
  fuse.at(0, 0, 0, 0) = 0.5;
  fuse.at(0, 0, 1, 0) = 0.5;
  w["fdf"] = fuse;
  return w;
}

ImagePlane luminance(const ImagePlane& image) {
  ImagePlane out(image.height(), image.width(), 1, 0.0, ValueRange::Unit);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      double s = 0.0;
      for (int c = 0; c < image.channels(); ++c) s += image(y, x, c);
      out(y, x, 0) = s / image.channels();
    }
  return out;
}

Image clamp_unit(const Image& image) { return image.max(0.0).min(1.0); }

struct Tailor {
  std::string image;
  std::string matte;
  std::string weights;
  std::string out;
  std::string config;
  int radius = 0;
  bool export_weights = false;
  OptionSet options;

  explicit Tailor(CLI::App* app) : options(app) {
    options.add("image", image, "Input image (PPM or PGM)");
    options.add("matte", matte, "Ground-truth matte (PGM)");
    options.add("weights", weights, "Fusion weights manifest; missing entries use pass-through kernels");
    options.add("radius", radius, "Boundary radius in pixels (0: scaled from the image height)");
    options.flag("export-weights", export_weights, "Write the weights used to <out>/weights/manifest.json");
    options.add("out", out, "Output directory");
    app->add_option("--config", config, "JSON file with option values");
  }

  int run() {
    options.resolve();
    if (image.empty() || matte.empty() || out.empty()) {
      throw ValidationError("tailor: --image, --matte and --out are required");
    }
    const ImagePlane input = io::read_pnm(image);
    const Image alpha = io::read_pgm(matte);
    if (alpha.rows() != input.height() || alpha.cols() != input.width()) {
      throw ShapeError("tailor: image and matte sizes differ");
    }
    ConvWeights w = default_weights(input.channels());
    if (!weights.empty()) {
      for (auto& [name, spec] : load_conv_weights(weights)) w[name] = spec;
    }
    auto conv = [&](const std::string& name) -> const ConvSpec& {
      auto it = w.find(name);
      if (it == w.end()) throw ValidationError("tailor: missing weights '" + name + "'");
      return it->second;
    };

    const Image coarse = blur_down16(alpha);
    ImagePlane cut = ImagePlane::from_image(coarse, ValueRange::Unbounded);
    for (int k = 1; k <= kFusionSteps; ++k) {
      const int factor = 1 << (kFusionSteps - k);
      const ImagePlane scaled = factor > 1 ? bilinear_downsample(input, factor) : input;
      cut = fpf(bilinear_upsample_x2(cut), scaled, luminance(scaled), conv("fpf_" + std::to_string(k)));
    }
    const ImagePlane* edge_parts[] = {&input, &cut};
    const ImagePlane edge = conv_relu(concat_channels(edge_parts), conv("edge"));
    const Image refined = clamp_unit(fdf(edge, cut, conv("fdf")).channel(0));
    const Image edge_map = edge.channel(0);
    const int r = radius > 0 ? radius : default_boundary_radius(input.height());
    radius = r;

    const ClothLoss loss = loss_cloth_terms(coarse, edge_map, refined, alpha, r);
    const CutLoss cut_terms = loss_cut_terms(refined, alpha);

    const fs::path dir(out);
    ensure_dir(dir);
    const ImagePlane body = apply_cut(refined, input);
    if (body.channels() == 3) {
      io::write_ppm(dir / "body.ppm", body);
    } else {
      io::write_pgm(dir / "body.pgm", body.channel(0));
    }
    io::write_pgm(dir / "coarse.pgm", clamp_unit(coarse));
    io::write_pgm(dir / "edge.pgm", clamp_unit(edge_map));
    io::write_pgm(dir / "cut.pgm", refined);
    io::write_json(dir / "losses.json",
                   {{"edge", loss.edge},
                    {"cut", {{"l1", cut_terms.l1},
                             {"similarity", cut_terms.similarity},
                             {"divergence", cut_terms.divergence},
                             {"total", cut_terms.total}}},
                    {"coarse", loss.coarse},
                    {"total", loss.total},
                    {"boundary_radius", r}});
    if (export_weights) save_conv_weights(dir / "weights" / "manifest.json", w);
    write_config(dir, "tailor", options.dump());
    std::printf("tailor: cloth loss %.6g (edge %.6g, cut %.6g, coarse %.6g)\n", loss.total, loss.edge, loss.cut,
                loss.coarse);
    return 0;
  }
};

}  // namespace

Runner add_tailor(CLI::App& root) {
  CLI::App* app = root.add_subcommand("tailor", "Run the matte fusion operators and tailoring losses");
  auto state = std::make_shared<Tailor>(app);
  return [state] { return state->run(); };
}

}  // namespace clothfit::cli
