// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clothfit/errors.hpp"
#include "clothfit_cli/cli.hpp"
#include "commands.hpp"

namespace clothfit::cli {

int run(const std::vector<std::string>& args) {
  CLI::App app{"clothfit: body fitting to joint, depth and silhouette targets"};
  app.require_subcommand(1);
  const std::map<std::string, Runner> runners = {
      {"synth", add_synth(app)},   {"fit", add_fit(app)},       {"render", add_render(app)},
      {"eval", add_eval(app)},     {"tailor", add_tailor(app)}, {"gradcheck", add_gradcheck(app)},
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return runners.at(name)();
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: error: %s\n", name.c_str(), e.what());
    return e.category() == ErrorCategory::Validation ? kExitValidation : kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", name.c_str(), e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", name.c_str(), e.what());
    return kExitNumeric;
  }
}

}  // namespace clothfit::cli
