// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include <CLI11.hpp>

namespace clothfit::cli {

using Runner = std::function<int()>;

Runner add_synth(CLI::App& root);
Runner add_fit(CLI::App& root);
Runner add_render(CLI::App& root);
Runner add_eval(CLI::App& root);
Runner add_tailor(CLI::App& root);
Runner add_gradcheck(CLI::App& root);

}  // namespace clothfit::cli
