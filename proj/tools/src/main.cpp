// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit_cli/cli.hpp"

int main(int argc, char** argv) { return clothfit::cli::run({argv + 1, argv + argc}); }
