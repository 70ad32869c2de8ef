// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "simct/cli.hpp"

int main(int argc, char** argv) { return simct::cli::run_cli(argc, argv, std::cout, std::cerr); }
