// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#include "past/cli.hpp"

int main(int argc, char** argv) { return past::run_cli(argc, argv); }
