// SPDX-License-Identifier: Apache-2.0
#include "dispflow/cli.hpp"

int main(int argc, char** argv) { return dispflow::run_cli(argc, argv); }
