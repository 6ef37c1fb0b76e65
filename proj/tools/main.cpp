// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "provabs/cli.hpp"

int main(int argc, char** argv) { return provabs::run_cli(argc, argv, std::cout, std::cerr); }
