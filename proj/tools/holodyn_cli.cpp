// Copyright 2026 The holodyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// holodyn command-line front end.
//
//   holodyn run <config.json> [--out DIR] [--jobs N] [--seed S]
//   holodyn holonomy <config.json> [--out DIR]
//   holodyn verify [--seed S]
//
// The output directory defaults to $HOLODYN_OUT, then ./holodyn_out.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "holodyn/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Holonomic dynamics of decoherence-free subspaces"};
  app.require_subcommand(1);

  holodyn::RunOptions options;
  if (const char* env = std::getenv("HOLODYN_OUT"); env && *env) options.out_dir = env;
  std::string config;

  CLI::App* run = app.add_subcommand("run", "Run the experiments named in a config");
  run->add_option("config", config, "JSON config file")->required();
  run->add_option("--out", options.out_dir, "Output directory");
  run->add_option("--jobs", options.jobs, "Parallel sweep workers")->check(CLI::Range(1, 256));
  run->add_option("--seed", options.seed, "Seed for randomized gauges");

  CLI::App* hol = app.add_subcommand("holonomy", "Wilson loop only");
  hol->add_option("config", config, "JSON config file")->required();
  hol->add_option("--out", options.out_dir, "Output directory");

  CLI::App* verify = app.add_subcommand("verify", "Structural invariant suite");
  verify->add_option("--seed", options.seed, "Seed for random DFS states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return holodyn::run_config(config, options, std::cout);
  if (*hol) return holodyn::run_holonomy(config, options, std::cout);
  return holodyn::run_verify(options, std::cout);
}
