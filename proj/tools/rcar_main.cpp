// Copyright 2026 The rcar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcar/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and estimation tools for random coefficient autoregressions"};
  app.set_version_flag("--version", std::string(rcar::kToolVersion));

  rcar::RunOptions options;
  std::uint64_t seed = 0;
  app.add_option("pipeline", options.pipeline, "Pipeline to run")
      ->required()
      ->check(CLI::IsMember(rcar::pipeline_names()));
  app.add_option("config", options.config_path, "JSON config file")->required();
  app.add_option("--out", options.out_dir, "Output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Root seed (overrides the config)");
  app.add_option("--workers", options.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--override", options.overrides, "Config override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) options.seed = seed;
  return rcar::run(options, std::cout, std::cerr);
}
