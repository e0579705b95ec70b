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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcar/dist.hpp"

namespace rcar {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed or incomplete configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a law from its JSON form; field names mirror the C++ type fields.
JointLaw law_from_json(const nlohmann::json& j);
Marginal marginal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const JointLaw& law);
nlohmann::json to_json(const Marginal& m);

std::vector<std::string> pipeline_names();

/// Applies `key=value` overrides; dotted keys address nested objects and the
/// value is parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& config, const std::string& assignment);

struct PipelineResult {
  /// Every parameter with defaults filled in.
  nlohmann::json resolved_config;
  /// Files written to the output directory, relative names.
  std::vector<std::string> outputs;
  /// Human-readable report for the terminal.
  std::string report;
};

/// Runs one pipeline and writes its artifacts (not the manifest) into
/// `out_dir`. Throws ConfigError, PreconditionError, or runtime errors.
PipelineResult run_pipeline(const std::string& pipeline, const nlohmann::json& config,
                            const std::filesystem::path& out_dir, unsigned workers);

struct RunOptions {
  std::string pipeline;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::vector<std::string> overrides;
};

/// Full CLI run: load config, apply overrides, run, write manifest.json.
/// Returns the process exit code: 0 success, 1 runtime failure, 2 config
/// error, 3 precondition failure.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a digest, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace rcar
