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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rcar/diagnostics.hpp"
#include "rcar/estimate.hpp"
#include "rcar/process.hpp"
#include "rcar/regen.hpp"

namespace rcar::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// RFC 4180 writer: CRLF line ends, fields quoted when they contain a comma,
/// quote, CR or LF. The header row is written on construction.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  void write(const std::vector<std::string>& fields);
  std::ostream& out_;
  std::size_t columns_;
};

/// Parses RFC 4180 text into rows of fields (header included).
std::vector<std::vector<std::string>> read_csv(std::istream& in);

/// Columns: index, x, and rho, eps when the driving sequence is retained. Row 0
/// holds X_0 with empty rho/eps fields.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// The CSV carries no seed id; `seed_id` is attached to the result.
Trajectory read_trajectory_csv(std::istream& in, std::uint64_t seed_id = 0);

inline constexpr char kFrameMagic[6] = {'R', 'C', 'A', 'R', '1', '\0'};
inline constexpr std::uint8_t kFrameVersion = 1;

/// Binary frame: magic "RCAR1\0", version byte, flags byte (bit 0: driving
/// retained), u64 seed id, u64 n, f64 x0, n f64 states, then n (rho, eps)
/// f64 pairs when retained. All little-endian.
void write_trajectory_binary(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_binary(std::istream& in);

/// Columns: x, h, y, value, bin_count, empty.
void write_transition_csv(std::ostream& out, const std::vector<TransitionCdfEstimate>& estimates);
/// Columns: x, h, t, re, im, valid.
void write_cf_csv(std::ostream& out, const std::vector<CharFnEstimate>& estimates);

nlohmann::json to_json(const GeometricReport& r);
nlohmann::json to_json(const RegenerationValueReport& r);
nlohmann::json to_json(const HarrisCheckReport& r);
nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const AtomTestReport& r);
nlohmann::json to_json(const ConvergenceReport& r);

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::json number(double v);

}  // namespace rcar::io
