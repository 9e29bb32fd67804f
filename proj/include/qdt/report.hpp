// Copyright 2026 The qdt Authors
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

// Report files written by `qdt analyze` and the text tables of `qdt report`.
// The file layouts are documented in docs/formats.md.

#pragma once

#include <string>
#include <vector>

#include "qdt/crosstalk.hpp"
#include "qdt/entanglement.hpp"
#include "qdt/io.hpp"
#include "qdt/tomography.hpp"

namespace qdt::report {

using io::Json;

struct InputDigest {
  std::string name;  // file name without directories
  std::string sha256;
};

/// Traceability block. Everything except `generated_at` is reproducible and
/// written under "provenance"; the timestamp goes to "metadata".
struct Provenance {
  std::string command;
  std::string config_sha256;
  std::vector<InputDigest> inputs;
  std::string generated_at;
};

std::string sha256_hex(const std::string& bytes);
/// UTC, ISO 8601, second resolution.
std::string utc_timestamp();

inline constexpr const char* kCrosstalkSchema = "qdt-crosstalk-report/1";
inline constexpr const char* kPptSchema = "qdt-ppt-report/1";
inline constexpr const char* kDiagnosticsSchema = "qdt-mle-diagnostics/1";

Json fit_config_to_json(const FitConfig& cfg);
Json mle_config_to_json(const MleConfig& cfg);

Json crosstalk_to_json(const CrosstalkReport& r, const Provenance& prov);
/// Columns: qubits,outcome,partition,D_N,D_C,D_L_star,converged,restarts_used
std::string crosstalk_to_csv(const CrosstalkReport& r);

Json ppt_to_json(const PptTable& t, const Provenance& prov);
/// Columns: outcome,bipartition,min_eigenvalue,negativity,verdict
std::string ppt_to_csv(const PptTable& t);

Json diagnostics_to_json(const MleDiagnostics& d, const MleConfig& cfg, const Provenance& prov);

/// Copy of a report with the "metadata" member removed, for comparisons that
/// must ignore timestamps.
Json without_metadata(Json j);

// Text tables ------------------------------------------------------------------

/// One row per (report, partition): "(D_N,D_C,D_L*)" per outcome, 4 decimals.
std::string render_error_table(const std::vector<Json>& crosstalk_reports);
/// Partitions x outcomes grid of D_C values for one report.
std::string render_partition_table(const Json& crosstalk_report);
/// One row per report: the verdict tuple of every outcome.
std::string render_ppt_table(const std::vector<Json>& ppt_reports);

}  // namespace qdt::report
