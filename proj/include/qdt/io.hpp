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

// JSON documents exchanged between pipeline stages:
//
//   operator: {"dim": d, "labels": [...], "re": [[...]], "im": [[...]]}
//   POVM:     {"n": n, "elements": {"00": <operator>, "01": ...}}
//   counts:   {"version": 1, "qubits": [0, 1],
//              "preparations": [{"labels": ["0", "+"], "shots": 8192,
//                                "counts": {"00": 4100, ...}}, ...]}
//
// Parsers throw SchemaError with a JSON-pointer-like path to the offending
// record.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qdt/operator.hpp"
#include "qdt/tomography.hpp"

namespace qdt::io {

using Json = nlohmann::ordered_json;

Json operator_to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const Json& j, const std::string& where = "operator");

Json povm_to_json(const Povm& povm);
Povm povm_from_json(const Json& j);

Json counts_to_json(const CountsDataset& data);
CountsDataset counts_from_json(const Json& j);

/// Parses a file; syntax errors and truncation surface as SchemaError.
Json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qdt::io
