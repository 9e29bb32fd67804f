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

#include "qdt/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qdt/error.hpp"

namespace qdt::io {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing key '" + key + "'");
  return *it;
}

std::int64_t require_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

double require_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

Eigen::MatrixXd real_matrix(const Json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw SchemaError(where + ": expected " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw SchemaError(rw + ": expected " + std::to_string(dim) + " columns");
    }
    for (int c = 0; c < dim; ++c) {
      m(r, c) = require_number(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

// Integral counts are written as integers so sampled datasets stay readable.
Json count_value(double c) {
  if (std::nearbyint(c) == c && std::abs(c) < 9.0e15) return Json(static_cast<std::int64_t>(c));
  return Json(c);
}

}  // namespace

Json operator_to_json(const HermitianOperator& op) {
  Json re = Json::array();
  Json im = Json::array();
  for (int r = 0; r < op.dim(); ++r) {
    Json rr = Json::array();
    Json ir = Json::array();
    for (int c = 0; c < op.dim(); ++c) {
      rr.push_back(op.matrix()(r, c).real());
      ir.push_back(op.matrix()(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  Json j;
  j["dim"] = op.dim();
  j["labels"] = op.labels();
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

HermitianOperator operator_from_json(const Json& j, const std::string& where) {
  const auto dim = require_int(require(j, "dim", where), where + ".dim");
  if (dim < 2 || dim > 1024 || (dim & (dim - 1)) != 0) {
    throw SchemaError(where + ".dim: must be a power of two >= 2");
  }
  const Json& labels_j = require(j, "labels", where);
  if (!labels_j.is_array()) throw SchemaError(where + ".labels: expected an array");
  std::vector<int> labels;
  for (std::size_t i = 0; i < labels_j.size(); ++i) {
    labels.push_back(static_cast<int>(
        require_int(labels_j[i], where + ".labels[" + std::to_string(i) + "]")));
  }
  const int d = static_cast<int>(dim);
  const Eigen::MatrixXd re = real_matrix(require(j, "re", where), d, where + ".re");
  const Eigen::MatrixXd im = real_matrix(require(j, "im", where), d, where + ".im");
  Matrix m(d, d);
  m.real() = re;
  m.imag() = im;
  try {
    return HermitianOperator(m, std::move(labels));
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

Json povm_to_json(const Povm& povm) {
  Json elements = Json::object();
  for (std::size_t i = 0; i < povm.size(); ++i) {
    elements[outcome_string(i, povm.num_qubits())] = operator_to_json(povm[i]);
  }
  Json j;
  j["n"] = povm.num_qubits();
  j["elements"] = std::move(elements);
  return j;
}

Povm povm_from_json(const Json& j) {
  const auto n = require_int(require(j, "n", "povm"), "povm.n");
  if (n < 1 || n > 10) throw SchemaError("povm.n: must lie in [1, 10]");
  const Json& elements = require(j, "elements", "povm");
  if (!elements.is_object()) throw SchemaError("povm.elements: expected an object");
  std::vector<HermitianOperator> ops;
  for (const auto& outcome : all_outcomes(static_cast<int>(n))) {
    auto it = elements.find(outcome);
    if (it == elements.end()) throw SchemaError("povm.elements: missing outcome '" + outcome + "'");
    ops.push_back(operator_from_json(*it, "povm.elements." + outcome));
    if (ops.back().num_qubits() != n) {
      throw SchemaError("povm.elements." + outcome + ": expected " + std::to_string(n) + " qubits");
    }
  }
  if (elements.size() != ops.size()) throw SchemaError("povm.elements: unexpected outcome keys");
  try {
    return Povm(std::move(ops));
  } catch (const Error& e) {
    throw SchemaError(std::string("povm: ") + e.what());
  }
}

Json counts_to_json(const CountsDataset& data) {
  Json preps = Json::array();
  for (const auto& rec : data.preparations) {
    Json counts = Json::object();
    for (const auto& [outcome, c] : rec.counts) counts[outcome] = count_value(c);
    Json p;
    p["labels"] = rec.labels;
    p["shots"] = rec.shots;
    p["counts"] = std::move(counts);
    preps.push_back(std::move(p));
  }
  Json j;
  j["version"] = 1;
  j["qubits"] = data.qubits;
  j["preparations"] = std::move(preps);
  return j;
}

CountsDataset counts_from_json(const Json& j) {
  const auto version = require_int(require(j, "version", "counts"), "counts.version");
  if (version != 1) throw SchemaError("counts.version: unsupported version " + std::to_string(version));
  CountsDataset data;
  const Json& qubits = require(j, "qubits", "counts");
  if (!qubits.is_array() || qubits.empty()) throw SchemaError("counts.qubits: expected a non-empty array");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    data.qubits.push_back(
        static_cast<int>(require_int(qubits[i], "counts.qubits[" + std::to_string(i) + "]")));
  }
  const Json& preps = require(j, "preparations", "counts");
  if (!preps.is_array()) throw SchemaError("counts.preparations: expected an array");
  for (std::size_t k = 0; k < preps.size(); ++k) {
    const std::string where = "preparations[" + std::to_string(k) + "]";
    const Json& rec = preps[k];
    PreparationCounts pc;
    const Json& labels = require(rec, "labels", where);
    if (!labels.is_array() || labels.size() != data.qubits.size()) {
      throw SchemaError(where + ".labels: expected " + std::to_string(data.qubits.size()) +
                        " labels");
    }
    for (std::size_t q = 0; q < labels.size(); ++q) {
      if (!labels[q].is_string()) {
        throw SchemaError(where + ".labels[" + std::to_string(q) + "]: expected a string");
      }
      pc.labels.push_back(labels[q].get<std::string>());
    }
    pc.shots = require_int(require(rec, "shots", where), where + ".shots");
    const Json& counts = require(rec, "counts", where);
    if (!counts.is_object()) throw SchemaError(where + ".counts: expected an object");
    for (const auto& [outcome, value] : counts.items()) {
      pc.counts[outcome] = require_number(value, where + ".counts[" + outcome + "]");
    }
    data.preparations.push_back(std::move(pc));
  }
  return data;
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace qdt::io
