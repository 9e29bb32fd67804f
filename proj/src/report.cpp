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

#include "qdt/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "qdt/error.hpp"

namespace qdt::report {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string scientific(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string qubit_tuple(const std::vector<int>& qubits) {
  std::string s = "(";
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(qubits[i]);
  }
  return s + ")";
}

Json provenance_json(const Provenance& prov) {
  Json inputs = Json::array();
  for (const auto& in : prov.inputs) inputs.push_back({{"name", in.name}, {"sha256", in.sha256}});
  return Json{{"command", prov.command}, {"config_sha256", prov.config_sha256}, {"inputs", inputs}};
}

Json metadata_json(const Provenance& prov) { return Json{{"generated_at", prov.generated_at}}; }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

const Json& member(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("report: missing key '") + key + "'");
  return *it;
}

std::vector<int> qubits_of(const Json& j) { return member(j, "qubits").get<std::vector<int>>(); }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) {
    ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return ss.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json fit_config_to_json(const FitConfig& cfg) {
  return Json{{"restarts", cfg.restarts},
              {"seed", cfg.seed},
              {"max_sweeps", cfg.max_sweeps},
              {"frobenius_tol", cfg.frobenius_tol},
              {"polish_evals", cfg.polish_evals}};
}

Json mle_config_to_json(const MleConfig& cfg) {
  return Json{{"epsilon", cfg.epsilon},
              {"max_iters", cfg.max_iters},
              {"prob_floor", cfg.prob_floor},
              {"eig_floor", cfg.eig_floor}};
}

Json crosstalk_to_json(const CrosstalkReport& r, const Provenance& prov) {
  Json j;
  j["schema"] = kCrosstalkSchema;
  j["qubits"] = r.qubits;
  Json parts = Json::array();
  for (const auto& p : r.partitions) parts.push_back(p.to_string());
  j["partitions"] = parts;
  j["config"] = fit_config_to_json(r.config);
  Json outcomes = Json::array();
  for (const auto& o : r.outcomes) {
    Json oj;
    oj["outcome"] = o.outcome;
    oj["trace"] = o.trace;
    oj["skipped"] = o.skipped;
    if (!o.skipped) {
      oj["D_N"] = o.d_n;
      Json results = Json::array();
      for (const auto& pr : o.partitions) {
        results.push_back(Json{{"partition", pr.partition.to_string()},
                               {"D_C", pr.d_c},
                               {"D_L_star", pr.d_l_star},
                               {"triangle_slack", pr.triangle_slack},
                               {"converged", pr.converged},
                               {"restarts_used", pr.restarts_used},
                               {"inconclusive", pr.inconclusive}});
      }
      oj["results"] = results;
    }
    outcomes.push_back(std::move(oj));
  }
  j["outcomes"] = outcomes;
  j["provenance"] = provenance_json(prov);
  j["metadata"] = metadata_json(prov);
  return j;
}

std::string crosstalk_to_csv(const CrosstalkReport& r) {
  std::ostringstream out;
  out << "qubits,outcome,partition,D_N,D_C,D_L_star,converged,restarts_used\n";
  const std::string qubits = csv_field(qubit_tuple(r.qubits));
  for (const auto& o : r.outcomes) {
    for (std::size_t q = 0; q < r.partitions.size(); ++q) {
      out << qubits << ',' << o.outcome << ',' << csv_field(r.partitions[q].to_string()) << ',';
      if (o.skipped) {
        out << ",,,skipped,0\n";
        continue;
      }
      const auto& pr = o.partitions[q];
      out << fixed(o.d_n, 6) << ',' << fixed(pr.d_c, 6) << ',' << fixed(pr.d_l_star, 6) << ','
          << (pr.converged ? "true" : "false") << ',' << pr.restarts_used << '\n';
    }
  }
  return out.str();
}

Json ppt_to_json(const PptTable& t, const Provenance& prov) {
  Json j;
  j["schema"] = kPptSchema;
  j["qubits"] = t.qubits;
  j["ppt_tol"] = t.tolerance;
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json rj;
    rj["outcome"] = row.outcome;
    rj["skipped"] = row.skipped;
    if (!row.skipped) {
      rj["tuple"] = verdict_tuple(row.verdicts);
      Json vs = Json::array();
      for (const auto& v : row.verdicts) {
        vs.push_back(Json{{"bipartition", v.bipartition.to_string()},
                          {"min_eigenvalue", v.min_eigenvalue},
                          {"negativity", v.negativity},
                          {"verdict", std::string(1, v.letter())},
                          {"borderline", v.borderline},
                          {"interpretation", interpret(v, static_cast<int>(t.qubits.size()))}});
      }
      rj["verdicts"] = vs;
    }
    rows.push_back(std::move(rj));
  }
  j["rows"] = rows;
  j["provenance"] = provenance_json(prov);
  j["metadata"] = metadata_json(prov);
  return j;
}

std::string ppt_to_csv(const PptTable& t) {
  std::ostringstream out;
  out << "outcome,bipartition,min_eigenvalue,negativity,verdict\n";
  for (const auto& row : t.rows) {
    if (row.skipped) {
      out << row.outcome << ",,,,skipped\n";
      continue;
    }
    for (const auto& v : row.verdicts) {
      out << row.outcome << ',' << csv_field(v.bipartition.to_string()) << ','
          << scientific(v.min_eigenvalue) << ',' << scientific(v.negativity) << ',' << v.letter()
          << '\n';
    }
  }
  return out.str();
}

Json diagnostics_to_json(const MleDiagnostics& d, const MleConfig& cfg, const Provenance& prov) {
  Json j;
  j["schema"] = kDiagnosticsSchema;
  j["config"] = mle_config_to_json(cfg);
  j["iterations"] = d.iterations;
  j["converged"] = d.converged;
  j["final_epsilon"] = d.final_epsilon;
  j["max_completeness_residual"] = d.max_completeness_residual;
  j["min_eigenvalue"] = d.min_eigenvalue;
  j["likelihood_monotone"] = d.monotone;
  j["likelihood_initial"] = d.likelihood_trajectory.front();
  j["likelihood_final"] = d.likelihood_trajectory.back();
  j["epsilon_trajectory"] = d.epsilon_trajectory;
  j["likelihood_trajectory"] = d.likelihood_trajectory;
  j["provenance"] = provenance_json(prov);
  j["metadata"] = metadata_json(prov);
  return j;
}

Json without_metadata(Json j) {
  if (j.is_object()) j.erase("metadata");
  return j;
}

std::string render_error_table(const std::vector<Json>& reports) {
  if (reports.empty()) return {};
  std::vector<std::string> outcomes;
  for (const auto& o : member(reports.front(), "outcomes")) outcomes.push_back(o.at("outcome").get<std::string>());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"Qubits"};
  for (const auto& o : outcomes) header.push_back(o + " : (D_N, D_C, D_L*)");
  rows.push_back(header);
  for (const auto& rep : reports) {
    const auto parts = member(rep, "partitions");
    for (std::size_t q = 0; q < parts.size(); ++q) {
      std::string label = qubit_tuple(qubits_of(rep));
      if (parts.size() > 1) label += " " + parts[q].get<std::string>();
      std::vector<std::string> row = {label};
      for (const auto& o : member(rep, "outcomes")) {
        if (o.at("skipped").get<bool>()) {
          row.push_back("skipped");
          continue;
        }
        const auto& res = o.at("results")[q];
        row.push_back("(" + fixed(o.at("D_N").get<double>(), 4) + "," +
                      fixed(res.at("D_C").get<double>(), 4) + "," +
                      fixed(res.at("D_L_star").get<double>(), 4) + ")");
      }
      rows.push_back(std::move(row));
    }
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size() + 2);
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c + 1 == r.size() ? r[c] : pad(r[c], width[c]));
    out << '\n';
  }
  return out.str();
}

std::string render_partition_table(const Json& rep) {
  const auto parts = member(rep, "partitions");
  std::ostringstream out;
  std::size_t w = 12;
  for (const auto& p : parts) w = std::max(w, p.get<std::string>().size() + 2);
  out << pad("Partitions", w);
  const auto& outcomes = member(rep, "outcomes");
  for (const auto& o : outcomes) out << pad(o.at("outcome").get<std::string>(), 8);
  out << '\n';
  for (std::size_t q = 0; q < parts.size(); ++q) {
    out << pad(parts[q].get<std::string>(), w);
    for (const auto& o : outcomes) {
      if (o.at("skipped").get<bool>()) {
        out << pad("-", 8);
      } else {
        out << pad(fixed(o.at("results")[q].at("D_C").get<double>(), 4), 8);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_ppt_table(const std::vector<Json>& reports) {
  if (reports.empty()) return {};
  std::ostringstream out;
  std::size_t w = 10;
  for (const auto& rep : reports) w = std::max(w, qubit_tuple(qubits_of(rep)).size() + 2);
  std::size_t cell = 8;
  for (const auto& rep : reports) {
    for (const auto& row : member(rep, "rows")) {
      if (row.contains("tuple")) cell = std::max(cell, row.at("tuple").get<std::string>().size() + 2);
    }
  }
  out << pad("Outcomes", w);
  for (const auto& row : member(reports.front(), "rows")) out << pad(row.at("outcome").get<std::string>(), cell);
  out << '\n';
  for (const auto& rep : reports) {
    out << pad(qubit_tuple(qubits_of(rep)), w);
    for (const auto& row : member(rep, "rows")) {
      out << pad(row.at("skipped").get<bool>() ? "-" : row.at("tuple").get<std::string>(), cell);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace qdt::report
