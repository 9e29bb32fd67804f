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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Set QDT_UPDATE_GOLDEN=1 to rewrite the
// end-to-end fixtures in tests/golden.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdt/cli.hpp"
#include "qdt/crosstalk.hpp"
#include "qdt/entanglement.hpp"
#include "qdt/io.hpp"
#include "qdt/report.hpp"
#include "qdt/simulator.hpp"
#include "qdt/tomography.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace qdt;
using io::Json;

namespace {

constexpr double kClassicalOracle = 0.4142616660736126;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// D_N <= D_C + D_L* over every analyzed element, accumulated across criteria.
struct TriangleLedger {
  std::size_t checked = 0;
  double worst = -1.0;  // largest D_N - D_C - D_L*
  void add(const CrosstalkReport& r) {
    for (const auto& o : r.outcomes) {
      if (o.skipped) continue;
      for (const auto& p : o.partitions) {
        ++checked;
        worst = std::max(worst, o.d_n - p.d_c - p.d_l_star);
      }
    }
  }
};

TriangleLedger g_triangle;

FrequencyTable born_table(const Povm& povm, const PreparationSet& preps) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(povm.size()), static_cast<Eigen::Index>(preps.size()));
  for (std::size_t k = 0; k < preps.size(); ++k) {
    const auto p = born_probabilities(povm, preps[k].state);
    double sum = 0.0;
    for (double v : p) sum += v;
    for (std::size_t i = 0; i < p.size(); ++i) {
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = p[i] / sum;
    }
  }
  return FrequencyTable(f, preps.shots());
}

double mean_element_distance(const Povm& a, const Povm& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += trace_distance(normalize(a[i]), normalize(b[i]));
  return total / static_cast<double>(a.size());
}

double max_element_distance(const Povm& a, const Povm& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, trace_distance(normalize(a[i]), normalize(b[i])));
  }
  return worst;
}

// Tensor product of independent random single-qubit POVMs.
Povm random_product_povm(int n, std::mt19937_64& rng) {
  std::vector<Povm> singles;
  for (int q = 0; q < n; ++q) {
    const Povm p = qdt::testing::random_povm(1, rng);
    singles.emplace_back(std::vector<HermitianOperator>{p[0].relabeled({q}), p[1].relabeled({q})});
  }
  std::vector<HermitianOperator> ops;
  for (std::size_t a = 0; a < (std::size_t{1} << n); ++a) {
    std::vector<HermitianOperator> parts;
    for (int q = 0; q < n; ++q) parts.push_back(singles[static_cast<std::size_t>(q)][(a >> (n - 1 - q)) & 1]);
    ops.push_back(tensor(parts));
  }
  return Povm(std::move(ops));
}

std::vector<std::pair<int, NoiseSpec>> simulator_cases() {
  std::vector<std::pair<int, NoiseSpec>> out;
  for (int n = 1; n <= 4; ++n) {
    for (double f : {0.0, 0.1, 0.3}) {
      NoiseSpec s;
      s.flip = {f};
      out.emplace_back(n, s);
    }
  }
  NoiseSpec mixed;
  mixed.flip = {0.02, 0.1, 0.2, 0.3};
  out.emplace_back(4, mixed);
  for (int n = 2; n <= 4; ++n) {
    for (double w : {0.0, 0.25, 1.0}) {
      NoiseSpec s;
      s.kind = NoiseKind::classical_corr;
      s.flip = {0.05};
      s.w = w;
      s.q = 0.3;
      s.pair = {0, n - 1};
      out.emplace_back(n, s);
    }
    for (double p : {0.0, 0.3, 0.6, 1.0}) {
      NoiseSpec s;
      s.kind = NoiseKind::entangled;
      s.p = p;
      s.pair = {n - 2, n - 1};
      out.emplace_back(n, s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome povm_validity() {
  Outcome o;
  double worst_eig = 1.0;
  double worst_residual = 0.0;
  std::size_t count = 0;
  auto check = [&](const Povm& povm, const std::string& name) {
    const auto r = validate_povm(povm, 1e-8);
    for (double e : r.min_eigenvalues) worst_eig = std::min(worst_eig, e);
    worst_residual = std::max(worst_residual, r.completeness_residual);
    o.require(r.min_eigenvalues.size() == povm.size(), name + ": missing eigenvalues");
    o.require(*std::min_element(r.min_eigenvalues.begin(), r.min_eigenvalues.end()) >= -1e-9,
              name + ": negative element");
    o.require(r.completeness_residual <= 1e-8, name + ": incomplete");
    ++count;
  };
  for (int n = 1; n <= 4; ++n) check(ideal_povm(n), "ideal_povm(" + std::to_string(n) + ")");
  for (const auto& [n, spec] : simulator_cases()) {
    check(make_noisy_povm(n, spec), to_string(spec.kind) + " n=" + std::to_string(n));
  }
  if (o.pass) {
    o.detail = std::to_string(count) + " POVMs, min eig " + fmt("%.2e", worst_eig) + ", max residual " +
               fmt("%.2e", worst_residual);
  }
  return o;
}

Outcome mle_exactness() {
  Outcome o;
  std::mt19937_64 rng(20210);
  const PreparationSet preps = mub_preparations(2);
  MleConfig cfg;
  cfg.epsilon = 1e-8;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Povm truth = qdt::testing::random_povm(2, rng);
    const MleResult r = mle_reconstruct(preps, born_table(truth, preps), cfg);
    const double d = max_element_distance(r.povm, truth);
    worst = std::max(worst, d);
    o.require(d <= 1e-3, "POVM " + std::to_string(t) + " off by " + fmt("%.3e", d));
  }
  if (o.pass) o.detail = "20 POVMs, worst element distance " + fmt("%.2e", worst);
  return o;
}

Outcome mle_statistical() {
  Outcome o;
  NoiseSpec spec;
  spec.flip = {0.1};
  const Povm truth = make_noisy_povm(2, spec);
  const PreparationSet preps = mub_preparations(2, 8192);
  double total = 0.0;
  double worst_residual = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const TomographyInput in = to_tomography_input(sample_counts(truth, preps, 8192, seed));
    const MleResult r = mle_reconstruct(in.preparations, in.frequencies);
    const auto& ll = r.diagnostics.likelihood_trajectory;
    total += mean_element_distance(r.povm, truth);
    worst_residual = std::max(worst_residual, r.diagnostics.max_completeness_residual);
    o.require(ll.back() >= ll.front(), "likelihood decreased for seed " + std::to_string(seed));
    o.require(r.diagnostics.max_completeness_residual <= 1e-8,
              "completeness lost for seed " + std::to_string(seed));
    o.require(r.diagnostics.min_eigenvalue >= -1e-9, "positivity lost for seed " + std::to_string(seed));
  }
  const double mean = total / 10.0;
  o.require(mean <= 0.03, "mean distance " + fmt("%.4f", mean));
  if (o.pass) {
    o.detail = "mean distance " + fmt("%.4f", mean) + ", max residual " + fmt("%.1e", worst_residual);
  }
  return o;
}

Outcome dc_soundness() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int n = 2; n <= 3; ++n) {
    for (int t = 0; t < 3; ++t) {
      const Povm povm = random_product_povm(n, rng);
      const CrosstalkReport r = analyze_povm(povm, default_partitions(povm.labels()));
      g_triangle.add(r);
      for (const auto& out : r.outcomes) {
        for (const auto& p : out.partitions) worst = std::max(worst, p.d_c);
      }
    }
  }
  o.require(worst < 1e-3, "product D_C " + fmt("%.3e", worst));

  const NormalizedElement classical = normalize(HermitianOperator(
      Eigen::Vector4d(1, 0, 0, 1).cast<Complex>().asDiagonal().toDenseMatrix()));
  const double d = crosstalk_error(classical, Partition::parse("0|1"));
  o.require(std::abs(d - kClassicalOracle) <= 0.02, "classical D_C " + fmt("%.5f", d));
  if (o.pass) {
    o.detail = "product max D_C " + fmt("%.1e", worst) + ", classical D_C " + fmt("%.6f", d) +
               " (oracle " + fmt("%.6f", kClassicalOracle) + ")";
  }
  return o;
}

Outcome partition_monotonicity() {
  Outcome o;
  std::mt19937_64 rng(2021);
  const auto parts = default_partitions({0, 1, 2});
  std::size_t elements = 0;
  double worst_gap = -1.0;  // max over elements and bipartitions of bipartite D_C - full D_C
  while (elements < 20) {
    const CrosstalkReport r = analyze_povm(qdt::testing::random_povm(3, rng), parts);
    g_triangle.add(r);
    for (const auto& out : r.outcomes) {
      if (elements == 20) break;
      ++elements;
      for (std::size_t q = 1; q < parts.size(); ++q) {
        worst_gap = std::max(worst_gap, out.partitions[q].d_c - out.partitions[0].d_c);
      }
    }
  }
  o.require(worst_gap <= 5e-3, "bipartite exceeds full split by " + fmt("%.3e", worst_gap));
  if (o.pass) o.detail = "20 elements, max(bipartite - full) " + fmt("%.2e", worst_gap);
  return o;
}

Outcome nppt_correctness() {
  Outcome o;
  StateVector v = StateVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const HermitianOperator bell = projector(v, {0, 1});
  const Partition cut = Partition::parse("0|1");
  const double bell_min = nppt_test(NormalizedElement(bell), cut).min_eigenvalue;
  o.require(std::abs(bell_min + 0.5) <= 1e-9, "Bell PT minimum " + fmt("%.12f", bell_min));

  auto werner_nppt = [&](double p) {
    return nppt_test(NormalizedElement(bell * p + HermitianOperator(Matrix::Identity(4, 4) * ((1 - p) / 4))), cut)
        .nppt;
  };
  double lo = 0.0;
  double hi = 1.0;
  o.require(!werner_nppt(lo) && werner_nppt(hi), "Werner endpoints");
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (werner_nppt(mid) ? hi : lo) = mid;
  }
  o.require(std::abs(hi - 1.0 / 3.0) <= 0.02, "Werner threshold " + fmt("%.5f", hi));

  std::mt19937_64 rng(11);
  std::size_t ppt_checked = 0;
  for (int n = 2; n <= 3; ++n) {
    for (int t = 0; t < 5; ++t) {
      for (const auto& row : classify_povm(random_product_povm(n, rng)).rows) {
        for (const auto& vd : row.verdicts) {
          o.require(!vd.nppt, "product element " + row.outcome + " reported NPPT");
          ++ppt_checked;
        }
      }
    }
  }
  for (const auto& [n, spec] : simulator_cases()) {
    if (spec.kind != NoiseKind::classical_corr) continue;
    for (const auto& row : classify_povm(make_noisy_povm(n, spec)).rows) {
      for (const auto& vd : row.verdicts) {
        o.require(!vd.nppt, "classical_corr element " + row.outcome + " reported NPPT");
        ++ppt_checked;
      }
    }
  }

  NoiseSpec ent;
  ent.kind = NoiseKind::entangled;
  ent.p = 0.6;
  const PptTable three = classify_povm(make_noisy_povm(3, ent));
  const std::string tuple = verdict_tuple(three.rows[0].verdicts);
  o.require(tuple == "(N,N,P)", "three-qubit planted element " + tuple);
  if (o.pass) {
    o.detail = "Bell min " + fmt("%.3f", bell_min) + ", Werner threshold " + fmt("%.5f", hi) + ", " +
               std::to_string(ppt_checked) + " product/classical verdicts PPT, 3-qubit 000 " + tuple;
  }
  return o;
}

Outcome end_to_end() {
  Outcome o;
  const fs::path dir = fs::path(QDT_BINARY_DIR) / "acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    o.require(code == 0, args.front() + " exited " + std::to_string(code) + ": " + err.str());
    return code == 0;
  };
  // Relative paths keep provenance (file names only) independent of the build tree.
  const fs::path cwd = fs::current_path();
  fs::current_path(dir);
  const bool ok = run({"simulate", "--n", "2", "--noise", "entangled", "--p", "0.6", "--shots", "8192", "--seed",
                       "2021", "--out", "counts.json"}) &&
                  run({"reconstruct", "--in", "counts.json", "--out", "povm.json", "--truth", "counts.truth.json"}) &&
                  run({"analyze", "--in", "povm.json", "--out", "report"});
  fs::current_path(cwd);
  if (!ok) return o;

  const Json xt = io::read_json_file(dir / "report.crosstalk.json");
  const Json ppt = io::read_json_file(dir / "report.ppt.json");
  const double dc = xt["outcomes"][0]["results"][0]["D_C"].get<double>();
  o.require(dc > 0.05, "planted D_C " + fmt("%.4f", dc));
  const std::string csv = io::read_text_file(dir / "report.ppt.csv");
  o.require(csv.find(",N\n") != std::string::npos, "no N verdict");

  o.require(xt["schema"] == report::kCrosstalkSchema && ppt["schema"] == report::kPptSchema, "schema tags");
  o.require(io::read_text_file(dir / "report.crosstalk.csv")
                    .rfind("qubits,outcome,partition,D_N,D_C,D_L_star,converged,restarts_used\n", 0) == 0,
            "crosstalk CSV header");
  o.require(csv.rfind("outcome,bipartition,min_eigenvalue,negativity,verdict\n", 0) == 0, "PPT CSV header");

  const fs::path golden(QDT_GOLDEN_DIR);
  const bool update = std::getenv("QDT_UPDATE_GOLDEN") != nullptr;
  if (update) fs::create_directories(golden);
  std::size_t compared = 0;
  for (const char* name : {"report.crosstalk.csv", "report.ppt.csv"}) {
    const std::string got = io::read_text_file(dir / name);
    if (update) io::write_text_file(golden / name, got);
    o.require(fs::exists(golden / name) && io::read_text_file(golden / name) == got,
              std::string(name) + " differs from golden");
    ++compared;
  }
  for (const char* name : {"report.crosstalk.json", "report.ppt.json"}) {
    const std::string got = report::without_metadata(io::read_json_file(dir / name)).dump(2) + "\n";
    const std::string golden_name = std::string(name) + ".golden";
    if (update) io::write_text_file(golden / golden_name, got);
    o.require(fs::exists(golden / golden_name) && io::read_text_file(golden / golden_name) == got,
              std::string(name) + " differs from golden (metadata excluded)");
    o.require(io::read_json_file(dir / name)["metadata"].contains("generated_at"), "timestamp missing");
    ++compared;
  }
  if (o.pass) {
    o.detail = "planted D_C " + fmt("%.4f", dc) + ", " + std::to_string(compared) + " report files match golden" +
               (update ? " (updated)" : "");
  }
  return o;
}

Outcome mitigation_round_trip() {
  Outcome o;
  NoiseSpec spec;
  spec.flip = {0.08, 0.15, 0.03};
  const Eigen::MatrixXd a = assignment_matrix(make_noisy_povm(3, spec));
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(8);
    for (Eigen::Index i = 0; i < 8; ++i) x(i) = e(rng);
    if (t % 4 == 0) x(t % 8) = 0.0;  // include boundary points of the simplex
    x /= x.sum();
    Eigen::VectorXd obs = a * x;
    obs /= obs.sum();
    worst = std::max(worst, (mitigate_histogram(obs, a).distribution - x).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-9, "max error " + fmt("%.3e", worst));
  if (o.pass) o.detail = "100 distributions, max error " + fmt("%.2e", worst);
  return o;
}

Outcome triangle_identity() {
  Outcome o;
  // Elements with genuine crosstalk, on top of everything analyzed so far.
  std::mt19937_64 rng(13);
  for (int n = 2; n <= 3; ++n) {
    FitConfig cfg;
    cfg.restarts = 6;
    g_triangle.add(analyze_povm(qdt::testing::random_povm(n, rng), default_partitions(default_labels(n)), cfg));
    for (const auto& [m, spec] : simulator_cases()) {
      if (m == n && spec.kind != NoiseKind::local_flip) {
        g_triangle.add(analyze_povm(make_noisy_povm(m, spec), default_partitions(default_labels(m)), cfg));
      }
    }
  }
  o.require(g_triangle.worst <= 1e-9, "D_N exceeds D_C + D_L* by " + fmt("%.3e", g_triangle.worst));
  if (o.pass) {
    o.detail = std::to_string(g_triangle.checked) + " (element, partition) pairs, max D_N - D_C - D_L* " +
               fmt("%.2e", g_triangle.worst);
  }
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"POVM validity", povm_validity, 5},
      {"MLE exactness", mle_exactness, 120},
      {"MLE statistical recovery", mle_statistical, 180},
      {"D_C soundness", dc_soundness, 120},
      {"Partition monotonicity", partition_monotonicity, 0},
      {"NPPT correctness", nppt_correctness, 0},
      {"End-to-end pipeline", end_to_end, 300},
      {"Mitigation round-trip", mitigation_round_trip, 0},
      // Runs last so it covers every element analyzed above.
      {"Triangle identity", triangle_identity, 0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.require(false, "took " + fmt("%.1f", secs) + " s, budget " + fmt("%.0f", c.budget_seconds) + " s");
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << fmt("%.1f", secs) << " s]  " << o.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
