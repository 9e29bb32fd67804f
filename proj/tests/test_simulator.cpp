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


#include <cmath>

#include "doctest.h"
#include "qdt/crosstalk.hpp"
#include "qdt/entanglement.hpp"
#include "qdt/error.hpp"
#include "qdt/simulator.hpp"
#include "test_util.hpp"

using namespace qdt;
using qdt::testing::max_abs_diff;

namespace {

NoiseSpec local(std::vector<double> flip) {
  NoiseSpec s;
  s.flip = std::move(flip);
  return s;
}

NoiseSpec correlated(double w, double q, std::pair<int, int> pair = {0, 1}) {
  NoiseSpec s;
  s.kind = NoiseKind::classical_corr;
  s.flip = {0.04};
  s.w = w;
  s.q = q;
  s.pair = pair;
  return s;
}

NoiseSpec entangled(double p, std::pair<int, int> pair = {0, 1}) {
  NoiseSpec s;
  s.kind = NoiseKind::entangled;
  s.p = p;
  s.pair = pair;
  return s;
}

}  // namespace

TEST_CASE("make_noisy_povm produces valid POVMs") {
  std::vector<std::pair<int, NoiseSpec>> cases;
  for (int n = 1; n <= 3; ++n) {
    cases.emplace_back(n, local({0.0}));
    cases.emplace_back(n, local({0.13}));
  }
  cases.emplace_back(3, local({0.1, 0.2, 0.3}));
  for (double w : {0.0, 0.3, 1.0}) {
    cases.emplace_back(2, correlated(w, 0.5));
    cases.emplace_back(3, correlated(w, 0.2, {2, 0}));
  }
  for (double p : {0.0, 0.2, 0.6, 1.0}) {
    cases.emplace_back(2, entangled(p));
    cases.emplace_back(3, entangled(p, {1, 2}));
  }
  for (const auto& [n, spec] : cases) {
    const auto r = validate_povm(make_noisy_povm(n, spec), 1e-10);
    CHECK(r.passed());
    CHECK(r.completeness_residual <= 1e-10);
  }
}

TEST_CASE("noise models") {
  SUBCASE("zero flip is ideal") {
    const Povm p = make_noisy_povm(3, local({0.0}));
    const Povm ideal = ideal_povm(3);
    for (std::size_t i = 0; i < 8; ++i) CHECK(p[i].matrix() == ideal[i].matrix());
  }
  SUBCASE("local flip is a tensor product") {
    const Povm p = make_noisy_povm(2, local({0.1, 0.2}));
    Matrix m0(2, 2);
    m0 << 0.9, 0, 0, 0.1;
    Matrix m1(2, 2);
    m1 << 0.8, 0, 0, 0.2;
    const auto expected = tensor(HermitianOperator(m0, {0}), HermitianOperator(m1, {1}));
    CHECK(max_abs_diff(p[0].matrix(), expected.matrix()) <= 1e-15);
  }
  SUBCASE("local flip has no crosstalk") {
    const Povm p = make_noisy_povm(3, local({0.1, 0.25, 0.05}));
    FitConfig cfg;
    cfg.restarts = 4;
    const CrosstalkReport r = analyze_povm(p, default_partitions({0, 1, 2}), cfg);
    for (const auto& o : r.outcomes) {
      for (const auto& part : o.partitions) CHECK(part.d_c < 1e-3);
    }
  }
  SUBCASE("fully correlated pair") {
    NoiseSpec s = correlated(1.0, 0.5);
    s.flip = {0.0};
    const Povm p = make_noisy_povm(2, s);
    CHECK(std::abs(p[0].matrix()(0, 0).real() - 0.5) <= 1e-15);
    CHECK(std::abs(p[0].matrix()(3, 3).real() - 0.5) <= 1e-15);
    CHECK(crosstalk_error(normalize(p[0]), Partition::parse("0|1")) > 0.1);
  }
  SUBCASE("classical correlation stays PPT") {
    for (double w : {0.2, 0.7, 1.0}) {
      for (const auto& row : classify_povm(make_noisy_povm(3, correlated(w, 0.4))).rows) {
        for (const auto& v : row.verdicts) CHECK_FALSE(v.nppt);
      }
    }
  }
  SUBCASE("entangled element is NPPT") {
    const Povm p = make_noisy_povm(2, entangled(0.6));
    const PptVerdict v = nppt_test(normalize(p[0]), Partition::parse("0|1"));
    CHECK(v.nppt);
    // Normalized element 0.7|00><00| + 0.3|11><11| + 0.3(|00><11| + h.c.).
    CHECK(std::abs(v.min_eigenvalue + 0.3) <= 1e-12);

    const Povm three = make_noisy_povm(3, entangled(0.6, {0, 2}));
    const auto verdicts = classify_bipartitions(normalize(three[0]));
    CHECK(verdict_tuple(verdicts) == "(N,P,N)");
  }
  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(make_noisy_povm(2, local({1.5})), ArgumentError);
    CHECK_THROWS_AS(make_noisy_povm(3, local({0.1, 0.2})), ArgumentError);
    CHECK_THROWS_AS(make_noisy_povm(2, correlated(-0.1, 0.5)), ArgumentError);
    CHECK_THROWS_AS(make_noisy_povm(2, entangled(0.5, {1, 1})), ArgumentError);
    CHECK_THROWS_AS(make_noisy_povm(1, entangled(0.5)), ArgumentError);
    CHECK_THROWS_AS(parse_noise_kind("thermal"), ArgumentError);
  }
}

TEST_CASE("sample_counts") {
  SUBCASE("ideal detector on a basis state") {
    std::vector<Preparation> states = {PreparationSet::make({"0", "0"}, {0, 1})};
    const PreparationSet preps({0, 1}, states, {500});
    const CountsDataset d = sample_counts(ideal_povm(2), preps, 500, 3);
    CHECK(d.preparations[0].counts.at("00") == 500.0);
    CHECK(d.preparations[0].counts.at("11") == 0.0);
  }
  SUBCASE("binomial frequencies") {
    const PreparationSet preps = mub_preparations(1, 100000);
    const double bound = 5.0 * std::sqrt(0.25 / 1e5) + 1e-12;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const CountsDataset d = sample_counts(ideal_povm(1), preps, 100000, seed);
      const double f0 = d.preparations[2].counts.at("0") / 1e5;
      CHECK(std::abs(f0 - 0.5) <= 0.01);
      CHECK(std::abs(f0 - 0.5) <= bound);
    }
  }
  SUBCASE("frequency deviation bound on a noisy detector") {
    const Povm povm = make_noisy_povm(2, correlated(0.3, 0.3));
    const PreparationSet preps = mub_preparations(2, 100000);
    const CountsDataset d = sample_counts(povm, preps, 100000, 11);
    for (std::size_t k = 0; k < preps.size(); ++k) {
      const auto probs = born_probabilities(povm, preps[k].state);
      for (std::size_t i = 0; i < probs.size(); ++i) {
        const double f = d.preparations[k].counts.at(outcome_string(i, 2)) / 1e5;
        CHECK(std::abs(f - probs[i]) <= 5.0 * std::sqrt(probs[i] * (1.0 - probs[i]) / 1e5) + 1e-12);
      }
    }
  }
  SUBCASE("determinism across seeds and execution modes") {
    const Povm povm = make_noisy_povm(2, local({0.1}));
    const PreparationSet preps = mub_preparations(2, 1000);
    const CountsDataset a = sample_counts(povm, preps, 1000, 42, Execution::serial);
    const CountsDataset b = sample_counts(povm, preps, 1000, 42, Execution::parallel);
    const CountsDataset c = sample_counts(povm, preps, 1000, 43);
    bool differs = false;
    for (std::size_t k = 0; k < preps.size(); ++k) {
      CHECK(a.preparations[k].counts == b.preparations[k].counts);
      differs = differs || a.preparations[k].counts != c.preparations[k].counts;
    }
    CHECK(differs);
  }
  SUBCASE("exact counts") {
    const PreparationSet preps = mub_preparations(1, 8192);
    const CountsDataset d = exact_counts(ideal_povm(1), preps, 8192);
    CHECK(d.preparations[4].counts.at("1") == doctest::Approx(4096.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sample_counts(ideal_povm(1), mub_preparations(1), 0, 1), ArgumentError);
}
