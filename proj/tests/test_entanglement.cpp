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


#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qdt/entanglement.hpp"
#include "qdt/error.hpp"
#include "test_util.hpp"

using namespace qdt;
using qdt::testing::max_abs_diff;
using qdt::testing::random_density;

namespace {

HermitianOperator bell_projector(std::vector<int> labels = {0, 1}) {
  StateVector v = StateVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return projector(v, std::move(labels));
}

NormalizedElement werner(double p) {
  return NormalizedElement(bell_projector() * p +
                           HermitianOperator(Matrix::Identity(4, 4) * ((1.0 - p) / 4.0)));
}

}  // namespace

TEST_CASE("partial_transpose") {
  std::mt19937_64 rng(73);
  SUBCASE("product element transposes the chosen factor") {
    const auto a = random_density(1, rng, -1, {0});
    const auto b = random_density(1, rng, -1, {1});
    const HermitianOperator pt = partial_transpose(tensor(a.op(), b.op()), {1});
    const HermitianOperator expected = tensor(a.op(), HermitianOperator(b.matrix().transpose(), {1}));
    CHECK(max_abs_diff(pt.matrix(), expected.matrix()) <= 1e-15);
  }
  SUBCASE("Bell projector spectrum") {
    const RealVector ev = partial_transpose(bell_projector(), {1}).eigenvalues();
    CHECK(std::abs(ev(0) + 0.5) <= 1e-12);
    for (Eigen::Index i = 1; i < 4; ++i) CHECK(std::abs(ev(i) - 0.5) <= 1e-12);
  }
  SUBCASE("involution, trace, and full-transpose identity") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = random_density(3, rng, -1, {4, 1, 9});
      const std::vector<int> block = trial % 2 ? std::vector<int>{1} : std::vector<int>{4, 9};
      std::vector<int> complement;
      for (int l : rho.labels()) {
        if (std::find(block.begin(), block.end(), l) == block.end()) complement.push_back(l);
      }
      const HermitianOperator pt = partial_transpose(rho.op(), block);
      CHECK(partial_transpose(pt, block).matrix() == rho.matrix());
      CHECK(std::abs(pt.trace() - 1.0) <= 1e-12);
      CHECK(pt.matrix() == pt.matrix().adjoint());
      const Matrix via_complement = partial_transpose(rho.op(), complement).matrix().transpose();
      CHECK(max_abs_diff(pt.matrix(), via_complement) <= 1e-15);
    }
  }
  SUBCASE("invalid blocks") {
    const HermitianOperator op = bell_projector();
    CHECK_THROWS_AS(partial_transpose(op, {}), ArgumentError);
    CHECK_THROWS_AS(partial_transpose(op, {0, 1}), ArgumentError);
    CHECK_THROWS_AS(partial_transpose(op, {3}), ArgumentError);
  }
}

TEST_CASE("nppt_test") {
  const Partition cut = Partition::parse("0|1");
  SUBCASE("Werner elements") {
    const PptVerdict half = nppt_test(werner(0.5), cut);
    CHECK(half.nppt);
    CHECK(half.letter() == 'N');
    CHECK(std::abs(half.min_eigenvalue + 0.125) <= 1e-12);
    CHECK(std::abs(half.negativity - 0.125) <= 1e-12);
    CHECK(interpret(half, 2) == "entangled");

    const PptVerdict low = nppt_test(werner(0.2), cut);
    CHECK_FALSE(low.nppt);
    CHECK(std::abs(low.min_eigenvalue - 0.1) <= 1e-12);
    CHECK(low.negativity == 0.0);
    CHECK(interpret(low, 2) == "separable");
    CHECK(interpret(low, 3) == "no NPPT entanglement detected");
  }
  SUBCASE("product elements are PPT") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_density(1, rng, -1, {0});
      const auto b = random_density(1, rng, -1, {1});
      const PptVerdict v = nppt_test(NormalizedElement(tensor(a.op(), b.op())), cut);
      CHECK_FALSE(v.nppt);
      CHECK(v.negativity == 0.0);
    }
  }
  SUBCASE("borderline flag") {
    // Minimum PT eigenvalue (1 - 3p)/4 = -7.5e-8 sits inside the tolerance.
    const double p = 1.0 / 3.0 + 1e-7;
    const PptVerdict v = nppt_test(werner(p), cut);
    CHECK_FALSE(v.nppt);
    CHECK(v.borderline);
  }
  SUBCASE("not a bipartition") {
    CHECK_THROWS_AS(nppt_test(werner(0.5), Partition::parse("0")), ArgumentError);
  }
}

TEST_CASE("NPPT continuity under small perturbations") {
  std::mt19937_64 rng(83);
  const Partition cut = Partition::parse("0|1");
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_density(2, rng, 1 + trial % 4);
    Matrix e = qdt::testing::random_complex(4, 4, rng);
    e = (e + e.adjoint()).eval();
    e *= 1e-6 / e.norm();
    const double before = nppt_test(rho, cut).min_eigenvalue;
    const double after = partial_transpose(HermitianOperator(rho.matrix() + e), {0}).min_eigenvalue();
    CHECK(std::abs(after - before) <= 1e-6 + 1e-15);
  }
}

TEST_CASE("bipartitions and classification") {
  const auto three = bipartitions({0, 1, 2});
  REQUIRE(three.size() == 3);
  CHECK(three[0].to_string() == "0:(1,2)");
  CHECK(three[1].to_string() == "1:(2,0)");
  CHECK(three[2].to_string() == "2:(0,1)");
  CHECK(bipartitions({0, 1}).size() == 1);
  CHECK(bipartitions({0, 1, 2, 3}).size() == 7);
  CHECK(bipartitions({0, 1, 2, 3, 4}).size() == 15);
  CHECK_THROWS_AS(bipartitions({0}), ArgumentError);

  std::mt19937_64 rng(89);
  const auto a = random_density(1, rng, -1, {0});
  const auto b = random_density(1, rng, -1, {1});
  const auto c = random_density(1, rng, -1, {2});
  const NormalizedElement product(tensor(tensor(a.op(), b.op()), c.op()));
  CHECK(verdict_tuple(classify_bipartitions(product)) == "(P,P,P)");

  const NormalizedElement bell_zero(tensor(bell_projector(), basis_projector("0", {2})));
  const auto verdicts = classify_bipartitions(bell_zero);
  CHECK(verdict_tuple(verdicts) == "(N,N,P)");
  CHECK(std::abs(verdicts[0].min_eigenvalue + 0.5) <= 1e-12);

  CHECK_THROWS_AS(classify_bipartitions(a), ArgumentError);
}

TEST_CASE("classify_povm") {
  const PptTable ideal = classify_povm(ideal_povm(3));
  REQUIRE(ideal.rows.size() == 8);
  for (const auto& row : ideal.rows) {
    CHECK(verdict_tuple(row.verdicts) == "(P,P,P)");
  }
  CHECK(ideal.rows[5].outcome == "101");

  // Bell measurement: every element is maximally entangled.
  std::vector<HermitianOperator> ops;
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < 4; ++k) {
    StateVector v = StateVector::Zero(4);
    if (k < 2) {
      v(0) = s;
      v(3) = k == 0 ? s : -s;
    } else {
      v(1) = s;
      v(2) = k == 2 ? s : -s;
    }
    ops.push_back(projector(v, {0, 1}));
  }
  const PptTable bell = classify_povm(Povm(ops), kDefaultPptTolerance, Execution::serial);
  for (const auto& row : bell.rows) CHECK(verdict_tuple(row.verdicts) == "(N)");
}
