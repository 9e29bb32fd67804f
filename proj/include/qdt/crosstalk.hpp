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

// Error measures for multi-qubit detectors.
//
//   D_N  = D(elem, |a><a|)                     total error
//   D_C  = min_P D(elem, P), P a product       crosstalk error
//   D_L* = D(P*, |a><a|), P* the minimizer     local error
//
// The minimum over products is non-convex and computed by local search, so
// the reported D_C is an upper bound on the true minimum. D_N <= D_C + D_L*
// holds for the returned product regardless of how good it is.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdt/kernels.hpp"
#include "qdt/operator.hpp"

namespace qdt {

/// Ordered, disjoint, non-empty blocks of qubit labels.
class Partition {
 public:
  explicit Partition(std::vector<std::vector<int>> blocks);

  /// Accepts "0|1,2" and the table notation "0:(1,2)" / "0:1:2".
  static Partition parse(const std::string& text);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  /// Labels of all blocks concatenated in block order.
  std::vector<int> flattened() const;
  /// Table notation: singletons bare, larger blocks parenthesized, e.g. "0:(1,2)".
  std::string to_string() const;

  /// Throws ArgumentError unless the union of blocks equals `labels`.
  void check_covers(const std::vector<int>& labels) const;

  /// The same partition with every label mapped through `relabel`.
  template <typename F>
  Partition mapped(F relabel) const {
    std::vector<std::vector<int>> out = blocks_;
    for (auto& b : out) {
      for (auto& l : b) l = relabel(l);
    }
    return Partition(std::move(out));
  }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::vector<int>> blocks_;
};

/// Partitions analyzed by default: for two qubits the single split, for
/// three or more the full split followed by every single-qubit cut (for
/// three qubits: "0:1:2", "0:(1,2)", "1:(2,0)", "2:(0,1)").
std::vector<Partition> default_partitions(const std::vector<int>& labels);

struct FitConfig {
  int restarts = 16;
  std::uint64_t seed = 2021;
  int max_sweeps = 500;
  double frobenius_tol = 1e-10;
  int polish_evals = 2000;

  void validate() const;
};

struct ProductFit {
  Partition partition;
  /// One trace-one factor per block, labelled with the block's labels.
  std::vector<NormalizedElement> factors;
  /// Trace distance between the element and the product of factors.
  double distance = 0.0;
  int restarts_used = 0;
  int best_restart = 0;
  bool converged = false;

  /// Tensor product of the factors in the element's qubit order.
  HermitianOperator product(const std::vector<int>& element_labels) const;
};

/// D(elem, |outcome><outcome|).
double total_error(const NormalizedElement& elem, const std::string& outcome);

/// Minimizes D(elem, F_1 (x) ... (x) F_m) over trace-one PSD factors, one per
/// block. Each restart runs alternating least squares on the Frobenius
/// distance (closed-form block updates, PSD projection, trace renormalization)
/// and then polishes the trace distance with a Nelder-Mead search over
/// Cholesky-style parameters F = L L^dagger / tr(L L^dagger). Seeds: partial
/// traces, dominant basis projectors, maximally mixed, then random factors.
/// `extra_seeds` (each one factor per block) are tried after the defaults.
/// The smallest distance wins; ties within 1e-9 keep the lower restart index.
ProductFit fit_product(const NormalizedElement& elem, const Partition& partition,
                       const FitConfig& cfg = {},
                       const std::vector<std::vector<HermitianOperator>>& extra_seeds = {});

double crosstalk_error(const NormalizedElement& elem, const Partition& partition,
                       const FitConfig& cfg = {});

/// D(fitted product, |outcome><outcome|).
double local_error(const ProductFit& fit, const std::vector<int>& element_labels,
                   const std::string& outcome);

/// D_C values in (0, kInconclusiveBand) are within optimizer tolerance of zero.
inline constexpr double kInconclusiveBand = 1e-3;
/// Elements with trace below this are skipped rather than normalized.
inline constexpr double kSkipTrace = 1e-10;

struct PartitionResult {
  Partition partition;
  double d_c = 0.0;
  double d_l_star = 0.0;
  /// D_C + D_L* - D_N; non-negative up to rounding.
  double triangle_slack = 0.0;
  bool converged = false;
  int restarts_used = 0;
  bool inconclusive = false;
  std::vector<NormalizedElement> factors;
};

struct OutcomeResult {
  std::string outcome;
  double trace = 0.0;
  bool skipped = false;
  double d_n = 0.0;
  std::vector<PartitionResult> partitions;
};

struct CrosstalkReport {
  std::vector<int> qubits;
  std::vector<Partition> partitions;
  FitConfig config;
  std::vector<OutcomeResult> outcomes;
};

/// Normalizes every element and computes D_N, and D_C / D_L* per partition.
/// (element, partition) fits run through the fan-out kernel and are merged by
/// index. Coarser partitions additionally try the refined fits of the same
/// element as seeds, so full-split D_C never exceeds a coarser D_C.
CrosstalkReport analyze_povm(const Povm& povm, const std::vector<Partition>& partitions,
                             const FitConfig& cfg = {}, Execution exec = Execution::parallel);

// Readout mitigation ----------------------------------------------------------

/// A(i, j) = tr[M_i |j><j|]: column j is the outcome distribution for basis
/// input j.
Eigen::MatrixXd assignment_matrix(const Povm& povm);

struct MitigationResult {
  Eigen::VectorXd distribution;
  double condition_number = 0.0;
  /// Set when A is numerically singular and the pseudo-inverse was used.
  bool ill_conditioned = false;
};

/// Solves A x = observed in the least-squares sense over all outcomes jointly
/// (no per-qubit factorization) and projects x onto the probability simplex.
MitigationResult mitigate_histogram(const Eigen::VectorXd& observed, const Eigen::MatrixXd& a);

/// Euclidean projection onto {x : x >= 0, sum x = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace qdt
