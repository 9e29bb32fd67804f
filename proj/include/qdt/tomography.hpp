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

// Detector tomography: preparation sets, frequency tables and the iterative
// maximum-likelihood POVM reconstruction.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdt/kernels.hpp"
#include "qdt/operator.hpp"

namespace qdt {

/// Single-qubit preparation labels in canonical order.
inline const std::vector<std::string>& single_qubit_labels() {
  static const std::vector<std::string> labels = {"0", "1", "+", "-", "+i", "-i"};
  return labels;
}

/// State vector for one of "0", "1", "+", "-", "+i", "-i" (the Unicode minus
/// sign is accepted as a synonym for '-'). Throws ArgumentError otherwise.
StateVector single_qubit_state(const std::string& label);

struct Preparation {
  std::vector<std::string> labels;  // one per qubit, in qubit order
  NormalizedElement state;
};

class PreparationSet {
 public:
  PreparationSet(std::vector<int> qubits, std::vector<Preparation> states,
                 std::vector<std::int64_t> shots);

  int num_qubits() const { return static_cast<int>(qubits_.size()); }
  const std::vector<int>& qubits() const { return qubits_; }
  std::size_t size() const { return states_.size(); }
  const Preparation& operator[](std::size_t k) const { return states_[k]; }
  const std::vector<Preparation>& states() const { return states_; }
  const std::vector<std::int64_t>& shots() const { return shots_; }

  /// Builds the product state named by `labels` on `qubits`.
  static Preparation make(const std::vector<std::string>& labels, const std::vector<int>& qubits);

 private:
  std::vector<int> qubits_;
  std::vector<Preparation> states_;
  std::vector<std::int64_t> shots_;
};

/// All 6^n products of the six single-qubit states, first qubit varying
/// slowest. n > 4 is accepted but prints a size warning to stderr.
PreparationSet mub_preparations(int num_qubits, std::int64_t shots_per_state = 8192);
PreparationSet mub_preparations(std::vector<int> qubits, std::int64_t shots_per_state = 8192);

/// f(outcome, preparation); every column sums to one.
class FrequencyTable {
 public:
  FrequencyTable(Eigen::MatrixXd freq, std::vector<std::int64_t> shots);

  const Eigen::MatrixXd& f() const { return f_; }
  const std::vector<std::int64_t>& shots() const { return shots_; }
  Eigen::Index num_outcomes() const { return f_.rows(); }
  Eigen::Index num_preparations() const { return f_.cols(); }

 private:
  Eigen::MatrixXd f_;
  std::vector<std::int64_t> shots_;
};

/// Outcome counts for one preparation. Counts are real-valued so that
/// synthetic noiseless datasets (probability x shots) share the format.
struct PreparationCounts {
  std::vector<std::string> labels;
  std::int64_t shots = 0;
  std::map<std::string, double> counts;
};

/// In-memory form of the counts file.
struct CountsDataset {
  std::vector<int> qubits;
  std::vector<PreparationCounts> preparations;
};

struct TomographyInput {
  PreparationSet preparations;
  FrequencyTable frequencies;
};

/// Validates counts against shots (SchemaError naming the record otherwise)
/// and derives frequencies as counts / shots.
TomographyInput to_tomography_input(const CountsDataset& data);

struct MleConfig {
  double epsilon = 1e-6;
  int max_iters = 10000;
  double prob_floor = 1e-12;
  double eig_floor = 1e-12;
  Execution execution = Execution::parallel;

  /// Throws ArgumentError when a field is out of range.
  void validate() const;
};

struct MleDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_epsilon = 0.0;
  /// sum_i ||M_i^t - M_i^{t+1}||_1 per iteration.
  std::vector<double> epsilon_trajectory;
  /// Log-likelihood of M^0, M^1, ..., ending with the returned iterate.
  std::vector<double> likelihood_trajectory;
  /// Largest ||sum_i M_i - I||_max seen after any update.
  double max_completeness_residual = 0.0;
  /// Smallest eigenvalue of any element after any update.
  double min_eigenvalue = 0.0;
  /// True when no step decreased the likelihood by more than 1e-12 (monitored only).
  bool monotone = true;
};

struct MleResult {
  Povm povm;
  MleDiagnostics diagnostics;
};

/// sum_ik f_ik log max(tr[M_i rho_k], prob_floor); zero frequencies contribute 0.
double log_likelihood(const Povm& povm, const PreparationSet& preps, const FrequencyTable& freq,
                      double prob_floor = 1e-12);

/// Iterative maximum-likelihood reconstruction starting from M_i = I/D.
/// Each step sets G_i = sum_k f_ik/p_ik rho_k, S = sum_j G_j M_j G_j and
/// M_i <- S^{-1/2} G_i M_i G_i S^{-1/2}, which keeps sum_i M_i = I. Stops when
/// sum_i ||Delta M_i||_1 < epsilon. On hitting max_iters the highest-likelihood
/// iterate is returned with converged = false. Throws NumericalError when S is
/// singular after the eigenvalue floor.
MleResult mle_reconstruct(const PreparationSet& preps, const FrequencyTable& freq,
                          const MleConfig& cfg = {});

}  // namespace qdt
