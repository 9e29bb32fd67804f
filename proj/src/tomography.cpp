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

#include "qdt/tomography.hpp"

#include <cmath>
#include <iostream>

#include <Eigen/Eigenvalues>

#include "qdt/error.hpp"

namespace qdt {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Column-sum tolerance accepted when deriving frequencies from counts.
constexpr double kCountsSumTolerance = 1e-9;

bool informationally_complete(const PreparationSet& preps) {
  const Eigen::Index dim = Eigen::Index{1} << preps.num_qubits();
  Matrix stacked(static_cast<Eigen::Index>(preps.size()), dim * dim);
  for (std::size_t k = 0; k < preps.size(); ++k) {
    const Matrix& rho = preps[k].state.matrix();
    stacked.row(static_cast<Eigen::Index>(k)) = rho.reshaped().transpose();
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
  qr.setThreshold(1e-10);
  return qr.rank() == dim * dim;
}

}  // namespace

StateVector single_qubit_state(const std::string& label) {
  std::string l = label;
  // U+2212 MINUS SIGN
  if (l.rfind("\xE2\x88\x92", 0) == 0) l = "-" + l.substr(3);
  StateVector v(2);
  const Complex i(0.0, 1.0);
  if (l == "0") {
    v << 1.0, 0.0;
  } else if (l == "1") {
    v << 0.0, 1.0;
  } else if (l == "+") {
    v << kInvSqrt2, kInvSqrt2;
  } else if (l == "-") {
    v << kInvSqrt2, -kInvSqrt2;
  } else if (l == "+i") {
    v << kInvSqrt2, i * kInvSqrt2;
  } else if (l == "-i") {
    v << kInvSqrt2, -i * kInvSqrt2;
  } else {
    throw ArgumentError("unknown preparation label '" + label + "'");
  }
  return v;
}

// PreparationSet ------------------------------------------------------------

PreparationSet::PreparationSet(std::vector<int> qubits, std::vector<Preparation> states,
                               std::vector<std::int64_t> shots)
    : qubits_(std::move(qubits)), states_(std::move(states)), shots_(std::move(shots)) {
  if (qubits_.empty()) throw ArgumentError("preparation set needs at least one qubit");
  if (shots_.size() != states_.size()) {
    throw ArgumentError("preparation set has " + std::to_string(states_.size()) +
                        " states but " + std::to_string(shots_.size()) + " shot counts");
  }
  const int dim = 1 << qubits_.size();
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k].state.dim() != dim) {
      throw DimensionError("preparation " + std::to_string(k) + " has the wrong dimension");
    }
    if (shots_[k] <= 0) {
      throw ArgumentError("preparation " + std::to_string(k) + " has non-positive shots");
    }
  }
}

Preparation PreparationSet::make(const std::vector<std::string>& labels,
                                 const std::vector<int>& qubits) {
  if (labels.size() != qubits.size()) {
    throw ArgumentError("preparation has " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(qubits.size()) + " qubits");
  }
  StateVector psi = single_qubit_state(labels.front());
  for (std::size_t q = 1; q < labels.size(); ++q) {
    const StateVector next = single_qubit_state(labels[q]);
    StateVector joined(psi.size() * 2);
    for (Eigen::Index a = 0; a < psi.size(); ++a) {
      joined(2 * a) = psi(a) * next(0);
      joined(2 * a + 1) = psi(a) * next(1);
    }
    psi = std::move(joined);
  }
  return Preparation{labels, NormalizedElement(projector(psi, qubits))};
}

PreparationSet mub_preparations(std::vector<int> qubits, std::int64_t shots_per_state) {
  const int n = static_cast<int>(qubits.size());
  if (n < 1) throw ArgumentError("preparation set needs at least one qubit");
  if (n > 4) {
    std::cerr << "warning: " << n << "-qubit MUB product set has " << std::pow(6.0, n)
              << " preparations\n";
  }
  const auto& alphabet = single_qubit_labels();
  std::size_t total = 1;
  for (int q = 0; q < n; ++q) total *= alphabet.size();

  std::vector<Preparation> states;
  states.reserve(total);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<std::string> labels;
    for (int q = 0; q < n; ++q) labels.push_back(alphabet[digits[q]]);
    states.push_back(PreparationSet::make(labels, qubits));
    for (int q = n - 1; q >= 0; --q) {
      if (++digits[q] < alphabet.size()) break;
      digits[q] = 0;
    }
  }
  return PreparationSet(std::move(qubits), std::move(states),
                        std::vector<std::int64_t>(total, shots_per_state));
}

PreparationSet mub_preparations(int num_qubits, std::int64_t shots_per_state) {
  if (num_qubits < 1) throw ArgumentError("preparation set needs at least one qubit");
  return mub_preparations(default_labels(num_qubits), shots_per_state);
}

// FrequencyTable ------------------------------------------------------------

FrequencyTable::FrequencyTable(Eigen::MatrixXd freq, std::vector<std::int64_t> shots)
    : f_(std::move(freq)), shots_(std::move(shots)) {
  if (static_cast<std::size_t>(f_.cols()) != shots_.size()) {
    throw ArgumentError("frequency table has " + std::to_string(f_.cols()) +
                        " preparations but " + std::to_string(shots_.size()) + " shot counts");
  }
  for (Eigen::Index k = 0; k < f_.cols(); ++k) {
    if ((f_.col(k).array() < 0.0).any() || (f_.col(k).array() > 1.0).any()) {
      throw ArgumentError("frequencies of preparation " + std::to_string(k) +
                          " leave [0, 1]");
    }
    if (std::abs(f_.col(k).sum() - 1.0) > 1e-12) {
      throw ArgumentError("frequencies of preparation " + std::to_string(k) +
                          " do not sum to one");
    }
  }
}

TomographyInput to_tomography_input(const CountsDataset& data) {
  const int n = static_cast<int>(data.qubits.size());
  if (n < 1) throw SchemaError("qubits: expected at least one qubit label");
  if (data.preparations.empty()) throw SchemaError("preparations: expected at least one record");
  const Eigen::Index outcomes = Eigen::Index{1} << n;

  std::vector<Preparation> states;
  std::vector<std::int64_t> shots;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(outcomes, static_cast<Eigen::Index>(data.preparations.size()));
  for (std::size_t k = 0; k < data.preparations.size(); ++k) {
    const auto& rec = data.preparations[k];
    const std::string where = "preparations[" + std::to_string(k) + "]";
    if (rec.shots <= 0) throw SchemaError(where + ".shots: must be positive");
    try {
      states.push_back(PreparationSet::make(rec.labels, data.qubits));
    } catch (const ArgumentError& e) {
      throw SchemaError(where + ".labels: " + e.what());
    }
    double total = 0.0;
    for (const auto& [outcome, count] : rec.counts) {
      if (static_cast<int>(outcome.size()) != n ||
          outcome.find_first_not_of("01") != std::string::npos) {
        throw SchemaError(where + ".counts: key '" + outcome + "' is not a " +
                          std::to_string(n) + "-bit outcome");
      }
      if (!(count >= 0.0) || !std::isfinite(count)) {
        throw SchemaError(where + ".counts[" + outcome + "]: must be a non-negative number");
      }
      f(static_cast<Eigen::Index>(outcome_index(outcome)), static_cast<Eigen::Index>(k)) =
          count / static_cast<double>(rec.shots);
      total += count;
    }
    const double shots_d = static_cast<double>(rec.shots);
    if (std::abs(total - shots_d) > kCountsSumTolerance * shots_d) {
      throw SchemaError(where + ".counts: counts sum to " + std::to_string(total) +
                        " but shots is " + std::to_string(rec.shots));
    }
    f.col(static_cast<Eigen::Index>(k)) /= f.col(static_cast<Eigen::Index>(k)).sum();
    shots.push_back(rec.shots);
  }
  PreparationSet preps(data.qubits, std::move(states), shots);
  return TomographyInput{std::move(preps), FrequencyTable(std::move(f), std::move(shots))};
}

// MLE -----------------------------------------------------------------------

void MleConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0, 1)");
  if (max_iters <= 0) throw ArgumentError("max_iters must be positive");
  if (!(prob_floor > 0.0)) throw ArgumentError("prob_floor must be positive");
  if (!(eig_floor > 0.0)) throw ArgumentError("eig_floor must be positive");
}

double log_likelihood(const Povm& povm, const PreparationSet& preps, const FrequencyTable& freq,
                      double prob_floor) {
  if (static_cast<Eigen::Index>(povm.size()) != freq.num_outcomes() ||
      static_cast<Eigen::Index>(preps.size()) != freq.num_preparations()) {
    throw DimensionError("POVM, preparations and frequency table shapes disagree");
  }
  if (povm.dim() != (1 << preps.num_qubits())) {
    throw DimensionError("POVM and preparation dimensions differ");
  }
  std::vector<Matrix> elements;
  std::vector<Matrix> states;
  for (const auto& e : povm.elements()) elements.push_back(e.matrix());
  for (const auto& p : preps.states()) states.push_back(p.state.matrix());
  kernels::LikelihoodGradient scratch;
  kernels::serial::likelihood_gradient(elements, states, freq.f(), prob_floor, scratch);
  return scratch.log_likelihood;
}

MleResult mle_reconstruct(const PreparationSet& preps, const FrequencyTable& freq,
                          const MleConfig& cfg) {
  cfg.validate();
  const int n = preps.num_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (freq.num_outcomes() != dim || freq.num_preparations() != static_cast<Eigen::Index>(preps.size())) {
    throw DimensionError("frequency table shape does not match the preparation set");
  }
  if (static_cast<Eigen::Index>(preps.size()) < dim * dim || !informationally_complete(preps)) {
    throw ArgumentError("preparation set is not informationally complete");
  }

  std::vector<Matrix> states;
  states.reserve(preps.size());
  for (const auto& p : preps.states()) states.push_back(p.state.matrix());

  const Matrix identity = Matrix::Identity(dim, dim);
  std::vector<Matrix> current(static_cast<std::size_t>(dim), identity / static_cast<double>(dim));
  std::vector<Matrix> best = current;
  double best_ll = -std::numeric_limits<double>::infinity();

  MleDiagnostics diag;
  diag.min_eigenvalue = 1.0 / static_cast<double>(dim);
  kernels::LikelihoodGradient grad;

  for (int t = 0; t < cfg.max_iters; ++t) {
    kernels::likelihood_gradient(cfg.execution, current, states, freq.f(), cfg.prob_floor, grad);
    const double ll = grad.log_likelihood;
    if (!diag.likelihood_trajectory.empty() && ll < diag.likelihood_trajectory.back() - 1e-12) {
      diag.monotone = false;
    }
    diag.likelihood_trajectory.push_back(ll);
    if (ll > best_ll) {
      best_ll = ll;
      best = current;
    }

    Matrix s = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      s += grad.weighted[idx] * current[idx] * grad.weighted[idx];
    }
    s = (s + s.adjoint()).eval() * 0.5;
    const Matrix s_inv_sqrt = inverse_sqrt(s, cfg.eig_floor);

    std::vector<Matrix> next = current;
    kernels::apply_update(cfg.execution, s_inv_sqrt, grad.weighted, next);

    double delta = 0.0;
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < next.size(); ++i) {
      delta += trace_norm(next[i] - current[i]);
      sum += next[i];
      Eigen::SelfAdjointEigenSolver<Matrix> es(next[i], Eigen::EigenvaluesOnly);
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues()(0));
    }
    if (!std::isfinite(delta)) throw NumericalError("MLE iterate became non-finite");
    diag.max_completeness_residual =
        std::max(diag.max_completeness_residual, (sum - identity).cwiseAbs().maxCoeff());
    diag.epsilon_trajectory.push_back(delta);
    diag.final_epsilon = delta;
    diag.iterations = t + 1;
    current = std::move(next);
    if (delta < cfg.epsilon) {
      diag.converged = true;
      break;
    }
  }

  const double final_ll = log_likelihood(
      Povm([&] {
        std::vector<HermitianOperator> ops;
        for (const auto& m : current) ops.emplace_back(m, preps.qubits());
        return ops;
      }()),
      preps, freq, cfg.prob_floor);

  std::vector<HermitianOperator> out;
  if (diag.converged || final_ll >= best_ll) {
    for (const auto& m : current) out.emplace_back(m, preps.qubits());
    diag.likelihood_trajectory.push_back(final_ll);
  } else {
    for (const auto& m : best) out.emplace_back(m, preps.qubits());
    diag.likelihood_trajectory.push_back(best_ll);
  }
  return MleResult{Povm(std::move(out)), std::move(diag)};
}

}  // namespace qdt
