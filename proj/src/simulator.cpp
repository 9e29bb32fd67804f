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

#include "qdt/simulator.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qdt/error.hpp"

namespace qdt {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

double flip_of(const NoiseSpec& spec, int q) {
  return spec.flip.size() == 1 ? spec.flip.front() : spec.flip[static_cast<std::size_t>(q)];
}

// T(a | x) for the independent flip channel.
Eigen::MatrixXd local_channel(int n, const NoiseSpec& spec) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::MatrixXd t(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index x = 0; x < d; ++x) {
      double prob = 1.0;
      for (int q = 0; q < n; ++q) {
        const int shift = n - 1 - q;
        const bool flipped = ((a >> shift) & 1) != ((x >> shift) & 1);
        prob *= flipped ? flip_of(spec, q) : 1.0 - flip_of(spec, q);
      }
      t(a, x) = prob;
    }
  }
  return t;
}

Eigen::MatrixXd correlated_channel(int n, const NoiseSpec& spec) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index mask = (Eigen::Index{1} << (n - 1 - spec.pair.first)) |
                            (Eigen::Index{1} << (n - 1 - spec.pair.second));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x) {
    t(x, x) += 1.0 - spec.q;
    t(x ^ mask, x) += spec.q;
  }
  return t;
}

// M_a = sum_x T(a|x) |x><x|
std::vector<HermitianOperator> diagonal_povm(const Eigen::MatrixXd& t, const std::vector<int>& labels) {
  std::vector<HermitianOperator> out;
  for (Eigen::Index a = 0; a < t.rows(); ++a) {
    Matrix m = Matrix::Zero(t.rows(), t.rows());
    for (Eigen::Index x = 0; x < t.cols(); ++x) m(x, x) = t(a, x);
    out.emplace_back(m, labels);
  }
  return out;
}

Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<HermitianOperator> entangled_povm(int n, const NoiseSpec& spec, const std::vector<int>& labels) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index bit_a = Eigen::Index{1} << (n - 1 - spec.pair.first);
  const Eigen::Index bit_b = Eigen::Index{1} << (n - 1 - spec.pair.second);
  const Eigen::Index partner = bit_a | bit_b;

  StateVector bell = StateVector::Zero(d);
  bell(0) = 1.0 / std::sqrt(2.0);
  bell(partner) = 1.0 / std::sqrt(2.0);
  Matrix zero = Matrix::Zero(d, d);
  zero(0, 0) = 1.0;
  const Matrix m0 = (1.0 - spec.p) * zero + spec.p * (bell * bell.adjoint());

  const Matrix root = sqrt_psd(Matrix::Identity(d, d) - m0);
  std::vector<HermitianOperator> out;
  out.emplace_back(m0, labels);
  for (Eigen::Index a = 1; a < d; ++a) {
    Matrix qa = Matrix::Zero(d, d);
    qa(a, a) = 1.0;
    if (a == partner) qa(0, 0) = 1.0;
    out.emplace_back(root * qa * root, labels);
  }
  return out;
}

}  // namespace

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "local_flip") return NoiseKind::local_flip;
  if (name == "classical_corr") return NoiseKind::classical_corr;
  if (name == "entangled") return NoiseKind::entangled;
  throw ArgumentError("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::local_flip:
      return "local_flip";
    case NoiseKind::classical_corr:
      return "classical_corr";
    case NoiseKind::entangled:
      return "entangled";
  }
  return "unknown";
}

void NoiseSpec::validate(int num_qubits) const {
  if (num_qubits < 1) throw ArgumentError("noise model needs at least one qubit");
  if (flip.size() != 1 && static_cast<int>(flip.size()) != num_qubits) {
    throw ArgumentError("flip probabilities must be one value or one per qubit");
  }
  for (double f : flip) {
    if (!in_unit_interval(f)) throw ArgumentError("flip probability outside [0, 1]");
  }
  if (!in_unit_interval(w)) throw ArgumentError("correlation weight w outside [0, 1]");
  if (!in_unit_interval(q)) throw ArgumentError("correlated flip probability q outside [0, 1]");
  if (!in_unit_interval(p)) throw ArgumentError("Bell weight p outside [0, 1]");
  if (kind != NoiseKind::local_flip) {
    if (num_qubits < 2) throw ArgumentError(to_string(kind) + " noise needs at least two qubits");
    if (pair.first == pair.second || pair.first < 0 || pair.second < 0 ||
        pair.first >= num_qubits || pair.second >= num_qubits) {
      throw ArgumentError("pair must name two distinct qubit positions");
    }
  }
}

Povm make_noisy_povm(const std::vector<int>& labels, const NoiseSpec& spec) {
  const int n = static_cast<int>(labels.size());
  spec.validate(n);
  std::vector<HermitianOperator> elements;
  switch (spec.kind) {
    case NoiseKind::local_flip:
      elements = diagonal_povm(local_channel(n, spec), labels);
      break;
    case NoiseKind::classical_corr:
      elements = diagonal_povm(
          (1.0 - spec.w) * local_channel(n, spec) + spec.w * correlated_channel(n, spec), labels);
      break;
    case NoiseKind::entangled:
      elements = entangled_povm(n, spec, labels);
      break;
  }

  // Fold the completeness residue into the element with the largest trace.
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix sum = Matrix::Zero(d, d);
  std::size_t largest = 0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    sum += elements[i].matrix();
    if (elements[i].trace() > elements[largest].trace()) largest = i;
  }
  elements[largest] = HermitianOperator(elements[largest].matrix() + (Matrix::Identity(d, d) - sum), labels);

  Povm povm(std::move(elements));
  if (!validate_povm(povm, 1e-10).passed()) {
    throw ArgumentError("noise parameters produce an invalid POVM");
  }
  return povm;
}

Povm make_noisy_povm(int num_qubits, const NoiseSpec& spec) {
  return make_noisy_povm(default_labels(num_qubits), spec);
}

CountsDataset sample_counts(const Povm& povm, const PreparationSet& preps, std::int64_t shots,
                            std::uint64_t seed, Execution exec) {
  if (shots < 1) throw ArgumentError("shots must be at least 1");
  if (povm.dim() != (1 << preps.num_qubits())) throw DimensionError("POVM and preparations differ in size");
  CountsDataset data{preps.qubits(), {}};
  data.preparations.resize(preps.size());
  const auto outcomes = all_outcomes(povm.num_qubits());

  kernels::for_each_index(exec, preps.size(), [&](std::size_t k) {
    const auto probs = born_probabilities(povm, preps[k].state);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = (acc += probs[i]);
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(k),
                      static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<std::int64_t> tally(probs.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
      // 53-bit uniform in [0, acc).
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
      std::size_t i = 0;
      while (i + 1 < cdf.size() && !(u < cdf[i])) ++i;
      ++tally[i];
    }
    PreparationCounts& rec = data.preparations[k];
    rec.labels = preps[k].labels;
    rec.shots = shots;
    for (std::size_t i = 0; i < tally.size(); ++i) rec.counts[outcomes[i]] = static_cast<double>(tally[i]);
  });
  return data;
}

CountsDataset exact_counts(const Povm& povm, const PreparationSet& preps, std::int64_t shots) {
  if (shots < 1) throw ArgumentError("shots must be at least 1");
  CountsDataset data{preps.qubits(), {}};
  const auto outcomes = all_outcomes(povm.num_qubits());
  for (std::size_t k = 0; k < preps.size(); ++k) {
    const auto probs = born_probabilities(povm, preps[k].state);
    double total = 0.0;
    for (double p : probs) total += p;
    PreparationCounts rec{preps[k].labels, shots, {}};
    for (std::size_t i = 0; i < probs.size(); ++i) {
      rec.counts[outcomes[i]] = probs[i] / total * static_cast<double>(shots);
    }
    data.preparations.push_back(std::move(rec));
  }
  return data;
}

}  // namespace qdt
