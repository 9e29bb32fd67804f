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

// Operator algebra for multi-qubit detectors: Hermitian operators with qubit
// labels, normalized POVM elements, POVMs, and the distance and probability
// primitives every other module builds on.
//
// Bit ordering: for an operator with qubit labels (l1, l2, ..., ln) the
// computational basis index of the bitstring a1 a2 ... an is the integer with
// a1 as its most significant bit, so the leftmost character of an outcome
// string belongs to the first label and Kronecker products run left to right.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qdt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using StateVector = Eigen::VectorXcd;

/// Absolute tolerance accepted for negative eigenvalues of PSD operators.
inline constexpr double kPsdTolerance = 1e-9;
/// Trace tolerance of a normalized element.
inline constexpr double kTraceTolerance = 1e-10;
/// Traces at or below this value cannot be normalized.
inline constexpr double kDegenerateTrace = 1e-12;

/// Dense Hermitian matrix over 2^n dimensions, carrying the labels of the
/// qubits its tensor factors act on. The matrix is symmetrized as
/// (A + A^dagger) / 2 on construction, so the stored entries are exactly
/// conjugate-symmetric.
class HermitianOperator {
 public:
  /// Labels default to 0, 1, ..., n-1.
  explicit HermitianOperator(const Matrix& m);
  HermitianOperator(const Matrix& m, std::vector<int> labels);

  static HermitianOperator identity(std::vector<int> labels);

  const Matrix& matrix() const { return m_; }
  const std::vector<int>& labels() const { return labels_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  int num_qubits() const { return static_cast<int>(labels_.size()); }

  double trace() const;
  /// Ascending eigenvalues.
  RealVector eigenvalues() const;
  double min_eigenvalue() const;

  /// Same matrix, new labels (no reordering of the matrix).
  HermitianOperator relabeled(std::vector<int> labels) const;

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double s) const;

 private:
  Matrix m_;
  std::vector<int> labels_;
};

/// Hermitian operator with unit trace and no eigenvalue below -kPsdTolerance.
/// Density matrices and normalized POVM elements both use this type.
class NormalizedElement {
 public:
  /// Throws ArgumentError when `op` is not trace-one PSD within tolerance.
  explicit NormalizedElement(HermitianOperator op);

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const std::vector<int>& labels() const { return op_.labels(); }
  int dim() const { return op_.dim(); }
  int num_qubits() const { return op_.num_qubits(); }

 private:
  HermitianOperator op_;
};

/// Outcome-indexed family of operators on a common set of qubits. Element i
/// belongs to the outcome bitstring whose binary value is i (lexicographic
/// order). Positivity and completeness are checked by validate_povm, not here,
/// so that invalid families can still be inspected.
class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> elements);

  int num_qubits() const { return elements_.front().num_qubits(); }
  int dim() const { return elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<int>& labels() const { return elements_.front().labels(); }

  const HermitianOperator& operator[](std::size_t i) const { return elements_[i]; }
  const HermitianOperator& element(std::string_view outcome) const;
  const std::vector<HermitianOperator>& elements() const { return elements_; }

 private:
  std::vector<HermitianOperator> elements_;
};

struct ValidityReport {
  std::vector<double> min_eigenvalues;
  double completeness_residual = 0.0;  // max-abs entry of sum_i M_i - I
  double tolerance = 0.0;
  bool positive = false;
  bool complete = false;

  bool passed() const { return positive && complete; }
};

// Outcome strings ----------------------------------------------------------

std::string outcome_string(std::size_t index, int num_qubits);
/// Throws ArgumentError for characters other than '0'/'1'.
std::size_t outcome_index(std::string_view outcome);
std::vector<std::string> all_outcomes(int num_qubits);

// Construction helpers -----------------------------------------------------

std::vector<int> default_labels(int num_qubits);
/// |psi><psi| for a unit vector psi.
HermitianOperator projector(const StateVector& psi, std::vector<int> labels);
/// |outcome><outcome| on the given labels.
HermitianOperator basis_projector(std::string_view outcome, std::vector<int> labels);

// Operations ---------------------------------------------------------------

/// Kronecker product in sequence order; labels are concatenated.
/// Throws LabelConflictError when two operands share a label.
HermitianOperator tensor(std::span<const HermitianOperator> ops);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

/// Half the trace norm of a - b.
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);
double trace_distance(const NormalizedElement& a, const NormalizedElement& b);
/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Matrix& hermitian);

/// m / tr(m). Throws DegenerateElementError when tr(m) <= 1e-12.
NormalizedElement normalize(const HermitianOperator& m);

/// Computational-basis projectors on n qubits, outcome-ordered.
Povm ideal_povm(int num_qubits);
Povm ideal_povm(std::vector<int> labels);

/// tr[M_i rho] for every element; small negative values are clamped to 0.
std::vector<double> born_probabilities(const Povm& povm, const NormalizedElement& state);

ValidityReport validate_povm(const Povm& povm, double tol);

/// Reorders the tensor factors so the result carries `new_order` as labels.
/// `new_order` must be a permutation of op.labels().
HermitianOperator permute_qubits(const HermitianOperator& op, std::span<const int> new_order);

/// Traces out every qubit not in `keep`; the result is ordered as `keep`.
HermitianOperator partial_trace(const HermitianOperator& op, std::span<const int> keep);

/// Hermitian square-root-inverse with eigenvalues clipped below at `floor`.
Matrix inverse_sqrt(const Matrix& hermitian, double floor);

}  // namespace qdt
