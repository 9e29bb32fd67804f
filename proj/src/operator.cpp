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

#include "qdt/operator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>

#include "qdt/error.hpp"

namespace qdt {

namespace {

int qubits_for_dim(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<unsigned long>(dim))) {
    throw DimensionError("operator dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(static_cast<unsigned long>(dim));
}

// Maps every index of the reordered operator to the index of the original.
std::vector<Eigen::Index> reorder_map(const std::vector<int>& old_labels,
                                      std::span<const int> new_order) {
  const int n = static_cast<int>(old_labels.size());
  std::vector<int> source_pos(n);
  for (int q = 0; q < n; ++q) {
    auto it = std::find(old_labels.begin(), old_labels.end(), new_order[q]);
    source_pos[q] = static_cast<int>(it - old_labels.begin());
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Index> map(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::Index src = 0;
    for (int q = 0; q < n; ++q) {
      const Eigen::Index bit = (j >> (n - 1 - q)) & 1;
      src |= bit << (n - 1 - source_pos[q]);
    }
    map[j] = src;
  }
  return map;
}

void require_permutation(const std::vector<int>& labels, std::span<const int> order) {
  std::vector<int> a(labels.begin(), labels.end());
  std::vector<int> b(order.begin(), order.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ArgumentError("qubit order is not a permutation of the operator labels");
}

}  // namespace

// HermitianOperator ---------------------------------------------------------

HermitianOperator::HermitianOperator(const Matrix& m)
    : HermitianOperator(m, default_labels(qubits_for_dim(m.rows()))) {}

HermitianOperator::HermitianOperator(const Matrix& m, std::vector<int> labels)
    : labels_(std::move(labels)) {
  if (m.rows() != m.cols()) throw DimensionError("operator matrix is not square");
  const int n = qubits_for_dim(m.rows());
  if (n != static_cast<int>(labels_.size())) {
    throw DimensionError("operator of dimension " + std::to_string(m.rows()) + " needs " +
                         std::to_string(n) + " qubit labels, got " +
                         std::to_string(labels_.size()));
  }
  if (std::set<int>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw LabelConflictError("duplicate qubit label in operator");
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianOperator HermitianOperator::identity(std::vector<int> labels) {
  const Eigen::Index dim = Eigen::Index{1} << labels.size();
  return HermitianOperator(Matrix::Identity(dim, dim), std::move(labels));
}

double HermitianOperator::trace() const { return m_.trace().real(); }

RealVector HermitianOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double HermitianOperator::min_eigenvalue() const { return eigenvalues()(0); }

HermitianOperator HermitianOperator::relabeled(std::vector<int> labels) const {
  return HermitianOperator(m_, std::move(labels));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw DimensionError("operator dimensions differ");
  return HermitianOperator(m_ + other.m_, labels_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw DimensionError("operator dimensions differ");
  return HermitianOperator(m_ - other.m_, labels_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(m_ * s, labels_);
}

// NormalizedElement ---------------------------------------------------------

NormalizedElement::NormalizedElement(HermitianOperator op) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw ArgumentError("normalized element has trace " + std::to_string(tr));
  }
  const double lo = op_.min_eigenvalue();
  if (lo < -kPsdTolerance) {
    throw ArgumentError("normalized element has negative eigenvalue " + std::to_string(lo));
  }
}

// Povm ----------------------------------------------------------------------

Povm::Povm(std::vector<HermitianOperator> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ArgumentError("POVM has no elements");
  const auto& first = elements_.front();
  if (elements_.size() != static_cast<std::size_t>(first.dim())) {
    throw DimensionError("POVM on " + std::to_string(first.num_qubits()) + " qubits needs " +
                         std::to_string(first.dim()) + " outcome elements, got " +
                         std::to_string(elements_.size()));
  }
  for (const auto& e : elements_) {
    if (e.dim() != first.dim()) throw DimensionError("POVM elements differ in dimension");
    if (e.labels() != first.labels()) throw ArgumentError("POVM elements differ in qubit labels");
  }
}

const HermitianOperator& Povm::element(std::string_view outcome) const {
  if (static_cast<int>(outcome.size()) != num_qubits()) {
    throw ArgumentError("outcome '" + std::string(outcome) + "' does not have " +
                        std::to_string(num_qubits()) + " bits");
  }
  return elements_[outcome_index(outcome)];
}

// Outcomes ------------------------------------------------------------------

std::string outcome_string(std::size_t index, int num_qubits) {
  std::string s(num_qubits, '0');
  for (int q = 0; q < num_qubits; ++q) {
    if ((index >> (num_qubits - 1 - q)) & 1U) s[q] = '1';
  }
  return s;
}

std::size_t outcome_index(std::string_view outcome) {
  std::size_t idx = 0;
  for (char c : outcome) {
    if (c != '0' && c != '1') {
      throw ArgumentError("outcome '" + std::string(outcome) + "' is not a bitstring");
    }
    idx = (idx << 1) | static_cast<std::size_t>(c - '0');
  }
  return idx;
}

std::vector<std::string> all_outcomes(int num_qubits) {
  std::vector<std::string> out;
  const std::size_t count = std::size_t{1} << num_qubits;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(outcome_string(i, num_qubits));
  return out;
}

// Construction --------------------------------------------------------------

std::vector<int> default_labels(int num_qubits) {
  std::vector<int> labels(num_qubits);
  std::iota(labels.begin(), labels.end(), 0);
  return labels;
}

HermitianOperator projector(const StateVector& psi, std::vector<int> labels) {
  return HermitianOperator(psi * psi.adjoint(), std::move(labels));
}

HermitianOperator basis_projector(std::string_view outcome, std::vector<int> labels) {
  if (outcome.size() != labels.size()) {
    throw ArgumentError("outcome '" + std::string(outcome) + "' does not match " +
                        std::to_string(labels.size()) + " qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << labels.size();
  Matrix m = Matrix::Zero(dim, dim);
  const auto idx = static_cast<Eigen::Index>(outcome_index(outcome));
  m(idx, idx) = 1.0;
  return HermitianOperator(m, std::move(labels));
}

// Operations ----------------------------------------------------------------

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  for (int l : b.labels()) {
    if (std::find(a.labels().begin(), a.labels().end(), l) != a.labels().end()) {
      throw LabelConflictError("qubit label " + std::to_string(l) + " appears in two factors");
    }
  }
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  std::vector<int> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return HermitianOperator(out, std::move(labels));
}

HermitianOperator tensor(std::span<const HermitianOperator> ops) {
  if (ops.empty()) throw ArgumentError("tensor of an empty sequence");
  HermitianOperator acc = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) acc = tensor(acc, ops[i]);
  return acc;
}

double trace_norm(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("trace distance between dimensions " + std::to_string(a.dim()) +
                         " and " + std::to_string(b.dim()));
  }
  return 0.5 * trace_norm(a.matrix() - b.matrix());
}

double trace_distance(const NormalizedElement& a, const NormalizedElement& b) {
  return trace_distance(a.op(), b.op());
}

NormalizedElement normalize(const HermitianOperator& m) {
  const double tr = m.trace();
  if (!(tr > kDegenerateTrace)) {
    throw DegenerateElementError("cannot normalize element with trace " + std::to_string(tr));
  }
  return NormalizedElement(m * (1.0 / tr));
}

Povm ideal_povm(std::vector<int> labels) {
  if (labels.empty()) throw ArgumentError("ideal POVM needs at least one qubit");
  std::vector<HermitianOperator> elements;
  for (const auto& outcome : all_outcomes(static_cast<int>(labels.size()))) {
    elements.push_back(basis_projector(outcome, labels));
  }
  return Povm(std::move(elements));
}

Povm ideal_povm(int num_qubits) {
  if (num_qubits < 1) throw ArgumentError("ideal POVM needs at least one qubit");
  return ideal_povm(default_labels(num_qubits));
}

std::vector<double> born_probabilities(const Povm& povm, const NormalizedElement& state) {
  if (povm.dim() != state.dim()) {
    throw DimensionError("POVM dimension " + std::to_string(povm.dim()) +
                         " does not match state dimension " + std::to_string(state.dim()));
  }
  std::vector<double> p(povm.size());
  for (std::size_t i = 0; i < povm.size(); ++i) {
    // tr[M rho] = sum_ab M_ab conj(rho_ab) for Hermitian rho.
    const double v =
        (povm[i].matrix().array() * state.matrix().array().conjugate()).sum().real();
    p[i] = std::max(v, 0.0);
  }
  return p;
}

ValidityReport validate_povm(const Povm& povm, double tol) {
  ValidityReport report;
  report.tolerance = tol;
  Matrix sum = Matrix::Zero(povm.dim(), povm.dim());
  for (const auto& e : povm.elements()) {
    report.min_eigenvalues.push_back(e.min_eigenvalue());
    sum += e.matrix();
  }
  sum -= Matrix::Identity(povm.dim(), povm.dim());
  report.completeness_residual = sum.cwiseAbs().maxCoeff();
  report.positive = std::all_of(report.min_eigenvalues.begin(), report.min_eigenvalues.end(),
                                [tol](double v) { return v >= -tol; });
  report.complete = report.completeness_residual <= tol;
  return report;
}

HermitianOperator permute_qubits(const HermitianOperator& op, std::span<const int> new_order) {
  require_permutation(op.labels(), new_order);
  const auto map = reorder_map(op.labels(), new_order);
  const Eigen::Index dim = op.dim();
  Matrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) out(r, c) = op.matrix()(map[r], map[c]);
  }
  return HermitianOperator(out, std::vector<int>(new_order.begin(), new_order.end()));
}

HermitianOperator partial_trace(const HermitianOperator& op, std::span<const int> keep) {
  std::vector<int> order(keep.begin(), keep.end());
  for (int l : op.labels()) {
    if (std::find(keep.begin(), keep.end(), l) == keep.end()) order.push_back(l);
  }
  if (order.size() != op.labels().size()) {
    throw ArgumentError("partial trace keeps labels not present in the operator");
  }
  const HermitianOperator reordered = permute_qubits(op, order);
  const Eigen::Index kd = Eigen::Index{1} << keep.size();
  const Eigen::Index rd = reordered.dim() / kd;
  Matrix out = Matrix::Zero(kd, kd);
  for (Eigen::Index i = 0; i < kd; ++i) {
    for (Eigen::Index j = 0; j < kd; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index r = 0; r < rd; ++r) acc += reordered.matrix()(i * rd + r, j * rd + r);
      out(i, j) = acc;
    }
  }
  return HermitianOperator(out, std::vector<int>(keep.begin(), keep.end()));
}

Matrix inverse_sqrt(const Matrix& hermitian, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  RealVector ev = es.eigenvalues();
  if (!ev.allFinite()) throw NumericalError("non-finite eigenvalues");
  if (ev.maxCoeff() <= floor) throw NumericalError("matrix is singular after eigenvalue floor");
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(std::max(ev(i), floor));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qdt
