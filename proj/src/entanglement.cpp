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

#include "qdt/entanglement.hpp"

#include <algorithm>

#include "qdt/error.hpp"

namespace qdt {

HermitianOperator partial_transpose(const HermitianOperator& op, const std::vector<int>& block) {
  const int n = op.num_qubits();
  if (block.empty() || static_cast<int>(block.size()) >= n) {
    throw ArgumentError("partial transpose block must be a non-empty proper subset");
  }
  Eigen::Index mask = 0;
  for (int l : block) {
    auto it = std::find(op.labels().begin(), op.labels().end(), l);
    if (it == op.labels().end()) {
      throw ArgumentError("qubit " + std::to_string(l) + " is not in the operator");
    }
    const int pos = static_cast<int>(it - op.labels().begin());
    mask |= Eigen::Index{1} << (n - 1 - pos);
  }
  const Eigen::Index dim = op.dim();
  const Matrix& m = op.matrix();
  Matrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      // Swap the row and column bits that belong to the block.
      const Eigen::Index r2 = (r & ~mask) | (c & mask);
      const Eigen::Index c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = m(r, c);
    }
  }
  return HermitianOperator(out, op.labels());
}

PptVerdict nppt_test(const NormalizedElement& elem, const Partition& bipartition, double tol) {
  if (bipartition.size() != 2) {
    throw ArgumentError("partition " + bipartition.to_string() + " is not a bipartition");
  }
  bipartition.check_covers(elem.labels());
  const RealVector ev = partial_transpose(elem.op(), bipartition.blocks()[0]).eigenvalues();
  PptVerdict v{bipartition};
  v.min_eigenvalue = ev(0);
  v.nppt = v.min_eigenvalue < -tol;
  v.borderline = !v.nppt && v.min_eigenvalue < 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) v.negativity -= ev(i);
  }
  return v;
}

std::vector<Partition> bipartitions(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  if (n < 2) throw ArgumentError("bipartitions need at least two qubits");
  std::vector<Partition> out;
  for (int size = 1; 2 * size <= n; ++size) {
    // Position subsets of this size in lexicographic order.
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      // For an even split keep only the half containing the first qubit.
      if (!(2 * size == n && pick[0] != 0)) {
        std::vector<int> first;
        std::vector<bool> in(n, false);
        for (int p : pick) {
          first.push_back(labels[p]);
          in[p] = true;
        }
        std::vector<int> rest;
        for (int j = 1; j < n; ++j) {
          const int p = (pick[0] + j) % n;
          if (!in[p]) rest.push_back(labels[p]);
        }
        out.emplace_back(std::vector<std::vector<int>>{first, rest});
      }
      int i = size - 1;
      while (i >= 0 && pick[i] == n - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::vector<PptVerdict> classify_bipartitions(const NormalizedElement& elem, double tol) {
  if (elem.num_qubits() < 2) throw ArgumentError("classification needs at least two qubits");
  std::vector<PptVerdict> out;
  for (const auto& bp : bipartitions(elem.labels())) out.push_back(nppt_test(elem, bp, tol));
  return out;
}

std::string verdict_tuple(const std::vector<PptVerdict>& verdicts) {
  std::string s = "(";
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (i > 0) s += ',';
    s += verdicts[i].letter();
  }
  return s + ")";
}

std::string interpret(const PptVerdict& v, int num_qubits) {
  if (v.nppt) return "entangled";
  if (num_qubits == 2) return "separable";
  return "no NPPT entanglement detected";
}

PptTable classify_povm(const Povm& povm, double tol, Execution exec) {
  PptTable table{povm.labels(), tol, {}};
  table.rows.resize(povm.size());
  kernels::for_each_index(exec, povm.size(), [&](std::size_t i) {
    PptRow& row = table.rows[i];
    row.outcome = outcome_string(i, povm.num_qubits());
    if (!(povm[i].trace() >= kSkipTrace)) {
      row.skipped = true;
      return;
    }
    row.verdicts = classify_bipartitions(normalize(povm[i]), tol);
  });
  return table;
}

}  // namespace qdt
