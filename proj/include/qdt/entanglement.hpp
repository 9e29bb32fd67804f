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

// Partial-transpose tests on normalized POVM elements.

#pragma once

#include <string>
#include <vector>

#include "qdt/crosstalk.hpp"
#include "qdt/kernels.hpp"
#include "qdt/operator.hpp"

namespace qdt {

inline constexpr double kDefaultPptTolerance = 1e-7;

struct PptVerdict {
  Partition bipartition;
  double min_eigenvalue = 0.0;
  /// Sum of |lambda| over eigenvalues of the partial transpose below -tol.
  double negativity = 0.0;
  bool nppt = false;
  /// min_eigenvalue in [-tol, 0): reported PPT but flagged.
  bool borderline = false;

  char letter() const { return nppt ? 'N' : 'P'; }
};

/// Transposes the tensor indices of the qubits in `block`. Entries are only
/// moved, never combined, so applying it twice returns the input exactly.
HermitianOperator partial_transpose(const HermitianOperator& op, const std::vector<int>& block);

/// NPPT iff the smallest eigenvalue of the partial transpose over the first
/// block is below -tol.
PptVerdict nppt_test(const NormalizedElement& elem, const Partition& bipartition,
                     double tol = kDefaultPptTolerance);

/// All 2^(n-1) - 1 bipartitions: smaller first blocks first, lexicographic by
/// position within a size, the complement listed cyclically after the first
/// block (for three qubits "0:(1,2)", "1:(2,0)", "2:(0,1)").
std::vector<Partition> bipartitions(const std::vector<int>& labels);

std::vector<PptVerdict> classify_bipartitions(const NormalizedElement& elem,
                                              double tol = kDefaultPptTolerance);

/// "(N,N,P)"
std::string verdict_tuple(const std::vector<PptVerdict>& verdicts);

/// Two-qubit PPT elements are separable; for more qubits PPT only means no
/// NPPT entanglement was detected.
std::string interpret(const PptVerdict& v, int num_qubits);

struct PptRow {
  std::string outcome;
  bool skipped = false;
  std::vector<PptVerdict> verdicts;
};

struct PptTable {
  std::vector<int> qubits;
  double tolerance = kDefaultPptTolerance;
  std::vector<PptRow> rows;
};

/// Classifies every element of the POVM (normalized first; near-zero-trace
/// elements are skipped).
PptTable classify_povm(const Povm& povm, double tol = kDefaultPptTolerance,
                       Execution exec = Execution::parallel);

}  // namespace qdt
