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

// Synthetic detectors and shot sampling.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdt/kernels.hpp"
#include "qdt/operator.hpp"
#include "qdt/tomography.hpp"

namespace qdt {

enum class NoiseKind { local_flip, classical_corr, entangled };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

/// Detector noise model.
///
///  local_flip:     qubit q reports the wrong bit with probability flip[q].
///  classical_corr: with probability 1 - w the local_flip model; with
///                  probability w the qubits at positions `pair` are flipped
///                  together with probability q (applied to ideal projectors).
///  entangled:      M_{0..0} = (1 - p)|0..0><0..0| + p |Phi+><Phi+|_pair (x) |0..0><0..0|_rest;
///                  the remaining elements are C^{1/2} Q_a C^{1/2} with
///                  C = I - M_{0..0}, Q_a = |a><a| and the |0..0><0..0| weight
///                  assigned to the outcome with ones on `pair`.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::local_flip;
  /// One value per qubit, or a single value broadcast to every qubit.
  std::vector<double> flip = {0.0};
  double w = 0.0;
  double q = 0.5;
  double p = 0.0;
  /// Qubit positions (not labels) of the correlated / entangled pair.
  std::pair<int, int> pair = {0, 1};
  std::uint64_t seed = 0;

  /// Throws ArgumentError when a parameter leaves its range.
  void validate(int num_qubits) const;
};

/// The noisy POVM on `labels`. Completeness residue left by floating point is
/// folded into the largest element, which is then re-validated at 1e-10.
Povm make_noisy_povm(const std::vector<int>& labels, const NoiseSpec& spec);
Povm make_noisy_povm(int num_qubits, const NoiseSpec& spec);

/// Multinomial sample of `shots` outcomes per preparation by inverse CDF.
/// Preparation k draws from its own generator seeded with (seed, k), so the
/// result does not depend on the execution policy.
CountsDataset sample_counts(const Povm& povm, const PreparationSet& preps, std::int64_t shots,
                            std::uint64_t seed, Execution exec = Execution::parallel);

/// Noiseless counts: Born probability x shots, as real numbers.
CountsDataset exact_counts(const Povm& povm, const PreparationSet& preps, std::int64_t shots);

}  // namespace qdt
