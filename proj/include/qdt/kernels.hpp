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

// Data-parallel kernels. Every kernel has a serial reference implementation
// and an OpenMP implementation that performs the same floating-point
// operations in the same order within each work item, so the two produce
// bitwise-identical results for any thread count.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qdt/operator.hpp"

namespace qdt {

enum class Execution { serial, parallel };

namespace kernels {

/// Output of one likelihood sweep over a POVM iterate.
struct LikelihoodGradient {
  /// G_i = sum_k f_ik / p_ik rho_k, one per outcome.
  std::vector<Matrix> weighted;
  /// sum_ik f_ik log p_ik with p_ik floored; summed per outcome, then over outcomes.
  double log_likelihood = 0.0;
};

/// Inputs are the POVM iterate (one matrix per outcome), the preparation
/// density matrices and the frequency table f(outcome, preparation).
/// p_ik = max(tr[M_i rho_k], prob_floor).
namespace serial {
void likelihood_gradient(std::span<const Matrix> povm, std::span<const Matrix> states,
                         const Eigen::MatrixXd& freq, double prob_floor,
                         LikelihoodGradient& out);
/// M_i <- R M_i R^dagger with R = S^{-1/2} G_i.
void apply_update(const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm);
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn);
}  // namespace serial

namespace omp {
void likelihood_gradient(std::span<const Matrix> povm, std::span<const Matrix> states,
                         const Eigen::MatrixXd& freq, double prob_floor,
                         LikelihoodGradient& out);
void apply_update(const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm);
/// Runs fn(0..count-1) on the OpenMP team with dynamic scheduling. The first
/// exception thrown by any work item is rethrown after the loop.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn);
}  // namespace omp

void likelihood_gradient(Execution exec, std::span<const Matrix> povm,
                         std::span<const Matrix> states, const Eigen::MatrixXd& freq,
                         double prob_floor, LikelihoodGradient& out);
void apply_update(Execution exec, const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm);
void for_each_index(Execution exec, std::size_t count,
                    const std::function<void(std::size_t)>& fn);

/// Caps the OpenMP team size; values < 1 are ignored.
void set_max_threads(int threads);
int max_threads();

}  // namespace kernels
}  // namespace qdt
