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

#include <cmath>

#include "kernels/work_items.hpp"
#include "qdt/kernels.hpp"

namespace qdt::kernels {

namespace serial {

void likelihood_gradient(std::span<const Matrix> povm, std::span<const Matrix> states,
                         const Eigen::MatrixXd& freq, double prob_floor,
                         LikelihoodGradient& out) {
  out.weighted.resize(povm.size());
  std::vector<double> partial(povm.size());
  for (std::size_t i = 0; i < povm.size(); ++i) {
    partial[i] = detail::outcome_gradient(i, povm[i], states, freq, prob_floor, out.weighted[i]);
  }
  out.log_likelihood = 0.0;
  for (double v : partial) out.log_likelihood += v;
}

void apply_update(const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm) {
  for (std::size_t i = 0; i < povm.size(); ++i) {
    detail::update_element(s_inv_sqrt, weighted[i], povm[i]);
  }
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace serial

void likelihood_gradient(Execution exec, std::span<const Matrix> povm,
                         std::span<const Matrix> states, const Eigen::MatrixXd& freq,
                         double prob_floor, LikelihoodGradient& out) {
  if (exec == Execution::parallel) {
    omp::likelihood_gradient(povm, states, freq, prob_floor, out);
  } else {
    serial::likelihood_gradient(povm, states, freq, prob_floor, out);
  }
}

void apply_update(Execution exec, const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm) {
  if (exec == Execution::parallel) {
    omp::apply_update(s_inv_sqrt, weighted, povm);
  } else {
    serial::apply_update(s_inv_sqrt, weighted, povm);
  }
}

void for_each_index(Execution exec, std::size_t count,
                    const std::function<void(std::size_t)>& fn) {
  if (exec == Execution::parallel) {
    omp::for_each_index(count, fn);
  } else {
    serial::for_each_index(count, fn);
  }
}

}  // namespace qdt::kernels
