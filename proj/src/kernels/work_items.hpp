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

// Per-outcome work items shared by the serial and OpenMP kernels. Keeping the
// arithmetic in one place is what makes the two paths bitwise identical.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "qdt/operator.hpp"

namespace qdt::kernels::detail {

// Fills g with sum_k f_ik / p_ik rho_k and returns sum_k f_ik log p_ik.
inline double outcome_gradient(std::size_t i, const Matrix& element,
                               std::span<const Matrix> states, const Eigen::MatrixXd& freq,
                               double prob_floor, Matrix& g) {
  g.setZero(element.rows(), element.cols());
  double ll = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double f = freq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    if (f == 0.0) continue;
    const double tr = (element.array() * states[k].array().conjugate()).sum().real();
    const double p = std::max(tr, prob_floor);
    g += (f / p) * states[k];
    ll += f * std::log(p);
  }
  return ll;
}

inline void update_element(const Matrix& s_inv_sqrt, const Matrix& g, Matrix& element) {
  const Matrix r = s_inv_sqrt * g;
  const Matrix next = r * element * r.adjoint();
  element = (next + next.adjoint()) * 0.5;
}

}  // namespace qdt::kernels::detail
