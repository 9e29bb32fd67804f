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

#include <exception>
#include <mutex>

#include <omp.h>

#include "kernels/work_items.hpp"
#include "qdt/kernels.hpp"

namespace qdt::kernels {

namespace omp {

void likelihood_gradient(std::span<const Matrix> povm, std::span<const Matrix> states,
                         const Eigen::MatrixXd& freq, double prob_floor,
                         LikelihoodGradient& out) {
  out.weighted.resize(povm.size());
  std::vector<double> partial(povm.size());
  const auto count = static_cast<long>(povm.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    partial[idx] =
        detail::outcome_gradient(idx, povm[idx], states, freq, prob_floor, out.weighted[idx]);
  }
  // Fixed-order reduction keeps the result independent of the team size.
  out.log_likelihood = 0.0;
  for (double v : partial) out.log_likelihood += v;
}

void apply_update(const Matrix& s_inv_sqrt, std::span<const Matrix> weighted,
                  std::span<Matrix> povm) {
  const auto count = static_cast<long>(povm.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    detail::update_element(s_inv_sqrt, weighted[idx], povm[idx]);
  }
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace omp

void set_max_threads(int threads) {
  if (threads >= 1) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace qdt::kernels
