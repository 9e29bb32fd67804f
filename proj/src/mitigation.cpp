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

#include <algorithm>
#include <functional>
#include <iostream>

#include <Eigen/SVD>

#include "qdt/crosstalk.hpp"
#include "qdt/error.hpp"

namespace qdt {

namespace {
constexpr double kSingularCondition = 1e12;
}

Eigen::MatrixXd assignment_matrix(const Povm& povm) {
  const Eigen::Index d = povm.dim();
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Matrix& m = povm[static_cast<std::size_t>(i)].matrix();
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = m(j, j).real();
  }
  return a;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  // Sort-based projection (Held, Wolfe, Crowder).
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

MitigationResult mitigate_histogram(const Eigen::VectorXd& observed, const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("assignment matrix is not square");
  if (a.rows() != observed.size()) throw DimensionError("histogram length does not match the assignment matrix");
  if (std::abs(observed.sum() - 1.0) > 1e-9) throw ArgumentError("observed histogram does not sum to one");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  MitigationResult out;
  out.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition_number < kSingularCondition);
  if (out.ill_conditioned) {
    std::cerr << "warning: assignment matrix condition number " << out.condition_number
              << "; using the pseudo-inverse\n";
    svd.setThreshold(1.0 / kSingularCondition);
  }
  const Eigen::VectorXd x = svd.solve(observed);
  out.distribution = project_to_simplex(x);
  return out;
}

}  // namespace qdt
