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

#include "qdt/crosstalk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <Eigen/Eigenvalues>

#include "qdt/error.hpp"

namespace qdt {

// Partition -------------------------------------------------------------------

Partition::Partition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ArgumentError("partition has no blocks");
  std::set<int> seen;
  for (const auto& b : blocks_) {
    if (b.empty()) throw ArgumentError("partition has an empty block");
    for (int l : b) {
      if (!seen.insert(l).second) {
        throw ArgumentError("qubit " + std::to_string(l) + " appears in two blocks");
      }
    }
  }
}

Partition Partition::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c == '(' || c == ')' || c == ' ') continue;
    s.push_back(c);
  }
  const char block_sep = s.find('|') != std::string::npos ? '|' : ':';
  std::vector<std::vector<int>> blocks;
  std::stringstream outer(s);
  std::string block;
  while (std::getline(outer, block, block_sep)) {
    std::vector<int> labels;
    std::stringstream inner(block);
    std::string item;
    while (std::getline(inner, item, ',')) {
      try {
        std::size_t used = 0;
        labels.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ArgumentError("cannot parse partition '" + text + "'");
      }
    }
    blocks.push_back(std::move(labels));
  }
  return Partition(std::move(blocks));
}

std::vector<int> Partition::flattened() const {
  std::vector<int> out;
  for (const auto& b : blocks_) out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i > 0) out += ':';
    const auto& b = blocks_[i];
    if (b.size() > 1) out += '(';
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (j > 0) out += ',';
      out += std::to_string(b[j]);
    }
    if (b.size() > 1) out += ')';
  }
  return out;
}

void Partition::check_covers(const std::vector<int>& labels) const {
  std::vector<int> mine = flattened();
  std::vector<int> theirs = labels;
  std::sort(mine.begin(), mine.end());
  std::sort(theirs.begin(), theirs.end());
  if (mine != theirs) {
    throw ArgumentError("partition " + to_string() + " does not cover the element's qubits");
  }
}

std::vector<Partition> default_partitions(const std::vector<int>& labels) {
  const std::size_t n = labels.size();
  if (n < 2) throw ArgumentError("crosstalk analysis needs at least two qubits");
  std::vector<Partition> out;
  if (n == 2) {
    out.emplace_back(std::vector<std::vector<int>>{{labels[0]}, {labels[1]}});
    return out;
  }
  std::vector<std::vector<int>> full;
  for (int l : labels) full.push_back({l});
  out.emplace_back(std::move(full));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> rest;
    for (std::size_t j = 1; j < n; ++j) rest.push_back(labels[(i + j) % n]);
    out.emplace_back(std::vector<std::vector<int>>{{labels[i]}, rest});
  }
  return out;
}

void FitConfig::validate() const {
  if (restarts < 1) throw ArgumentError("restarts must be at least 1");
  if (max_sweeps < 0) throw ArgumentError("max_sweeps must be non-negative");
  if (polish_evals < 0) throw ArgumentError("polish_evals must be non-negative");
  if (!(frobenius_tol > 0.0)) throw ArgumentError("frobenius_tol must be positive");
}

HermitianOperator ProductFit::product(const std::vector<int>& element_labels) const {
  const HermitianOperator joined = [&] {
    std::vector<HermitianOperator> ops;
    for (const auto& f : factors) ops.push_back(f.op());
    return tensor(ops);
  }();
  return permute_qubits(joined, element_labels);
}

// Product fit -------------------------------------------------------------------

namespace {

Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

Matrix kron_all(const std::vector<Matrix>& factors, std::size_t skip = static_cast<std::size_t>(-1)) {
  Matrix acc = Matrix::Ones(1, 1);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i != skip) acc = kron(acc, factors[i]);
  }
  return acc;
}

// Nearest trace-one PSD matrix in the sense of eigenvalue clipping.
Matrix psd_normalized(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  const Eigen::Index d = m.rows();
  if (!(tr > 1e-14) || !std::isfinite(tr)) return Matrix::Identity(d, d) / static_cast<double>(d);
  ev /= tr;
  const Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return (out + out.adjoint()) * 0.5;
}

double half_trace_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Canonical problem: target ordered as the concatenated blocks.
struct FitProblem {
  Matrix target;
  std::vector<Eigen::Index> dims;
  // target reordered so block b comes first, the other blocks following in order.
  std::vector<Matrix> block_first;
};

FitProblem make_problem(const NormalizedElement& elem, const Partition& partition) {
  FitProblem p;
  const HermitianOperator canonical = permute_qubits(elem.op(), partition.flattened());
  p.target = canonical.matrix();
  for (std::size_t b = 0; b < partition.size(); ++b) {
    p.dims.push_back(Eigen::Index{1} << partition.blocks()[b].size());
    std::vector<int> order = partition.blocks()[b];
    for (std::size_t c = 0; c < partition.size(); ++c) {
      if (c != b) order.insert(order.end(), partition.blocks()[c].begin(), partition.blocks()[c].end());
    }
    p.block_first.push_back(permute_qubits(canonical, order).matrix());
  }
  return p;
}

double distance(const FitProblem& p, const std::vector<Matrix>& factors) {
  return half_trace_norm(p.target - kron_all(factors));
}

// Alternating least squares on ||X - (x)F_b||_F^2. Returns true at stationarity.
bool alternating_fit(const FitProblem& p, std::vector<Matrix>& factors, const FitConfig& cfg) {
  double previous = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (std::size_t b = 0; b < factors.size(); ++b) {
      const Matrix rest = kron_all(factors, b);
      const double norm2 = rest.squaredNorm();
      const Eigen::Index d = p.dims[b];
      const Eigen::Index dr = rest.rows();
      if (!(norm2 > 0.0)) {
        factors[b] = Matrix::Identity(d, d) / static_cast<double>(d);
        continue;
      }
      const Matrix& xb = p.block_first[b];
      Matrix f(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          // F_ij = sum_rs X[(i,r),(j,s)] R_sr
          const auto blk = xb.block(i * dr, j * dr, dr, dr);
          f(i, j) = (blk.array() * rest.transpose().array()).sum() / norm2;
        }
      }
      factors[b] = psd_normalized(f);
    }
    const double objective = (p.target - kron_all(factors)).squaredNorm();
    if (std::abs(previous - objective) < cfg.frobenius_tol) return true;
    previous = objective;
  }
  return false;
}

// Cholesky-style parametrization: d real diagonal entries followed by the
// real and imaginary parts of the strictly lower triangle, per block.
std::vector<double> to_params(const std::vector<Matrix>& factors) {
  std::vector<double> x;
  for (const auto& f : factors) {
    const Eigen::Index d = f.rows();
    Matrix ridge = f + Matrix::Identity(d, d) * 1e-9;
    Eigen::LLT<Matrix> llt(ridge);
    Matrix l = llt.info() == Eigen::Success ? Matrix(llt.matrixL())
                                            : Matrix(Matrix::Identity(d, d) / std::sqrt(double(d)));
    l /= std::sqrt((l * l.adjoint()).trace().real());
    for (Eigen::Index i = 0; i < d; ++i) x.push_back(l(i, i).real());
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        x.push_back(l(i, j).real());
        x.push_back(l(i, j).imag());
      }
    }
  }
  return x;
}

bool from_params(const double* x, const std::vector<Eigen::Index>& dims, std::vector<Matrix>& out) {
  out.resize(dims.size());
  std::size_t k = 0;
  for (std::size_t b = 0; b < dims.size(); ++b) {
    const Eigen::Index d = dims[b];
    Matrix l = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) l(i, i) = x[k++];
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        l(i, j) = Complex(x[k], x[k + 1]);
        k += 2;
      }
    }
    const Matrix f = l * l.adjoint();
    const double tr = f.trace().real();
    if (!(tr > 1e-300) || !std::isfinite(tr)) return false;
    out[b] = f / tr;
  }
  return true;
}

struct PolishState {
  const FitProblem* problem = nullptr;
  int evals = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_factors;
  std::vector<Matrix> scratch;
};

double polish_objective(const gsl_vector* v, void* params) {
  auto* st = static_cast<PolishState*>(params);
  ++st->evals;
  if (!from_params(v->data, st->problem->dims, st->scratch)) return 2.0;
  const double d = distance(*st->problem, st->scratch);
  if (!std::isfinite(d)) return 2.0;
  if (d < st->best) {
    st->best = d;
    st->best_factors = st->scratch;
  }
  return d;
}

// Nelder-Mead on the trace distance, restarted from the incumbent until the
// evaluation budget is spent. Returns true when a simplex collapsed.
bool polish(const FitProblem& p, std::vector<Matrix>& factors, double& dist, int budget) {
  if (budget <= 0) return false;
  const std::vector<double> x0 = to_params(factors);
  const std::size_t n = x0.size();
  PolishState st;
  st.problem = &p;
  st.best = dist;
  st.best_factors = factors;

  gsl_multimin_function fn{&polish_objective, n, &st};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  bool collapsed = false;
  double step_size = 0.05;
  std::vector<double> start = x0;
  while (st.evals < budget) {
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, start[i]);
    gsl_vector_set_all(step, step_size);
    if (gsl_multimin_fminimizer_set(s, &fn, x, step) != GSL_SUCCESS) break;
    bool round_collapsed = false;
    while (st.evals < budget) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_fminimizer_size(s) < 1e-10) {
        round_collapsed = true;
        break;
      }
    }
    if (!round_collapsed) break;
    collapsed = true;
    start = to_params(st.best_factors);
    step_size *= 0.5;
    if (step_size < 1e-6) break;
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);

  if (st.best < dist) {
    dist = st.best;
    factors = st.best_factors;
  }
  return collapsed;
}

Matrix random_factor(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  }
  const Matrix f = g * g.adjoint();
  return f / f.trace().real();
}

std::vector<std::vector<Matrix>> default_seeds(const FitProblem& p, const Partition& partition,
                                               const FitConfig& cfg) {
  std::vector<std::vector<Matrix>> seeds;
  const std::size_t m = partition.size();
  const HermitianOperator canonical(p.target, partition.flattened());

  std::vector<Matrix> marginals;
  for (const auto& block : partition.blocks()) {
    marginals.push_back(psd_normalized(partial_trace(canonical, block).matrix()));
  }
  seeds.push_back(marginals);

  std::vector<Matrix> dominant;
  for (std::size_t b = 0; b < m; ++b) {
    Eigen::Index arg = 0;
    marginals[b].diagonal().real().maxCoeff(&arg);
    Matrix proj = Matrix::Zero(p.dims[b], p.dims[b]);
    proj(arg, arg) = 1.0;
    dominant.push_back(proj);
  }
  seeds.push_back(dominant);

  std::vector<Matrix> mixed;
  for (std::size_t b = 0; b < m; ++b) {
    mixed.push_back(Matrix::Identity(p.dims[b], p.dims[b]) / static_cast<double>(p.dims[b]));
  }
  seeds.push_back(mixed);

  for (int r = 3; r < cfg.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffU),
                      static_cast<std::uint32_t>(cfg.seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<Matrix> factors;
    for (std::size_t b = 0; b < m; ++b) factors.push_back(random_factor(p.dims[b], rng));
    seeds.push_back(std::move(factors));
  }
  seeds.resize(static_cast<std::size_t>(cfg.restarts));
  return seeds;
}

}  // namespace

ProductFit fit_product(const NormalizedElement& elem, const Partition& partition,
                       const FitConfig& cfg,
                       const std::vector<std::vector<HermitianOperator>>& extra_seeds) {
  cfg.validate();
  if (partition.size() < 2) throw ArgumentError("crosstalk fit needs at least two blocks");
  partition.check_covers(elem.labels());

  const FitProblem problem = make_problem(elem, partition);
  auto seeds = default_seeds(problem, partition, cfg);
  for (const auto& extra : extra_seeds) {
    if (extra.size() != partition.size()) throw ArgumentError("extra seed has the wrong block count");
    std::vector<Matrix> s;
    for (std::size_t b = 0; b < extra.size(); ++b) {
      if (extra[b].dim() != problem.dims[b]) throw DimensionError("extra seed factor has the wrong size");
      s.push_back(psd_normalized(extra[b].matrix()));
    }
    seeds.push_back(std::move(s));
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_factors;
  int best_restart = 0;
  bool any_converged = false;
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    std::vector<Matrix> factors = seeds[r];
    double dist = distance(problem, factors);
    std::vector<Matrix> seed_factors = factors;
    const double seed_dist = dist;

    bool converged = alternating_fit(problem, factors, cfg);
    dist = distance(problem, factors);
    if (!(dist <= seed_dist)) {
      factors = std::move(seed_factors);
      dist = seed_dist;
    }
    if (dist > 1e-12) converged = polish(problem, factors, dist, cfg.polish_evals) || converged;
    any_converged = any_converged || converged;

    if (std::isfinite(dist) && (best_factors.empty() || dist < best - 1e-9)) {
      best = dist;
      best_factors = factors;
      best_restart = static_cast<int>(r);
    }
  }
  if (best_factors.empty()) throw NumericalError("product fit produced no finite candidate");

  ProductFit fit{partition, {}, best, static_cast<int>(seeds.size()), best_restart, any_converged};
  for (std::size_t b = 0; b < partition.size(); ++b) {
    fit.factors.emplace_back(HermitianOperator(psd_normalized(best_factors[b]), partition.blocks()[b]));
  }
  // Report the distance of the factors actually returned.
  fit.distance = trace_distance(elem.op(), fit.product(elem.labels()));
  return fit;
}

double crosstalk_error(const NormalizedElement& elem, const Partition& partition,
                       const FitConfig& cfg) {
  return fit_product(elem, partition, cfg).distance;
}

double total_error(const NormalizedElement& elem, const std::string& outcome) {
  if (static_cast<int>(outcome.size()) != elem.num_qubits()) {
    throw DimensionError("outcome '" + outcome + "' does not have " +
                        std::to_string(elem.num_qubits()) + " bits");
  }
  return trace_distance(elem.op(), basis_projector(outcome, elem.labels()));
}

double local_error(const ProductFit& fit, const std::vector<int>& element_labels,
                   const std::string& outcome) {
  if (outcome.size() != element_labels.size()) {
    throw DimensionError("outcome '" + outcome + "' does not have " +
                        std::to_string(element_labels.size()) + " bits");
  }
  return trace_distance(fit.product(element_labels), basis_projector(outcome, element_labels));
}

// Analysis ----------------------------------------------------------------------

namespace {

// True when every block of `fine` lies inside one block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.size() <= coarse.size()) return false;
  for (const auto& fb : fine.blocks()) {
    bool inside = false;
    for (const auto& cb : coarse.blocks()) {
      if (std::all_of(fb.begin(), fb.end(), [&](int l) {
            return std::find(cb.begin(), cb.end(), l) != cb.end();
          })) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

// Regroups the factors of a refined fit into one factor per coarse block.
std::vector<HermitianOperator> coarsen(const PartitionResult& fine, const Partition& coarse) {
  std::vector<HermitianOperator> out;
  for (const auto& cb : coarse.blocks()) {
    std::vector<HermitianOperator> parts;
    for (const auto& f : fine.factors) {
      if (std::find(cb.begin(), cb.end(), f.labels().front()) != cb.end()) parts.push_back(f.op());
    }
    out.push_back(permute_qubits(tensor(parts), cb));
  }
  return out;
}

}  // namespace

CrosstalkReport analyze_povm(const Povm& povm, const std::vector<Partition>& partitions,
                             const FitConfig& cfg, Execution exec) {
  cfg.validate();
  for (const auto& p : partitions) {
    if (p.size() < 2) throw ArgumentError("partition " + p.to_string() + " has a single block");
    p.check_covers(povm.labels());
  }

  CrosstalkReport report{povm.labels(), partitions, cfg, {}};
  const int n = povm.num_qubits();
  std::vector<std::optional<NormalizedElement>> normalized;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    OutcomeResult o;
    o.outcome = outcome_string(i, n);
    o.trace = povm[i].trace();
    o.skipped = !(o.trace >= kSkipTrace);
    o.partitions.resize(partitions.size(), PartitionResult{partitions.front(), 0.0, 0.0, 0.0, false, 0, false, {}});
    if (o.skipped) {
      normalized.emplace_back();
    } else {
      normalized.emplace_back(normalize(povm[i]));
      o.d_n = total_error(*normalized.back(), o.outcome);
    }
    report.outcomes.push_back(std::move(o));
  }

  // Finest partitions first so coarser fits can start from them.
  std::vector<std::size_t> levels;
  for (const auto& p : partitions) levels.push_back(p.size());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  for (std::size_t level : levels) {
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t i = 0; i < povm.size(); ++i) {
      if (report.outcomes[i].skipped) continue;
      for (std::size_t q = 0; q < partitions.size(); ++q) {
        if (partitions[q].size() == level) tasks.emplace_back(i, q);
      }
    }
    kernels::for_each_index(exec, tasks.size(), [&](std::size_t t) {
      const auto [i, q] = tasks[t];
      OutcomeResult& o = report.outcomes[i];
      std::vector<std::vector<HermitianOperator>> extra;
      for (std::size_t r = 0; r < partitions.size(); ++r) {
        if (refines(partitions[r], partitions[q])) extra.push_back(coarsen(o.partitions[r], partitions[q]));
      }
      const ProductFit fit = fit_product(*normalized[i], partitions[q], cfg, extra);
      PartitionResult res{partitions[q], 0.0, 0.0, 0.0, false, 0, false, {}};
      res.d_c = fit.distance;
      res.d_l_star = local_error(fit, povm.labels(), o.outcome);
      res.triangle_slack = res.d_c + res.d_l_star - o.d_n;
      res.converged = fit.converged;
      res.restarts_used = fit.restarts_used;
      res.inconclusive = res.d_c > 0.0 && res.d_c < kInconclusiveBand;
      res.factors = fit.factors;
      o.partitions[q] = std::move(res);
    });
  }
  return report;
}

}  // namespace qdt
