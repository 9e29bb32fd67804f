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


// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "qdt/crosstalk.hpp"
#include "qdt/kernels.hpp"
#include "qdt/simulator.hpp"
#include "qdt/tomography.hpp"

namespace {

using namespace qdt;

struct Inputs {
  std::vector<Matrix> povm;
  std::vector<Matrix> states;
  Eigen::MatrixXd freq;
};

Inputs make_inputs(int n) {
  NoiseSpec spec;
  spec.kind = n >= 2 ? NoiseKind::classical_corr : NoiseKind::local_flip;
  spec.flip = {0.05};
  spec.w = 0.2;
  const Povm truth = make_noisy_povm(n, spec);
  const PreparationSet preps = mub_preparations(n, 8192);
  const TomographyInput in = to_tomography_input(sample_counts(truth, preps, 8192, 1));
  Inputs out;
  const Eigen::Index d = truth.dim();
  out.povm.assign(static_cast<std::size_t>(d), Matrix::Identity(d, d) / static_cast<double>(d));
  for (const auto& p : preps.states()) out.states.push_back(p.state.matrix());
  out.freq = in.frequencies.f();
  return out;
}

template <Execution E>
void BM_LikelihoodGradient(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)));
  kernels::LikelihoodGradient g;
  for (auto _ : state) {
    kernels::likelihood_gradient(E, in.povm, in.states, in.freq, 1e-12, g);
    benchmark::DoNotOptimize(g.log_likelihood);
  }
}
BENCHMARK(BM_LikelihoodGradient<Execution::serial>)->DenseRange(1, 4);
BENCHMARK(BM_LikelihoodGradient<Execution::parallel>)->DenseRange(1, 4);

template <Execution E>
void BM_ApplyUpdate(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)));
  kernels::LikelihoodGradient g;
  kernels::serial::likelihood_gradient(in.povm, in.states, in.freq, 1e-12, g);
  const Eigen::Index d = in.povm.front().rows();
  const Matrix s_inv_sqrt = Matrix::Identity(d, d);
  for (auto _ : state) {
    std::vector<Matrix> povm = in.povm;
    kernels::apply_update(E, s_inv_sqrt, g.weighted, povm);
    benchmark::DoNotOptimize(povm.front().data());
  }
}
BENCHMARK(BM_ApplyUpdate<Execution::serial>)->DenseRange(2, 4);
BENCHMARK(BM_ApplyUpdate<Execution::parallel>)->DenseRange(2, 4);

template <Execution E>
void BM_MleReconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NoiseSpec spec;
  spec.flip = {0.1};
  const PreparationSet preps = mub_preparations(n, 8192);
  const TomographyInput in = to_tomography_input(sample_counts(make_noisy_povm(n, spec), preps, 8192, 3));
  MleConfig cfg;
  cfg.execution = E;
  for (auto _ : state) {
    const MleResult r = mle_reconstruct(in.preparations, in.frequencies, cfg);
    benchmark::DoNotOptimize(r.diagnostics.iterations);
  }
}
BENCHMARK(BM_MleReconstruct<Execution::serial>)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MleReconstruct<Execution::parallel>)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

template <Execution E>
void BM_AnalyzeFanOut(benchmark::State& state) {
  NoiseSpec spec;
  spec.kind = NoiseKind::classical_corr;
  spec.flip = {0.05};
  spec.w = 0.3;
  const Povm povm = make_noisy_povm(3, spec);
  FitConfig cfg;
  cfg.restarts = 4;
  const auto parts = default_partitions(povm.labels());
  for (auto _ : state) {
    const CrosstalkReport r = analyze_povm(povm, parts, cfg, E);
    benchmark::DoNotOptimize(r.outcomes.front().d_n);
  }
}
BENCHMARK(BM_AnalyzeFanOut<Execution::serial>)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_AnalyzeFanOut<Execution::parallel>)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
