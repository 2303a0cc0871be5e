// Serial reference vs OpenMP kernels on desk-scale inputs.
#include <benchmark/benchmark.h>

#include "mbqcqp/experiment.hpp"
#include "mbqcqp/kernels.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rounding.hpp"

using namespace mbqcqp;

namespace {

Execution exec_of(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Rounding(benchmark::State& st) {
  const Instance inst = generate_gaussian_instance(8, 8, Field::Real, 3, ModelSense::Minimize, 4, 0.0);
  const RelaxationSolution relax = solve_relaxation(inst);
  RoundingOptions opt;
  opt.trials = 1000;
  opt.seed = 1;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(round_min(inst, relax, opt).v_ubqp);
}
BENCHMARK(BM_Rounding)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QuadraticForms(benchmark::State& st) {
  const Instance inst = generate_gaussian_instance(16, 16, Field::Complex, 5);
  const CMatrix samples = CMatrix::Random(16, 4096);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::quadratic_forms(inst.matrices, samples, exec_of(st)).sum());
}
BENCHMARK(BM_QuadraticForms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OracleScan(benchmark::State& st) {
  const Instance inst = generate_gaussian_instance(4, 2, Field::Complex, 9, ModelSense::Minimize, 2, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(oracle_value(inst, 128, exec_of(st)).value);
}
BENCHMARK(BM_OracleScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& st) {
  ExperimentConfig cfg;
  cfg.M = 6;
  cfg.N = 4;
  cfg.Q = 3;
  cfg.realizations = 8;
  cfg.trials = 200;
  cfg.workers = st.range(0) ? 0 : 1;
  if (cfg.workers == 0) cfg.workers = 8;
  for (auto _ : st) benchmark::DoNotOptimize(run_experiment(cfg).aggregates.mean);
}
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
