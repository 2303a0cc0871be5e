#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mbqcqp/bounds.hpp"
#include "mbqcqp/experiment.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/report_io.hpp"
#include "mbqcqp/rounding.hpp"

namespace {

using namespace mbqcqp;

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kSolver = 3;
constexpr int kInfeasible = 4;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_text(out, text);
}

int solver_exit(const SolverError& e) {
  std::cerr << "error: " << e.what() << "\n";
  const auto s = e.status();
  return (s == conic::Status::Infeasible || s == conic::Status::Unbounded) ? kInfeasible : kSolver;
}

int cmd_solve(const std::string& path, const std::string& out) {
  const Instance inst = load_instance(path);
  const RelaxationSolution sol = solve_relaxation(inst);
  emit(solution_json(inst, sol), out);
  return kOk;
}

int cmd_round(const std::string& path, int trials, std::uint64_t seed, bool no_rr, const std::string& out) {
  const Instance inst = load_instance(path);
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
  const RelaxationSolution relax = solve_relaxation(inst);
  RoundingOptions opt;
  opt.trials = trials;
  opt.seed = seed;
  opt.rank_reduce = !no_rr;
  const RoundingOutcome res = round_solution(inst, relax, opt);
  emit(outcome_json(inst, relax, res), out);
  if (res.unbounded) {
    std::cerr << "rounding found a direction with no scaling cap: the max model is unbounded\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_bound(const std::string& path, const std::string& out) {
  const Instance inst = load_instance(path);
  const BoundReport b = bound_for(inst);
  std::cout << bound_table(b);
  if (out.empty()) std::cout << "\n" << bound_json(b);
  else write_text(out, bound_json(b));
  return kOk;
}

int cmd_oracle(const std::string& path, int grid, const std::string& out) {
  const Instance inst = load_instance(path);
  if (grid < 2) throw std::invalid_argument("--grid must be >= 2");
  const OracleResult r = oracle_value(inst, grid);
  emit(oracle_json(inst, r), out);
  return r.status == OracleStatus::ExactIsh ? kOk : kInfeasible;
}

Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw std::invalid_argument("--field must be real or complex");
}

ModelSense parse_model(const std::string& s) {
  if (s == "min") return ModelSense::Minimize;
  if (s == "max") return ModelSense::Maximize;
  throw std::invalid_argument("--model must be min or max");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-binary QCQP: SDP relaxation, randomized rounding, bounds and oracles"};
  app.require_subcommand(1);

  std::string instance, out;
  int trials = 1000, grid = 0;
  std::uint64_t seed = 0;
  bool no_rr = false;

  auto* solve = app.add_subcommand("solve", "Solve the relaxation (SDP2 for min, SDP3 for max)");
  solve->add_option("--instance", instance, "Instance file")->required();
  solve->add_option("--out", out, "Output file (default stdout)");

  auto* round = app.add_subcommand("round", "Relax and round");
  round->add_option("--instance", instance, "Instance file")->required();
  round->add_option("--trials", trials, "Number of trials")->required();
  round->add_option("--seed", seed, "Seed")->required();
  round->add_flag("--no-rank-reduce", no_rr, "Sample from the unreduced relaxation solution");
  round->add_option("--out", out, "Output file (default stdout)");

  auto* bound = app.add_subcommand("bound", "Theoretical approximation ratio");
  bound->add_option("--instance", instance, "Instance file")->required();
  bound->add_option("--out", out, "Also write the report document here");

  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum for N = 2");
  oracle->add_option("--instance", instance, "Instance file")->required();
  oracle->add_option("--grid", grid, "Direction grid resolution")->required();
  oracle->add_option("--out", out, "Output file (default stdout)");

  ExperimentConfig cfg;
  std::string field = "real", model = "min";
  bool exp_no_rr = false;
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo ratio experiment");
  exp->add_option("--M", cfg.M, "Number of constraints")->required();
  exp->add_option("--Q", cfg.Q, "Selected constraints")->required();
  exp->add_option("--N", cfg.N, "Vector dimension")->required();
  exp->add_option("--field", field, "real|complex")->required();
  exp->add_option("--model", model, "min|max")->required();
  exp->add_option("--eps", cfg.epsilon, "epsilon")->required();
  exp->add_option("--realizations", cfg.realizations, "Realizations R")->required();
  exp->add_option("--trials", cfg.trials, "Trials T")->required();
  exp->add_option("--seed", cfg.seed, "Master seed")->required();
  exp->add_option("--out", cfg.out_dir, "Output directory")->required();
  exp->add_option("--workers", cfg.workers, "Parallel workers");
  exp->add_option("--oracle-grid", cfg.oracle_grid, "Run the N = 2 oracle with this grid");
  exp->add_option("--bins", cfg.histogram_bins, "Histogram bins");
  exp->add_flag("--no-rank-reduce", exp_no_rr, "Disable rank reduction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve) return cmd_solve(instance, out);
    if (*round) return cmd_round(instance, trials, seed, no_rr, out);
    if (*bound) return cmd_bound(instance, out);
    if (*oracle) return cmd_oracle(instance, grid, out);
    if (*exp) {
      cfg.field = parse_field(field);
      cfg.sense = parse_model(model);
      cfg.rank_reduce = !exp_no_rr;
      try {
        cfg.validate();
      } catch (const ExperimentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
      }
      const ExperimentReport rep = run_experiment(cfg);
      emit_report(rep, cfg.out_dir);
      std::cout << summary_json(rep);
      return kOk;
    }
  } catch (const SolverError& e) {
    return solver_exit(e);
  } catch (const InstanceError& e) {
    std::cerr << "invalid instance: " << e.what() << "\n";
    return kInvalid;
  } catch (const NoGuaranteeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const RoundingError& e) {
    std::cerr << "rounding failed: " << e.what() << "\n";
    return kSolver;
  } catch (const ExperimentError& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kInvalid;
}
