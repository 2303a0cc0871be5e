#include "mbqcqp/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include <fmt/format.h>
#include "json.hpp"

#include "mbqcqp/bounds.hpp"
#include "mbqcqp/kernels.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/random.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/report_io.hpp"
#include "mbqcqp/rounding.hpp"

namespace mbqcqp {

using json = nlohmann::json;

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  if (M < 2) errs.push_back(fmt::format("M = {} < 2", M));
  if (N < 2) errs.push_back(fmt::format("N = {} < 2", N));
  if (Q < 1 || Q > M) errs.push_back(fmt::format("Q out of range: Q = {}, M = {}", Q, M));
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) errs.push_back(fmt::format("epsilon out of range: {}", epsilon));
  if (realizations < 1) errs.push_back("realizations must be >= 1");
  if (trials < 1) errs.push_back("trials must be >= 1");
  if (workers < 1) errs.push_back("workers must be >= 1");
  if (histogram_bins < 1) errs.push_back("histogram bins must be >= 1");
  if (oracle_grid > 0 && N != 2) errs.push_back("the oracle needs N = 2");
  if (!errs.empty()) {
    std::string s;
    for (const auto& e : errs) s += (s.empty() ? "" : "; ") + e;
    throw ExperimentError("invalid experiment config: " + s);
  }
}

std::uint64_t realization_seed(std::uint64_t master, int r) {
  return rng::derive(master, "realization", static_cast<std::uint64_t>(r));
}

RealizationRecord run_realization(const ExperimentConfig& config, int r) {
  RealizationRecord rec;
  rec.realization = r;
  rec.seed = realization_seed(config.seed, r);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.v_sdp = rec.v_ubqp = rec.ratio = rec.mu = nan;
  try {
    const Instance inst = generate_gaussian_instance(config.M, config.N, config.field, rec.seed, config.sense,
                                                     config.Q, config.epsilon);
    const RelaxationSolution relax = solve_relaxation(inst);
    rec.v_sdp = relax.value;
    rec.iters = relax.iterations;

    RoundingOptions opt;
    opt.trials = config.trials;
    opt.seed = config.seed;
    opt.realization = static_cast<std::uint64_t>(r);
    opt.rank_reduce = config.rank_reduce;
    opt.exec = Execution::Serial;
    const RoundingOutcome out = round_solution(inst, relax, opt);
    rec.resamples = out.trials_resampled;
    if (out.unbounded) throw RoundingError("rounding found an uncapped direction (unbounded)");
    rec.v_ubqp = out.v_ubqp;

    BoundReport b;
    try {
      b = bound_for(inst);
    } catch (const NoGuaranteeError&) {
      // Only the trivial ratio 0 is guaranteed here.
      b.sense = inst.sense;
      b.mu = 0.0;
    }
    b = certify(b, rec.v_ubqp, rec.v_sdp);
    rec.ratio = *b.empirical_ratio;
    rec.mu = b.mu;
    rec.certified = b.certified;

    if (config.oracle_grid > 0) {
      const OracleResult o = oracle_value(inst, config.oracle_grid, Execution::Serial);
      rec.has_oracle = true;
      rec.oracle_value = o.value;
    }
  } catch (const std::exception& e) {
    rec.excluded = true;
    rec.failure = e.what();
    rec.certified = false;
  }
  return rec;
}

Aggregates aggregate(const std::vector<RealizationRecord>& records) {
  Aggregates a;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.excluded) continue;
    a.max = a.count == 0 ? r.ratio : std::max(a.max, r.ratio);
    sum += r.ratio;
    ++a.count;
  }
  if (a.count == 0) return a;
  a.mean = sum / a.count;
  if (a.count > 1) {
    double ss = 0.0;
    for (const auto& r : records)
      if (!r.excluded) ss += (r.ratio - a.mean) * (r.ratio - a.mean);
    a.std = std::sqrt(ss / (a.count - 1));
    a.std_defined = true;
  }
  return a;
}

Histogram histogram(const std::vector<RealizationRecord>& records, ModelSense sense, int bins) {
  double lo = 0.0, hi = 1.0;
  if (sense == ModelSense::Minimize) {
    lo = 1.0;
    hi = 1.0;
    for (const auto& r : records)
      if (!r.excluded) hi = std::max(hi, r.ratio);
    if (hi <= lo) hi = lo + 1.0;
  }
  Histogram h;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& r : records) {
    if (r.excluded) continue;
    int b = static_cast<int>(std::floor((r.ratio - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport rep;
  rep.config = config;
  rep.records.resize(static_cast<std::size_t>(config.realizations));
  kernels::parallel_for(config.realizations, config.workers > 1 ? Execution::Parallel : Execution::Serial,
                        config.workers, [&](int i) { rep.records[static_cast<std::size_t>(i)] = run_realization(config, i + 1); });
  for (const auto& r : rep.records) rep.exclusions += r.excluded;
  if (rep.exclusions > 0.01 * config.realizations) {
    const auto& first = *std::find_if(rep.records.begin(), rep.records.end(), [](const auto& r) { return r.excluded; });
    throw ExperimentError(fmt::format("{} of {} realizations failed (limit 1%); first failure at realization {}: {}",
                                      rep.exclusions, config.realizations, first.realization, first.failure));
  }
  rep.aggregates = aggregate(rep.records);
  rep.histogram = histogram(rep.records, config.sense, config.histogram_bins);
  if (config.sense == ModelSense::Maximize && config.epsilon == 0.0)
    rep.mu_note = "max model at epsilon = 0 has no guarantee; mu recorded as 0";
  return rep;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

}  // namespace

std::string records_csv(const ExperimentReport& report) {
  std::string s = "realization,seed,v_sdp,v_ubqp,ratio,mu,certified,iters,resamples\n";
  for (const auto& r : report.records)
    s += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.realization, r.seed, num(r.v_sdp), num(r.v_ubqp),
                     num(r.ratio), num(r.mu), r.certified ? "true" : "false", r.iters, r.resamples);
  return s;
}

std::string summary_json(const ExperimentReport& report) {
  const auto& c = report.config;
  json doc;
  doc["config"] = {{"M", c.M},
                   {"N", c.N},
                   {"Q", c.Q},
                   {"epsilon", c.epsilon},
                   {"field", std::string(to_string(c.field))},
                   {"model", std::string(to_string(c.sense))},
                   {"realizations", c.realizations},
                   {"trials", c.trials},
                   {"seed", c.seed},
                   {"rank_reduce", c.rank_reduce},
                   {"rng", std::string(rng::kStreamVersion)}};
  const auto& a = report.aggregates;
  doc["included"] = a.count;
  doc["exclusions"] = report.exclusions;
  doc["ratio"] = {{"max", a.max}, {"mean", a.mean}, {"std", a.std}, {"std_defined", a.std_defined}};
  bool all = true;
  json failures = json::array();
  for (const auto& r : report.records) {
    if (r.excluded) {
      failures.push_back({{"realization", r.realization}, {"error", r.failure}});
      continue;
    }
    all = all && r.certified;
  }
  doc["all_certified"] = all;
  doc["failures"] = failures;
  if (!report.mu_note.empty()) doc["mu_note"] = report.mu_note;
  return doc.dump(2) + "\n";
}

std::string histogram_json(const ExperimentReport& report) {
  json doc;
  doc["bin_edges"] = report.histogram.edges;
  doc["counts"] = report.histogram.counts;
  return doc.dump(2) + "\n";
}

void emit_report(const ExperimentReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExperimentError(fmt::format("cannot create output directory {}: {}", dir, ec.message()));
  const std::filesystem::path p(dir);
  write_text((p / "records.csv").string(), records_csv(report));
  write_text((p / "summary.json").string(), summary_json(report));
  write_text((p / "histogram.json").string(), histogram_json(report));
}

}  // namespace mbqcqp
