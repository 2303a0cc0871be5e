#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbqcqp/instance.hpp"

namespace mbqcqp {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int M = 8;
  int N = 8;
  int Q = 4;
  double epsilon = 0.0;
  Field field = Field::Real;
  ModelSense sense = ModelSense::Minimize;
  int realizations = 300;
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool rank_reduce = true;
  int oracle_grid = 0;  // > 0 runs the N = 2 oracle on every realization
  int workers = 1;      // 1 = serial
  int histogram_bins = 30;

  // Throws ExperimentError on invalid settings.
  void validate() const;
};

struct RealizationRecord {
  int realization = 0;  // 1-based
  std::uint64_t seed = 0;
  double v_sdp = 0.0;
  double v_ubqp = 0.0;
  double ratio = 0.0;
  double mu = 0.0;
  bool certified = false;
  int iters = 0;
  int resamples = 0;
  bool excluded = false;
  std::string failure;
  double oracle_value = 0.0;
  bool has_oracle = false;
};

struct Aggregates {
  int count = 0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // R-1 denominator
  bool std_defined = false;
};

struct Histogram {
  std::vector<double> edges;
  std::vector<int> counts;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RealizationRecord> records;
  int exclusions = 0;
  Aggregates aggregates;
  Histogram histogram;
  std::string mu_note;
};

// Pure function of the included records (excluded ones skipped).
Aggregates aggregate(const std::vector<RealizationRecord>& records);
Histogram histogram(const std::vector<RealizationRecord>& records, ModelSense sense, int bins);

// Instance seed for realization r (1-based).
std::uint64_t realization_seed(std::uint64_t master, int r);

RealizationRecord run_realization(const ExperimentConfig& config, int r);
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string records_csv(const ExperimentReport& report);
std::string summary_json(const ExperimentReport& report);
std::string histogram_json(const ExperimentReport& report);
// Writes records.csv, summary.json and histogram.json into dir (created if missing).
void emit_report(const ExperimentReport& report, const std::string& dir);

}  // namespace mbqcqp
