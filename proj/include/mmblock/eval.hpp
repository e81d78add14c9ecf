#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmblock/types.hpp"

namespace mmblock {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  double accuracy() const;
  /// Absent when nothing was predicted positive.
  std::optional<double> precision() const;
  void add(bool predicted, bool actual);
  ConfusionCounts& operator+=(const ConfusionCounts& o);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct BlockageEval {
  ConfusionCounts aggregate;
  std::vector<ConfusionCounts> per_step;  // horizon 1..N
};

/// One N-vector of predictions and truths per sample.
BlockageEval evaluate_blockage(std::span<const std::vector<bool>> predictions,
                               std::span<const std::vector<bool>> truth);

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;  // linear interpolation between order statistics
  std::size_t count = 0;
};

ErrorStats error_stats(std::vector<double> errors);

struct LocalizationEval {
  ErrorStats aggregate;
  std::vector<ErrorStats> per_step;
};

/// Euclidean error per horizon step. Truth must be valid everywhere.
LocalizationEval evaluate_localization(std::span<const std::vector<Centroid>> predictions,
                                       std::span<const std::vector<Centroid>> truth);

/// Per-horizon mean and sample standard deviation across seeds.
struct SeedSummary {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t seeds = 0;
};

/// values[s][h]: metric for seed s at horizon h+1. Needs at least two seeds.
SeedSummary multi_seed_report(std::span<const std::vector<double>> values);

/// Per-method results assembled for reporting.
struct MethodReport {
  std::string method;
  BlockageEval blockage;
  std::optional<LocalizationEval> localization;
};

// CSV schemas (header row first, one row per record):
//   aggregate:     method,accuracy,precision,tp,fp,tn,fn,total
//   per-horizon:   method,horizon,accuracy,precision,tp,fp,tn,fn,total
//   localization:  method,horizon,mean_error,median_error,p90_error,count   (horizon 0 = all)
//   seed summary:  method,horizon,mean_accuracy,std_accuracy,seeds
// An absent precision is an empty field.
std::string aggregate_csv(std::span<const MethodReport> reports);
std::string per_horizon_csv(std::span<const MethodReport> reports);
std::string localization_csv(std::span<const MethodReport> reports);
std::string seed_summary_csv(std::span<const std::string> methods,
                             std::span<const SeedSummary> summaries);

/// Aligned plain-text table of aggregate and per-horizon accuracy.
std::string text_table(std::span<const MethodReport> reports);

}  // namespace mmblock
