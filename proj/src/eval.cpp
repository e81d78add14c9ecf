#include "mmblock/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "mmblock/text.hpp"

namespace mmblock {

using text::format_double;

double ConfusionCounts::accuracy() const {
  const long n = total();
  return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

std::optional<double> ConfusionCounts::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

void ConfusionCounts::add(bool predicted, bool actual) {
  if (predicted)
    ++(actual ? tp : fp);
  else
    ++(actual ? fn : tn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

BlockageEval evaluate_blockage(std::span<const std::vector<bool>> predictions,
                               std::span<const std::vector<bool>> truth) {
  if (predictions.size() != truth.size())
    throw Error(ErrorKind::length_mismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(truth.size()) + " truths");
  BlockageEval out;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != truth[i].size())
      throw Error(ErrorKind::length_mismatch, "sample " + std::to_string(i) + " horizon lengths differ");
    if (out.per_step.size() < truth[i].size()) out.per_step.resize(truth[i].size());
    for (std::size_t h = 0; h < truth[i].size(); ++h) out.per_step[h].add(predictions[i][h], truth[i][h]);
  }
  for (const auto& c : out.per_step) out.aggregate += c;
  return out;
}

ErrorStats error_stats(std::vector<double> errors) {
  ErrorStats s;
  s.count = errors.size();
  if (errors.empty()) return s;
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / static_cast<double>(errors.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(errors.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, errors.size() - 1);
    return errors[lo] + (pos - static_cast<double>(lo)) * (errors[hi] - errors[lo]);
  };
  s.median = quantile(0.5);
  s.p90 = quantile(0.9);
  return s;
}

LocalizationEval evaluate_localization(std::span<const std::vector<Centroid>> predictions,
                                       std::span<const std::vector<Centroid>> truth) {
  if (predictions.size() != truth.size())
    throw Error(ErrorKind::length_mismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(truth.size()) + " truths");
  std::vector<std::vector<double>> per_step;
  std::vector<double> all;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != truth[i].size())
      throw Error(ErrorKind::length_mismatch, "sample " + std::to_string(i) + " horizon lengths differ");
    if (per_step.size() < truth[i].size()) per_step.resize(truth[i].size());
    for (std::size_t h = 0; h < truth[i].size(); ++h) {
      if (!truth[i][h].valid)
        throw Error(ErrorKind::invalid_argument, "truth location is not valid");
      const double e = std::hypot(predictions[i][h].x - truth[i][h].x, predictions[i][h].y - truth[i][h].y);
      per_step[h].push_back(e);
      all.push_back(e);
    }
  }
  LocalizationEval out;
  out.aggregate = error_stats(std::move(all));
  for (auto& v : per_step) out.per_step.push_back(error_stats(std::move(v)));
  return out;
}

SeedSummary multi_seed_report(std::span<const std::vector<double>> values) {
  if (values.size() < 2)
    throw Error(ErrorKind::too_few_seeds, "need at least 2 seeds, got " + std::to_string(values.size()));
  const std::size_t n = values.front().size();
  for (const auto& v : values)
    if (v.size() != n) throw Error(ErrorKind::length_mismatch, "seeds report different horizons");
  SeedSummary s;
  s.seeds = values.size();
  const auto k = static_cast<double>(values.size());
  for (std::size_t h = 0; h < n; ++h) {
    double mean = 0.0;
    for (const auto& v : values) mean += v[h];
    mean /= k;
    double ss = 0.0;
    for (const auto& v : values) ss += (v[h] - mean) * (v[h] - mean);
    s.mean.push_back(mean);
    s.stddev.push_back(std::sqrt(ss / (k - 1.0)));
  }
  return s;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void counts_fields(std::ostringstream& os, const ConfusionCounts& c) {
  os << format_double(c.accuracy()) << ',' << opt(c.precision()) << ',' << c.tp << ',' << c.fp << ','
     << c.tn << ',' << c.fn << ',' << c.total() << '\n';
}

void stats_row(std::ostringstream& os, const std::string& method, std::size_t h, const ErrorStats& s) {
  os << method << ',' << h << ',' << format_double(s.mean) << ',' << format_double(s.median) << ','
     << format_double(s.p90) << ',' << s.count << '\n';
}

}  // namespace

std::string aggregate_csv(std::span<const MethodReport> reports) {
  std::ostringstream os;
  os << "method,accuracy,precision,tp,fp,tn,fn,total\n";
  for (const auto& r : reports) {
    os << r.method << ',';
    counts_fields(os, r.blockage.aggregate);
  }
  return os.str();
}

std::string per_horizon_csv(std::span<const MethodReport> reports) {
  std::ostringstream os;
  os << "method,horizon,accuracy,precision,tp,fp,tn,fn,total\n";
  for (const auto& r : reports)
    for (std::size_t h = 0; h < r.blockage.per_step.size(); ++h) {
      os << r.method << ',' << h + 1 << ',';
      counts_fields(os, r.blockage.per_step[h]);
    }
  return os.str();
}

std::string localization_csv(std::span<const MethodReport> reports) {
  std::ostringstream os;
  os << "method,horizon,mean_error,median_error,p90_error,count\n";
  for (const auto& r : reports) {
    if (!r.localization) continue;
    stats_row(os, r.method, 0, r.localization->aggregate);
    for (std::size_t h = 0; h < r.localization->per_step.size(); ++h)
      stats_row(os, r.method, h + 1, r.localization->per_step[h]);
  }
  return os.str();
}

std::string seed_summary_csv(std::span<const std::string> methods,
                             std::span<const SeedSummary> summaries) {
  if (methods.size() != summaries.size())
    throw Error(ErrorKind::length_mismatch, "one method name per summary required");
  std::ostringstream os;
  os << "method,horizon,mean_accuracy,std_accuracy,seeds\n";
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t h = 0; h < summaries[i].mean.size(); ++h)
      os << methods[i] << ',' << h + 1 << ',' << format_double(summaries[i].mean[h]) << ','
         << format_double(summaries[i].stddev[h]) << ',' << summaries[i].seeds << '\n';
  return os.str();
}

std::string text_table(std::span<const MethodReport> reports) {
  std::size_t name_w = 6;
  std::size_t steps = 0;
  for (const auto& r : reports) {
    name_w = std::max(name_w, r.method.size());
    steps = std::max(steps, r.blockage.per_step.size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_w)) << "method" << std::right << std::setw(10)
     << "accuracy" << std::setw(11) << "precision";
  for (std::size_t h = 0; h < steps; ++h) os << std::setw(8) << ("h" + std::to_string(h + 1));
  os << '\n' << std::fixed << std::setprecision(4);
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(name_w)) << r.method << std::right << std::setw(10)
       << r.blockage.aggregate.accuracy();
    if (auto p = r.blockage.aggregate.precision())
      os << std::setw(11) << *p;
    else
      os << std::setw(11) << "-";
    for (const auto& c : r.blockage.per_step) os << std::setw(8) << c.accuracy();
    os << '\n';
  }
  return os.str();
}

}  // namespace mmblock
