#pragma once

#include "pairmatch/scenario.hpp"
#include "pairmatch/stats.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pairmatch {

struct MethodRatio {
  Method method;
  double ratio;
};

/// Ratios total(optimal) / total(method) for one replication, in the
/// scenario's ratio_methods order. 0/0 counts as 1.
struct RatioSample {
  std::size_t rep_index = 0;
  std::vector<MethodRatio> ratios;
};

/// Largest ratio still consistent with the optimal method dominating.
inline constexpr double kDominanceTolerance = 1e-9;

/// Scenarios abort when more than this fraction of replications fail.
inline constexpr double kFailureBudget = 0.01;

/// The covariate table for replication rep_index, drawn from the start of
/// that replication's random stream.
UnitTable generate_units(const ScenarioSpec& spec, CounterRng& rng);

/// One replication on its own stream CounterRng(spec.seed, rep_index).
/// Throws SingularCovariance if the drawn covariates are degenerate.
RatioSample run_replication(const ScenarioSpec& spec, std::size_t rep_index);

struct MethodOutcome {
  Method method = Method::greedy;
  std::vector<double> ratios;  // successful reps in rep order
  SummaryStats summary;
  Histogram histogram;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<RatioSample> samples;  // successful reps, sorted by rep_index
  std::vector<std::size_t> failed_reps;
  std::vector<MethodOutcome> methods;

  std::size_t reps_ok() const { return samples.size(); }
  std::size_t reps_failed() const { return failed_reps.size(); }
  /// Ratios above 1 + kDominanceTolerance across all methods.
  std::size_t dominance_violations() const;
};

/// Runs every replication on `workers` threads and aggregates per method.
/// Output does not depend on the worker count. Throws AllRepsFailed if no
/// replication succeeds and FailureBudgetExceeded if more than 1% fail.
ScenarioResult run_scenario(const ScenarioSpec& spec, std::size_t workers = 1,
                            std::size_t histogram_bins = kDefaultHistogramBins);

/// `rep,method,ratio`, sorted by (rep, method name).
void write_raw_ratios(std::ostream& out, const ScenarioResult& result);

void write_summary_header(std::ostream& out);
/// `scenario,method,min,q25,median,mean,q75,max,reps_ok,reps_failed`, one row
/// per method, four decimals.
void write_summary_rows(std::ostream& out, const ScenarioResult& result);

/// `method,bin_lo,bin_hi,count`.
void write_histograms(std::ostream& out, const ScenarioResult& result);

}  // namespace pairmatch
