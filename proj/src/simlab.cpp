#include "pairmatch/simlab.hpp"

#include "pairmatch/errors.hpp"
#include "pairmatch/io.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace pairmatch {

namespace {

struct RepOutcome {
  std::optional<RatioSample> sample;
  bool singular = false;
  std::exception_ptr fatal;
};

std::string fixed4(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << x;
  return os.str();
}

}  // namespace

UnitTable generate_units(const ScenarioSpec& spec, CounterRng& rng) {
  Eigen::Index cols = 0;
  for (const auto& g : spec.generators) cols += static_cast<Eigen::Index>(column_count(g));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(spec.unit_count), cols);
  Eigen::Index at = 0;
  for (const auto& g : spec.generators) {
    const Eigen::MatrixXd block = sample_covariates(g, spec.unit_count, rng);
    x.middleCols(at, block.cols()) = block;
    at += block.cols();
  }
  return UnitTable(std::move(x));
}

RatioSample run_replication(const ScenarioSpec& spec, std::size_t rep_index) {
  CounterRng rng(spec.seed, rep_index);
  const UnitTable units = generate_units(spec, rng);
  const CovarianceModel cov = estimate_covariance(units, spec.ridge);
  const DistanceMatrix d = mahalanobis_matrix(units, cov, spec.distance_form);
  const SelectionProblem problem(d, spec.pair_count);

  const double optimal = select_optimal(problem).total_distance;
  RatioSample sample;
  sample.rep_index = rep_index;
  for (const Method method : spec.ratio_methods) {
    const double other = select(problem, method, rng).total_distance;
    sample.ratios.push_back({method, other == 0.0 ? 1.0 : optimal / other});
  }
  return sample;
}

std::size_t ScenarioResult::dominance_violations() const {
  std::size_t count = 0;
  for (const auto& s : samples) {
    for (const auto& r : s.ratios) {
      if (!(r.ratio <= 1.0 + kDominanceTolerance)) ++count;
    }
  }
  return count;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, std::size_t workers, std::size_t histogram_bins) {
  validate(spec);
  if (workers < 1) throw UsageError("worker count must be at least 1");

  std::vector<RepOutcome> outcomes(spec.reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t rep = next++; rep < spec.reps; rep = next++) {
      try {
        outcomes[rep].sample = run_replication(spec, rep);
      } catch (const SingularCovariance&) {
        outcomes[rep].singular = true;
      } catch (...) {
        outcomes[rep].fatal = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(workers, spec.reps);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  ScenarioResult result;
  result.spec = spec;
  for (std::size_t rep = 0; rep < spec.reps; ++rep) {
    RepOutcome& o = outcomes[rep];
    if (o.fatal) std::rethrow_exception(o.fatal);
    if (o.singular) {
      result.failed_reps.push_back(rep);
    } else {
      result.samples.push_back(std::move(*o.sample));
    }
  }
  if (result.samples.empty()) {
    throw AllRepsFailed("every replication of '" + spec.name + "' had a singular covariance matrix");
  }
  if (static_cast<double>(result.failed_reps.size()) > kFailureBudget * static_cast<double>(spec.reps)) {
    throw FailureBudgetExceeded(std::to_string(result.failed_reps.size()) + " of " + std::to_string(spec.reps) +
                                " replications of '" + spec.name + "' failed (budget 1%)");
  }

  for (std::size_t k = 0; k < spec.ratio_methods.size(); ++k) {
    MethodOutcome m;
    m.method = spec.ratio_methods[k];
    m.ratios.reserve(result.samples.size());
    for (const auto& s : result.samples) m.ratios.push_back(s.ratios[k].ratio);
    m.summary = summarize(m.ratios);
    m.histogram = make_histogram(m.ratios, 0.0, 1.0, histogram_bins);
    result.methods.push_back(std::move(m));
  }
  return result;
}

void write_raw_ratios(std::ostream& out, const ScenarioResult& result) {
  out << "rep,method,ratio\n";
  for (const auto& s : result.samples) {
    std::vector<MethodRatio> ordered = s.ratios;
    std::sort(ordered.begin(), ordered.end(),
              [](const MethodRatio& a, const MethodRatio& b) { return to_string(a.method) < to_string(b.method); });
    for (const auto& r : ordered) {
      out << s.rep_index << ',' << to_string(r.method) << ',' << format_real(r.ratio) << '\n';
    }
  }
}

void write_summary_header(std::ostream& out) {
  out << "scenario,method,min,q25,median,mean,q75,max,reps_ok,reps_failed\n";
}

void write_summary_rows(std::ostream& out, const ScenarioResult& result) {
  for (const auto& m : result.methods) {
    const SummaryStats& s = m.summary;
    out << result.spec.name << ',' << to_string(m.method) << ',' << fixed4(s.minimum) << ',' << fixed4(s.q25) << ','
        << fixed4(s.median) << ',' << fixed4(s.mean) << ',' << fixed4(s.q75) << ',' << fixed4(s.maximum) << ','
        << result.reps_ok() << ',' << result.reps_failed() << '\n';
  }
}

void write_histograms(std::ostream& out, const ScenarioResult& result) {
  out << "method,bin_lo,bin_hi,count\n";
  for (const auto& m : result.methods) {
    const Histogram& h = m.histogram;
    for (std::size_t k = 0; k < h.bin_count; ++k) {
      out << to_string(m.method) << ',' << fixed4(h.bin_lo(k)) << ',' << fixed4(h.bin_hi(k)) << ',' << h.counts[k]
          << '\n';
    }
  }
}

}  // namespace pairmatch
