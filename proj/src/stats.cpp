#include "pairmatch/stats.hpp"

#include "pairmatch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pairmatch {

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptySample("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(h));
  if (below + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(below);
  return sorted[below] + frac * (sorted[below + 1] - sorted[below]);
}

SummaryStats summarize(std::span<const double> samples) {
  if (samples.empty()) throw EmptySample("cannot summarize an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  // Offsetting by the minimum keeps the mean of a constant sample exact.
  const double base = sorted.front();
  double offset_sum = 0.0;
  for (const double x : sorted) offset_sum += x - base;
  const double mean = std::clamp(base + offset_sum / static_cast<double>(sorted.size()), sorted.front(), sorted.back());

  return SummaryStats{sorted.front(),
                      sorted_quantile(sorted, 0.25),
                      sorted_quantile(sorted, 0.5),
                      mean,
                      sorted_quantile(sorted, 0.75),
                      sorted.back()};
}

double Histogram::bin_lo(std::size_t k) const {
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bin_count);
}

double Histogram::bin_hi(std::size_t k) const { return k + 1 == bin_count ? hi : bin_lo(k + 1); }

Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t bin_count) {
  if (!(lo < hi)) throw UsageError("histogram needs lo < hi");
  if (bin_count < 1) throw UsageError("histogram needs at least one bin");
  Histogram h{lo, hi, bin_count, std::vector<std::size_t>(bin_count, 0)};
  const double width = (hi - lo) / static_cast<double>(bin_count);
  for (const double x : samples) {
    const double pos = std::floor((x - lo) / width);
    std::size_t bin = 0;
    if (pos >= static_cast<double>(bin_count)) {
      bin = bin_count - 1;
    } else if (pos > 0.0) {
      bin = static_cast<std::size_t>(pos);
    }
    ++h.counts[bin];
  }
  return h;
}

}  // namespace pairmatch
