#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pairmatch {

struct SummaryStats {
  double minimum = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q75 = 0.0;
  double maximum = 0.0;
};

/// Quantile q of sorted data, interpolating linearly between order
/// statistics at 1-based position 1 + q * (n - 1).
double sorted_quantile(std::span<const double> sorted, double q);

/// Throws EmptySample for an empty input.
SummaryStats summarize(std::span<const double> samples);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bin_count = 0;
  std::vector<std::size_t> counts;

  double bin_lo(std::size_t k) const;
  double bin_hi(std::size_t k) const;
};

inline constexpr std::size_t kDefaultHistogramBins = 40;

/// Uniform bins over [lo, hi]; the last bin is closed on the right and
/// out-of-range values are clipped into the end bins. Throws UsageError
/// unless lo < hi and bin_count >= 1.
Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t bin_count);

}  // namespace pairmatch
