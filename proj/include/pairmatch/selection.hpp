#pragma once

#include "pairmatch/distance.hpp"
#include "pairmatch/matcher.hpp"
#include "pairmatch/rng.hpp"

#include <cstddef>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace pairmatch {

enum class Method { random, ranking, greedy, optimal };

std::string_view to_string(Method method);
/// Throws UsageError for anything but random, ranking, greedy or optimal.
Method parse_method(std::string_view text);

/// Choose m pairs from the N units of a distance matrix. Holds a
/// non-owning view of the matrix, which must outlive the problem.
class SelectionProblem {
 public:
  /// Throws InvariantViolation unless 1 <= m and 2m <= N.
  SelectionProblem(const DistanceMatrix& distances, std::size_t m);

  const DistanceMatrix& distances() const { return *distances_; }
  std::size_t unit_count() const { return distances_->size(); }
  std::size_t pair_count() const { return m_; }

 private:
  const DistanceMatrix* distances_;
  std::size_t m_;
};

/// m disjoint pairs of unit indices, sorted lexicographically; the total is
/// accumulated in that order.
struct PairSet {
  std::vector<IndexPair> pairs;
  double total_distance = 0.0;
  Method method = Method::optimal;
};

/// First k entries of a Fisher-Yates shuffle of 0..n-1 (k draws from rng).
template <typename Urbg>
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Urbg& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

/// Simple random sample of 2m units, matched optimally among themselves.
PairSet select_random(const SelectionProblem& problem, CounterRng& rng);

/// Optimal matching of all N units, keeping its m shortest pairs (ties by
/// (i, j)). Throws OddPoolForRanking for odd N.
PairSet select_ranking(const SelectionProblem& problem);

/// Repeatedly take the shortest pair among remaining units (ties by (i, j)).
PairSet select_greedy(const SelectionProblem& problem);

/// The input matrix padded with N - 2m artificial sinks. Sink-to-unit
/// distances are 0 and sink-to-sink distances are 1 + the sum of all unit
/// pair distances, which exceeds the cost of any sink-free completion.
DistanceMatrix build_sink_augmented(const DistanceMatrix& d, std::size_t m);

/// The m pairs of minimum total distance over every choice of 2m units,
/// found by a perfect matching on the sink-augmented graph.
PairSet select_optimal(const SelectionProblem& problem);

/// Dispatches on method; rng is only consumed by Method::random.
PairSet select(const SelectionProblem& problem, Method method, CounterRng& rng);

inline constexpr std::size_t kSelectionOracleLimit = 10;

/// Brute force over every 2m-subset and every pairing of it. Throws TooLarge
/// when N > 10.
PairSet exhaustive_selection_oracle(const SelectionProblem& problem);

}  // namespace pairmatch
