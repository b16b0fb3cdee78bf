#pragma once

#include "pairmatch/distance.hpp"

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace pairmatch {

/// Unordered pair stored with first < second.
struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// A perfect matching on the nodes of a DistanceMatrix. Pairs are sorted.
struct Matching {
  std::vector<IndexPair> pairs;
  double total_weight = 0.0;
};

/// Sum of d over `pairs`, accumulated in the order given.
double pair_weight_sum(const DistanceMatrix& d, std::span<const IndexPair> pairs);

/// Exact minimum-weight perfect matching of the complete graph on d's nodes,
/// computed with a primal-dual blossom algorithm in O(n^3).
///
/// Throws OddNodeCount if n is odd or zero. Output is a pure function of the
/// matrix bytes. Safe to call concurrently.
Matching min_weight_perfect_matching(const DistanceMatrix& d);

inline constexpr std::size_t kMatchingOracleLimit = 12;

/// Brute force over all (n-1)!! perfect matchings. Among equal totals the
/// lexicographically smallest sorted pair list wins. Throws TooLarge for
/// n > 12 and OddNodeCount for odd n.
Matching enumerate_matchings_oracle(const DistanceMatrix& d);

}  // namespace pairmatch
