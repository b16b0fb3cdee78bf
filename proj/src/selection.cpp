#include "pairmatch/selection.hpp"

#include "pairmatch/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace pairmatch {

namespace {

PairSet make_pair_set(const DistanceMatrix& d, std::vector<IndexPair> pairs, Method method) {
  std::sort(pairs.begin(), pairs.end());
  PairSet out;
  out.total_distance = pair_weight_sum(d, pairs);
  out.pairs = std::move(pairs);
  out.method = method;
  return out;
}

struct WeightedPair {
  double distance;
  IndexPair pair;
};

bool shorter(const WeightedPair& a, const WeightedPair& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.pair < b.pair;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::random:
      return "random";
    case Method::ranking:
      return "ranking";
    case Method::greedy:
      return "greedy";
    case Method::optimal:
      return "optimal";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (const Method m : {Method::random, Method::ranking, Method::greedy, Method::optimal}) {
    if (text == to_string(m)) return m;
  }
  throw UsageError("unknown method '" + std::string(text) + "' (expected optimal, greedy, ranking or random)");
}

SelectionProblem::SelectionProblem(const DistanceMatrix& distances, std::size_t m) : distances_(&distances), m_(m) {
  if (m < 1) throw InvariantViolation("pair count m must be at least 1");
  if (2 * m > distances.size()) {
    throw InvariantViolation("cannot select " + std::to_string(m) + " pairs from " +
                             std::to_string(distances.size()) + " units");
  }
}

PairSet select_random(const SelectionProblem& problem, CounterRng& rng) {
  const DistanceMatrix& d = problem.distances();
  std::vector<std::size_t> chosen = sample_without_replacement(d.size(), 2 * problem.pair_count(), rng);
  const Matching inner = min_weight_perfect_matching(d.submatrix(chosen));
  std::vector<IndexPair> pairs;
  pairs.reserve(inner.pairs.size());
  for (const auto& pr : inner.pairs) {
    const std::size_t a = chosen[pr.first];
    const std::size_t b = chosen[pr.second];
    pairs.push_back({std::min(a, b), std::max(a, b)});
  }
  return make_pair_set(d, std::move(pairs), Method::random);
}

PairSet select_ranking(const SelectionProblem& problem) {
  const DistanceMatrix& d = problem.distances();
  if (d.size() % 2 != 0) {
    throw OddPoolForRanking("ranking matches the whole pool and needs an even unit count (got " +
                            std::to_string(d.size()) + ")");
  }
  const Matching full = min_weight_perfect_matching(d);
  std::vector<WeightedPair> ranked;
  ranked.reserve(full.pairs.size());
  for (const auto& pr : full.pairs) ranked.push_back({d(pr.first, pr.second), pr});
  std::sort(ranked.begin(), ranked.end(), shorter);
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < problem.pair_count(); ++i) pairs.push_back(ranked[i].pair);
  return make_pair_set(d, std::move(pairs), Method::ranking);
}

PairSet select_greedy(const SelectionProblem& problem) {
  const DistanceMatrix& d = problem.distances();
  const std::size_t n = d.size();
  std::vector<WeightedPair> all;
  all.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.push_back({d(i, j), {i, j}});
  }
  std::sort(all.begin(), all.end(), shorter);

  std::vector<bool> removed(n, false);
  std::vector<IndexPair> pairs;
  for (const auto& cand : all) {
    if (pairs.size() == problem.pair_count()) break;
    if (removed[cand.pair.first] || removed[cand.pair.second]) continue;
    removed[cand.pair.first] = removed[cand.pair.second] = true;
    pairs.push_back(cand.pair);
  }
  return make_pair_set(d, std::move(pairs), Method::greedy);
}

DistanceMatrix build_sink_augmented(const DistanceMatrix& d, std::size_t m) {
  const std::size_t n = d.size();
  if (2 * m > n) {
    throw InvariantViolation("cannot select " + std::to_string(m) + " pairs from " + std::to_string(n) + " units");
  }
  const std::size_t sinks = n - 2 * m;
  if (sinks == 0) return d;

  double real_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) real_sum += d(i, j);
  }
  const double big = 1.0 + real_sum;

  const auto total = static_cast<Eigen::Index>(n + sinks);
  const auto real = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(total, total);
  out.topLeftCorner(real, real) = d.values();
  out.bottomRightCorner(total - real, total - real).setConstant(big);
  out.bottomRightCorner(total - real, total - real).diagonal().setZero();
  return DistanceMatrix(std::move(out), d.form());
}

PairSet select_optimal(const SelectionProblem& problem) {
  const DistanceMatrix& d = problem.distances();
  const std::size_t n = d.size();
  const Matching matching = min_weight_perfect_matching(build_sink_augmented(d, problem.pair_count()));
  std::vector<IndexPair> pairs;
  pairs.reserve(problem.pair_count());
  for (const auto& pr : matching.pairs) {
    const bool first_real = pr.first < n;
    const bool second_real = pr.second < n;
    if (first_real && second_real) {
      pairs.push_back(pr);
    } else if (!first_real && !second_real) {
      throw InternalSinkPairing("sink-augmented matching paired two sinks");
    }
  }
  if (pairs.size() != problem.pair_count()) {
    throw InternalSinkPairing("sink-augmented matching produced " + std::to_string(pairs.size()) +
                              " unit pairs instead of " + std::to_string(problem.pair_count()));
  }
  return make_pair_set(d, std::move(pairs), Method::optimal);
}

PairSet select(const SelectionProblem& problem, Method method, CounterRng& rng) {
  switch (method) {
    case Method::random:
      return select_random(problem, rng);
    case Method::ranking:
      return select_ranking(problem);
    case Method::greedy:
      return select_greedy(problem);
    case Method::optimal:
      return select_optimal(problem);
  }
  throw UsageError("unknown method");
}

PairSet exhaustive_selection_oracle(const SelectionProblem& problem) {
  const DistanceMatrix& d = problem.distances();
  const std::size_t n = d.size();
  if (n > kSelectionOracleLimit) {
    throw TooLarge("subset enumeration is limited to " + std::to_string(kSelectionOracleLimit) + " units (got " +
                   std::to_string(n) + ")");
  }
  const std::size_t k = 2 * problem.pair_count();

  // Walk k-subsets in lexicographic order via a selection mask.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  PairSet best;
  best.method = Method::optimal;
  best.total_distance = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) subset.push_back(i);
    }
    const Matching inner = enumerate_matchings_oracle(d.submatrix(subset));
    std::vector<IndexPair> pairs;
    for (const auto& pr : inner.pairs) pairs.push_back({subset[pr.first], subset[pr.second]});
    PairSet candidate = make_pair_set(d, std::move(pairs), Method::optimal);
    if (candidate.total_distance < best.total_distance) best = std::move(candidate);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace pairmatch
