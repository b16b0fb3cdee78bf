#include "pairmatch/matcher.hpp"

#include "pairmatch/errors.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace pairmatch {

namespace {

void require_even(std::size_t n) {
  if (n == 0 || n % 2 != 0) {
    throw OddNodeCount("perfect matching needs an even, nonzero node count (got " + std::to_string(n) + ")");
  }
}

// Primal-dual maximum-weight matching with blossom shrinking (Edmonds, in the
// O(n^3) formulation due to Galil), run in maximum-cardinality mode on the
// complete graph with weights -d(i, j). On a complete graph with an even node
// count the maximum-cardinality optimum is a minimum-weight perfect matching.
//
// Vertices are 0..n-1, blossoms n..2n-1. Edge k joins endpoint 2k and 2k+1;
// "p ^ 1" is the opposite endpoint of p. Labels: 0 free, 1 S (outer), 2 T
// (inner); bit 4 marks blossoms during scan_blossom.
class BlossomSolver {
 public:
  explicit BlossomSolver(const DistanceMatrix& d) : n_(static_cast<int>(d.size())) {
    const int edge_count = n_ * (n_ - 1) / 2;
    edge_u_.reserve(edge_count);
    edge_v_.reserve(edge_count);
    weight_.reserve(edge_count);
    neighbor_ends_.assign(n_, {});
    for (int i = 0; i < n_; ++i) neighbor_ends_[i].reserve(n_ - 1);
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        const int k = static_cast<int>(weight_.size());
        edge_u_.push_back(i);
        edge_v_.push_back(j);
        weight_.push_back(-d(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
        neighbor_ends_[i].push_back(2 * k + 1);
        neighbor_ends_[j].push_back(2 * k);
      }
    }
    endpoint_.resize(2 * weight_.size());
    for (std::size_t k = 0; k < weight_.size(); ++k) {
      endpoint_[2 * k] = edge_u_[k];
      endpoint_[2 * k + 1] = edge_v_[k];
    }

    const int nb = 2 * n_;
    mate_.assign(n_, -1);
    label_.assign(nb, 0);
    label_end_.assign(nb, -1);
    in_blossom_.resize(n_);
    for (int v = 0; v < n_; ++v) in_blossom_[v] = v;
    blossom_parent_.assign(nb, -1);
    blossom_childs_.assign(nb, {});
    blossom_base_.assign(nb, -1);
    for (int v = 0; v < n_; ++v) blossom_base_[v] = v;
    blossom_endps_.assign(nb, {});
    best_edge_.assign(nb, -1);
    blossom_best_edges_.assign(nb, {});
    has_best_edges_.assign(nb, false);
    for (int b = nb - 1; b >= n_; --b) unused_blossoms_.push_back(b);
    dual_.assign(nb, 0.0);
    allow_edge_.assign(weight_.size(), false);
  }

  std::vector<int> solve() {
    warm_start();
    for (int stage = 0; stage < n_; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(best_edge_.begin(), best_edge_.end(), -1);
      for (int b = n_; b < 2 * n_; ++b) {
        blossom_best_edges_[b].clear();
        has_best_edges_[b] = false;
      }
      std::fill(allow_edge_.begin(), allow_edge_.end(), false);
      queue_.clear();

      for (int v = 0; v < n_; ++v) {
        if (mate_[v] == -1 && label_[in_blossom_[v]] == 0) assign_label(v, 1, -1);
      }

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          const int v = queue_.back();
          queue_.pop_back();
          for (const int p : neighbor_ends_[v]) {
            const int k = p / 2;
            const int w = endpoint_[p];
            if (in_blossom_[v] == in_blossom_[w]) continue;
            double kslack = 0.0;
            if (!allow_edge_[k]) {
              kslack = slack(k);
              if (kslack <= 0.0) allow_edge_[k] = true;
            }
            if (allow_edge_[k]) {
              if (label_[in_blossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[in_blossom_[w]] == 1) {
                const int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                label_end_[w] = p ^ 1;
              }
            } else if (label_[in_blossom_[w]] == 1) {
              const int b = in_blossom_[v];
              if (best_edge_[b] == -1 || kslack < slack(best_edge_[b])) best_edge_[b] = k;
            } else if (label_[w] == 0) {
              if (best_edge_[w] == -1 || kslack < slack(best_edge_[w])) best_edge_[w] = k;
            }
          }
        }
        if (augmented) break;

        // No tight edge left to grow along: pick the largest dual step that
        // keeps every slack and every blossom dual nonnegative.
        int delta_type = -1;
        double delta = 0.0;
        int delta_edge = -1;
        int delta_blossom = -1;
        for (int v = 0; v < n_; ++v) {
          if (label_[in_blossom_[v]] == 0 && best_edge_[v] != -1) {
            const double dv = slack(best_edge_[v]);
            if (delta_type == -1 || dv < delta) {
              delta = dv;
              delta_type = 2;
              delta_edge = best_edge_[v];
            }
          }
        }
        for (int b = 0; b < 2 * n_; ++b) {
          if (blossom_parent_[b] == -1 && label_[b] == 1 && best_edge_[b] != -1) {
            const double dv = slack(best_edge_[b]) / 2.0;
            if (delta_type == -1 || dv < delta) {
              delta = dv;
              delta_type = 3;
              delta_edge = best_edge_[b];
            }
          }
        }
        for (int b = n_; b < 2 * n_; ++b) {
          if (blossom_base_[b] >= 0 && blossom_parent_[b] == -1 && label_[b] == 2 &&
              (delta_type == -1 || dual_[b] < delta)) {
            delta = dual_[b];
            delta_type = 4;
            delta_blossom = b;
          }
        }
        if (delta_type == -1) {
          // Maximum cardinality reached; only possible once no augmenting path exists.
          delta_type = 1;
          delta = std::max(0.0, *std::min_element(dual_.begin(), dual_.begin() + n_));
        }

        for (int v = 0; v < n_; ++v) {
          const int lb = label_[in_blossom_[v]];
          if (lb == 1) {
            dual_[v] -= delta;
          } else if (lb == 2) {
            dual_[v] += delta;
          }
        }
        for (int b = n_; b < 2 * n_; ++b) {
          if (blossom_base_[b] >= 0 && blossom_parent_[b] == -1) {
            if (label_[b] == 1) {
              dual_[b] += delta;
            } else if (label_[b] == 2) {
              dual_[b] -= delta;
            }
          }
        }

        if (delta_type == 1) break;
        if (delta_type == 2) {
          allow_edge_[delta_edge] = true;
          int i = edge_u_[delta_edge];
          if (label_[in_blossom_[i]] == 0) i = edge_v_[delta_edge];
          queue_.push_back(i);
        } else if (delta_type == 3) {
          allow_edge_[delta_edge] = true;
          queue_.push_back(edge_u_[delta_edge]);
        } else {
          expand_blossom(delta_blossom, false);
        }
      }

      if (!augmented) break;

      for (int b = n_; b < 2 * n_; ++b) {
        if (blossom_parent_[b] == -1 && blossom_base_[b] >= 0 && label_[b] == 1 && dual_[b] == 0.0) {
          expand_blossom(b, true);
        }
      }
    }

    std::vector<int> partner(n_, -1);
    for (int v = 0; v < n_; ++v) {
      if (mate_[v] >= 0) partner[v] = endpoint_[mate_[v]];
    }
    return partner;
  }

 private:
  int edge_index(int i, int j) const { return i * (2 * n_ - i - 1) / 2 + (j - i - 1); }

  // Raise each vertex dual to its best incident weight, then match greedily
  // along edges that are tight under those duals. Duals stay feasible and
  // every matched edge is tight, so the stages below start from a valid
  // primal-dual state with far fewer augmentations left to do.
  void warm_start() {
    for (int i = 0; i < n_; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (const int p : neighbor_ends_[i]) best = std::max(best, weight_[p / 2]);
      dual_[i] = best;
    }
    for (int i = 0; i < n_; ++i) {
      if (mate_[i] != -1) continue;
      for (int j = i + 1; j < n_; ++j) {
        if (mate_[j] != -1) continue;
        const int k = edge_index(i, j);
        if (slack(k) <= 0.0) {
          mate_[i] = 2 * k + 1;
          mate_[j] = 2 * k;
          break;
        }
      }
    }
  }

  double slack(int k) const { return dual_[edge_u_[k]] + dual_[edge_v_[k]] - 2.0 * weight_[k]; }

  // Python-style index into a cyclic child/endpoint list; j may be negative.
  static int wrap(const std::vector<int>& list, int j) {
    const int len = static_cast<int>(list.size());
    return list[((j % len) + len) % len];
  }

  template <typename F>
  void for_each_leaf(int b, F&& f) const {
    if (b < n_) {
      f(b);
      return;
    }
    for (const int t : blossom_childs_[b]) for_each_leaf(t, f);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    for_each_leaf(b, [&](int v) { out.push_back(v); });
    return out;
  }

  void assign_label(int w, int t, int p) {
    const int b = in_blossom_[w];
    label_[w] = label_[b] = t;
    label_end_[w] = label_end_[b] = p;
    best_edge_[w] = best_edge_[b] = -1;
    if (t == 1) {
      for_each_leaf(b, [&](int v) { queue_.push_back(v); });
    } else if (t == 2) {
      const int base = blossom_base_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  // Trace back from v and w to find either a common ancestor (new blossom,
  // returns its base) or two distinct roots (augmenting path, returns -1).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = in_blossom_[v];
      if (label_[b] & 4) {
        base = blossom_base_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (label_end_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[label_end_[b]];
        b = in_blossom_[v];
        v = endpoint_[label_end_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (const int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edge_u_[k];
    int w = edge_v_[k];
    const int bb = in_blossom_[base];
    int bv = in_blossom_[v];
    int bw = in_blossom_[w];
    const int b = unused_blossoms_.back();
    unused_blossoms_.pop_back();
    blossom_base_[b] = base;
    blossom_parent_[b] = -1;
    blossom_parent_[bb] = b;

    std::vector<int>& path = blossom_childs_[b];
    std::vector<int>& endps = blossom_endps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossom_parent_[bv] = b;
      path.push_back(bv);
      endps.push_back(label_end_[bv]);
      v = endpoint_[label_end_[bv]];
      bv = in_blossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossom_parent_[bw] = b;
      path.push_back(bw);
      endps.push_back(label_end_[bw] ^ 1);
      w = endpoint_[label_end_[bw]];
      bw = in_blossom_[w];
    }

    label_[b] = 1;
    label_end_[b] = label_end_[bb];
    dual_[b] = 0.0;
    for_each_leaf(b, [&](int leaf) {
      if (label_[in_blossom_[leaf]] == 2) queue_.push_back(leaf);
      in_blossom_[leaf] = b;
    });

    // Least-slack edge from the new blossom to every other S-blossom.
    std::vector<int> best_to(2 * n_, -1);
    auto consider = [&](int edge) {
      int i = edge_u_[edge];
      int j = edge_v_[edge];
      if (in_blossom_[j] == b) std::swap(i, j);
      const int bj = in_blossom_[j];
      if (bj != b && label_[bj] == 1 && (best_to[bj] == -1 || slack(edge) < slack(best_to[bj]))) {
        best_to[bj] = edge;
      }
    };
    for (const int sub : path) {
      if (!has_best_edges_[sub]) {
        for_each_leaf(sub, [&](int leaf) {
          for (const int p : neighbor_ends_[leaf]) consider(p / 2);
        });
      } else {
        for (const int edge : blossom_best_edges_[sub]) consider(edge);
      }
      blossom_best_edges_[sub].clear();
      has_best_edges_[sub] = false;
      best_edge_[sub] = -1;
    }
    std::vector<int>& best = blossom_best_edges_[b];
    best.clear();
    for (const int edge : best_to) {
      if (edge != -1) best.push_back(edge);
    }
    has_best_edges_[b] = true;
    best_edge_[b] = -1;
    for (const int edge : best) {
      if (best_edge_[b] == -1 || slack(edge) < slack(best_edge_[b])) best_edge_[b] = edge;
    }
  }

  void expand_blossom(int b, bool end_stage) {
    // Children may be recursively expanded, which reuses slots; work on a copy.
    const std::vector<int> childs = blossom_childs_[b];
    for (const int s : childs) {
      blossom_parent_[s] = -1;
      if (s < n_) {
        in_blossom_[s] = s;
      } else if (end_stage && dual_[s] == 0.0) {
        expand_blossom(s, end_stage);
      } else {
        for_each_leaf(s, [&](int leaf) { in_blossom_[leaf] = s; });
      }
    }

    if (!end_stage && label_[b] == 2) {
      // Relabel the even-length path through the expanded T-blossom from the
      // entry child to the base.
      const std::vector<int>& endps = blossom_endps_[b];
      const int entry_child = in_blossom_[endpoint_[label_end_[b] ^ 1]];
      int j = static_cast<int>(std::find(childs.begin(), childs.end(), entry_child) - childs.begin());
      int jstep = 0;
      int endptrick = 0;
      if (j & 1) {
        j -= static_cast<int>(childs.size());
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = label_end_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[wrap(endps, j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allow_edge_[wrap(endps, j - endptrick) / 2] = true;
        j += jstep;
        p = wrap(endps, j - endptrick) ^ endptrick;
        allow_edge_[p / 2] = true;
        j += jstep;
      }
      int bv = wrap(childs, j);
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      label_end_[endpoint_[p ^ 1]] = label_end_[bv] = p;
      best_edge_[bv] = -1;
      j += jstep;
      while (wrap(childs, j) != entry_child) {
        bv = wrap(childs, j);
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        const std::vector<int> sub_leaves = leaves(bv);
        const auto labelled =
            std::find_if(sub_leaves.begin(), sub_leaves.end(), [&](int leaf) { return label_[leaf] != 0; });
        if (labelled != sub_leaves.end()) {
          const int v = *labelled;
          label_[v] = 0;
          label_[endpoint_[mate_[blossom_base_[bv]]]] = 0;
          assign_label(v, 2, label_end_[v]);
        }
        j += jstep;
      }
    }

    label_[b] = label_end_[b] = -1;
    blossom_childs_[b].clear();
    blossom_endps_[b].clear();
    blossom_base_[b] = -1;
    blossom_best_edges_[b].clear();
    has_best_edges_[b] = false;
    best_edge_[b] = -1;
    unused_blossoms_.push_back(b);
  }

  // Flip matched/unmatched edges along the even path from vertex v to the
  // base of blossom b, recursively through sub-blossoms, and rotate b so
  // that v's sub-blossom becomes its new base.
  void augment_blossom(int b, int v) {
    int t = v;
    while (blossom_parent_[t] != b) t = blossom_parent_[t];
    if (t >= n_) augment_blossom(t, v);

    std::vector<int>& childs = blossom_childs_[b];
    std::vector<int>& endps = blossom_endps_[b];
    const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i;
    int jstep = 0;
    int endptrick = 0;
    if (i & 1) {
      j -= static_cast<int>(childs.size());
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = wrap(childs, j);
      const int p = wrap(endps, j - endptrick) ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = wrap(childs, j);
      if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossom_base_[b] = blossom_base_[childs.front()];
  }

  void augment_matching(int k) {
    const int ends[2][2] = {{edge_u_[k], 2 * k + 1}, {edge_v_[k], 2 * k}};
    for (const auto& start : ends) {
      int s = start[0];
      int p = start[1];
      while (true) {
        const int bs = in_blossom_[s];
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (label_end_[bs] == -1) break;
        const int t = endpoint_[label_end_[bs]];
        const int bt = in_blossom_[t];
        s = endpoint_[label_end_[bt]];
        const int j = endpoint_[label_end_[bt] ^ 1];
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = label_end_[bt];
        p = label_end_[bt] ^ 1;
      }
    }
  }

  int n_;
  std::vector<int> edge_u_;
  std::vector<int> edge_v_;
  std::vector<double> weight_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbor_ends_;

  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> label_end_;
  std::vector<int> in_blossom_;
  std::vector<int> blossom_parent_;
  std::vector<std::vector<int>> blossom_childs_;
  std::vector<int> blossom_base_;
  std::vector<std::vector<int>> blossom_endps_;
  std::vector<int> best_edge_;
  std::vector<std::vector<int>> blossom_best_edges_;
  std::vector<bool> has_best_edges_;
  std::vector<int> unused_blossoms_;
  std::vector<double> dual_;
  std::vector<bool> allow_edge_;
  std::vector<int> queue_;
};

// Depth-first over matchings in lexicographic order: the lowest unmatched
// node is paired with each remaining node in increasing order.
class MatchingEnumerator {
 public:
  explicit MatchingEnumerator(const DistanceMatrix& d) : d_(d), used_(d.size(), false) {}

  Matching run() {
    visit(0.0);
    return Matching{best_, best_total_};
  }

 private:
  void visit(double partial) {
    std::size_t first = 0;
    while (first < used_.size() && used_[first]) ++first;
    if (first == used_.size()) {
      if (best_.empty() || partial < best_total_) {
        best_ = current_;
        best_total_ = partial;
      }
      return;
    }
    used_[first] = true;
    for (std::size_t other = first + 1; other < used_.size(); ++other) {
      if (used_[other]) continue;
      used_[other] = true;
      current_.push_back({first, other});
      visit(partial + d_(first, other));
      current_.pop_back();
      used_[other] = false;
    }
    used_[first] = false;
  }

  const DistanceMatrix& d_;
  std::vector<bool> used_;
  std::vector<IndexPair> current_;
  std::vector<IndexPair> best_;
  double best_total_ = std::numeric_limits<double>::infinity();
};

}  // namespace

double pair_weight_sum(const DistanceMatrix& d, std::span<const IndexPair> pairs) {
  double total = 0.0;
  for (const auto& pr : pairs) total += d(pr.first, pr.second);
  return total;
}

Matching min_weight_perfect_matching(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  require_even(n);

  const std::vector<int> partner = BlossomSolver(d).solve();
  Matching result;
  result.pairs.reserve(n / 2);
  for (std::size_t v = 0; v < n; ++v) {
    const int w = partner[v];
    if (w < 0) throw InvariantViolation("blossom solver left a node unmatched");
    if (v < static_cast<std::size_t>(w)) result.pairs.push_back({v, static_cast<std::size_t>(w)});
  }
  if (result.pairs.size() != n / 2) throw InvariantViolation("blossom solver returned an inconsistent matching");
  result.total_weight = pair_weight_sum(d, result.pairs);
  return result;
}

Matching enumerate_matchings_oracle(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n > kMatchingOracleLimit) {
    throw TooLarge("matching enumeration is limited to " + std::to_string(kMatchingOracleLimit) + " nodes (got " +
                   std::to_string(n) + ")");
  }
  require_even(n);
  return MatchingEnumerator(d).run();
}

}  // namespace pairmatch
