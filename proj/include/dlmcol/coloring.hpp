#pragma once

// Solution representation and objective evaluation for both problems.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dlmcol/graph.hpp"

namespace dlmcol {

using Score = std::int64_t;

/// Stands in for f = +inf; half the range so sums never overflow.
inline constexpr Score kInfiniteScore = std::numeric_limits<Score>::max() / 2;

/// Partition of the vertices into at most k color groups.
class Coloring {
 public:
  Coloring() = default;
  Coloring(std::vector<int> assign, int k) : assign_(std::move(assign)), k_(k), sizes_(static_cast<std::size_t>(k), 0) {
    if (k < 1) throw std::invalid_argument("coloring needs at least one color slot");
    for (int c : assign_) {
      if (c < 0 || c >= k) throw std::invalid_argument("color id out of range");
      ++sizes_[static_cast<std::size_t>(c)];
    }
  }

  int size() const noexcept { return static_cast<int>(assign_.size()); }
  int k() const noexcept { return k_; }
  int operator[](int v) const { return assign_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& assignment() const noexcept { return assign_; }
  const std::vector<int>& group_sizes() const noexcept { return sizes_; }
  int group_size(int c) const { return sizes_[static_cast<std::size_t>(c)]; }

  int colors_used() const noexcept {
    return static_cast<int>(std::count_if(sizes_.begin(), sizes_.end(), [](int s) { return s > 0; }));
  }

  void set(int v, int c) {
    int& slot = assign_[static_cast<std::size_t>(v)];
    --sizes_[static_cast<std::size_t>(slot)];
    slot = c;
    ++sizes_[static_cast<std::size_t>(c)];
  }

  /// Same partition with groups renumbered by first appearance.
  Coloring canonical() const {
    std::vector<int> relabel(static_cast<std::size_t>(k_), -1);
    std::vector<int> out(assign_.size());
    int next = 0;
    for (std::size_t v = 0; v < assign_.size(); ++v) {
      int& r = relabel[static_cast<std::size_t>(assign_[v])];
      if (r < 0) r = next++;
      out[v] = r;
    }
    return Coloring(std::move(out), k_);
  }

  friend bool operator==(const Coloring& a, const Coloring& b) { return a.k_ == b.k_ && a.assign_ == b.assign_; }

 private:
  std::vector<int> assign_;
  int k_ = 0;
  std::vector<int> sizes_;
};

struct ScoreAndConflicts {
  Score score = 0;
  Score conflicts = 0;
  friend bool operator==(const ScoreAndConflicts&, const ScoreAndConflicts&) = default;
};

/// Sum over nonempty groups of the heaviest vertex, and the number of
/// monochromatic edges.
inline ScoreAndConflicts wvcp_score(const WeightedGraph& g, const Coloring& s) {
  std::vector<Weight> heaviest(static_cast<std::size_t>(s.k()), 0);
  ScoreAndConflicts out;
  for (int v = 0; v < g.size(); ++v) {
    Weight& h = heaviest[static_cast<std::size_t>(s[v])];
    h = std::max(h, g.weight(v));
    for (int u : g.neighbors(v))
      if (u > v && s[u] == s[v]) ++out.conflicts;
  }
  for (Weight h : heaviest) out.score += h;
  return out;
}

inline Score col_conflicts(const WeightedGraph& g, const Coloring& s) { return wvcp_score(g, s).conflicts; }

/// g(S) = f(S) + phi * c(S).
inline double penalized_score(Score score, Score conflicts, double phi) {
  return static_cast<double>(score) + phi * static_cast<double>(conflicts);
}

inline bool is_legal(const WeightedGraph& g, const Coloring& s) {
  for (auto [u, v] : g.edges())
    if (s[u] == s[v]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Incremental WVCP evaluation
// ---------------------------------------------------------------------------

struct MoveDelta {
  Score score = 0;
  Score conflicts = 0;
};

/// Owns a coloring plus the tables that give O(1) move deltas:
///  - neighbor_colors(v, c): neighbors of v currently in group c
///  - weight counts per (group, distinct weight), from which each group's
///    heaviest weight and its heaviest weight after losing one heaviest vertex
///    are kept up to date.
class WvcpEval {
 public:
  WvcpEval(const WeightedGraph& g, Coloring s) : g_(&g), s_(std::move(s)) {
    const int n = g.size();
    const int k = s_.k();
    if (s_.size() != n) throw std::invalid_argument("coloring size differs from graph size");
    distinct_ = g.weights();
    std::sort(distinct_.begin(), distinct_.end(), std::greater<>());
    distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
    rank_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      rank_[static_cast<std::size_t>(v)] = static_cast<int>(
          std::lower_bound(distinct_.begin(), distinct_.end(), g.weight(v), std::greater<>()) - distinct_.begin());
    counts_.assign(static_cast<std::size_t>(k) * distinct_.size(), 0);
    gamma_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0);
    top_.assign(static_cast<std::size_t>(k), 0);
    top_less_one_.assign(static_cast<std::size_t>(k), 0);
    for (int v = 0; v < n; ++v) {
      ++count(s_[v], rank_[static_cast<std::size_t>(v)]);
      for (int u : g.neighbors(v)) {
        ++gamma_[index(v, s_[u])];
        if (u > v && s_[u] == s_[v]) ++conflicts_;
      }
    }
    for (int c = 0; c < k; ++c) refresh_group(c);
    for (Weight t : top_) score_ += t;
  }

  const Coloring& coloring() const noexcept { return s_; }
  const WeightedGraph& graph() const noexcept { return *g_; }
  Score score() const noexcept { return score_; }
  Score conflicts() const noexcept { return conflicts_; }
  int k() const noexcept { return s_.k(); }
  int neighbor_colors(int v, int c) const { return gamma_[index(v, c)]; }
  Weight group_max(int c) const { return top_[static_cast<std::size_t>(c)]; }

  // Raw views for the tabu scan's inner loop.
  const int* neighbor_color_row(int v) const { return &gamma_[index(v, 0)]; }
  const Weight* group_max_data() const noexcept { return top_.data(); }

  /// Score change from taking v out of its group (independent of the target).
  Score leave_delta(int v) const {
    const int c = s_[v];
    const Weight w = g_->weight(v);
    const Weight top = top_[static_cast<std::size_t>(c)];
    return w == top ? top_less_one_[static_cast<std::size_t>(c)] - top : 0;
  }

  /// Score change from putting v into group `to` (v not already there).
  Score enter_delta(int v, int to) const {
    const Weight top = top_[static_cast<std::size_t>(to)];
    const Weight w = g_->weight(v);
    return w > top ? w - top : 0;
  }

  MoveDelta move_delta(int v, int to) const {
    if (to == s_[v]) return {0, 0};
    return {leave_delta(v) + enter_delta(v, to),
            static_cast<Score>(gamma_[index(v, to)] - gamma_[index(v, s_[v])])};
  }

  void apply(int v, int to) {
    const int from = s_[v];
    if (from == to) return;
    const MoveDelta d = move_delta(v, to);
    score_ += d.score;
    conflicts_ += d.conflicts;
    const int r = rank_[static_cast<std::size_t>(v)];
    --count(from, r);
    ++count(to, r);
    refresh_group(from);
    refresh_group(to);
    s_.set(v, to);
    for (int u : g_->neighbors(v)) {
      --gamma_[index(u, from)];
      ++gamma_[index(u, to)];
    }
  }

 private:
  std::size_t index(int v, int c) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(s_.k()) + static_cast<std::size_t>(c);
  }
  int& count(int c, int r) { return counts_[static_cast<std::size_t>(c) * distinct_.size() + static_cast<std::size_t>(r)]; }

  void refresh_group(int c) {
    const int* row = &counts_[static_cast<std::size_t>(c) * distinct_.size()];
    const int d = static_cast<int>(distinct_.size());
    int r = 0;
    while (r < d && row[r] == 0) ++r;
    if (r == d) {
      top_[static_cast<std::size_t>(c)] = top_less_one_[static_cast<std::size_t>(c)] = 0;
      return;
    }
    top_[static_cast<std::size_t>(c)] = distinct_[static_cast<std::size_t>(r)];
    if (row[r] >= 2) {
      top_less_one_[static_cast<std::size_t>(c)] = distinct_[static_cast<std::size_t>(r)];
      return;
    }
    int r2 = r + 1;
    while (r2 < d && row[r2] == 0) ++r2;
    top_less_one_[static_cast<std::size_t>(c)] = r2 == d ? 0 : distinct_[static_cast<std::size_t>(r2)];
  }

  const WeightedGraph* g_;
  Coloring s_;
  std::vector<Weight> distinct_;  // distinct weights, descending
  std::vector<int> rank_;         // vertex -> index into distinct_
  std::vector<int> counts_;       // k x |distinct_|
  std::vector<int> gamma_;        // n x k
  std::vector<Weight> top_;
  std::vector<Weight> top_less_one_;
  Score score_ = 0;
  Score conflicts_ = 0;
};

/// TabuCol bookkeeping: conflict count and the n x k neighbor-color table.
class ColEval {
 public:
  ColEval(const WeightedGraph& g, Coloring s) : g_(&g), s_(std::move(s)) {
    if (s_.size() != g.size()) throw std::invalid_argument("coloring size differs from graph size");
    gamma_.assign(static_cast<std::size_t>(g.size()) * static_cast<std::size_t>(s_.k()), 0);
    for (int v = 0; v < g.size(); ++v)
      for (int u : g.neighbors(v)) {
        ++gamma_[index(v, s_[u])];
        if (u > v && s_[u] == s_[v]) ++conflicts_;
      }
  }

  const Coloring& coloring() const noexcept { return s_; }
  Score conflicts() const noexcept { return conflicts_; }
  int k() const noexcept { return s_.k(); }
  int neighbor_colors(int v, int c) const { return gamma_[index(v, c)]; }
  bool conflicting(int v) const { return gamma_[index(v, s_[v])] > 0; }
  const int* neighbor_color_row(int v) const { return &gamma_[index(v, 0)]; }

  Score move_delta(int v, int to) const { return gamma_[index(v, to)] - gamma_[index(v, s_[v])]; }

  void apply(int v, int to) {
    const int from = s_[v];
    if (from == to) return;
    conflicts_ += move_delta(v, to);
    s_.set(v, to);
    for (int u : g_->neighbors(v)) {
      --gamma_[index(u, from)];
      ++gamma_[index(u, to)];
    }
  }

 private:
  std::size_t index(int v, int c) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(s_.k()) + static_cast<std::size_t>(c);
  }

  const WeightedGraph* g_;
  Coloring s_;
  std::vector<int> gamma_;
  Score conflicts_ = 0;
};

inline Score col_move_delta(const ColEval& eval, int v, int to) { return eval.move_delta(v, to); }
inline MoveDelta wvcp_move_delta(const WvcpEval& eval, int v, int to) { return eval.move_delta(v, to); }

// ---------------------------------------------------------------------------
// Solution files:  "s <score>" then one "v <vertex 1-based> <color>" per vertex
// ---------------------------------------------------------------------------

inline std::string write_solution(const WeightedGraph& g, const Coloring& s) {
  std::ostringstream out;
  out << "s " << wvcp_score(g, s).score << '\n';
  for (int v = 0; v < s.size(); ++v) out << "v " << v + 1 << ' ' << s[v] << '\n';
  return out.str();
}

/// Parses and validates a solution file against g: every vertex exactly once,
/// coloring legal, score line matching the recomputed score.
inline Coloring read_solution(const WeightedGraph& g, std::string_view text) {
  const int n = g.size();
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  Score declared = -1;
  int max_color = 0;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    std::istringstream in{std::string(lines[i])};
    std::string tag;
    in >> tag;
    if (tag == "s") {
      if (!(in >> declared)) throw ParseError("malformed score line", i + 1);
    } else if (tag == "v") {
      long long v = 0, c = -1;
      if (!(in >> v >> c) || v < 1 || v > n || c < 0) throw ParseError("malformed vertex line", i + 1);
      if (assign[static_cast<std::size_t>(v - 1)] >= 0) throw ParseError("vertex colored twice", i + 1);
      assign[static_cast<std::size_t>(v - 1)] = static_cast<int>(c);
      max_color = std::max(max_color, static_cast<int>(c));
    } else if (tag != "c") {
      throw ParseError("unexpected line", i + 1);
    }
  }
  for (int c : assign)
    if (c < 0) throw ParseError("solution leaves a vertex uncolored", 0);
  Coloring s(std::move(assign), max_color + 1);
  const auto eval = wvcp_score(g, s);
  if (eval.conflicts != 0) throw ParseError("solution is not a legal coloring", 0);
  if (declared >= 0 && declared != eval.score)
    throw ParseError("declared score " + std::to_string(declared) + " differs from " + std::to_string(eval.score), 0);
  return s;
}

/// Re-expresses a legal coloring of a reduced graph on the original vertex
/// ids. Removed vertices are re-inserted in reverse removal order, each into
/// the lowest-id group without neighbors whose heaviest weight already covers
/// it; such a group always exists when the reduction rule held.
inline Coloring lift_coloring(const WeightedGraph& original, const ReductionReport& report, const Coloring& reduced) {
  const int n = original.size();
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  int k = reduced.k();
  for (std::size_t i = 0; i < report.kept_to_original.size(); ++i)
    assign[static_cast<std::size_t>(report.kept_to_original[i])] = reduced[static_cast<int>(i)];
  std::vector<Weight> heaviest(static_cast<std::size_t>(k), 0);
  for (int v = 0; v < n; ++v)
    if (assign[static_cast<std::size_t>(v)] >= 0)
      heaviest[static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])] =
          std::max(heaviest[static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])], original.weight(v));

  for (auto it = report.removed.rbegin(); it != report.removed.rend(); ++it) {
    const int v = *it;
    std::vector<char> blocked(static_cast<std::size_t>(k), 0);
    for (int u : original.neighbors(v))
      if (assign[static_cast<std::size_t>(u)] >= 0) blocked[static_cast<std::size_t>(assign[static_cast<std::size_t>(u)])] = 1;
    int chosen = -1, fallback = -1;
    for (int c = 0; c < k; ++c) {
      if (blocked[static_cast<std::size_t>(c)]) continue;
      if (heaviest[static_cast<std::size_t>(c)] >= original.weight(v)) { chosen = c; break; }
      if (fallback < 0) fallback = c;
    }
    if (chosen < 0) chosen = fallback;
    if (chosen < 0) {
      chosen = k++;
      heaviest.push_back(0);
    }
    assign[static_cast<std::size_t>(v)] = chosen;
    heaviest[static_cast<std::size_t>(chosen)] = std::max(heaviest[static_cast<std::size_t>(chosen)], original.weight(v));
  }
  return Coloring(std::move(assign), k);
}

}  // namespace dlmcol
