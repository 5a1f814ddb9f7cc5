#pragma once

// Weighted graph instances: DIMACS reader/writer and the clique-based
// reduction used as WVCP preprocessing.

#include <algorithm>
#include <cstdint>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlmcol {

using Weight = std::int64_t;

/// Malformed instance text. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Undirected simple graph with strictly positive vertex weights.
/// Immutable once built; vertex ids are 0-based.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Builds from an edge list. Duplicate and reversed edges collapse;
  /// self-loops, out-of-range endpoints and non-positive weights throw.
  WeightedGraph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<Weight> weights = {})
      : n_(n), adjacency_(static_cast<std::size_t>(n)), weights_(std::move(weights)) {
    if (n < 0) throw std::invalid_argument("negative vertex count");
    if (weights_.empty()) weights_.assign(static_cast<std::size_t>(n), 1);
    if (static_cast<int>(weights_.size()) != n) throw std::invalid_argument("weight count differs from vertex count");
    for (Weight w : weights_)
      if (w < 1) throw std::invalid_argument("vertex weights must be positive");
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop");
      adjacency_[static_cast<std::size_t>(u)].push_back(v);
      adjacency_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : adjacency_) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      edge_count_ += nb.size();
    }
    edge_count_ /= 2;
  }

  int size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size()); }
  Weight weight(int v) const { return weights_[static_cast<std::size_t>(v)]; }
  const std::vector<Weight>& weights() const noexcept { return weights_; }
  Weight max_weight() const noexcept {
    return weights_.empty() ? 0 : *std::max_element(weights_.begin(), weights_.end());
  }
  int max_degree() const noexcept {
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  bool adjacent(int u, int v) const {
    const auto& nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edges as (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int u = 0; u < n_; ++u)
      for (int v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Subgraph induced by `keep` (original ids, any order); vertex i of the
  /// result is keep[i].
  WeightedGraph induced(const std::vector<int>& keep) const {
    std::vector<int> position(static_cast<std::size_t>(n_), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) position[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
    std::vector<std::pair<int, int>> sub_edges;
    std::vector<Weight> sub_weights;
    sub_weights.reserve(keep.size());
    for (int v : keep) {
      sub_weights.push_back(weight(v));
      for (int u : neighbors(v)) {
        const int pu = position[static_cast<std::size_t>(u)];
        const int pv = position[static_cast<std::size_t>(v)];
        if (pu >= 0 && pv < pu) sub_edges.emplace_back(pv, pu);
      }
    }
    return WeightedGraph(static_cast<int>(keep.size()), sub_edges, std::move(sub_weights));
  }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.weights_ == b.weights_ && a.adjacency_ == b.adjacency_;
  }

 private:
  int n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Weight> weights_;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace detail

/// Reads DIMACS `.col` text (`c` comments, one `p edge n m` header, `e u v`
/// lines with 1-based ids) and an optional weight file holding one positive
/// integer per line (whitespace-separated also works). Without weights every vertex weighs 1.
inline WeightedGraph parse_dimacs(std::string_view text, std::string_view weights_text = {}) {
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = lines[i];
    if (detail::blank(line)) continue;
    std::istringstream in{std::string(line)};
    std::string tag;
    in >> tag;
    if (tag == "c") continue;
    if (tag == "p") {
      if (n >= 0) throw ParseError("duplicate problem line", lineno);
      std::string format;
      long long nv = -1, ne = -1;
      if (!(in >> format >> nv >> ne) || (format != "edge" && format != "col") || nv < 0 || ne < 0)
        throw ParseError("malformed header, expected 'p edge <n> <m>'", lineno);
      n = static_cast<int>(nv);
      edges.reserve(static_cast<std::size_t>(ne));
    } else if (tag == "e") {
      if (n < 0) throw ParseError("edge before problem line", lineno);
      long long u = 0, v = 0;
      if (!(in >> u >> v)) throw ParseError("malformed edge line", lineno);
      if (u < 1 || v < 1 || u > n || v > n) throw ParseError("edge endpoint out of range [1, " + std::to_string(n) + "]", lineno);
      if (u == v) throw ParseError("self-loop on vertex " + std::to_string(u), lineno);
      edges.emplace_back(static_cast<int>(u - 1), static_cast<int>(v - 1));
    } else if (tag == "n") {
      // node descriptor lines of some generators; ignored
    } else {
      throw ParseError("unexpected line '" + std::string(line) + "'", lineno);
    }
  }
  if (n < 0) throw ParseError("missing problem line", 0);

  std::vector<Weight> weights;
  if (!weights_text.empty()) {
    const auto wlines = detail::split_lines(weights_text);
    for (std::size_t i = 0; i < wlines.size(); ++i) {
      if (detail::blank(wlines[i])) continue;
      std::istringstream in{std::string(wlines[i])};
      // one per line is the usual layout; several on a line are accepted too
      std::string tok;
      while (in >> tok) {
        long long w = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("weight file: bad integer '" + tok + "'", i + 1);
        if (w < 1) throw ParseError("weight file: non-positive weight " + std::to_string(w), i + 1);
        weights.push_back(w);
      }
    }
    if (static_cast<int>(weights.size()) != n)
      throw ParseError("weight file has " + std::to_string(weights.size()) + " entries, expected " + std::to_string(n), 0);
  }
  return WeightedGraph(n, edges, std::move(weights));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline WeightedGraph load_dimacs(const std::string& path, const std::string& weights_path = {}) {
  const std::string text = read_text_file(path);
  const std::string wtext = weights_path.empty() ? std::string() : read_text_file(weights_path);
  try {
    return parse_dimacs(text, wtext);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

inline std::string write_dimacs(const WeightedGraph& g) {
  std::ostringstream out;
  out << "p edge " << g.size() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
  return out.str();
}

inline std::string write_weights(const WeightedGraph& g) {
  std::ostringstream out;
  for (Weight w : g.weights()) out << w << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Clique-based reduction
// ---------------------------------------------------------------------------

struct ReductionReport {
  std::vector<int> removed;           ///< original ids, in removal order
  std::vector<int> kept_to_original;  ///< reduced id -> original id
  std::size_t cliques_found = 0;
  int passes = 0;
  bool budget_exhausted = false;
};

namespace detail {

/// Greedy maximal clique grown from `seed`, candidates by degree desc then id.
inline std::vector<int> grow_clique(const WeightedGraph& g, int seed) {
  std::vector<int> candidates = g.neighbors(seed);
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a < b;
  });
  std::vector<int> clique{seed};
  for (int c : candidates) {
    bool ok = true;
    for (int m : clique)
      if (!g.adjacent(c, m)) { ok = false; break; }
    if (ok) clique.push_back(c);
  }
  return clique;
}

}  // namespace detail

/// Removes every vertex i (with degree d >= 1) for which some enumerated
/// clique of size d+1 has all weights strictly above w_i. Any clique of size
/// >= d+1 contributes its best (d+1)-subclique, whose minimum weight is its
/// (d+1)-th largest weight. Passes repeat until nothing changes or the clique
/// budget is spent. Removal inside a pass is ordered by weight ascending so
/// that re-inserting in reverse order always finds the supporting clique.
inline std::pair<WeightedGraph, ReductionReport> reduce_graph(const WeightedGraph& g, std::size_t clique_budget) {
  ReductionReport report;
  std::vector<int> alive(static_cast<std::size_t>(g.size()));
  std::iota(alive.begin(), alive.end(), 0);
  WeightedGraph current = g;

  while (true) {
    ++report.passes;
    const int n = current.size();
    // best_min[l] = largest minimum weight over found cliques of size l.
    std::vector<Weight> best_min(static_cast<std::size_t>(n) + 2, 0);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return current.degree(a) != current.degree(b) ? current.degree(a) > current.degree(b) : a < b;
    });
    for (int v : order) {
      if (current.degree(v) == 0) continue;
      if (report.cliques_found >= clique_budget) {
        report.budget_exhausted = true;
        break;
      }
      auto clique = detail::grow_clique(current, v);
      ++report.cliques_found;
      std::vector<Weight> ws;
      ws.reserve(clique.size());
      for (int m : clique) ws.push_back(current.weight(m));
      std::sort(ws.begin(), ws.end(), std::greater<>());
      for (std::size_t l = 2; l <= ws.size(); ++l) best_min[l] = std::max(best_min[l], ws[l - 1]);
    }

    std::vector<int> doomed;
    for (int v = 0; v < n; ++v) {
      const int d = current.degree(v);
      if (d >= 1 && current.weight(v) < best_min[static_cast<std::size_t>(d) + 1]) doomed.push_back(v);
    }
    if (doomed.empty()) break;
    std::stable_sort(doomed.begin(), doomed.end(),
                     [&](int a, int b) { return current.weight(a) < current.weight(b); });
    std::vector<char> gone(static_cast<std::size_t>(n), 0);
    for (int v : doomed) {
      gone[static_cast<std::size_t>(v)] = 1;
      report.removed.push_back(alive[static_cast<std::size_t>(v)]);
    }
    std::vector<int> keep, next_alive;
    for (int v = 0; v < n; ++v)
      if (!gone[static_cast<std::size_t>(v)]) {
        keep.push_back(v);
        next_alive.push_back(alive[static_cast<std::size_t>(v)]);
      }
    current = current.induced(keep);
    alive = std::move(next_alive);
    if (report.budget_exhausted) break;
  }
  report.kept_to_original = alive;
  return {std::move(current), std::move(report)};
}

}  // namespace dlmcol
