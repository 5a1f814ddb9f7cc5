#pragma once

// Test helpers. The brute-force routines deliberately share no code with the
// library: they enumerate set partitions and class bijections directly.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <cctype>
#include <string>
#include <vector>

#include "dlmcol/dlmcol.hpp"

namespace testing_support {

using namespace dlmcol;

inline Rng test_rng(std::uint64_t index, std::uint64_t seed = 2024) { return make_stream(seed, StreamTag::test, index); }

/// G(n, density) with weights uniform in [1, max_w].
inline WeightedGraph random_graph(int n, double density, Weight max_w, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < density) edges.emplace_back(u, v);
  std::vector<Weight> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = 1 + static_cast<Weight>(rng.uniform(static_cast<std::uint64_t>(max_w)));
  return WeightedGraph(n, edges, w);
}

inline Coloring random_coloring(int n, int k, Rng& rng) {
  std::vector<int> a(static_cast<std::size_t>(n));
  for (auto& c : a) c = rng.uniform_int(k);
  return Coloring(a, k);
}

/// Score and conflicts straight from the definition.
inline std::pair<Weight, int> naive_score(const WeightedGraph& g, const std::vector<int>& colors) {
  const int k = colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
  std::vector<Weight> top(static_cast<std::size_t>(k), 0);
  for (int v = 0; v < g.size(); ++v) top[static_cast<std::size_t>(colors[static_cast<std::size_t>(v)])] = std::max(top[static_cast<std::size_t>(colors[static_cast<std::size_t>(v)])], g.weight(v));
  int conflicts = 0;
  for (int u = 0; u < g.size(); ++u)
    for (int v = u + 1; v < g.size(); ++v)
      if (g.adjacent(u, v) && colors[static_cast<std::size_t>(u)] == colors[static_cast<std::size_t>(v)]) ++conflicts;
  return {std::accumulate(top.begin(), top.end(), Weight{0}), conflicts};
}

/// Exhaustive WVCP optimum over all set partitions (restricted growth strings).
inline Weight brute_force_wvcp(const WeightedGraph& g) {
  const int n = g.size();
  if (n == 0) return 0;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  Weight best = std::numeric_limits<Weight>::max();
  // recursive enumeration with pruning on conflicts
  std::vector<Weight> top;
  auto rec = [&](auto&& self, int v, int used, Weight partial) -> void {
    if (partial >= best) return;
    if (v == n) {
      best = partial;
      return;
    }
    for (int c = 0; c <= used && c < n; ++c) {
      bool ok = true;
      for (int u = 0; u < v && ok; ++u)
        if (rgs[static_cast<std::size_t>(u)] == c && g.adjacent(u, v)) ok = false;
      if (!ok) continue;
      rgs[static_cast<std::size_t>(v)] = c;
      if (c == used) {
        top.push_back(g.weight(v));
        self(self, v + 1, used + 1, partial + g.weight(v));
        top.pop_back();
      } else {
        const Weight old = top[static_cast<std::size_t>(c)];
        const Weight now = std::max(old, g.weight(v));
        top[static_cast<std::size_t>(c)] = now;
        self(self, v + 1, used, partial + now - old);
        top[static_cast<std::size_t>(c)] = old;
      }
    }
  };
  rec(rec, 0, 0, 0);
  return best;
}

/// Partition distance by trying every bijection between the class lists.
inline int brute_force_distance(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  const int m = std::max(ka, kb);
  std::vector<std::vector<int>> overlap(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), 0));
  for (int v = 0; v < n; ++v) ++overlap[static_cast<std::size_t>(a[static_cast<std::size_t>(v)])][static_cast<std::size_t>(b[static_cast<std::size_t>(v)])];
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  int best_kept = 0;
  do {
    int kept = 0;
    for (int i = 0; i < m; ++i) kept += overlap[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    best_kept = std::max(best_kept, kept);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return n - best_kept;
}

inline WeightedGraph complete_graph(int n, std::vector<Weight> w = {}) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return WeightedGraph(n, e, std::move(w));
}

inline WeightedGraph cycle_graph(int n, std::vector<Weight> w = {}) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return WeightedGraph(n, e, std::move(w));
}

/// Directory holding benchmark instance files, from DLMCOL_INSTANCE_DIR.
inline std::filesystem::path instance_dir() {
  if (const char* env = std::getenv("DLMCOL_INSTANCE_DIR")) return env;
#ifdef DLMCOL_DEFAULT_INSTANCE_DIR
  return DLMCOL_DEFAULT_INSTANCE_DIR;
#else
  return "instances";
#endif
}

struct InstanceFiles {
  std::string graph;
  std::string weights;  ///< empty when no weight file exists
};

/// Looks for <name>.col (or the lower-case name) and an optional .col.w next to it.
inline std::optional<InstanceFiles> find_instance(const std::string& name, bool need_weights) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& stem : {name, lower}) {
    const auto graph = instance_dir() / (stem + ".col");
    if (!std::filesystem::exists(graph)) continue;
    InstanceFiles f{graph.string(), {}};
    const auto w = instance_dir() / (stem + ".col.w");
    if (std::filesystem::exists(w)) f.weights = w.string();
    if (need_weights && f.weights.empty()) continue;
    return f;
  }
  return std::nullopt;
}

}  // namespace testing_support
