#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/graph.hpp"
#include "dlmcol/rng.hpp"

namespace dlmcol {

/// Randomized greedy WVCP construction. Vertices are taken by weight desc,
/// degree desc, id asc; each picks uniformly among the already opened colors
/// that stay conflict-free, or opens a new one. The result is legal and uses
/// exactly colors_used() == k slots.
inline Coloring greedy_wvcp_init(const WeightedGraph& g, Rng& rng) {
  const int n = g.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.weight(a) != g.weight(b)) return g.weight(a) > g.weight(b);
    if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
    return a < b;
  });

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> blocked_stamp;  // per color, last vertex that saw it blocked
  std::vector<int> allowed;
  int used = 0;
  for (int v : order) {
    for (int u : g.neighbors(v)) {
      const int c = assign[static_cast<std::size_t>(u)];
      if (c >= 0) blocked_stamp[static_cast<std::size_t>(c)] = v;
    }
    allowed.clear();
    for (int c = 0; c < used; ++c)
      if (blocked_stamp[static_cast<std::size_t>(c)] != v) allowed.push_back(c);
    if (allowed.empty()) {
      assign[static_cast<std::size_t>(v)] = used++;
      blocked_stamp.push_back(-1);
    } else {
      assign[static_cast<std::size_t>(v)] = allowed[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(allowed.size())))];
    }
  }
  return Coloring(std::move(assign), std::max(used, 1));
}

/// Each vertex colored uniformly in [0, k).
inline Coloring random_col_init(int n, int k, Rng& rng) {
  std::vector<int> assign(static_cast<std::size_t>(n));
  for (int& c : assign) c = rng.uniform_int(k);
  return Coloring(std::move(assign), k);
}

/// Deterministic first-fit coloring in degree-descending order (ties by id).
/// Used as the starting k of the descending k-COL driver.
inline Coloring greedy_degree_coloring(const WeightedGraph& g) {
  const int n = g.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> stamp(static_cast<std::size_t>(n) + 1, -1);
  int used = 0;
  for (int v : order) {
    for (int u : g.neighbors(v))
      if (assign[static_cast<std::size_t>(u)] >= 0) stamp[static_cast<std::size_t>(assign[static_cast<std::size_t>(u)])] = v;
    int c = 0;
    while (stamp[static_cast<std::size_t>(c)] == v) ++c;
    assign[static_cast<std::size_t>(v)] = c;
    used = std::max(used, c + 1);
  }
  return Coloring(std::move(assign), std::max(used, 1));
}

}  // namespace dlmcol
