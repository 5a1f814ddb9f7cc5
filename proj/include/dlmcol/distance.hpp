#pragma once

// Set-theoretic partition distance: the minimum number of vertices to move
// between groups to turn one partition into the other. Equivalent to
// n minus a maximum-weight matching on the group overlap matrix.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/parallel.hpp"

namespace dlmcol {

/// Dense row-major integer matrix of distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols, int fill = 0) : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  int operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<int>& values() const noexcept { return values_; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<int> values_;
};

namespace detail {

inline void check_same_vertices(const Coloring& a, const Coloring& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions over different vertex sets");
}

struct OverlapCell {
  int count;
  int row;
  int col;
};

/// Nonzero cells of the overlap matrix, gathered in one pass over the
/// vertices. `scratch` must be zero-filled with at least ka*kb entries and is
/// left zero-filled on return.
inline std::vector<OverlapCell> overlap_cells(const Coloring& a, const Coloring& b, std::vector<int>& scratch) {
  const std::size_t kb = static_cast<std::size_t>(b.k());
  const std::size_t need = static_cast<std::size_t>(a.k()) * kb;
  if (scratch.size() < need) scratch.assign(need, 0);
  std::vector<std::size_t> touched;
  for (int v = 0; v < a.size(); ++v) {
    const std::size_t cell = static_cast<std::size_t>(a[v]) * kb + static_cast<std::size_t>(b[v]);
    if (scratch[cell]++ == 0) touched.push_back(cell);
  }
  std::vector<OverlapCell> cells;
  cells.reserve(touched.size());
  for (std::size_t cell : touched) {
    cells.push_back({scratch[cell], static_cast<int>(cell / kb), static_cast<int>(cell % kb)});
    scratch[cell] = 0;
  }
  return cells;
}

}  // namespace detail

/// Greedy approximation: repeatedly match the largest remaining overlap cell
/// (ties by lowest (row, col)), excluding its row and column. Never below the
/// exact distance.
inline int approx_partition_distance(const Coloring& a, const Coloring& b, std::vector<int>& scratch) {
  detail::check_same_vertices(a, b);
  auto cells = detail::overlap_cells(a, b, scratch);
  std::sort(cells.begin(), cells.end(), [](const detail::OverlapCell& x, const detail::OverlapCell& y) {
    return std::tie(y.count, x.row, x.col) < std::tie(x.count, y.row, y.col);
  });
  std::vector<char> row_used(static_cast<std::size_t>(a.k()), 0), col_used(static_cast<std::size_t>(b.k()), 0);
  int matched = 0;
  for (const auto& c : cells) {
    if (row_used[static_cast<std::size_t>(c.row)] || col_used[static_cast<std::size_t>(c.col)]) continue;
    row_used[static_cast<std::size_t>(c.row)] = col_used[static_cast<std::size_t>(c.col)] = 1;
    matched += c.count;
  }
  return a.size() - matched;
}

inline int approx_partition_distance(const Coloring& a, const Coloring& b) {
  std::vector<int> scratch;
  return approx_partition_distance(a, b, scratch);
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(m^3)). Returns column assigned to each row.
template <typename T>
std::vector<int> hungarian_assignment(const std::vector<std::vector<T>>& cost) {
  const int m = static_cast<int>(cost.size());
  const T inf = std::numeric_limits<T>::max() / 4;
  // 1-based internals; p[j] = row matched to column j.
  std::vector<T> u(static_cast<std::size_t>(m) + 1, 0), v(static_cast<std::size_t>(m) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= m; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<T> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      T delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const T cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                      u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(m), -1);
  for (int j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

/// Exact distance via the Hungarian method on the (padded square) overlap matrix.
inline int exact_partition_distance(const Coloring& a, const Coloring& b) {
  detail::check_same_vertices(a, b);
  const int m = std::max(a.k(), b.k());
  std::vector<std::vector<int>> cost(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), 0));
  for (int v = 0; v < a.size(); ++v) --cost[static_cast<std::size_t>(a[v])][static_cast<std::size_t>(b[v])];
  const auto match = hungarian_assignment(cost);
  int matched = 0;
  for (int i = 0; i < m; ++i) matched -= cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(match[static_cast<std::size_t>(i)])];
  return a.size() - matched;
}

struct PairwiseDistances {
  DistanceMatrix cross;   ///< cross(i, j) = D(population[i], offspring[j])
  DistanceMatrix within;  ///< symmetric, over offspring
};

/// All p*p cross distances and p*(p-1)/2 distances among the offspring.
inline PairwiseDistances pairwise_distances(const std::vector<Coloring>& population, const std::vector<Coloring>& offspring,
                                            int threads) {
  const std::size_t p = population.size();
  const std::size_t q = offspring.size();
  PairwiseDistances out{DistanceMatrix(p, q), DistanceMatrix(q, q)};
  parallel_for(p + q, threads, [&](std::size_t row) {
    std::vector<int> scratch;
    if (row < p) {
      for (std::size_t j = 0; j < q; ++j) out.cross(row, j) = approx_partition_distance(population[row], offspring[j], scratch);
    } else {
      const std::size_t i = row - p;
      for (std::size_t j = i + 1; j < q; ++j) out.within(i, j) = approx_partition_distance(offspring[i], offspring[j], scratch);
    }
  });
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = i + 1; j < q; ++j) out.within(j, i) = out.within(i, j);
  return out;
}

/// Symmetric distance matrix of one set of colorings.
inline DistanceMatrix distances_within(const std::vector<Coloring>& members, int threads) {
  return pairwise_distances({}, members, threads).within;
}

}  // namespace dlmcol
