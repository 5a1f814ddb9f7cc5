#pragma once

// Distance-and-quality pool update with minimum spacing, and nearest
// neighbor parent matching.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/distance.hpp"
#include "dlmcol/localsearch.hpp"

namespace dlmcol {

struct Population {
  std::vector<Coloring> members;
  std::vector<Score> fitness;
  DistanceMatrix dist;
  std::uint64_t generation = 0;

  std::size_t size() const noexcept { return members.size(); }
};

/// Minimum spacing floor(|V| / divisor).
inline int minimum_spacing(int n, int divisor = 10) { return n / divisor; }

struct UpdateStats {
  std::size_t admitted_by_rule = 0;
  std::size_t admitted_by_fallback = 0;
  std::size_t newcomers = 0;
  /// For each new member, whether the spacing rule admitted it.
  std::vector<char> by_rule;
};

/// Merges members and the improved colorings into a new population of the
/// same size. Candidates are ranked by fitness (ties: incumbents first, then
/// lower index) and admitted greedily when their distance to every admitted
/// individual exceeds `spacing`. If fewer than p qualify, the best remaining
/// candidates fill the rest regardless of spacing.
inline Population update_population(const Population& pop, const std::vector<LsResult>& improved,
                                    const PairwiseDistances& distances, int spacing, UpdateStats* stats = nullptr) {
  const std::size_t p = pop.size();
  if (improved.size() != p) throw std::invalid_argument("improved batch size differs from population size");
  const std::size_t total = 2 * p;

  auto fitness_of = [&](std::size_t c) { return c < p ? pop.fitness[c] : improved[c - p].best_score; };
  auto distance = [&](std::size_t a, std::size_t b) -> int {
    if (a > b) std::swap(a, b);
    if (b < p) return pop.dist(a, b);
    if (a < p) return distances.cross(a, b - p);
    return distances.within(a - p, b - p);
  };

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness_of(a) < fitness_of(b); });

  std::vector<std::size_t> admitted;
  std::vector<char> by_rule;
  std::vector<char> taken(total, 0);
  admitted.reserve(p);
  for (std::size_t c : order) {
    if (admitted.size() == p) break;
    bool spaced = true;
    for (std::size_t a : admitted)
      if (distance(a, c) <= spacing) { spaced = false; break; }
    if (spaced) {
      admitted.push_back(c);
      by_rule.push_back(1);
      taken[c] = 1;
    }
  }
  const std::size_t rule_count = admitted.size();
  for (std::size_t c : order) {
    if (admitted.size() == p) break;
    if (taken[c]) continue;
    admitted.push_back(c);
    by_rule.push_back(0);
    taken[c] = 1;
  }

  Population next;
  next.generation = pop.generation + 1;
  next.members.reserve(p);
  next.fitness.reserve(p);
  next.dist = DistanceMatrix(p, p);
  for (std::size_t c : admitted) {
    next.members.push_back(c < p ? pop.members[c] : improved[c - p].best);
    next.fitness.push_back(fitness_of(c));
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) next.dist(i, j) = next.dist(j, i) = distance(admitted[i], admitted[j]);

  if (stats) {
    stats->admitted_by_rule = rule_count;
    stats->admitted_by_fallback = p - rule_count;
    stats->newcomers = static_cast<std::size_t>(std::count_if(admitted.begin(), admitted.end(), [&](std::size_t c) { return c >= p; }));
    stats->by_rule = std::move(by_rule);
  }
  return next;
}

/// For each individual, the K others at smallest distance (ties: lower index).
inline std::vector<std::vector<int>> match_parents(const DistanceMatrix& dist, int K) {
  const std::size_t p = dist.rows();
  if (K < 1 || static_cast<std::size_t>(K) >= p) throw std::invalid_argument("K must be in [1, p)");
  std::vector<std::vector<int>> matches(p);
  std::vector<int> others;
  for (std::size_t i = 0; i < p; ++i) {
    others.clear();
    for (std::size_t j = 0; j < p; ++j)
      if (j != i) others.push_back(static_cast<int>(j));
    auto closer = [&](int a, int b) {
      const int da = dist(i, static_cast<std::size_t>(a)), db = dist(i, static_cast<std::size_t>(b));
      return da != db ? da < db : a < b;
    };
    std::partial_sort(others.begin(), others.begin() + K, others.end(), closer);
    matches[i].assign(others.begin(), others.begin() + K);
  }
  return matches;
}

inline std::vector<std::vector<int>> match_parents(const Population& pop, int K) { return match_parents(pop.dist, K); }

}  // namespace dlmcol
