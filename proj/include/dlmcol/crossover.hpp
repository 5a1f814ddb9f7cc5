#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/parallel.hpp"
#include "dlmcol/population.hpp"
#include "dlmcol/rng.hpp"
#include "dlmcol/surrogate.hpp"

namespace dlmcol {

/// Greedy partition crossover. Round r (1-based) takes, from parent1 on odd
/// rounds and parent2 on even rounds, the group with the most still-unassigned
/// vertices (ties: lowest id), gives those vertices color r-1 and strikes them
/// from both parents. After k rounds, leftovers get a uniform random color.
inline Coloring gpx(const Coloring& parent1, const Coloring& parent2, int k, Rng& rng) {
  if (parent1.size() != parent2.size()) throw std::invalid_argument("parents over different vertex sets");
  if (parent1.k() > k || parent2.k() > k) throw std::invalid_argument("parent uses more than k slots");
  const int n = parent1.size();
  const Coloring* parents[2] = {&parent1, &parent2};

  std::vector<std::vector<int>> members[2];
  std::vector<int> remaining[2];
  for (int side = 0; side < 2; ++side) {
    members[side].assign(static_cast<std::size_t>(k), {});
    remaining[side].assign(static_cast<std::size_t>(k), 0);
    for (int v = 0; v < n; ++v) {
      const int c = (*parents[side])[v];
      members[side][static_cast<std::size_t>(c)].push_back(v);
      ++remaining[side][static_cast<std::size_t>(c)];
    }
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  int left = n;
  for (int round = 0; round < k && left > 0; ++round) {
    const int side = round % 2;
    const auto& counts = remaining[side];
    const int pick = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[static_cast<std::size_t>(pick)] == 0) break;
    for (int v : members[side][static_cast<std::size_t>(pick)]) {
      if (assign[static_cast<std::size_t>(v)] >= 0) continue;
      assign[static_cast<std::size_t>(v)] = round;
      --left;
      --remaining[0][static_cast<std::size_t>(parent1[v])];
      --remaining[1][static_cast<std::size_t>(parent2[v])];
    }
  }
  for (int& c : assign)
    if (c < 0) c = rng.uniform_int(k);
  return Coloring(std::move(assign), k);
}

struct OffspringBatch {
  std::vector<Coloring> selected;             ///< S^O_i, one per individual
  std::vector<int> selected_index;            ///< j chosen among the K candidates
  std::vector<std::vector<double>> predicted; ///< surrogate output per candidate (empty without surrogate)
  std::vector<double> selected_prediction;    ///< NaN without surrogate
  std::size_t offspring_built = 0;
  std::size_t predictions_made = 0;
};

/// Index of the smallest value, ties to the lowest index.
inline int argmin_first(const std::vector<double>& values) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(values.size()); ++j)
    if (values[static_cast<std::size_t>(j)] < values[static_cast<std::size_t>(best)]) best = j;
  return best;
}

/// Builds K GPX offspring per individual (individual first, partner second)
/// and keeps the one with the lowest predicted score. With net == nullptr the
/// kept offspring is chosen uniformly at random instead. Offspring
/// construction draws from (seed, crossover, i, generation) and the random
/// choice from a separate selection stream, so both modes build identical
/// candidates.
template <typename Scalar>
OffspringBatch build_and_select_offspring(const std::vector<Coloring>& members, const std::vector<std::vector<int>>& matches,
                                          const SurrogateNet<Scalar>* net, int k, std::uint64_t seed,
                                          std::uint64_t generation, int threads) {
  const std::size_t p = members.size();
  if (matches.size() != p) throw std::invalid_argument("one partner list per individual required");
  const std::size_t K = p ? matches.front().size() : 0;
  std::vector<Coloring> candidates(p * K);
  parallel_for(p, threads, [&](std::size_t i) {
    if (matches[i].size() != K) throw std::invalid_argument("partner lists differ in length");
    Rng rng = make_stream(seed, StreamTag::crossover, i, generation);
    for (std::size_t j = 0; j < K; ++j)
      candidates[i * K + j] = gpx(members[i], members[static_cast<std::size_t>(matches[i][j])], k, rng);
  });

  OffspringBatch out;
  out.offspring_built = candidates.size();
  out.selected.resize(p);
  out.selected_index.assign(p, 0);
  out.selected_prediction.assign(p, std::numeric_limits<double>::quiet_NaN());
  if (net) {
    const auto scores = net->predict_batch(candidates, threads);
    out.predictions_made = scores.size();
    out.predicted.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
      out.predicted[i].assign(scores.begin() + static_cast<std::ptrdiff_t>(i * K),
                              scores.begin() + static_cast<std::ptrdiff_t>((i + 1) * K));
      out.selected_index[i] = argmin_first(out.predicted[i]);
      out.selected_prediction[i] = out.predicted[i][static_cast<std::size_t>(out.selected_index[i])];
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      Rng rng = make_stream(seed, StreamTag::selection, i, generation);
      out.selected_index[i] = rng.uniform_int(static_cast<int>(K));
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    out.selected[i] = std::move(candidates[i * K + static_cast<std::size_t>(out.selected_index[i])]);
  return out;
}

}  // namespace dlmcol
