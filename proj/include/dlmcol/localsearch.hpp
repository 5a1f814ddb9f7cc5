#pragma once

// Tabu searches: the penalized feasible/infeasible search for WVCP, its
// iterated driver with adaptive penalty, TabuCol for k-COL, and the parallel
// driver applying one of them to every individual of a population.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/graph.hpp"
#include "dlmcol/parallel.hpp"
#include "dlmcol/rng.hpp"

namespace dlmcol {

enum class Problem { wvcp, col };

struct TabuMove {
  std::uint64_t iteration;
  int vertex;
  int to;
  int tenure;
  bool aspiration;
};

struct WvcpSearchOptions {
  double tenure_fraction = 0.2;  ///< tt = L + tenure_fraction * |V|
  int tenure_random_max = 9;     ///< L uniform in [0, tenure_random_max]
  /// Every this many iterations, compare the incremental state with a scratch
  /// evaluation and throw std::logic_error on mismatch. 0 disables.
  std::uint64_t verify_every = 0;
  bool record_moves = false;
};

/// One trajectory of the penalized tabu search. State persists across run()
/// calls so the iterated driver can chain rounds with different penalties
/// while keeping the tabu stamps and the best legal solution.
class WvcpTabuSearch {
 public:
  WvcpTabuSearch(const WeightedGraph& g, Coloring start, WvcpSearchOptions options = {})
      : eval_(g, std::move(start)), options_(options), tabu_until_(static_cast<std::size_t>(g.size()), 0) {
    record_if_better();
  }

  /// Performs `depth` iterations minimizing f + phi * c.
  void run(double phi, std::uint64_t depth, Rng& rng) {
    const WeightedGraph& g = eval_.graph();
    const int n = g.size();
    const int k = eval_.k();
    const int tenure_base = static_cast<int>(options_.tenure_fraction * n);
    const Weight* tops = eval_.group_max_data();

    for (std::uint64_t step = 0; step < depth; ++step, ++iter_) {
      const Score conflicts = eval_.conflicts();
      const Score score = eval_.score();
      double best_value = std::numeric_limits<double>::infinity();
      int best_v = -1, best_c = -1;
      bool best_aspiration = false;
      std::uint64_t ties = 0;

      for (int v = 0; v < n; ++v) {
        const bool tabu = iter_ < tabu_until_[static_cast<std::size_t>(v)];
        const int* row = eval_.neighbor_color_row(v);
        const int from = eval_.coloring()[v];
        const int own = row[from];
        // A frozen vertex can only pass through aspiration, which needs a
        // legal result: impossible if conflicts remain elsewhere.
        if (tabu && conflicts - own > 0) continue;
        const Score leave = eval_.leave_delta(v);
        const Weight w = g.weight(v);
        for (int c = 0; c < k; ++c) {
          if (c == from) continue;
          const Score d_score = leave + (w > tops[c] ? w - tops[c] : 0);
          const Score d_conf = row[c] - own;
          if (tabu && !(conflicts + d_conf == 0 && score + d_score < best_legal_score_)) continue;
          const double value = static_cast<double>(d_score) + phi * static_cast<double>(d_conf);
          if (value < best_value) {
            best_value = value;
            best_v = v;
            best_c = c;
            best_aspiration = tabu;
            ties = 1;
          } else if (value == best_value) {
            ++ties;
            if (rng.uniform(ties) == 0) {
              best_v = v;
              best_c = c;
              best_aspiration = tabu;
            }
          }
        }
      }

      if (best_v >= 0) {
        eval_.apply(best_v, best_c);
        const int tenure = rng.uniform_range(0, options_.tenure_random_max) + tenure_base;
        tabu_until_[static_cast<std::size_t>(best_v)] = iter_ + 1 + static_cast<std::uint64_t>(tenure);
        if (options_.record_moves) moves_.push_back({iter_, best_v, best_c, tenure, best_aspiration});
        record_if_better();
      }
      if (options_.verify_every && (iter_ + 1) % options_.verify_every == 0) verify();
    }
  }

  const Coloring& current() const noexcept { return eval_.coloring(); }
  Score current_score() const noexcept { return eval_.score(); }
  Score current_conflicts() const noexcept { return eval_.conflicts(); }
  const std::optional<Coloring>& best_legal() const noexcept { return best_legal_; }
  Score best_legal_score() const noexcept { return best_legal_score_; }
  std::uint64_t iterations() const noexcept { return iter_; }
  const std::vector<TabuMove>& moves() const noexcept { return moves_; }
  /// Successive best legal scores, in the order they were recorded.
  const std::vector<Score>& legal_history() const noexcept { return legal_history_; }

 private:
  void record_if_better() {
    if (eval_.conflicts() == 0 && eval_.score() < best_legal_score_) {
      best_legal_score_ = eval_.score();
      best_legal_ = eval_.coloring();
      legal_history_.push_back(best_legal_score_);
    }
  }

  void verify() const {
    const auto scratch = wvcp_score(eval_.graph(), eval_.coloring());
    if (scratch.score != eval_.score() || scratch.conflicts != eval_.conflicts())
      throw std::logic_error("incremental WVCP evaluation diverged at iteration " + std::to_string(iter_));
  }

  WvcpEval eval_;
  WvcpSearchOptions options_;
  std::vector<std::uint64_t> tabu_until_;
  std::uint64_t iter_ = 0;
  std::optional<Coloring> best_legal_;
  Score best_legal_score_ = kInfiniteScore;
  std::vector<Score> legal_history_;
  std::vector<TabuMove> moves_;
};

struct TabuSearchOutcome {
  Coloring end;
  std::optional<Coloring> best_legal;
  Score best_legal_score = kInfiniteScore;
};

/// Single penalized tabu search of the given depth.
inline TabuSearchOutcome wvcp_tabu_search(const WeightedGraph& g, const Coloring& s, double phi,
                                          std::uint64_t depth, Rng& rng, WvcpSearchOptions options = {}) {
  if (!(phi > 0)) throw std::invalid_argument("penalty coefficient must be positive");
  WvcpTabuSearch search(g, s, options);
  search.run(phi, depth, rng);
  return {search.current(), search.best_legal(), search.best_legal_score()};
}

/// Outcome of one individual's local search, shared by both problems.
/// For WVCP, best_score is f of the best legal state (kInfiniteScore if none
/// was visited, in which case best == start). For k-COL it is the lowest
/// conflict count reached.
struct LsResult {
  Coloring start;
  Coloring best;
  Score best_score = kInfiniteScore;
  bool found_legal = false;
  std::uint64_t iterations_used = 0;
  std::vector<double> phi_trace;  ///< WVCP: phi after init and after every update
};

struct IteratedLsOptions {
  int max_ls_iters = 10;
  double depth_per_vertex = 10.0;  ///< nbIter_TS = depth_per_vertex * |V|
  WvcpSearchOptions search;
};

/// Iterated penalized tabu search. phi starts at k/(2|V|) * max w; after each
/// round but the last it is halved when the round ends legal and doubled
/// otherwise; the last round runs with phi = 2 * max w.
inline LsResult iterated_wvcp_ls(const WeightedGraph& g, const Coloring& s, Rng& rng, const IteratedLsOptions& options = {}) {
  const int n = g.size();
  const double max_w = static_cast<double>(g.max_weight());
  const auto depth = static_cast<std::uint64_t>(std::max(1.0, options.depth_per_vertex * n));
  WvcpTabuSearch search(g, s, options.search);
  LsResult result;
  result.start = s;
  double phi = static_cast<double>(s.k()) / (2.0 * std::max(n, 1)) * max_w;
  result.phi_trace.push_back(phi);
  for (int round = 0; round < options.max_ls_iters; ++round) {
    if (round == options.max_ls_iters - 1) {
      phi = 2.0 * max_w;
      result.phi_trace.push_back(phi);
    }
    search.run(phi, depth, rng);
    if (round < options.max_ls_iters - 1) {
      phi = search.current_conflicts() == 0 ? phi / 2 : phi * 2;
      result.phi_trace.push_back(phi);
    }
  }
  result.iterations_used = search.iterations();
  if (search.best_legal()) {
    result.best = *search.best_legal();
    result.best_score = search.best_legal_score();
    result.found_legal = true;
  } else {
    result.best = s;
  }
  return result;
}

// ---------------------------------------------------------------------------
// TabuCol
// ---------------------------------------------------------------------------

struct TabucolOptions {
  double alpha = 0.6;  ///< tt = L + alpha * conflicts
  int tenure_random_max = 9;
  double depth_per_vertex = 128.0;
};

struct TabucolOutcome {
  Coloring best;
  Score best_conflicts = 0;
  std::uint64_t iterations = 0;
};

/// Classic TabuCol over conflicting vertices with a (vertex, color) tabu
/// list: after v leaves color c, (v, c) stays tabu for tt iterations. Stops
/// at zero conflicts or after `depth` iterations.
inline TabucolOutcome tabucol(const WeightedGraph& g, const Coloring& s, int k, std::uint64_t depth, Rng& rng,
                              const TabucolOptions& options = {}) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (s.k() != k) throw std::invalid_argument("coloring does not use k slots");
  const int n = g.size();
  ColEval eval(g, s);
  std::vector<std::uint64_t> tabu(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0);
  TabucolOutcome out{eval.coloring(), eval.conflicts(), 0};

  std::uint64_t iter = 0;
  for (; iter < depth && eval.conflicts() > 0; ++iter) {
    const Score conflicts = eval.conflicts();
    Score best_delta = std::numeric_limits<Score>::max();
    int best_v = -1, best_c = -1;
    std::uint64_t ties = 0;
    for (int v = 0; v < n; ++v) {
      const int* row = eval.neighbor_color_row(v);
      const int from = eval.coloring()[v];
      const int own = row[from];
      if (own == 0) continue;
      const std::uint64_t* stamps = &tabu[static_cast<std::size_t>(v) * static_cast<std::size_t>(k)];
      for (int c = 0; c < k; ++c) {
        if (c == from) continue;
        const Score delta = row[c] - own;
        if (iter < stamps[c] && conflicts + delta >= out.best_conflicts) continue;
        if (delta < best_delta) {
          best_delta = delta;
          best_v = v;
          best_c = c;
          ties = 1;
        } else if (delta == best_delta) {
          ++ties;
          if (rng.uniform(ties) == 0) {
            best_v = v;
            best_c = c;
          }
        }
      }
    }
    if (best_v < 0) continue;
    const int from = eval.coloring()[best_v];
    eval.apply(best_v, best_c);
    const int tenure = rng.uniform_range(0, options.tenure_random_max) +
                       static_cast<int>(options.alpha * static_cast<double>(eval.conflicts()));
    tabu[static_cast<std::size_t>(best_v) * static_cast<std::size_t>(k) + static_cast<std::size_t>(from)] =
        iter + 1 + static_cast<std::uint64_t>(tenure);
    if (eval.conflicts() < out.best_conflicts) {
      out.best_conflicts = eval.conflicts();
      out.best = eval.coloring();
    }
  }
  out.iterations = iter;
  return out;
}

// ---------------------------------------------------------------------------
// Population driver
// ---------------------------------------------------------------------------

struct LocalSearchConfig {
  IteratedLsOptions wvcp;
  TabucolOptions col;
};

/// Improves each individual independently. Individual i draws from the
/// stream (seed, local_search, i, generation), so results depend only on
/// (seed, generation, inputs), never on the thread count.
inline std::vector<LsResult> improve_population(const WeightedGraph& g, const std::vector<Coloring>& population,
                                                Problem mode, int threads, std::uint64_t seed,
                                                std::uint64_t generation = 0, const LocalSearchConfig& config = {}) {
  std::vector<LsResult> results(population.size());
  parallel_for(population.size(), threads, [&](std::size_t i) {
    Rng rng = make_stream(seed, StreamTag::local_search, i, generation);
    if (mode == Problem::wvcp) {
      results[i] = iterated_wvcp_ls(g, population[i], rng, config.wvcp);
    } else {
      const int k = population[i].k();
      const auto depth = static_cast<std::uint64_t>(std::max(1.0, config.col.depth_per_vertex * g.size()));
      auto out = tabucol(g, population[i], k, depth, rng, config.col);
      LsResult r;
      r.start = population[i];
      r.best = std::move(out.best);
      r.best_score = out.best_conflicts;
      r.found_legal = out.best_conflicts == 0;
      r.iterations_used = out.iterations;
      results[i] = std::move(r);
    }
  });
  return results;
}

}  // namespace dlmcol
