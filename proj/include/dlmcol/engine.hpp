#pragma once

// The generation loop shared by both problems:
//   local search on every restart point -> best-so-far update ->
//   surrogate training on (restart point, reached fitness) ->
//   distances -> spaced pool update -> K-NN matching -> GPX offspring ->
//   surrogate argmin selection of the next restart points.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/crossover.hpp"
#include "dlmcol/distance.hpp"
#include "dlmcol/graph.hpp"
#include "dlmcol/init.hpp"
#include "dlmcol/localsearch.hpp"
#include "dlmcol/parallel.hpp"
#include "dlmcol/population.hpp"
#include "dlmcol/surrogate.hpp"

namespace dlmcol {

struct RunConfig {
  Problem problem = Problem::wvcp;
  int population = 256;
  int neighbors = 32;            ///< K
  int max_ls_iters = 10;         ///< WVCP rounds of the iterated search
  double depth_per_vertex = 10;  ///< tabu depth = depth_per_vertex * |V|
  double tenure_alpha = 0.2;     ///< WVCP: share of |V|; COL: share of conflicts
  int spacing_divisor = 10;      ///< MS = |V| / spacing_divisor
  int epochs = 20;
  double learning_rate = 1e-3;
  int batch_size = 100;
  std::uint64_t seed = 1;
  double time_limit_s = 0;       ///< 0: no wall-clock limit
  int max_generations = 0;       ///< 0: unbounded
  std::optional<Score> target;   ///< stop once the best fitness reaches this
  int threads = 1;
  bool surrogate = true;
  NetSchedule net = NetSchedule::small;
  bool scalar_bn_affine = false;
  int k = 0;                     ///< COL color count, 0 = greedy bound
  double max_indicator_cells = 2e9;  ///< refuse when p * k * |V| exceeds this
  bool keep_prediction_pairs = false;

  static RunConfig defaults(Problem problem) {
    RunConfig c;
    c.problem = problem;
    if (problem == Problem::col) {
      c.neighbors = 16;
      c.depth_per_vertex = 128;
      c.tenure_alpha = 0.6;
      c.epochs = 5;
    }
    return c;
  }

  /// Parameter values of the original large-population setup.
  static RunConfig paper(Problem problem) {
    RunConfig c = defaults(problem);
    c.population = 20480;
    c.net = problem == Problem::wvcp ? NetSchedule::paper_wvcp : NetSchedule::paper_col;
    return c;
  }

  void validate() const {
    if (population < 2) throw std::invalid_argument("population size must be at least 2");
    if (neighbors < 1 || neighbors >= population) throw std::invalid_argument("K must satisfy 1 <= K < p");
    if (max_ls_iters < 1 || depth_per_vertex <= 0 || spacing_divisor < 1 || epochs < 0 || batch_size < 1 ||
        learning_rate <= 0 || threads < 1 || tenure_alpha < 0 || time_limit_s < 0 || max_generations < 0)
      throw std::invalid_argument("run parameters must be positive");
  }
};

inline const char* to_string(Problem p) { return p == Problem::wvcp ? "wvcp" : "col"; }
inline const char* to_string(NetSchedule s) {
  switch (s) {
    case NetSchedule::small: return "small";
    case NetSchedule::paper_wvcp: return "paper-wvcp";
    case NetSchedule::paper_col: return "paper-col";
  }
  return "?";
}

struct GenerationRecord {
  std::uint64_t generation = 0;
  Score best = kInfiniteScore;         ///< S* fitness after this generation
  Score generation_best = kInfiniteScore;
  double mean_fitness = 0;             ///< population mean after the update (finite members)
  std::size_t legal_results = 0;
  double dist_min = 0, dist_mean = 0, dist_max = 0;
  double loss = std::numeric_limits<double>::quiet_NaN();  ///< last-epoch training loss
  bool training_aborted = false;
  std::size_t prediction_pairs = 0;
  double pred_median_rel_error = std::numeric_limits<double>::quiet_NaN();
  double pred_pearson = std::numeric_limits<double>::quiet_NaN();
  std::size_t spacing_fallback = 0;
  std::size_t newcomers = 0;
  std::size_t offspring_built = 0;
  std::size_t predictions_made = 0;
  std::size_t trainings = 0;
  std::uint64_t ls_iterations = 0;
  double elapsed_s = 0;  ///< wall clock, excluded from the deterministic payload
};

struct PredictionPair {
  std::uint64_t generation;  ///< generation whose local search realized `actual`
  std::size_t individual;
  double predicted;
  double actual;
};

struct RunRecord {
  RunConfig config;
  int n = 0;
  std::size_t m = 0;
  int k = 0;
  int reduced_n = 0;  ///< vertices left after preprocessing, 0 if not reduced
  std::string instance;
  std::vector<GenerationRecord> generations;
  std::optional<Coloring> best;  ///< WVCP: best legal; COL: fewest conflicts
  Score best_score = kInfiniteScore;
  bool legal = false;
  std::string stop_reason;
  std::vector<PredictionPair> prediction_pairs;
  double wall_time_s = 0;
  std::string started_at;
};

/// Thrown when the instance is too large for the configured memory budget.
class SizingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineHooks {
  std::function<void(const Population&, const UpdateStats&)> on_update;
};

namespace detail {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline void distance_stats(const DistanceMatrix& d, GenerationRecord& rec) {
  const std::size_t p = d.rows();
  if (p < 2) return;
  double lo = std::numeric_limits<double>::infinity(), hi = 0, sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double x = d(i, j);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
      ++count;
    }
  rec.dist_min = lo;
  rec.dist_max = hi;
  rec.dist_mean = sum / static_cast<double>(count);
}

/// Generation loop, parameterized by problem through `cfg.problem`.
inline RunRecord run_memetic(const WeightedGraph& g, const RunConfig& cfg, int k, std::vector<Coloring> initial,
                             const EngineHooks& hooks) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  const std::size_t p = initial.size();
  const bool wvcp = cfg.problem == Problem::wvcp;
  RunRecord record;
  record.config = cfg;
  record.n = g.size();
  record.m = g.edge_count();
  record.k = k;

  LocalSearchConfig ls_config;
  ls_config.wvcp.max_ls_iters = cfg.max_ls_iters;
  ls_config.wvcp.depth_per_vertex = cfg.depth_per_vertex;
  ls_config.wvcp.search.tenure_fraction = cfg.tenure_alpha;
  ls_config.col.depth_per_vertex = cfg.depth_per_vertex;
  ls_config.col.alpha = cfg.tenure_alpha;

  std::optional<SurrogateNet<double>> net;
  if (cfg.surrogate) {
    SurrogateHyper hyper;
    hyper.learning_rate = cfg.learning_rate;
    hyper.epochs = cfg.epochs;
    hyper.batch_size = cfg.batch_size;
    hyper.scalar_bn_affine = cfg.scalar_bn_affine;
    net.emplace(g.size(), k, hidden_widths(cfg.net, g.size()), hyper, cfg.seed);
  }

  Population pop;
  pop.members = initial;
  for (const auto& s : pop.members) pop.fitness.push_back(wvcp ? wvcp_score(g, s).score : col_conflicts(g, s));
  pop.dist = distances_within(pop.members, cfg.threads);
  std::vector<Coloring> restart = std::move(initial);
  std::vector<double> pending_predictions;
  const int spacing = minimum_spacing(g.size(), cfg.spacing_divisor);

  for (std::uint64_t gen = 0;; ++gen) {
    GenerationRecord rec;
    rec.generation = gen;

    auto results = improve_population(g, restart, cfg.problem, cfg.threads, cfg.seed, gen, ls_config);
    for (std::size_t i = 0; i < p; ++i) {
      rec.ls_iterations += results[i].iterations_used;
      if (results[i].found_legal) ++rec.legal_results;
      rec.generation_best = std::min(rec.generation_best, results[i].best_score);
      const bool eligible = wvcp ? results[i].found_legal : true;
      if (eligible && results[i].best_score < record.best_score) {
        record.best_score = results[i].best_score;
        record.best = results[i].best;
        record.legal = results[i].found_legal;
      }
    }
    rec.best = record.best_score;

    if (!pending_predictions.empty()) {
      std::vector<double> xs, ys, rel;
      for (std::size_t i = 0; i < p; ++i) {
        if (results[i].best_score >= kInfiniteScore || !std::isfinite(pending_predictions[i])) continue;
        const double actual = static_cast<double>(results[i].best_score);
        xs.push_back(pending_predictions[i]);
        ys.push_back(actual);
        if (actual > 0) rel.push_back(std::abs(pending_predictions[i] - actual) / actual);
        if (cfg.keep_prediction_pairs) record.prediction_pairs.push_back({gen, i, pending_predictions[i], actual});
      }
      rec.prediction_pairs = xs.size();
      rec.pred_pearson = pearson(xs, ys);
      rec.pred_median_rel_error = median(rel);
    }

    if (net) {
      TrainingSet data;
      for (std::size_t i = 0; i < p; ++i) {
        if (results[i].best_score >= kInfiniteScore) continue;
        data.inputs.push_back(results[i].start);
        data.targets.push_back(static_cast<double>(results[i].best_score));
      }
      Rng rng = make_stream(cfg.seed, StreamTag::training, 0, gen);
      const auto report = net->train_generation(data, rng);
      rec.trainings = report.samples ? 1 : 0;
      rec.training_aborted = report.aborted;
      if (!report.epoch_loss.empty()) rec.loss = report.epoch_loss.back();
    }

    const auto distances = pairwise_distances(pop.members, [&] {
      std::vector<Coloring> improved;
      improved.reserve(p);
      for (const auto& r : results) improved.push_back(r.best);
      return improved;
    }(), cfg.threads);
    UpdateStats stats;
    pop = update_population(pop, results, distances, spacing, &stats);
    if (hooks.on_update) hooks.on_update(pop, stats);
    rec.spacing_fallback = stats.admitted_by_fallback;
    rec.newcomers = stats.newcomers;
    {
      double sum = 0;
      std::size_t count = 0;
      for (Score f : pop.fitness)
        if (f < kInfiniteScore) sum += static_cast<double>(f), ++count;
      rec.mean_fitness = count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
    }
    distance_stats(pop.dist, rec);

    std::string stop;
    if (!wvcp && record.best_score == 0) stop = "legal coloring found";
    else if (cfg.target && record.best_score <= *cfg.target) stop = "target reached";
    else if (cfg.max_generations > 0 && gen + 1 >= static_cast<std::uint64_t>(cfg.max_generations)) stop = "generation limit";
    else if (cfg.time_limit_s > 0 && elapsed() >= cfg.time_limit_s) stop = "time limit";

    if (stop.empty()) {
      const auto matches = match_parents(pop, cfg.neighbors);
      auto batch = build_and_select_offspring(pop.members, matches, net ? &*net : nullptr, k, cfg.seed, gen, cfg.threads);
      rec.offspring_built = batch.offspring_built;
      rec.predictions_made = batch.predictions_made;
      restart = std::move(batch.selected);
      pending_predictions = net ? std::move(batch.selected_prediction) : std::vector<double>{};
    }
    rec.elapsed_s = elapsed();
    record.generations.push_back(rec);
    if (!stop.empty()) {
      record.stop_reason = stop;
      break;
    }
  }
  record.wall_time_s = elapsed();
  return record;
}

inline void check_budget(const RunConfig& cfg, int n, int k) {
  const double cells = static_cast<double>(cfg.population) * k * n;
  if (cells > cfg.max_indicator_cells)
    throw SizingError("instance too large: p*k*|V| = " + std::to_string(cfg.population) + "*" + std::to_string(k) + "*" +
                      std::to_string(n) + " = " + std::to_string(static_cast<long long>(cells)) +
                      " indicator cells exceeds the budget of " +
                      std::to_string(static_cast<long long>(cfg.max_indicator_cells)));
}

}  // namespace detail

/// WVCP: greedy randomized initialization fixes k to the largest color count
/// used; then the generation loop until a stop condition triggers.
inline RunRecord run_wvcp(const WeightedGraph& g, RunConfig cfg, const EngineHooks& hooks = {}) {
  cfg.problem = Problem::wvcp;
  cfg.validate();
  if (g.size() == 0) throw std::invalid_argument("empty graph");
  const std::size_t p = static_cast<std::size_t>(cfg.population);
  std::vector<Coloring> initial(p);
  parallel_for(p, cfg.threads, [&](std::size_t i) {
    Rng rng = make_stream(cfg.seed, StreamTag::init, i);
    initial[i] = greedy_wvcp_init(g, rng);
  });
  int k = 1;
  for (const auto& s : initial) k = std::max(k, s.k());
  detail::check_budget(cfg, g.size(), k);
  for (auto& s : initial) s = Coloring(s.assignment(), k);
  return detail::run_memetic(g, cfg, k, std::move(initial), hooks);
}

/// k-COL with a fixed k from uniform random colorings; stops at the first
/// legal coloring or the stop condition. record.legal tells which.
inline RunRecord run_col_fixed_k(const WeightedGraph& g, int k, RunConfig cfg, const EngineHooks& hooks = {}) {
  cfg.problem = Problem::col;
  cfg.k = k;
  cfg.validate();
  if (k < 1) throw std::invalid_argument("k must be positive");
  detail::check_budget(cfg, g.size(), k);
  const std::size_t p = static_cast<std::size_t>(cfg.population);
  std::vector<Coloring> initial(p);
  for (std::size_t i = 0; i < p; ++i) {
    Rng rng = make_stream(cfg.seed, StreamTag::init, i);
    initial[i] = random_col_init(g.size(), k, rng);
  }
  return detail::run_memetic(g, cfg, k, std::move(initial), hooks);
}

struct DescendingResult {
  int best_k = 0;  ///< smallest k with a legal coloring found, 0 if none
  std::vector<std::pair<int, Coloring>> solved;
  std::vector<RunRecord> runs;
};

/// Solves k-COL for decreasing k, starting from cfg.k or, when 0, the color
/// count of a first-fit coloring in degree order. Each k gets the full stop
/// budget of cfg. Ends at the first k without a legal coloring.
inline DescendingResult run_col_descending(const WeightedGraph& g, RunConfig cfg, const EngineHooks& hooks = {}) {
  DescendingResult out;
  int k = cfg.k > 0 ? cfg.k : greedy_degree_coloring(g).colors_used();
  for (; k >= 1; --k) {
    auto rec = run_col_fixed_k(g, k, cfg, hooks);
    const bool ok = rec.legal && rec.best_score == 0;
    if (ok) {
      out.best_k = k;
      out.solved.emplace_back(k, *rec.best);
    }
    out.runs.push_back(std::move(rec));
    if (!ok) break;
  }
  return out;
}

/// run_wvcp on the reduced graph; the best coloring is lifted back so the
/// record describes the original instance.
inline RunRecord run_wvcp_reduced(const WeightedGraph& g, RunConfig cfg, const EngineHooks& hooks = {}) {
  auto [reduced, report] = reduce_graph(g, static_cast<std::size_t>(10) * static_cast<std::size_t>(g.size()));
  RunRecord rec = run_wvcp(reduced, cfg, hooks);
  rec.reduced_n = reduced.size();
  rec.n = g.size();
  rec.m = g.edge_count();
  if (rec.best) {
    Coloring lifted = lift_coloring(g, report, *rec.best);
    const auto sc = wvcp_score(g, lifted);
    if (sc.conflicts != 0 || sc.score != rec.best_score) throw std::logic_error("lifted coloring does not match the reduced score");
    rec.k = std::max(rec.k, lifted.k());
    rec.best = std::move(lifted);
  }
  return rec;
}

}  // namespace dlmcol
