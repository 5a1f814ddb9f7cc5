#pragma once

// JSON persistence of run records. The document separates a deterministic
// payload from wall-clock metadata: everything outside "metadata" is a pure
// function of (instance, configuration, seed) when the run is bounded by a
// generation count.

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dlmcol/engine.hpp"

namespace dlmcol {

inline constexpr int kRecordSchemaVersion = 1;

namespace detail {

inline nlohmann::json real_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
inline double real_from(const nlohmann::json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }
inline nlohmann::json score_or_null(Score s) { return s >= kInfiniteScore ? nlohmann::json(nullptr) : nlohmann::json(s); }
inline Score score_from(const nlohmann::json& j) { return j.is_null() ? kInfiniteScore : j.get<Score>(); }

inline NetSchedule schedule_from(const std::string& s) {
  if (s == "small") return NetSchedule::small;
  if (s == "paper-wvcp") return NetSchedule::paper_wvcp;
  if (s == "paper-col") return NetSchedule::paper_col;
  throw std::invalid_argument("unknown network schedule '" + s + "'");
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c) {
  return {
      {"problem", to_string(c.problem)},
      {"population", c.population},
      {"neighbors", c.neighbors},
      {"max_ls_iters", c.max_ls_iters},
      {"depth_per_vertex", c.depth_per_vertex},
      {"tenure_alpha", c.tenure_alpha},
      {"spacing_divisor", c.spacing_divisor},
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
      {"time_limit_s", c.time_limit_s},
      {"max_generations", c.max_generations},
      {"target", c.target ? nlohmann::json(*c.target) : nlohmann::json(nullptr)},
      {"threads", c.threads},
      {"surrogate", c.surrogate},
      {"net", to_string(c.net)},
      {"scalar_bn_affine", c.scalar_bn_affine},
      {"k", c.k},
  };
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.problem = j.at("problem").get<std::string>() == "col" ? Problem::col : Problem::wvcp;
  c.population = j.at("population");
  c.neighbors = j.at("neighbors");
  c.max_ls_iters = j.at("max_ls_iters");
  c.depth_per_vertex = j.at("depth_per_vertex");
  c.tenure_alpha = j.at("tenure_alpha");
  c.spacing_divisor = j.at("spacing_divisor");
  c.epochs = j.at("epochs");
  c.learning_rate = j.at("learning_rate");
  c.batch_size = j.at("batch_size");
  c.seed = j.at("seed");
  c.time_limit_s = j.at("time_limit_s");
  c.max_generations = j.at("max_generations");
  if (!j.at("target").is_null()) c.target = j.at("target").get<Score>();
  c.threads = j.at("threads");
  c.surrogate = j.at("surrogate");
  c.net = detail::schedule_from(j.at("net"));
  c.scalar_bn_affine = j.at("scalar_bn_affine");
  c.k = j.at("k");
  return c;
}

inline nlohmann::json generation_to_json(const GenerationRecord& g) {
  return {
      {"generation", g.generation},
      {"best", detail::score_or_null(g.best)},
      {"generation_best", detail::score_or_null(g.generation_best)},
      {"mean_fitness", detail::real_or_null(g.mean_fitness)},
      {"legal_results", g.legal_results},
      {"dist_min", g.dist_min},
      {"dist_mean", g.dist_mean},
      {"dist_max", g.dist_max},
      {"loss", detail::real_or_null(g.loss)},
      {"training_aborted", g.training_aborted},
      {"prediction_pairs", g.prediction_pairs},
      {"pred_median_rel_error", detail::real_or_null(g.pred_median_rel_error)},
      {"pred_pearson", detail::real_or_null(g.pred_pearson)},
      {"spacing_fallback", g.spacing_fallback},
      {"newcomers", g.newcomers},
      {"offspring_built", g.offspring_built},
      {"predictions_made", g.predictions_made},
      {"trainings", g.trainings},
      {"ls_iterations", g.ls_iterations},
  };
}

inline GenerationRecord generation_from_json(const nlohmann::json& j) {
  GenerationRecord g;
  g.generation = j.at("generation");
  g.best = detail::score_from(j.at("best"));
  g.generation_best = detail::score_from(j.at("generation_best"));
  g.mean_fitness = detail::real_from(j.at("mean_fitness"));
  g.legal_results = j.at("legal_results");
  g.dist_min = j.at("dist_min");
  g.dist_mean = j.at("dist_mean");
  g.dist_max = j.at("dist_max");
  g.loss = detail::real_from(j.at("loss"));
  g.training_aborted = j.at("training_aborted");
  g.prediction_pairs = j.at("prediction_pairs");
  g.pred_median_rel_error = detail::real_from(j.at("pred_median_rel_error"));
  g.pred_pearson = detail::real_from(j.at("pred_pearson"));
  g.spacing_fallback = j.at("spacing_fallback");
  g.newcomers = j.at("newcomers");
  g.offspring_built = j.at("offspring_built");
  g.predictions_made = j.at("predictions_made");
  g.trainings = j.at("trainings");
  g.ls_iterations = j.at("ls_iterations");
  return g;
}

inline nlohmann::json record_to_json(const RunRecord& r) {
  nlohmann::json gens = nlohmann::json::array();
  nlohmann::json elapsed = nlohmann::json::array();
  for (const auto& g : r.generations) {
    gens.push_back(generation_to_json(g));
    elapsed.push_back(g.elapsed_s);
  }
  nlohmann::json assignment = nullptr;
  if (r.best) assignment = r.best->assignment();
  return {
      {"schema_version", kRecordSchemaVersion},
      {"config", config_to_json(r.config)},
      {"instance", {{"name", r.instance}, {"n", r.n}, {"m", r.m}, {"k", r.k}, {"reduced_n", r.reduced_n}}},
      {"generations", gens},
      {"result",
       {{"best_score", detail::score_or_null(r.best_score)},
        {"legal", r.legal},
        {"stop_reason", r.stop_reason},
        {"best_assignment", assignment}}},
      {"metadata", {{"wall_time_s", r.wall_time_s}, {"started_at", r.started_at}, {"generation_elapsed_s", elapsed}}},
  };
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kRecordSchemaVersion) throw std::runtime_error("unsupported record schema version");
  RunRecord r;
  r.config = config_from_json(j.at("config"));
  const auto& inst = j.at("instance");
  r.instance = inst.at("name");
  r.n = inst.at("n");
  r.m = inst.at("m");
  r.k = inst.at("k");
  r.reduced_n = inst.at("reduced_n");
  const auto& meta = j.at("metadata");
  const auto& elapsed = meta.at("generation_elapsed_s");
  for (std::size_t i = 0; i < j.at("generations").size(); ++i) {
    auto g = generation_from_json(j.at("generations")[i]);
    if (i < elapsed.size()) g.elapsed_s = elapsed[i];
    r.generations.push_back(g);
  }
  const auto& res = j.at("result");
  r.best_score = detail::score_from(res.at("best_score"));
  r.legal = res.at("legal");
  r.stop_reason = res.at("stop_reason");
  if (!res.at("best_assignment").is_null()) {
    auto assign = res.at("best_assignment").get<std::vector<int>>();
    r.best = Coloring(std::move(assign), std::max(r.k, 1));
  }
  r.wall_time_s = meta.at("wall_time_s");
  r.started_at = meta.at("started_at");
  return r;
}

/// The record without its wall-clock metadata.
inline nlohmann::json deterministic_payload(const nlohmann::json& record) {
  nlohmann::json copy = record;
  copy.erase("metadata");
  return copy;
}

inline void write_run_record(const RunRecord& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << record_to_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline RunRecord read_run_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return record_from_json(nlohmann::json::parse(in));
}

}  // namespace dlmcol
