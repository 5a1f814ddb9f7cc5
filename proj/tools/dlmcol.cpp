// dlmcol command-line front end.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlmcol/bench.hpp"
#include "dlmcol/dlmcol.hpp"
#include "dlmcol/record.hpp"

using namespace dlmcol;

namespace {

struct RunFlags {
  std::string instance;
  std::string weights;
  std::optional<int> pop, neighbors, epochs, generations, threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit;
  std::optional<Score> target;
  std::string net;
  bool no_surrogate = false;
  bool paper_config = false;
  bool no_reduce = false;
  std::string out;
  std::string solution;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool with_weights) {
  app->add_option("--instance", f.instance, "DIMACS graph file")->required()->check(CLI::ExistingFile);
  if (with_weights) app->add_option("--weights", f.weights, "vertex weight file (one weight per line)")->check(CLI::ExistingFile);
  app->add_option("--pop", f.pop, "population size p");
  app->add_option("--neighbors", f.neighbors, "partners per individual K");
  app->add_option("--epochs", f.epochs, "surrogate training epochs per generation");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds");
  app->add_option("--generations", f.generations, "generation limit");
  app->add_option("--target", f.target, "stop once the best score reaches this value");
  app->add_option("--threads", f.threads, "worker threads (default: DLMCOL_THREADS or all cores)");
  app->add_option("--net", f.net, "surrogate size")->check(CLI::IsMember({"small", "paper"}));
  app->add_flag("--no-surrogate", f.no_surrogate, "pick offspring at random instead of by prediction");
  app->add_flag("--paper-config", f.paper_config, "start from the large-machine parameter set (p=20480)");
  app->add_option("--out", f.out, "write the JSON run record here");
  app->add_option("--solution", f.solution, "write the best coloring here");
}

RunConfig build_config(const RunFlags& f, Problem problem) {
  RunConfig c = f.paper_config ? RunConfig::paper(problem) : RunConfig::defaults(problem);
  c.threads = default_thread_count();
  if (f.pop) {
    c.population = *f.pop;
    if (!f.neighbors) c.neighbors = std::min(c.neighbors, std::max(1, c.population - 1));
  }
  if (f.neighbors) c.neighbors = *f.neighbors;
  if (f.epochs) c.epochs = *f.epochs;
  if (f.seed) c.seed = *f.seed;
  if (f.time_limit) c.time_limit_s = *f.time_limit;
  if (f.generations) c.max_generations = *f.generations;
  if (f.target) c.target = *f.target;
  if (f.threads) c.threads = *f.threads;
  if (f.net == "small") c.net = NetSchedule::small;
  if (f.net == "paper") c.net = problem == Problem::wvcp ? NetSchedule::paper_wvcp : NetSchedule::paper_col;
  c.surrogate = !f.no_surrogate;
  if (c.time_limit_s <= 0 && c.max_generations <= 0 && !c.target)
    throw std::invalid_argument("give --time-limit, --generations or --target so the run can stop");
  c.validate();
  return c;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string score_text(Score s) { return s >= kInfiniteScore ? "none" : std::to_string(s); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

RunRecord solve_wvcp(const WeightedGraph& g, const RunConfig& cfg, bool reduce) {
  return reduce ? run_wvcp_reduced(g, cfg) : run_wvcp(g, cfg);
}

void finish(RunRecord& rec, const RunFlags& f, const WeightedGraph& g) {
  rec.instance = std::filesystem::path(f.instance).filename().string();
  rec.started_at = now_iso();
  if (!f.out.empty()) write_run_record(rec, f.out);
  if (!f.solution.empty() && rec.best) write_text(f.solution, write_solution(g, *rec.best));
}

int cmd_solve_wvcp(const RunFlags& f) {
  const auto g = load_dimacs(f.instance, f.weights);
  const auto cfg = build_config(f, Problem::wvcp);
  auto rec = solve_wvcp(g, cfg, !f.no_reduce);
  finish(rec, f, g);
  std::cout << "best " << score_text(rec.best_score) << " legal " << (rec.legal ? "yes" : "no") << " k " << rec.k
            << " generations " << rec.generations.size() << " stop '" << rec.stop_reason << "' time "
            << rec.wall_time_s << "s\n";
  return 0;
}

int cmd_solve_col(const RunFlags& f, const std::string& k_text, bool descend) {
  const auto g = load_dimacs(f.instance);
  auto cfg = build_config(f, Problem::col);
  int k = 0;
  if (k_text != "auto") {
    try {
      std::size_t used = 0;
      k = std::stoi(k_text, &used);
      if (used != k_text.size()) throw std::invalid_argument(k_text);
    } catch (const std::exception&) {
      throw std::invalid_argument("--k must be a positive integer or 'auto'");
    }
    if (k < 1) throw std::invalid_argument("--k must be positive");
  }
  if (k > 0 && !descend) {
    auto rec = run_col_fixed_k(g, k, cfg);
    finish(rec, f, g);
    std::cout << "k " << k << " legal " << (rec.legal && rec.best_score == 0 ? "yes" : "no") << " conflicts "
              << score_text(rec.best_score) << " generations " << rec.generations.size() << " stop '"
              << rec.stop_reason << "'\n";
    return 0;
  }
  cfg.k = k;
  auto result = run_col_descending(g, cfg);
  for (const auto& r : result.runs)
    std::cout << "k " << r.k << " legal " << (r.legal && r.best_score == 0 ? "yes" : "no") << " conflicts "
              << score_text(r.best_score) << " generations " << r.generations.size() << '\n';
  std::cout << "best_k " << (result.best_k ? std::to_string(result.best_k) : "none") << '\n';
  // the record of the smallest solved k, or of the only failed run
  RunRecord rec = result.runs.back();
  for (const auto& r : result.runs)
    if (r.k == result.best_k) rec = r;
  finish(rec, f, g);
  return 0;
}

int cmd_reduce(const std::string& instance, const std::string& weights, std::size_t budget, const std::string& out_graph,
               const std::string& out_weights) {
  const auto g = load_dimacs(instance, weights);
  if (budget == 0) budget = static_cast<std::size_t>(10) * static_cast<std::size_t>(g.size());
  const auto [reduced, report] = reduce_graph(g, budget);
  std::cout << "vertices " << g.size() << " -> " << reduced.size() << "\n"
            << "edges " << g.edge_count() << " -> " << reduced.edge_count() << "\n"
            << "removed " << report.removed.size() << "\n"
            << "cliques " << report.cliques_found << "\n"
            << "passes " << report.passes << "\n"
            << "budget_exhausted " << (report.budget_exhausted ? "yes" : "no") << "\n";
  if (!report.removed.empty()) {
    std::cout << "removed_vertices";
    for (int v : report.removed) std::cout << ' ' << v + 1;
    std::cout << '\n';
  }
  if (!out_graph.empty()) write_text(out_graph, write_dimacs(reduced));
  if (!out_weights.empty()) write_text(out_weights, write_weights(reduced));
  return 0;
}

struct BenchRow {
  std::string name;
  std::string problem;
  Score expected = 0;
  std::string provenance;
  std::string status;  // hit, miss, missing
  Score best = kInfiniteScore;
  double average = std::numeric_limits<double>::quiet_NaN();
  int successes = 0;
  int runs = 0;
  double time_to_best = std::numeric_limits<double>::quiet_NaN();
};

int cmd_bench(const std::string& suite_path, int seeds, int pop, int threads, bool strict, bool reduce,
              const std::string& csv_path, double budget_scale) {
  const auto suite = parse_bench_suite(read_text_file(suite_path), std::filesystem::path(suite_path).parent_path());
  std::vector<BenchRow> rows;
  for (const auto& e : suite.entries) {
    BenchRow row;
    row.name = std::filesystem::path(e.path).filename().string();
    row.problem = to_string(e.problem);
    row.expected = e.expected;
    row.provenance = e.provenance;
    if (!std::filesystem::exists(e.path) || (!e.weights.empty() && !std::filesystem::exists(e.weights))) {
      row.status = "missing";
      rows.push_back(row);
      std::cerr << "bench: " << e.path << " not found, skipped\n";
      continue;
    }
    const auto g = load_dimacs(e.path, e.weights);
    double sum = 0;
    int finite = 0;
    for (int s = 1; s <= seeds; ++s) {
      RunConfig cfg = RunConfig::defaults(e.problem);
      cfg.population = pop;
      cfg.neighbors = std::min(cfg.neighbors, pop - 1);
      cfg.seed = static_cast<std::uint64_t>(s);
      cfg.threads = threads;
      cfg.time_limit_s = e.budget_s * budget_scale;
      RunRecord rec;
      if (e.problem == Problem::wvcp) {
        cfg.target = e.expected;
        rec = solve_wvcp(g, cfg, reduce);
      } else {
        rec = run_col_fixed_k(g, static_cast<int>(e.expected), cfg);
      }
      ++row.runs;
      const bool ok = e.problem == Problem::wvcp ? rec.best_score <= e.expected : rec.best_score == 0;
      if (ok) ++row.successes;
      if (rec.best_score < kInfiniteScore) sum += static_cast<double>(rec.best_score), ++finite;
      if (rec.best_score < row.best || (rec.best_score == row.best && rec.best_score < kInfiniteScore)) {
        double t = rec.wall_time_s;
        for (const auto& gr : rec.generations)
          if (gr.best == rec.best_score) {
            t = gr.elapsed_s;
            break;
          }
        if (rec.best_score < row.best || !(t >= row.time_to_best)) row.time_to_best = t;
        row.best = rec.best_score;
      }
      std::cerr << "bench: " << row.name << " seed " << s << " -> " << score_text(rec.best_score) << '\n';
    }
    if (finite) row.average = sum / finite;
    row.status = row.successes > 0 ? "hit" : "miss";
    rows.push_back(row);
  }

  std::cout << "| instance | problem | expected | provenance | best | avg | success | time_to_best_s | status |\n"
            << "|---|---|---|---|---|---|---|---|---|\n";
  std::ostringstream csv;
  csv << "instance,problem,expected,provenance,best,avg,successes,runs,time_to_best_s,status\n";
  int shortfalls = 0;
  for (const auto& r : rows) {
    if (r.status != "hit") ++shortfalls;
    std::ostringstream avg, ttb;
    if (std::isfinite(r.average)) avg << std::fixed << std::setprecision(2) << r.average;
    if (std::isfinite(r.time_to_best)) ttb << std::fixed << std::setprecision(2) << r.time_to_best;
    std::cout << "| " << r.name << " | " << r.problem << " | " << r.expected << " | " << r.provenance << " | "
              << score_text(r.best) << " | " << avg.str() << " | " << r.successes << "/" << r.runs << " | "
              << ttb.str() << " | " << r.status << " |\n";
    csv << r.name << ',' << r.problem << ',' << r.expected << ',' << r.provenance << ',' << score_text(r.best) << ','
        << avg.str() << ',' << r.successes << ',' << r.runs << ',' << ttb.str() << ',' << r.status << '\n';
  }
  if (!csv_path.empty()) write_text(csv_path, csv.str());
  return strict && shortfalls > 0 ? 1 : 0;
}

int cmd_ablate(const RunFlags& f, int pairs, const std::string& curves_path) {
  const auto g = load_dimacs(f.instance, f.weights);
  RunFlags base = f;
  if (!base.generations && !base.time_limit) base.generations = 30;
  const std::uint64_t seed0 = f.seed.value_or(1);
  std::ostringstream curves;
  curves << "seed,surrogate,generation,best,mean_fitness,pred_pearson\n";
  double sum_on = 0, sum_off = 0;
  int counted = 0;
  for (int i = 0; i < pairs; ++i) {
    Score best[2] = {kInfiniteScore, kInfiniteScore};
    for (int mode = 0; mode < 2; ++mode) {
      RunFlags run = base;
      run.seed = seed0 + static_cast<std::uint64_t>(i);
      run.no_surrogate = mode == 1;
      const auto cfg = build_config(run, Problem::wvcp);
      const auto rec = solve_wvcp(g, cfg, !f.no_reduce);
      best[mode] = rec.best_score;
      for (const auto& gr : rec.generations) {
        curves << *run.seed << ',' << (mode == 0 ? "on" : "off") << ',' << gr.generation << ',' << score_text(gr.best)
               << ',';
        if (std::isfinite(gr.mean_fitness)) curves << gr.mean_fitness;
        curves << ',';
        if (std::isfinite(gr.pred_pearson)) curves << gr.pred_pearson;
        curves << '\n';
      }
    }
    std::cout << "seed " << seed0 + static_cast<std::uint64_t>(i) << " on " << score_text(best[0]) << " off "
              << score_text(best[1]) << '\n';
    if (best[0] < kInfiniteScore && best[1] < kInfiniteScore) {
      sum_on += static_cast<double>(best[0]);
      sum_off += static_cast<double>(best[1]);
      ++counted;
    }
  }
  if (counted) {
    std::cout << std::fixed << std::setprecision(3) << "mean_on " << sum_on / counted << " mean_off " << sum_off / counted
              << " on<=off " << (sum_on <= sum_off ? "yes" : "no") << '\n';
  }
  if (!curves_path.empty()) write_text(curves_path, curves.str());
  return 0;
}

int cmd_predict_quality(const RunFlags& f, const std::string& csv_path) {
  const auto g = load_dimacs(f.instance, f.weights);
  RunFlags run = f;
  if (!run.generations && !run.time_limit) run.generations = 30;
  auto cfg = build_config(run, Problem::wvcp);
  if (!cfg.surrogate) throw std::invalid_argument("predict-quality needs the surrogate");
  cfg.keep_prediction_pairs = true;
  auto rec = solve_wvcp(g, cfg, !f.no_reduce);
  std::ostringstream csv;
  csv << std::setprecision(10) << "generation,individual,predicted,actual\n";
  for (const auto& p : rec.prediction_pairs)
    csv << p.generation << ',' << p.individual << ',' << p.predicted << ',' << p.actual << '\n';
  if (csv_path.empty()) std::cout << csv.str();
  else write_text(csv_path, csv.str());
  for (const auto& gr : rec.generations)
    std::cerr << "generation " << gr.generation << " pairs " << gr.prediction_pairs << " pearson "
              << (std::isfinite(gr.pred_pearson) ? std::to_string(gr.pred_pearson) : "nan") << '\n';
  finish(rec, f, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memetic graph coloring with a learned restart-point selector"};
  app.require_subcommand(1);

  RunFlags wvcp_flags;
  auto* wvcp = app.add_subcommand("solve-wvcp", "weighted vertex coloring");
  add_run_flags(wvcp, wvcp_flags, true);
  wvcp->add_flag("--no-reduce", wvcp_flags.no_reduce, "skip the clique-based preprocessing");

  RunFlags col_flags;
  std::string k_text = "auto";
  bool descend = false;
  auto* col = app.add_subcommand("solve-col", "k-coloring");
  add_run_flags(col, col_flags, false);
  col->add_option("--k", k_text, "number of colors, or 'auto' to descend from a greedy bound");
  col->add_flag("--descend", descend, "after a success retry with one color less");
  std::string col_weights;
  col->add_option("--weights", col_weights)->group("");  // accepted only to reject it clearly

  std::string red_instance, red_weights, red_graph_out, red_weights_out;
  std::size_t red_budget = 0;
  auto* red = app.add_subcommand("reduce", "clique-based vertex removal report");
  red->add_option("--instance", red_instance)->required()->check(CLI::ExistingFile);
  red->add_option("--weights", red_weights)->check(CLI::ExistingFile);
  red->add_option("--budget", red_budget, "clique budget (default 10|V|)");
  red->add_option("--write-graph", red_graph_out);
  red->add_option("--write-weights", red_weights_out);

  std::string suite_path, bench_csv;
  int bench_seeds = 5, bench_pop = 256, bench_threads = default_thread_count();
  bool bench_strict = false, bench_no_reduce = false;
  double bench_scale = 1.0;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite file");
  bench->add_option("--suite", suite_path)->required()->check(CLI::ExistingFile);
  bench->add_option("--seeds", bench_seeds)->check(CLI::PositiveNumber);
  bench->add_option("--pop", bench_pop)->check(CLI::Range(2, 1 << 30));
  bench->add_option("--threads", bench_threads)->check(CLI::PositiveNumber);
  bench->add_option("--budget-scale", bench_scale, "multiply every per-instance time budget")->check(CLI::PositiveNumber);
  bench->add_option("--csv", bench_csv);
  bench->add_flag("--strict", bench_strict, "exit nonzero when any instance misses its expected value");
  bench->add_flag("--no-reduce", bench_no_reduce);

  RunFlags abl_flags;
  int pairs = 5;
  std::string curves;
  auto* abl = app.add_subcommand("ablate", "paired-seed runs with the surrogate on and off");
  add_run_flags(abl, abl_flags, true);
  abl->add_flag("--no-reduce", abl_flags.no_reduce);
  abl->add_option("--pairs", pairs)->check(CLI::PositiveNumber);
  abl->add_option("--curves", curves, "per-generation CSV");

  RunFlags pq_flags;
  std::string pq_csv;
  auto* pq = app.add_subcommand("predict-quality", "dump predicted vs realized scores");
  add_run_flags(pq, pq_flags, true);
  pq->add_flag("--no-reduce", pq_flags.no_reduce);
  pq->add_option("--csv", pq_csv, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*wvcp) return cmd_solve_wvcp(wvcp_flags);
    if (*col) {
      if (!col_weights.empty()) throw std::invalid_argument("solve-col takes no --weights (k-coloring is unweighted)");
      return cmd_solve_col(col_flags, k_text, descend);
    }
    if (*red) return cmd_reduce(red_instance, red_weights, red_budget, red_graph_out, red_weights_out);
    if (*bench) return cmd_bench(suite_path, bench_seeds, bench_pop, bench_threads, bench_strict, !bench_no_reduce, bench_csv, bench_scale);
    if (*abl) return cmd_ablate(abl_flags, pairs, curves);
    if (*pq) return cmd_predict_quality(pq_flags, pq_csv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SizingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
