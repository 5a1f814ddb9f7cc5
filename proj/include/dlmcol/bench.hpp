#pragma once

// Benchmark suite files: one CSV row per instance,
//   path,weights,problem,expected,provenance,budget_s
// `weights` may be empty, `problem` is wvcp or col (expected = score or k),
// relative paths resolve against the suite file's directory. Lines starting
// with '#' and a header row beginning with "path" are skipped.

#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlmcol/graph.hpp"
#include "dlmcol/localsearch.hpp"

namespace dlmcol {

struct BenchEntry {
  std::string path;
  std::string weights;
  Problem problem = Problem::wvcp;
  Score expected = 0;
  std::string provenance;
  double budget_s = 60;
};

struct BenchSuite {
  std::vector<BenchEntry> entries;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace detail

inline BenchSuite parse_bench_suite(std::string_view text, const std::filesystem::path& base_dir = {}) {
  BenchSuite suite;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = detail::trim(std::string(lines[i]));
    if (line.empty() || line[0] == '#' || line.rfind("path", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(detail::trim(f));
    if (fields.size() != 6) throw ParseError("bench row needs 6 fields", i + 1);
    BenchEntry e;
    auto resolve = [&](const std::string& p) {
      if (p.empty()) return p;
      const std::filesystem::path fp(p);
      return fp.is_absolute() || base_dir.empty() ? p : (base_dir / fp).string();
    };
    e.path = resolve(fields[0]);
    e.weights = resolve(fields[1]);
    if (fields[2] == "wvcp") e.problem = Problem::wvcp;
    else if (fields[2] == "col") e.problem = Problem::col;
    else throw ParseError("problem must be wvcp or col", i + 1);
    try {
      e.expected = std::stoll(fields[3]);
      e.budget_s = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw ParseError("expected value and budget must be numeric", i + 1);
    }
    e.provenance = fields[4];
    if (e.provenance.empty()) throw ParseError("every expected value needs a provenance tag", i + 1);
    suite.entries.push_back(std::move(e));
  }
  return suite;
}

}  // namespace dlmcol
