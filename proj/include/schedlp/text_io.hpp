#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "schedlp/instance.hpp"

namespace schedlp {

/// Parse failure with the 1-based line number of the offending line.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

// Instance text format ('#' starts a comment, blank lines ignored):
//   header:   model n m T
//   jobs:     identical/related -> one line "id weight size" per job
//             unrelated         -> one line "id weight" per job,
//                                  then m lines "machine p_0 ... p_{n-1}" with '-' for absent
//   speeds:   related only -> "speeds s_0 ... s_{m-1}" with rationals num/den
//   edges:    literal "edges" line, then one "j k" pair per line
inline std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  out << model_name(inst.model) << ' ' << inst.n() << ' ' << inst.m << ' '
      << inst.horizon << '\n';
  if (inst.model == Model::Unrelated) {
    for (const Job& j : inst.jobs) out << j.id << ' ' << j.weight << '\n';
    for (int i = 0; i < inst.m; ++i) {
      out << i;
      for (int j = 0; j < inst.n(); ++j) {
        out << ' ';
        if (inst.pmatrix[i][j] == 0)
          out << '-';
        else
          out << inst.pmatrix[i][j];
      }
      out << '\n';
    }
  } else {
    for (const Job& j : inst.jobs) out << j.id << ' ' << j.weight << ' ' << j.size << '\n';
    if (inst.model == Model::Related) {
      out << "speeds";
      for (const Rational& s : inst.speeds) out << ' ' << s.str();
      out << '\n';
    }
  }
  out << "edges\n";
  std::vector<std::pair<int, int>> edges = inst.dag.edges;
  std::sort(edges.begin(), edges.end());
  for (auto [a, b] : edges) out << a << ' ' << b << '\n';
  return out.str();
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

inline std::int64_t parse_int(const std::string& tok, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("junk");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, std::string("expected integer for ") + what + ", got '" + tok + "'");
  }
}

}  // namespace detail

inline Instance read_instance(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  // Yields the next non-empty, non-comment token line; line_no tracks position.
  auto next_line = [&](std::vector<std::string>& toks) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      toks = detail::tokenize(raw);
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> toks;
  if (!next_line(toks)) throw ParseError(1, "missing header");
  if (toks.size() != 4) throw ParseError(line_no, "header must be 'model n m T'");
  auto model = model_from_name(toks[0]);
  if (!model) throw ParseError(line_no, "unknown model '" + toks[0] + "'");

  Instance inst;
  inst.model = *model;
  std::int64_t n = detail::parse_int(toks[1], line_no, "n");
  std::int64_t m = detail::parse_int(toks[2], line_no, "m");
  inst.horizon = detail::parse_int(toks[3], line_no, "T");
  if (n < 0 || m <= 0) throw ParseError(line_no, "bad job or machine count");
  inst.m = static_cast<int>(m);
  inst.dag.n = static_cast<int>(n);

  for (int j = 0; j < n; ++j) {
    if (!next_line(toks)) throw ParseError(line_no + 1, "missing job line");
    std::size_t want = inst.model == Model::Unrelated ? 2 : 3;
    if (toks.size() != want)
      throw ParseError(line_no, "job line needs " + std::to_string(want) + " fields");
    Job job;
    job.id = static_cast<int>(detail::parse_int(toks[0], line_no, "job id"));
    if (job.id != j) throw ParseError(line_no, "job ids must appear in order 0..n-1");
    job.weight = detail::parse_int(toks[1], line_no, "weight");
    if (inst.model != Model::Unrelated)
      job.size = detail::parse_int(toks[2], line_no, "size");
    inst.jobs.push_back(job);
  }

  if (inst.model == Model::Related) {
    if (!next_line(toks)) throw ParseError(line_no + 1, "missing speeds line");
    if (toks.empty() || toks[0] != "speeds" || static_cast<int>(toks.size()) != inst.m + 1)
      throw ParseError(line_no, "expected 'speeds' followed by one rational per machine");
    for (int i = 0; i < inst.m; ++i) {
      try {
        inst.speeds.push_back(Rational::parse(toks[i + 1]));
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad speed '" + toks[i + 1] + "'");
      }
    }
  }

  if (inst.model == Model::Unrelated) {
    inst.pmatrix.assign(inst.m, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < inst.m; ++i) {
      if (!next_line(toks)) throw ParseError(line_no + 1, "missing machine row");
      if (static_cast<std::int64_t>(toks.size()) != n + 1)
        throw ParseError(line_no, "machine row needs 1 + n fields");
      std::int64_t mi = detail::parse_int(toks[0], line_no, "machine id");
      if (mi != i) throw ParseError(line_no, "machine rows must appear in order 0..m-1");
      for (int j = 0; j < n; ++j) {
        if (toks[j + 1] == "-") continue;
        std::int64_t p = detail::parse_int(toks[j + 1], line_no, "processing time");
        if (p <= 0) throw ParseError(line_no, "processing time must be positive or '-'");
        inst.pmatrix[i][j] = p;
      }
    }
  }

  if (!next_line(toks) || toks.size() != 1 || toks[0] != "edges")
    throw ParseError(line_no, "expected 'edges' section");
  while (next_line(toks)) {
    if (toks.size() != 2) throw ParseError(line_no, "edge line needs two job ids");
    int a = static_cast<int>(detail::parse_int(toks[0], line_no, "edge tail"));
    int b = static_cast<int>(detail::parse_int(toks[1], line_no, "edge head"));
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ParseError(line_no, "edge index out of range");
    inst.dag.edges.emplace_back(a, b);
  }
  std::sort(inst.dag.edges.begin(), inst.dag.edges.end());
  return inst;
}

// Schedule text format:
//   header "schedule n", then one line "job machine start end" per job,
//   start/end as integers or num/den rationals.
inline std::string write_schedule(const Schedule& sched) {
  std::ostringstream out;
  out << "schedule " << sched.n() << '\n';
  for (int j = 0; j < sched.n(); ++j) {
    const Placement& p = sched.placements[j];
    out << j << ' ' << p.machine << ' ' << p.start.str() << ' ' << p.end.str() << '\n';
  }
  return out.str();
}

inline Schedule read_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto next_line = [&](std::vector<std::string>& toks) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      toks = detail::tokenize(raw);
      if (!toks.empty()) return true;
    }
    return false;
  };
  std::vector<std::string> toks;
  if (!next_line(toks) || toks.size() != 2 || toks[0] != "schedule")
    throw ParseError(std::max(line_no, 1), "expected 'schedule n' header");
  std::int64_t n = detail::parse_int(toks[1], line_no, "n");
  Schedule sched;
  sched.placements.resize(n);
  for (int j = 0; j < n; ++j) {
    if (!next_line(toks)) throw ParseError(line_no + 1, "missing placement line");
    if (toks.size() != 4) throw ParseError(line_no, "placement line needs 4 fields");
    std::int64_t id = detail::parse_int(toks[0], line_no, "job id");
    if (id != j) throw ParseError(line_no, "placements must appear in job order");
    Placement p;
    p.machine = static_cast<int>(detail::parse_int(toks[1], line_no, "machine"));
    try {
      p.start = Rational::parse(toks[2]);
      p.end = Rational::parse(toks[3]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad time value");
    }
    sched.placements[j] = p;
  }
  return sched;
}

}  // namespace schedlp
