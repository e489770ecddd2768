#pragma once

// Text formats.
//
//   hypergraph:    "n m r" then one edge per line, r space-separated 0-based ids
//   configuration: "n m r", then the r*m allocation entries (copy -> bin) on
//                  one line, then the r*m parts entries on one line
//   strip trace:   JSON lines; a header object, per-step {t,L,N,D} objects,
//                  then per-round objects

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "kcore/hypergraph.hpp"
#include "kcore/stripping.hpp"

namespace kcore::io {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
T read_value(std::istream& in, const char* what) {
  long long x;
  if (!(in >> x)) throw ParseError(std::string("expected ") + what);
  if (x < 0) throw ParseError(std::string("negative ") + what);
  return static_cast<T>(x);
}

}  // namespace detail

inline void write_hypergraph(std::ostream& out, const Hypergraph& g) {
  out << g.n << ' ' << g.m() << ' ' << g.r << '\n';
  for (std::size_t j = 0; j < g.m(); ++j) {
    const auto e = g.edge(j);
    for (std::size_t i = 0; i < e.size(); ++i) out << (i ? " " : "") << e[i];
    out << '\n';
  }
}

inline Hypergraph read_hypergraph(std::istream& in) {
  Hypergraph g;
  g.n = detail::read_value<std::uint32_t>(in, "n");
  const auto m = detail::read_value<std::uint64_t>(in, "m");
  g.r = detail::read_value<std::uint32_t>(in, "r");
  g.ends.resize(m * g.r);
  for (auto& v : g.ends) {
    v = detail::read_value<Vertex>(in, "vertex id");
    if (v >= g.n) throw ParseError("vertex id out of range");
  }
  return g;
}

inline void write_configuration(std::ostream& out, const Configuration& cfg) {
  out << cfg.n << ' ' << cfg.m << ' ' << cfg.r << '\n';
  for (std::size_t i = 0; i < cfg.allocation.size(); ++i) out << (i ? " " : "") << cfg.allocation[i];
  out << '\n';
  for (std::size_t i = 0; i < cfg.parts.size(); ++i) out << (i ? " " : "") << cfg.parts[i];
  out << '\n';
}

inline Configuration read_configuration(std::istream& in) {
  Configuration cfg;
  cfg.n = detail::read_value<std::uint32_t>(in, "n");
  cfg.m = detail::read_value<std::uint32_t>(in, "m");
  cfg.r = detail::read_value<std::uint32_t>(in, "r");
  const std::size_t copies = std::size_t(cfg.m) * cfg.r;
  cfg.allocation.resize(copies);
  cfg.parts.resize(copies);
  for (auto& b : cfg.allocation) {
    b = detail::read_value<std::uint32_t>(in, "bin");
    if (b >= cfg.n) throw ParseError("bin out of range");
  }
  std::vector<bool> used(copies, false);
  for (auto& c : cfg.parts) {
    c = detail::read_value<std::uint32_t>(in, "copy id");
    if (c >= copies || used[c]) throw ParseError("parts do not partition the copies");
    used[c] = true;
  }
  return cfg;
}

inline nlohmann::json round_json(const RoundStats& rs, const StripTrace* trace) {
  nlohmann::json M = nlohmann::json::object();
  for (const auto& [ab, count] : rs.M) M[std::to_string(ab.first) + "," + std::to_string(ab.second)] = count;
  nlohmann::json j = {{"i", rs.round},
                      {"size_Si", rs.d_plus.size()},
                      {"M", M},
                      {"sum_dplus", rs.sum_dplus()},
                      {"sum_dminus", rs.sum_dminus()}};
  j["t_i"] = trace ? nlohmann::json(trace->round_starts.at(rs.round - 1).t) : nlohmann::json(nullptr);
  return j;
}

// Writes the trace as JSON lines. `trace` may be null (parallel engine).
inline void write_trace_jsonl(std::ostream& out, nlohmann::json header, const StripTrace* trace,
                              const std::vector<RoundStats>& stats) {
  header["type"] = "header";
  out << header.dump() << '\n';
  if (trace) {
    for (const auto& s : trace->steps) out << nlohmann::json{{"t", s.t}, {"L", s.L}, {"N", s.N}, {"D", s.D}}.dump() << '\n';
  }
  for (const auto& rs : stats) out << round_json(rs, trace).dump() << '\n';
}

}  // namespace kcore::io
