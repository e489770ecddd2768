#pragma once

// k-core peeling engines.
//
//  parallel_strip  removes every vertex of degree < k at once, round by round.
//  slow_strip      the one-edge-per-step queue refinement of the same process;
//                  it removes vertices in the same order and records the light
//                  degree L_t, heavy count N_t and heavy degree D_t per step.
//  naive_core      quadratic reference used to cross-check both.
//  round_stats     per-round (a,b)-edge classification and d+/d- maps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kcore/errors.hpp"
#include "kcore/hypergraph.hpp"
#include "kcore/rng.hpp"

namespace kcore {

// Vertex -> incident edge ids, one entry per copy (CSR).
struct Incidence {
  std::vector<std::uint64_t> offset;
  std::vector<std::uint32_t> edges;

  static Incidence build(const Hypergraph& g) {
    Incidence inc;
    inc.offset.assign(std::size_t(g.n) + 1, 0);
    for (Vertex v : g.ends) ++inc.offset[v + 1];
    std::partial_sum(inc.offset.begin(), inc.offset.end(), inc.offset.begin());
    inc.edges.resize(g.ends.size());
    std::vector<std::uint64_t> fill(inc.offset.begin(), inc.offset.end() - 1);
    for (std::size_t i = 0; i < g.ends.size(); ++i)
      inc.edges[fill[g.ends[i]]++] = static_cast<std::uint32_t>(i / g.r);
    return inc;
  }

  std::span<const std::uint32_t> of(Vertex v) const {
    return {edges.data() + offset[v], static_cast<std::size_t>(offset[v + 1] - offset[v])};
  }
};

struct Core {
  std::vector<Vertex> vertices;       // ascending
  std::vector<std::uint32_t> edges;   // ascending edge ids

  bool empty() const { return vertices.empty(); }
  friend bool operator==(const Core&, const Core&) = default;
};

// Output of the parallel process.
struct Stratification {
  int k = 0;
  std::uint32_t rounds = 0;                             // stripping number s
  std::vector<std::vector<Vertex>> strata;              // strata[i-1] = S_i, ascending
  std::vector<std::uint32_t> level;                     // i for v in S_i, 0 for core vertices
  std::vector<std::uint32_t> edge_round;                // round an edge is removed in, 0 for core edges
  std::vector<std::vector<std::uint32_t>> round_edges;  // round_edges[i-1] = edges removed in round i
  Core core;
};

namespace detail {

inline Core collect_core(const Hypergraph& g, const std::vector<bool>& vertex_gone, const std::vector<bool>& edge_alive) {
  Core c;
  for (Vertex v = 0; v < g.n; ++v)
    if (!vertex_gone[v]) c.vertices.push_back(v);
  for (std::uint32_t e = 0; e < g.m(); ++e)
    if (edge_alive[e]) c.edges.push_back(e);
  return c;
}

}  // namespace detail

inline Stratification parallel_strip(const Hypergraph& g, int k) {
  Stratification out;
  out.k = k;
  out.level.assign(g.n, 0);
  out.edge_round.assign(g.m(), 0);

  const Incidence inc = Incidence::build(g);
  std::vector<std::uint32_t> deg = g.degrees();
  std::vector<bool> edge_alive(g.m(), true);
  std::vector<bool> gone(g.n, false);

  std::vector<Vertex> current;
  for (Vertex v = 0; v < g.n; ++v)
    if (static_cast<std::int64_t>(deg[v]) < k) current.push_back(v);

  std::uint32_t round = 0;
  while (!current.empty()) {
    ++round;
    for (Vertex v : current) {
      out.level[v] = round;
      gone[v] = true;
    }
    std::vector<Vertex> next;
    std::vector<std::uint32_t> removed;
    for (Vertex v : current) {
      for (std::uint32_t e : inc.of(v)) {
        if (!edge_alive[e]) continue;
        edge_alive[e] = false;
        out.edge_round[e] = round;
        removed.push_back(e);
        for (Vertex w : g.edge(e)) {
          const auto was = deg[w]--;
          if (!gone[w] && static_cast<std::int64_t>(was) >= k && static_cast<std::int64_t>(deg[w]) < k) next.push_back(w);
        }
      }
    }
    std::sort(current.begin(), current.end());
    out.strata.push_back(std::move(current));
    out.round_edges.push_back(std::move(removed));
    current = std::move(next);
  }
  out.rounds = round;
  out.core = detail::collect_core(g, gone, edge_alive);
  return out;
}

inline Stratification parallel_strip(const SimpleHypergraph& g, int k) { return parallel_strip(g.graph(), k); }
inline Stratification parallel_strip(const Configuration& cfg, int k) { return parallel_strip(cfg.contract(), k); }

// Repeated full scans; O(n m) per pass. Test oracle only.
inline Core naive_core(const Hypergraph& g, int k) {
  std::vector<bool> gone(g.n, false);
  std::vector<bool> edge_alive(g.m(), true);
  const auto degree = [&](Vertex v) {
    std::int64_t d = 0;
    for (std::size_t e = 0; e < g.m(); ++e)
      if (edge_alive[e])
        for (Vertex w : g.edge(e)) d += (w == v);
    return d;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (Vertex v = 0; v < g.n; ++v) {
      if (gone[v] || degree(v) >= k) continue;
      gone[v] = true;
      changed = true;
      for (std::size_t e = 0; e < g.m(); ++e) {
        if (!edge_alive[e]) continue;
        const auto ed = g.edge(e);
        if (std::find(ed.begin(), ed.end(), v) != ed.end()) edge_alive[e] = false;
      }
    }
  }
  return detail::collect_core(g, gone, edge_alive);
}

inline Core naive_core(const SimpleHypergraph& g, int k) { return naive_core(g.graph(), k); }

struct StepRecord {
  std::uint64_t t = 0;
  std::uint64_t L = 0;  // total degree of light (queued) vertices
  std::uint64_t N = 0;  // heavy vertex count
  std::uint64_t D = 0;  // total heavy degree

  // Mean heavy degree; 0 when no heavy vertex is left.
  double zeta() const { return N == 0 ? 0.0 : static_cast<double>(D) / static_cast<double>(N); }
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct StripTrace {
  int k = 0;
  std::uint64_t tau = 0;                    // halting step == edges removed
  std::uint32_t rounds = 0;                 // I_max
  std::uint64_t stride = 1;                 // steps kept when t % stride == 0, plus t == tau
  std::vector<StepRecord> steps;
  std::vector<StepRecord> round_starts;     // state at t(i), i = 1..rounds
  std::vector<std::vector<Vertex>> strata;  // S_i in removal order
  std::vector<std::uint32_t> level;         // round each vertex left in, 0 for core
  std::vector<std::pair<Vertex, std::uint64_t>> removal_order;  // (vertex, step at removal)
  Core core;
};

struct SlowStripOptions {
  std::uint64_t stride = 1;
  bool record_steps = true;
};

inline StripTrace slow_strip(const Hypergraph& g, int k, std::uint64_t seed, SlowStripOptions opt = {}) {
  if (k < 2) throw DomainError("slow_strip: k must be >= 2");
  if (opt.stride == 0) opt.stride = 1;

  enum : std::uint8_t { Heavy, Queued, Removed };

  StripTrace tr;
  tr.k = k;
  tr.stride = opt.stride;
  tr.level.assign(g.n, 0);

  Incidence inc = Incidence::build(g);
  std::vector<std::uint32_t> deg = g.degrees();
  // Live window of each vertex's incidence list; dead entries are compacted
  // away once they make up more than half of the window.
  std::vector<std::uint32_t> window(g.n);
  for (Vertex v = 0; v < g.n; ++v) window[v] = static_cast<std::uint32_t>(inc.offset[v + 1] - inc.offset[v]);
  std::vector<bool> edge_alive(g.m(), true);
  std::vector<std::uint8_t> state(g.n, Heavy);

  Rng rng = Rng::stream(seed, {0x534C4F57 /* "SLOW" */});

  std::vector<Vertex> queue;
  queue.reserve(g.n);
  std::uint64_t L = 0, N = 0, D = 0;
  for (Vertex v = 0; v < g.n; ++v) {
    if (deg[v] < static_cast<std::uint32_t>(k)) {
      state[v] = Queued;
      tr.level[v] = 1;
      queue.push_back(v);
      L += deg[v];
    } else {
      ++N;
      D += deg[v];
    }
  }
  shuffle(std::span<Vertex>(queue), rng);

  std::uint64_t t = 0;
  const auto record = [&] {
    if (opt.record_steps && t % opt.stride == 0) tr.steps.push_back({t, L, N, D});
  };
  const auto pick_edge = [&](Vertex v) -> std::uint32_t {
    const std::uint64_t base = inc.offset[v];
    if (2ULL * deg[v] < window[v]) {
      std::uint32_t keep = 0;
      for (std::uint32_t i = 0; i < window[v]; ++i) {
        const auto e = inc.edges[base + i];
        if (edge_alive[e]) inc.edges[base + keep++] = e;
      }
      window[v] = keep;
    }
    while (true) {
      const auto e = inc.edges[base + rng.below(window[v])];
      if (edge_alive[e]) return e;
    }
  };

  record();
  std::uint32_t current_round = 0;
  for (std::size_t head = 0; head < queue.size();) {
    const Vertex v = queue[head];
    if (tr.level[v] > current_round) {
      current_round = tr.level[v];
      tr.round_starts.push_back({t, L, N, D});
      tr.strata.emplace_back();
    }
    if (deg[v] == 0) {
      state[v] = Removed;
      tr.strata.back().push_back(v);
      tr.removal_order.emplace_back(v, t);
      ++head;
      continue;
    }
    const std::uint32_t e = pick_edge(v);
    edge_alive[e] = false;
    for (Vertex w : g.edge(e)) {
      --deg[w];
      if (state[w] == Heavy) {
        --D;
        if (deg[w] < static_cast<std::uint32_t>(k)) {
          state[w] = Queued;
          --N;
          D -= deg[w];
          L += deg[w];
          tr.level[w] = current_round + 1;
          queue.push_back(w);
        }
      } else {
        --L;
      }
    }
    ++t;
    record();
  }
  if (opt.record_steps && t % opt.stride != 0) tr.steps.push_back({t, L, N, D});
  tr.tau = t;
  tr.rounds = current_round;

  std::vector<bool> gone(g.n);
  for (Vertex v = 0; v < g.n; ++v) gone[v] = state[v] == Removed;
  tr.core = detail::collect_core(g, gone, edge_alive);
  return tr;
}

inline StripTrace slow_strip(const SimpleHypergraph& g, int k, std::uint64_t seed, SlowStripOptions opt = {}) {
  return slow_strip(g.graph(), k, seed, opt);
}
inline StripTrace slow_strip(const Configuration& cfg, int k, std::uint64_t seed, SlowStripOptions opt = {}) {
  return slow_strip(cfg.contract(), k, seed, opt);
}

// Per-round bookkeeping of the parallel process (round i, 1-based).
struct RoundStats {
  std::uint32_t round = 0;
  std::vector<std::pair<Vertex, std::uint32_t>> d_plus;   // v in S_i: copies of v removed in round i
  std::vector<std::pair<Vertex, std::uint32_t>> d_minus;  // u in S_{i+1}: copies of u removed in round i
  std::map<std::pair<int, int>, std::uint64_t> M;         // (a,b) -> number of (a,b)-edges
  // The round-i hypergraph: one a-edge f ∩ S_i per removed edge f.
  std::vector<std::uint64_t> si_offsets{0};
  std::vector<Vertex> si_ends;

  std::uint64_t sum_dplus() const {
    std::uint64_t s = 0;
    for (const auto& [v, d] : d_plus) s += d;
    return s;
  }
  std::uint64_t sum_dminus() const {
    std::uint64_t s = 0;
    for (const auto& [v, d] : d_minus) s += d;
    return s;
  }
  std::size_t si_edge_count() const { return si_offsets.size() - 1; }
  std::span<const Vertex> si_edge(std::size_t j) const {
    return {si_ends.data() + si_offsets[j], static_cast<std::size_t>(si_offsets[j + 1] - si_offsets[j])};
  }
};

inline std::vector<RoundStats> round_stats(const Hypergraph& g, const Stratification& st) {
  std::vector<RoundStats> out(st.rounds);
  std::vector<std::uint32_t> plus(g.n, 0), minus(g.n, 0);
  for (std::uint32_t i = 1; i <= st.rounds; ++i) {
    RoundStats& rs = out[i - 1];
    rs.round = i;
    for (std::uint32_t e : st.round_edges[i - 1]) {
      int a = 0, b = 0;
      for (Vertex w : g.edge(e)) {
        if (st.level[w] == i) {
          ++a;
          ++plus[w];
          rs.si_ends.push_back(w);
        } else if (st.level[w] == i + 1) {
          ++b;
          ++minus[w];
        }
      }
      rs.si_offsets.push_back(rs.si_ends.size());
      ++rs.M[{a, b}];
    }
    for (Vertex v : st.strata[i - 1]) {
      rs.d_plus.emplace_back(v, plus[v]);
      plus[v] = 0;
    }
    if (i < st.rounds) {
      for (Vertex u : st.strata[i]) {
        rs.d_minus.emplace_back(u, minus[u]);
        minus[u] = 0;
      }
    }
  }
  return out;
}

inline std::vector<RoundStats> round_stats(const Hypergraph& g, int k) { return round_stats(g, parallel_strip(g, k)); }
inline std::vector<RoundStats> round_stats(const SimpleHypergraph& g, int k) { return round_stats(g.graph(), k); }

// Exact integer identities that every run must satisfy. Returns one message
// per violated identity; empty means all hold.
inline std::vector<std::string> audit_round_stats(const std::vector<RoundStats>& stats, std::uint32_t r) {
  std::vector<std::string> bad;
  const auto fail = [&](std::uint32_t i, const std::string& what) {
    bad.push_back("round " + std::to_string(i) + ": " + what);
  };
  for (std::size_t idx = 0; idx < stats.size(); ++idx) {
    const RoundStats& rs = stats[idx];
    std::uint64_t sum_a = 0, sum_b = 0;
    for (const auto& [ab, count] : rs.M) {
      const auto [a, b] = ab;
      if (a < 1 || a > static_cast<int>(r) || b < 0 || b > static_cast<int>(r) - a) fail(rs.round, "(a,b) out of range");
      sum_a += std::uint64_t(a) * count;
      sum_b += std::uint64_t(b) * count;
    }
    if (sum_a != rs.sum_dplus()) fail(rs.round, "sum a*M != sum d+");
    if (sum_b != rs.sum_dminus()) fail(rs.round, "sum b*M != sum d-");
    for (const auto& [u, d] : rs.d_minus)
      if (d < 1) fail(rs.round, "vertex of the next stratum with d- = 0");
  }
  return bad;
}

// Identities linking a SLOW-STRIP trace to the parallel round statistics of
// the same graph: round lengths, L at round starts, halting state.
inline std::vector<std::string> audit_trace(const StripTrace& tr, const std::vector<RoundStats>& stats, std::uint64_t m,
                                            std::uint32_t r) {
  std::vector<std::string> bad;
  if (tr.rounds != stats.size()) bad.push_back("round count differs from parallel stripping");
  if (tr.tau != m - tr.core.edges.size()) bad.push_back("tau != edges removed");
  if (!tr.steps.empty()) {
    const StepRecord& last = tr.steps.back();
    if (last.t != tr.tau || last.L != 0) bad.push_back("L_tau != 0");
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
      const StepRecord& s = tr.steps[i];
      if (s.t < tr.tau && s.L == 0) bad.push_back("L_t = 0 before tau at t=" + std::to_string(s.t));
      if (s.L + s.D != std::uint64_t(r) * (m - s.t)) bad.push_back("L_t + D_t != remaining degree at t=" + std::to_string(s.t));
      if (i > 0 && tr.steps[i - 1].t + 1 == s.t) {
        const std::int64_t dL = std::int64_t(s.L) - std::int64_t(tr.steps[i - 1].L);
        const std::int64_t cap = std::int64_t(r) * (tr.k - 1);
        if (dL < -cap || dL > cap) bad.push_back("|L_{t+1} - L_t| > r(k-1) at t=" + std::to_string(s.t));
      }
    }
  }
  for (std::uint32_t i = 0; i < tr.rounds && i < stats.size(); ++i) {
    const std::uint64_t L = tr.round_starts[i].L;
    const std::uint64_t next = i + 1 < tr.rounds ? tr.round_starts[i + 1].t : tr.tau;
    const std::uint64_t len = next - tr.round_starts[i].t;
    if (!(L <= std::uint64_t(r) * len && len <= L)) bad.push_back("round-length bounds fail at round " + std::to_string(i + 1));
    if (L != stats[i].sum_dplus()) bad.push_back("L_{t(i)} != sum d+ at round " + std::to_string(i + 1));
  }
  return bad;
}

}  // namespace kcore
