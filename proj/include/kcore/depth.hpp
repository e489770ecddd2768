#pragma once

// Depth certificates for non-core vertices.
//
// The depth of v is the length of a shortest stripping sequence (vertices
// removed one at a time, each of degree < k when removed) ending with v. The
// round I_v in which parallel stripping removes v is a lower bound. The
// certificate set R(v) is built layer by layer from I_v down to 1 and
// contains a stripping sequence ending with v, so |R(v)| is an upper bound.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "kcore/errors.hpp"
#include "kcore/hypergraph.hpp"
#include "kcore/stripping.hpp"

namespace kcore {

struct DepthCertificate {
  Vertex v = 0;
  std::uint32_t level = 0;                  // I_v
  std::vector<std::vector<Vertex>> layers;  // layers[j-1] = R_j, j = 1..I_v
  std::vector<Vertex> union_R;              // ascending
  std::vector<Vertex> sequence;             // ends with v
  std::uint32_t lower_bound = 0;            // I_v
  std::uint64_t upper_bound = 0;            // |R(v)|
};

struct SequenceCheck {
  bool ok = false;
  std::vector<Vertex> sequence;
  std::size_t violation_index = 0;  // meaningful when !ok
  std::string reason;
};

// Builds certificates against one graph and its stratification. Holds
// scratch buffers, so use one builder per thread.
class CertificateBuilder {
public:
  CertificateBuilder(const Hypergraph& g, const Stratification& st)
      : g_(g), st_(st), inc_(Incidence::build(g)), in_r_(g.n, 0), pending_(g.n, 0), edge_seen_(g.m(), 0) {}

  DepthCertificate build(Vertex v) {
    if (v >= g_.n) throw DomainError("build_R: vertex out of range");
    const std::uint32_t top = st_.level[v];
    if (top == 0) throw DomainError("build_R: vertex " + std::to_string(v) + " is in the k-core");

    DepthCertificate cert;
    cert.v = v;
    cert.level = top;
    cert.layers.resize(top);

    // R'_j candidates, bucketed by level.
    std::vector<std::vector<Vertex>> primed(top + 1);
    primed[top].push_back(v);
    mark(pending_, v);

    std::vector<Vertex> stack;
    for (std::uint32_t j = top; j >= 1; --j) {
      auto& layer = cert.layers[j - 1];
      // (a) R_j: components of the round-j hypergraph meeting R'_j.
      for (Vertex x : primed[j]) {
        if (in_r_[x]) continue;
        mark(in_r_, x);
        layer.push_back(x);
        stack.push_back(x);
      }
      while (!stack.empty()) {
        const Vertex x = stack.back();
        stack.pop_back();
        for (std::uint32_t e : inc_.of(x)) {
          if (st_.edge_round[e] != j) continue;
          for (Vertex y : g_.edge(e)) {
            if (st_.level[y] != j || in_r_[y]) continue;
            mark(in_r_, y);
            layer.push_back(y);
            stack.push_back(y);
          }
        }
      }
      // (b) Lower-level vertices sharing an edge with R_j that was still
      // alive when they were removed.
      for (Vertex x : layer) {
        for (std::uint32_t e : inc_.of(x)) {
          const std::uint32_t er = st_.edge_round[e];
          if (er >= j || edge_seen_[e]) continue;
          mark_edge(e);
          for (Vertex u : g_.edge(e)) {
            if (st_.level[u] != er || pending_[u]) continue;
            mark(pending_, u);
            primed[er].push_back(u);
          }
        }
      }
      std::sort(layer.begin(), layer.end());
    }

    for (const auto& layer : cert.layers) cert.union_R.insert(cert.union_R.end(), layer.begin(), layer.end());
    std::sort(cert.union_R.begin(), cert.union_R.end());
    cert.sequence = dependency_order(v);
    cert.lower_bound = top;
    cert.upper_bound = cert.union_R.size();
    reset();
    return cert;
  }

  // Replays `cert.sequence` on the full graph: every vertex must have degree
  // < k at its removal, the last one must be v, and all must lie in R(v).
  SequenceCheck validate(const DepthCertificate& cert) const {
    SequenceCheck out;
    out.sequence = cert.sequence;
    if (cert.sequence.empty() || cert.sequence.back() != cert.v) {
      out.reason = "sequence does not end with v";
      out.violation_index = cert.sequence.empty() ? 0 : cert.sequence.size() - 1;
      return out;
    }
    std::unordered_set<std::uint32_t> dead;
    std::unordered_set<Vertex> removed;
    for (std::size_t i = 0; i < cert.sequence.size(); ++i) {
      const Vertex x = cert.sequence[i];
      if (!std::binary_search(cert.union_R.begin(), cert.union_R.end(), x)) {
        out.reason = "vertex outside R(v)";
        out.violation_index = i;
        return out;
      }
      if (!removed.insert(x).second) {
        out.reason = "vertex repeated";
        out.violation_index = i;
        return out;
      }
      std::int64_t d = 0;
      for (std::uint32_t e : inc_.of(x)) d += !dead.contains(e);
      if (d >= st_.k) {
        out.reason = "degree " + std::to_string(d) + " >= k at removal";
        out.violation_index = i;
        return out;
      }
      for (std::uint32_t e : inc_.of(x)) dead.insert(e);
    }
    out.ok = true;
    return out;
  }

private:
  // Post-order DFS over "must be removed first" links: u is a prerequisite of
  // x when level(u) < level(x) and some edge holding both was removed in
  // round level(u). Children are visited in ascending id order.
  std::vector<Vertex> dependency_order(Vertex v) {
    std::vector<Vertex> order;
    std::unordered_set<Vertex> visited;
    struct Frame {
      Vertex x;
      std::vector<Vertex> kids;
      std::size_t next = 0;
    };
    const auto children = [&](Vertex x) {
      std::vector<Vertex> kids;
      for (std::uint32_t e : inc_.of(x)) {
        const std::uint32_t er = st_.edge_round[e];
        if (er >= st_.level[x]) continue;
        for (Vertex u : g_.edge(e))
          if (st_.level[u] == er) kids.push_back(u);
      }
      std::sort(kids.begin(), kids.end());
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      return kids;
    };
    std::vector<Frame> stack;
    visited.insert(v);
    stack.push_back({v, children(v)});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < f.kids.size()) {
        const Vertex u = f.kids[f.next++];
        if (visited.insert(u).second) stack.push_back({u, children(u)});
        continue;
      }
      order.push_back(f.x);
      stack.pop_back();
    }
    return order;
  }

  void mark(std::vector<std::uint8_t>& flags, Vertex x) {
    flags[x] = 1;
    touched_.push_back(x);
  }
  void mark_edge(std::uint32_t e) {
    edge_seen_[e] = 1;
    touched_edges_.push_back(e);
  }
  void reset() {
    for (Vertex x : touched_) in_r_[x] = pending_[x] = 0;
    for (std::uint32_t e : touched_edges_) edge_seen_[e] = 0;
    touched_.clear();
    touched_edges_.clear();
  }

  const Hypergraph& g_;
  const Stratification& st_;
  Incidence inc_;
  std::vector<std::uint8_t> in_r_, pending_, edge_seen_;
  std::vector<Vertex> touched_;
  std::vector<std::uint32_t> touched_edges_;
};

inline DepthCertificate build_R(const Hypergraph& g, const Stratification& st, Vertex v) {
  return CertificateBuilder(g, st).build(v);
}

inline SequenceCheck extract_and_validate_sequence(const Hypergraph& g, const Stratification& st,
                                                   const DepthCertificate& cert) {
  return CertificateBuilder(g, st).validate(cert);
}

// Exact depth by breadth-first search over removed sets (bitmask states).
// Degrees depend only on the removed set, so each set is expanded once and
// the first set from which v becomes removable has minimum size.
inline std::uint32_t exact_depth(const Hypergraph& g, int k, Vertex v, std::uint64_t budget = 10'000'000) {
  if (g.n > 64) throw DomainError("exact_depth: supports at most 64 vertices");
  if (v >= g.n) throw DomainError("exact_depth: vertex out of range");
  std::vector<std::uint64_t> edge_mask(g.m(), 0);
  for (std::size_t e = 0; e < g.m(); ++e)
    for (Vertex w : g.edge(e)) edge_mask[e] |= std::uint64_t{1} << w;
  const Incidence inc = Incidence::build(g);
  const auto degree = [&](Vertex w, std::uint64_t removed) {
    std::int64_t d = 0;
    for (std::uint32_t e : inc.of(w)) d += (edge_mask[e] & removed) == 0;
    return d;
  };

  if (degree(v, 0) < k) return 1;
  std::unordered_set<std::uint64_t> seen{0};
  std::vector<std::uint64_t> frontier{0};
  std::uint64_t states = 1;
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t s : frontier) {
      for (Vertex w = 0; w < g.n; ++w) {
        const std::uint64_t bit = std::uint64_t{1} << w;
        if (w == v || (s & bit) || degree(w, s) >= k) continue;
        const std::uint64_t s2 = s | bit;
        if (!seen.insert(s2).second) continue;
        if (++states > budget) throw BudgetExceeded("exact_depth: state budget exceeded");
        if (degree(v, s2) < k) return static_cast<std::uint32_t>(std::popcount(s2)) + 1;
        next.push_back(s2);
      }
    }
    frontier = std::move(next);
  }
  throw DomainError("exact_depth: vertex " + std::to_string(v) + " is in the k-core");
}

}  // namespace kcore
