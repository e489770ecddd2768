#pragma once

// Random r-uniform hypergraphs: the uniform simple model H_r(n,m), the
// allocation-partition configuration model AP_r(n,m), and truncated
// multinomial degree sequences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "kcore/errors.hpp"
#include "kcore/numeric.hpp"
#include "kcore/rng.hpp"

namespace kcore {

using Vertex = std::uint32_t;

// Edge list over vertices 0..n-1, r slots per edge. Repeated vertices and
// repeated edges are allowed; this is what a contracted configuration gives.
struct Hypergraph {
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::vector<Vertex> ends;  // edge j occupies ends[j*r, (j+1)*r)

  std::size_t m() const { return r == 0 ? 0 : ends.size() / r; }

  std::span<const Vertex> edge(std::size_t j) const { return {ends.data() + j * r, r}; }

  std::vector<std::uint32_t> degrees() const {
    std::vector<std::uint32_t> deg(n, 0);
    for (Vertex v : ends) ++deg[v];
    return deg;
  }

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;
};

// r-uniform hypergraph with r distinct vertices per edge and no repeated edge.
// Vertices inside each edge are kept sorted.
class SimpleHypergraph {
public:
  SimpleHypergraph() = default;

  static SimpleHypergraph from_edges(std::uint32_t n, std::uint32_t r, const std::vector<std::vector<Vertex>>& edges) {
    Hypergraph g{n, r, {}};
    g.ends.reserve(edges.size() * r);
    for (const auto& e : edges) {
      if (e.size() != r) throw std::invalid_argument("edge size differs from r");
      g.ends.insert(g.ends.end(), e.begin(), e.end());
    }
    return from_graph(std::move(g));
  }

  // Validates and canonicalizes (sorts each edge).
  static SimpleHypergraph from_graph(Hypergraph g) {
    if (g.r == 0) throw std::invalid_argument("r must be >= 1");
    if (g.ends.size() % g.r != 0) throw std::invalid_argument("edge array length not a multiple of r");
    for (std::size_t j = 0; j < g.m(); ++j) {
      auto first = g.ends.begin() + static_cast<std::ptrdiff_t>(j * g.r);
      std::sort(first, first + g.r);
      for (std::uint32_t i = 0; i < g.r; ++i) {
        if (first[i] >= g.n) throw std::invalid_argument("vertex id out of range");
        if (i > 0 && first[i] == first[i - 1]) throw std::invalid_argument("edge repeats a vertex");
      }
    }
    std::vector<std::size_t> order(g.m());
    std::iota(order.begin(), order.end(), 0);
    const auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(g.ends.begin() + a * g.r, g.ends.begin() + (a + 1) * g.r,
                                          g.ends.begin() + b * g.r, g.ends.begin() + (b + 1) * g.r);
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < order.size(); ++i)
      if (!less(order[i - 1], order[i])) throw std::invalid_argument("duplicate edge");
    SimpleHypergraph s;
    s.g_ = std::move(g);
    return s;
  }

  std::uint32_t n() const { return g_.n; }
  std::uint32_t r() const { return g_.r; }
  std::size_t m() const { return g_.m(); }
  std::span<const Vertex> edge(std::size_t j) const { return g_.edge(j); }
  const Hypergraph& graph() const { return g_; }

  friend bool operator==(const SimpleHypergraph&, const SimpleHypergraph&) = default;

private:
  Hypergraph g_;
};

// Allocation-partition configuration. Copies are the dense ids 0..rm-1;
// parts[j*r .. j*r+r) is the j-th r-set, allocation[c] is the bin of copy c.
struct Configuration {
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::uint32_t m = 0;
  std::vector<std::uint32_t> parts;
  std::vector<std::uint32_t> allocation;

  std::vector<std::uint32_t> bin_sizes() const {
    std::vector<std::uint32_t> sizes(n, 0);
    for (auto b : allocation) ++sizes[b];
    return sizes;
  }

  // Bins become vertices, parts become (multi-)edges.
  Hypergraph contract() const {
    Hypergraph g{n, r, std::vector<Vertex>(parts.size())};
    for (std::size_t i = 0; i < parts.size(); ++i) g.ends[i] = allocation[parts[i]];
    return g;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct HeavyDegreeSeq {
  std::uint64_t N = 0;
  std::uint64_t D = 0;
  int k = 0;
  std::vector<std::uint32_t> degrees;
};

enum class SimpleViolation { RepeatedVertex, DuplicateEdge };

struct NotSimple {
  SimpleViolation reason;
  std::size_t edge = 0;        // first offending edge
  std::size_t other_edge = 0;  // earlier twin, DuplicateEdge only

  std::string describe() const {
    if (reason == SimpleViolation::RepeatedVertex) return "repeated-vertex in edge " + std::to_string(edge);
    return "duplicate-edge " + std::to_string(edge) + " equals " + std::to_string(other_edge);
  }
};

using Projection = std::variant<SimpleHypergraph, NotSimple>;

namespace detail {

// Hash set of edge indices keyed by the edge's (sorted) vertex tuple.
class EdgeSet {
public:
  EdgeSet(const std::vector<Vertex>& ends, std::uint32_t r)
      : set_(16, Hash{&ends, r}, Eq{&ends, r}) {}

  void reserve(std::size_t n) { set_.reserve(n); }
  // Inserts edge j; returns the index of an existing equal edge, or j.
  std::uint32_t insert(std::uint32_t j) { return *set_.insert(j).first; }

private:
  struct Hash {
    const std::vector<Vertex>* ends;
    std::uint32_t r;
    std::size_t operator()(std::uint32_t j) const {
      std::uint64_t h = 0x84222325CBF29CE4ULL;
      for (std::uint32_t i = 0; i < r; ++i) h = mix64(h ^ (*ends)[std::size_t(j) * r + i]);
      return static_cast<std::size_t>(h);
    }
  };
  struct Eq {
    const std::vector<Vertex>* ends;
    std::uint32_t r;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      return std::equal(ends->begin() + std::ptrdiff_t(a) * r, ends->begin() + std::ptrdiff_t(a + 1) * r,
                        ends->begin() + std::ptrdiff_t(b) * r);
    }
  };
  std::unordered_set<std::uint32_t, Hash, Eq> set_;
};

// C(n, r), saturating at 2^62.
inline std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  constexpr std::uint64_t cap = std::uint64_t{1} << 62;
  __uint128_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc >= cap) return cap;
  }
  return static_cast<std::uint64_t>(acc);
}

inline constexpr std::uint64_t kStreamSimple = 0x53494D50;  // "SIMP"
inline constexpr std::uint64_t kStreamAP = 0x41502D4D;      // "AP-M"
inline constexpr std::uint64_t kStreamMulti = 0x4D554C54;   // "MULT"

}  // namespace detail

// Uniform over all m-subsets of the C(n,r) possible edges.
inline SimpleHypergraph sample_simple(std::uint32_t n, std::uint64_t m, std::uint32_t r, std::uint64_t seed) {
  if (r == 0 || r > n) throw InfeasibleError("sample_simple: need 1 <= r <= n");
  const std::uint64_t total = detail::binomial_saturating(n, r);
  if (m > total) throw InfeasibleError("sample_simple: m exceeds C(n,r)");
  if (m > std::numeric_limits<std::uint32_t>::max() / r) throw InfeasibleError("sample_simple: m too large");
  Rng rng = Rng::stream(seed, {detail::kStreamSimple, n, m, r});

  Hypergraph g{n, r, {}};
  g.ends.reserve(m * r);

  if (2 * m > total) {
    // Dense request: rejection degrades, so enumerate and take a random m-subset.
    constexpr std::uint64_t enumerate_cap = 10'000'000;
    if (total > enumerate_cap) throw InfeasibleError("sample_simple: m > C(n,r)/2 and C(n,r) too large to enumerate");
    std::vector<Vertex> all;
    all.reserve(total * r);
    std::vector<Vertex> combo(r);
    std::iota(combo.begin(), combo.end(), 0);
    while (true) {
      all.insert(all.end(), combo.begin(), combo.end());
      int i = static_cast<int>(r) - 1;
      while (i >= 0 && combo[i] == n - r + static_cast<Vertex>(i)) --i;
      if (i < 0) break;
      ++combo[i];
      for (std::uint32_t j = i + 1; j < r; ++j) combo[j] = combo[j - 1] + 1;
    }
    std::vector<std::uint32_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t j = i + rng.below(total - i);
      std::swap(idx[i], idx[j]);
      g.ends.insert(g.ends.end(), all.begin() + std::ptrdiff_t(idx[i]) * r, all.begin() + std::ptrdiff_t(idx[i] + 1) * r);
    }
    return SimpleHypergraph::from_graph(std::move(g));
  }

  detail::EdgeSet seen(g.ends, r);
  seen.reserve(m);
  std::vector<Vertex> tuple(r);
  for (std::uint64_t j = 0; j < m;) {
    for (std::uint32_t i = 0; i < r; ++i) {
      Vertex v;
      do v = static_cast<Vertex>(rng.below(n));
      while (std::find(tuple.begin(), tuple.begin() + i, v) != tuple.begin() + i);
      tuple[i] = v;
    }
    std::sort(tuple.begin(), tuple.end());
    g.ends.insert(g.ends.end(), tuple.begin(), tuple.end());
    if (seen.insert(static_cast<std::uint32_t>(j)) == j)
      ++j;
    else
      g.ends.resize(j * r);
  }
  return SimpleHypergraph::from_graph(std::move(g));
}

inline Configuration sample_ap(std::uint32_t n, std::uint32_t m, std::uint32_t r, std::uint64_t seed) {
  if (n < 1 || m < 1 || r < 1) throw InfeasibleError("sample_ap: need n, m, r >= 1");
  const std::uint64_t copies = std::uint64_t(m) * r;
  if (copies > std::numeric_limits<std::uint32_t>::max()) throw InfeasibleError("sample_ap: r*m overflows");
  Rng rng = Rng::stream(seed, {detail::kStreamAP, n, m, r});
  Configuration cfg{n, r, m, std::vector<std::uint32_t>(copies), std::vector<std::uint32_t>(copies)};
  std::iota(cfg.parts.begin(), cfg.parts.end(), 0);
  shuffle(std::span<std::uint32_t>(cfg.parts), rng);
  for (auto& b : cfg.allocation) b = static_cast<std::uint32_t>(rng.below(n));
  return cfg;
}

inline Projection project_and_check(const Configuration& cfg) {
  Hypergraph g = cfg.contract();
  for (std::size_t j = 0; j < g.m(); ++j) {
    auto first = g.ends.begin() + std::ptrdiff_t(j * g.r);
    std::sort(first, first + g.r);
    if (std::adjacent_find(first, first + g.r) != first + g.r) return NotSimple{SimpleViolation::RepeatedVertex, j, 0};
  }
  detail::EdgeSet seen(g.ends, g.r);
  seen.reserve(g.m());
  for (std::size_t j = 0; j < g.m(); ++j) {
    const auto hit = seen.insert(static_cast<std::uint32_t>(j));
    if (hit != j) return NotSimple{SimpleViolation::DuplicateEdge, j, hit};
  }
  return SimpleHypergraph::from_graph(std::move(g));
}

// Resample AP configurations until the projection is simple. Returns the
// hypergraph and the number of attempts used.
inline std::pair<SimpleHypergraph, std::uint64_t> sample_simple_via_ap(std::uint32_t n, std::uint32_t m, std::uint32_t r,
                                                                       std::uint64_t seed,
                                                                       std::uint64_t max_attempts = 1'000'000) {
  for (std::uint64_t a = 0; a < max_attempts; ++a) {
    auto proj = project_and_check(sample_ap(n, m, r, derive_seed(seed, {a})));
    if (auto* s = std::get_if<SimpleHypergraph>(&proj)) return {std::move(*s), a + 1};
  }
  throw BudgetExceeded("sample_simple_via_ap: no simple projection within budget");
}

// Draws from Po(lambda) conditioned on being >= k.
class TruncatedPoisson {
public:
  TruncatedPoisson(int k, double lambda) : k_(k), lambda_(lambda) {
    if (k < 0 || !(lambda > 0.0)) throw DomainError("TruncatedPoisson: need k >= 0, lambda > 0");
    log_lambda_ = std::log(lambda);
    mode_ = std::max(k, static_cast<int>(std::floor(lambda)));
    log_pmax_ = log_weight(mode_);
    if (lambda <= 30.0) {
      // Inversion table over j = k, k+1, ... until the tail is negligible.
      double w = 1.0;
      double total = 0.0;
      std::vector<double> ws;
      for (int j = k;; ++j) {
        if (j > k) w *= lambda / j;
        ws.push_back(w);
        total += w;
        if (j > lambda + 10 && w < 1e-17 * total) break;
      }
      cdf_.resize(ws.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        acc += ws[i] / total;
        cdf_[i] = acc;
      }
      cdf_.back() = 1.0;
    } else {
      const double slam = std::sqrt(lambda);
      b_ = 0.931 + 2.53 * slam;
      a_ = -0.059 + 0.02483 * b_;
      inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
      vr_ = 0.9277 - 3.6224 / (b_ - 2.0);
    }
  }

  int k() const { return k_; }
  double lambda() const { return lambda_; }
  int mode() const { return mode_; }

  // log(lambda^j / j!) up to a constant shared by all j.
  double log_weight(int j) const { return j * log_lambda_ - std::lgamma(j + 1.0); }
  // log of pmf(j) / pmf(mode), j >= k.
  double log_ratio_to_mode(int j) const { return log_weight(j) - log_pmax_; }

  int operator()(Rng& rng) const {
    if (!cdf_.empty()) {
      const double u = rng.uniform();
      std::size_t i = 0;
      while (cdf_[i] <= u) ++i;
      return k_ + static_cast<int>(i);
    }
    int x;
    do x = ptrs(rng);
    while (x < k_);
    return x;
  }

private:
  // Transformed rejection with squeeze (Hormann), valid for lambda >= 10.
  int ptrs(Rng& rng) const {
    while (true) {
      const double u = rng.uniform() - 0.5;
      const double v = rng.uniform_open();
      const double us = 0.5 - std::abs(u);
      const double kk = std::floor((2.0 * a_ / us + b_) * u + lambda_ + 0.43);
      if (us >= 0.07 && v <= vr_) return static_cast<int>(kk);
      if (kk < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_) <=
          -lambda_ + kk * log_lambda_ - std::lgamma(kk + 1.0))
        return static_cast<int>(kk);
    }
  }

  int k_;
  double lambda_;
  double log_lambda_ = 0;
  int mode_ = 0;
  double log_pmax_ = 0;
  std::vector<double> cdf_;
  double a_ = 0, b_ = 0, inv_alpha_ = 0, vr_ = 0;
};

// Multi(N, D, k): D copies into N bins, uniform given every bin gets >= k.
//
// Draws N-1 i.i.d. k-truncated Po(lambda) with g_k(lambda) = D/N, sets the
// last entry to the remainder and accepts with probability
// pmf(remainder) / pmf(mode). Accepted vectors are i.i.d. truncated Poissons
// conditioned on summing to D, which is exactly Multi(N, D, k).
inline HeavyDegreeSeq sample_truncated_multinomial(std::uint64_t N, std::uint64_t D, int k, std::uint64_t seed,
                                                   std::uint64_t max_attempts = 1'000'000) {
  if (N < 1) throw InfeasibleError("sample_truncated_multinomial: N < 1");
  if (k < 0) throw DomainError("sample_truncated_multinomial: k < 0");
  if (D < std::uint64_t(k) * N) throw InfeasibleError("sample_truncated_multinomial: D < kN");
  HeavyDegreeSeq out{N, D, k, std::vector<std::uint32_t>(N, static_cast<std::uint32_t>(k))};
  if (D == std::uint64_t(k) * N) return out;

  const double mean = static_cast<double>(D) / static_cast<double>(N);
  const TruncatedPoisson draw(k, k == 0 ? mean : lambda_of(k, mean));
  Rng rng = Rng::stream(seed, {detail::kStreamMulti, N, D, static_cast<std::uint64_t>(k)});
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::uint64_t sum = 0;
    bool over = false;
    for (std::uint64_t i = 0; i + 1 < N; ++i) {
      const auto x = static_cast<std::uint32_t>(draw(rng));
      out.degrees[i] = x;
      sum += x;
      if (sum + std::uint64_t(k) > D) {
        over = true;
        break;
      }
    }
    const double u = rng.uniform_open();
    if (over) continue;
    const std::uint64_t last = D - sum;
    if (last > std::uint64_t(std::numeric_limits<int>::max())) continue;
    if (std::log(u) <= draw.log_ratio_to_mode(static_cast<int>(last))) {
      out.degrees[N - 1] = static_cast<std::uint32_t>(last);
      return out;
    }
  }
  throw BudgetExceeded("sample_truncated_multinomial: rejection budget exhausted");
}

}  // namespace kcore
