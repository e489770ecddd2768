#pragma once

#include <cstdint>
#include <vector>

#include "kcore/hypergraph.hpp"
#include "kcore/rng.hpp"

namespace kcore::testing {

inline SimpleHypergraph path3() { return SimpleHypergraph::from_edges(3, 2, {{0, 1}, {1, 2}}); }
inline SimpleHypergraph triangle() { return SimpleHypergraph::from_edges(3, 2, {{0, 1}, {1, 2}, {0, 2}}); }

// Small random simple hypergraph with a random edge count.
inline SimpleHypergraph random_small(std::uint64_t seed, std::uint32_t n_max, std::uint32_t r) {
  Rng rng(seed);
  const std::uint32_t n = r + 1 + static_cast<std::uint32_t>(rng.below(n_max - r));
  const std::uint64_t total = detail::binomial_saturating(n, r);
  const std::uint64_t m_max = std::min<std::uint64_t>(total, 3 * n);
  const std::uint64_t m = rng.below(m_max + 1);
  return sample_simple(n, m, r, seed);
}

}  // namespace kcore::testing
