#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "kcore/hypergraph.hpp"
#include "kcore/io.hpp"
#include "kcore/numeric.hpp"

using namespace kcore;

namespace {

std::set<std::vector<Vertex>> edge_set(const SimpleHypergraph& g) {
  std::set<std::vector<Vertex>> s;
  for (std::size_t j = 0; j < g.m(); ++j) s.emplace(g.edge(j).begin(), g.edge(j).end());
  return s;
}

// log P(deg = j) for a fixed vertex of H_r(n, m): hypergeometric over the
// C(n,r) possible edges, C(n-1,r-1) of which contain the vertex.
double log_choose(double a, double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); }

double degree_pmf(double n, double m, double r, int j) {
  const double total = std::exp(log_choose(n, r));
  const double with_v = std::exp(log_choose(n - 1, r - 1));
  if (j > m || j > with_v) return 0.0;
  return std::exp(log_choose(with_v, j) + log_choose(total - with_v, m - j) - log_choose(total, m));
}

}  // namespace

TEST(SampleSimple, CompleteGraphWhenForced) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto g = sample_simple(5, 10, 2, seed);
    EXPECT_EQ(g.m(), 10u);
    EXPECT_EQ(edge_set(g).size(), 10u);
  }
}

TEST(SampleSimple, Deterministic) {
  const auto a = sample_simple(10000, 10000, 3, 1);
  const auto b = sample_simple(10000, 10000, 3, 1);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_simple(10000, 10000, 3, 2));
}

TEST(SampleSimple, EdgesAreDistinctSortedSubsets) {
  const auto g = sample_simple(300, 900, 3, 9);
  EXPECT_EQ(edge_set(g).size(), 900u);
  for (std::size_t j = 0; j < g.m(); ++j) {
    const auto e = g.edge(j);
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
    EXPECT_EQ(std::adjacent_find(e.begin(), e.end()), e.end());
  }
}

TEST(SampleSimple, Infeasible) {
  EXPECT_THROW(sample_simple(5, 11, 2, 1), InfeasibleError);
  EXPECT_THROW(sample_simple(2, 1, 3, 1), InfeasibleError);
}

TEST(SampleSimple, DegreeLawMatchesHypergeometric) {
  const std::uint32_t n = 1000, r = 3;
  const double c = 0.9;
  const auto m = static_cast<std::uint64_t>(c * n);
  const int trials = 20;
  std::map<int, double> observed;
  for (int t = 0; t < trials; ++t) {
    const auto deg = sample_simple(n, m, r, 100 + t).graph().degrees();
    for (auto d : deg) observed[static_cast<int>(d)] += 1;
  }
  for (int j = 0; j <= 8; ++j) {
    const double p = degree_pmf(n, static_cast<double>(m), r, j);
    const double expected = p * n * trials;
    const double sigma = std::sqrt(n * trials * p * (1 - p));
    EXPECT_NEAR(observed[j], expected, 3 * sigma + 1) << "degree " << j;
    // Poisson(rc) is the large-n limit.
    EXPECT_NEAR(p, poisson_pmf(j, r * c), 5e-3);
  }
}

TEST(SampleSimple, UniformOverAllGraphsOnFourVertices) {
  // All C(6,2) = 15 two-edge graphs on 4 labelled vertices equally likely.
  std::map<std::set<std::vector<Vertex>>, int> counts;
  const int samples = 300000;
  for (int s = 0; s < samples; ++s) ++counts[edge_set(sample_simple(4, 2, 2, s))];
  ASSERT_EQ(counts.size(), 15u);
  double chi2 = 0;
  const double expected = samples / 15.0;
  for (const auto& [g, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 29.14);  // chi-square 1% critical value, 14 dof
}

TEST(SampleAP, Accounting) {
  const auto cfg = sample_ap(3, 1, 2, 4);
  EXPECT_EQ(cfg.parts.size(), 2u);
  const auto sizes = cfg.bin_sizes();
  EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), 0u), 2u);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = sample_ap(40, 70, 3, seed);
    const auto b = c.bin_sizes();
    EXPECT_EQ(std::accumulate(b.begin(), b.end(), 0u), 210u);
    std::vector<std::uint32_t> p = c.parts;
    std::sort(p.begin(), p.end());
    for (std::uint32_t i = 0; i < p.size(); ++i) ASSERT_EQ(p[i], i);
    const auto g = c.contract();
    const auto d = g.degrees();
    EXPECT_EQ(d, b);
  }
  EXPECT_EQ(sample_ap(40, 70, 3, 5), sample_ap(40, 70, 3, 5));
}

TEST(ProjectAndCheck, Classification) {
  Configuration ok{3, 2, 1, {0, 1}, {0, 2}};
  const auto p = project_and_check(ok);
  ASSERT_TRUE(std::holds_alternative<SimpleHypergraph>(p));
  EXPECT_EQ(std::get<SimpleHypergraph>(p).m(), 1u);

  Configuration loop{3, 2, 1, {0, 1}, {1, 1}};
  const auto q = project_and_check(loop);
  ASSERT_TRUE(std::holds_alternative<NotSimple>(q));
  EXPECT_EQ(std::get<NotSimple>(q).reason, SimpleViolation::RepeatedVertex);

  Configuration twin{3, 2, 2, {0, 1, 2, 3}, {0, 1, 1, 0}};
  const auto w = project_and_check(twin);
  ASSERT_TRUE(std::holds_alternative<NotSimple>(w));
  EXPECT_EQ(std::get<NotSimple>(w).reason, SimpleViolation::DuplicateEdge);
  EXPECT_EQ(std::get<NotSimple>(w).edge, 1u);
  EXPECT_EQ(std::get<NotSimple>(w).other_edge, 0u);
}

TEST(ProjectAndCheck, SimpleFractionMatchesOracle) {
  // tests/oracles/ap_simple_oracle.py: P(simple) ~ 0.0100 at (100, 150, 3).
  int simple = 0;
  const int seeds = 100000;
  for (int s = 0; s < seeds; ++s) simple += std::holds_alternative<SimpleHypergraph>(project_and_check(sample_ap(100, 150, 3, s)));
  const double p = 0.0100, sigma = std::sqrt(p * (1 - p) / seeds);
  EXPECT_NEAR(double(simple) / seeds, p, 5 * sigma);
}

TEST(ProjectAndCheck, RejectionLoopTerminates) {
  // Oracle acceptance rate at (1000, 1000, 3) is 0.0497, so about 20 attempts.
  std::uint64_t total = 0;
  const int samples = 200;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto [g, attempts] = sample_simple_via_ap(1000, 1000, 3, s);
    EXPECT_EQ(g.m(), 1000u);
    total += attempts;
  }
  const double mean = double(total) / samples;
  EXPECT_NEAR(mean, 1 / 0.0497, 0.25 / 0.0497);
}

TEST(ProjectAndCheck, SimpleProjectionIsUniform) {
  std::map<std::set<std::vector<Vertex>>, int> counts;
  int accepted = 0;
  for (int s = 0; s < 1000000; ++s) {
    const auto p = project_and_check(sample_ap(4, 2, 2, s));
    if (const auto* g = std::get_if<SimpleHypergraph>(&p)) {
      ++counts[edge_set(*g)];
      ++accepted;
    }
  }
  ASSERT_EQ(counts.size(), 15u);
  double chi2 = 0;
  const double expected = accepted / 15.0;
  for (const auto& [g, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 29.14);
}

TEST(TruncatedMultinomial, BoundaryAndInvariants) {
  for (int k = 1; k <= 4; ++k) {
    const auto s = sample_truncated_multinomial(2, 2 * k, k, 1);
    EXPECT_EQ(s.degrees, (std::vector<std::uint32_t>{std::uint32_t(k), std::uint32_t(k)}));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_truncated_multinomial(500, 1400, 2, seed);
    EXPECT_EQ(std::accumulate(s.degrees.begin(), s.degrees.end(), std::uint64_t{0}), 1400u);
    EXPECT_GE(*std::min_element(s.degrees.begin(), s.degrees.end()), 2u);
  }
  EXPECT_THROW(sample_truncated_multinomial(10, 19, 2, 1), InfeasibleError);
  EXPECT_THROW(sample_truncated_multinomial(0, 0, 2, 1), InfeasibleError);
}

TEST(TruncatedMultinomial, ExactLawOnTinyDomain) {
  // Multi(N=3, D=8, k=2): P(d) proportional to 1/prod d_i!.
  std::map<std::vector<std::uint32_t>, int> counts;
  const int samples = 60000;
  for (int s = 0; s < samples; ++s) ++counts[sample_truncated_multinomial(3, 8, 2, s).degrees];
  std::map<std::vector<std::uint32_t>, double> weight;
  double z = 0;
  for (std::uint32_t a = 2; a <= 4; ++a)
    for (std::uint32_t b = 2; a + b <= 6; ++b) {
      const std::uint32_t c = 8 - a - b;
      const double w = 1.0 / (std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(c + 1));
      weight[{a, b, c}] = w;
      z += w;
    }
  ASSERT_EQ(counts.size(), weight.size());
  double chi2 = 0;
  for (const auto& [d, w] : weight) {
    const double e = samples * w / z;
    chi2 += (counts[d] - e) * (counts[d] - e) / e;
  }
  EXPECT_LT(chi2, 15.09);  // 1% critical value, 5 dof
}

TEST(TruncatedPoisson, LargeLambdaBranch) {
  const TruncatedPoisson tp(3, 50.0);
  Rng rng(1);
  double sum = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const int x = tp(rng);
    ASSERT_GE(x, 3);
    sum += x;
  }
  EXPECT_NEAR(sum / draws, g_k(3, 50.0), 0.05);
}

TEST(TruncatedPoisson, SmallLambdaMean) {
  for (double lam : {0.3, 2.0, 12.0}) {
    const TruncatedPoisson tp(2, lam);
    Rng rng(2);
    double sum = 0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) sum += tp(rng);
    EXPECT_NEAR(sum / draws, g_k(2, lam), 0.02 * g_k(2, lam)) << lam;
  }
}

TEST(HypergraphIO, RoundTrip) {
  const auto g = sample_simple(50, 80, 3, 4);
  std::stringstream ss;
  io::write_hypergraph(ss, g.graph());
  const auto back = io::read_hypergraph(ss);
  EXPECT_EQ(back.ends, g.graph().ends);
  EXPECT_EQ(back.n, 50u);

  const auto cfg = sample_ap(20, 15, 3, 4);
  std::stringstream cs;
  io::write_configuration(cs, cfg);
  EXPECT_EQ(io::read_configuration(cs), cfg);

  std::stringstream bad("3 1 2\n0 7\n");
  EXPECT_THROW(io::read_hypergraph(bad), io::ParseError);
}

TEST(SimpleHypergraph, RejectsInvalidEdges) {
  EXPECT_THROW(SimpleHypergraph::from_edges(4, 2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(SimpleHypergraph::from_edges(4, 2, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(SimpleHypergraph::from_edges(4, 2, {{0, 4}}), std::invalid_argument);
  EXPECT_NO_THROW(SimpleHypergraph::from_edges(4, 2, {{0, 1}, {1, 2}}));
}
