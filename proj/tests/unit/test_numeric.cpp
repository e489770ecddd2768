#include <gtest/gtest.h>

#include <cmath>

#include "kcore/numeric.hpp"

using namespace kcore;

TEST(PoissonTail, ClosedForms) {
  EXPECT_EQ(poisson_tail(0, 5.0), 1.0);
  EXPECT_NEAR(poisson_tail(1, 1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_tail(2, 1.0), 1.0 - 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_tail(1, 1.0), 0.6321206, 1e-7);
  EXPECT_NEAR(poisson_tail(2, 1.0), 0.2642411, 1e-7);
}

TEST(PoissonTail, RejectsNegativeArguments) {
  EXPECT_THROW(poisson_tail(2, -1.0), DomainError);
  EXPECT_THROW(poisson_tail(-1, 1.0), DomainError);
}

TEST(PoissonTail, SmallMuKeepsRelativeAccuracy) {
  // P(Po(mu) >= 3) ~ mu^3/6 for tiny mu.
  const double mu = 1e-6;
  EXPECT_NEAR(poisson_tail(3, mu) / (mu * mu * mu / 6.0), 1.0, 1e-5);
}

TEST(PoissonTail, LargeMu) {
  EXPECT_NEAR(poisson_tail(5, 800.0), 1.0, 1e-15);
  EXPECT_NEAR(poisson_tail(0, 1e4), 1.0, 0.0);
}

TEST(PoissonTail, BoundedAndMonotoneInThreshold) {
  for (int i = 0; i <= 200; ++i) {
    const double mu = 0.05 * i;
    for (int t = 0; t <= 15; ++t) {
      const double a = poisson_tail(t, mu), b = poisson_tail(t + 1, mu);
      ASSERT_GE(a, 0.0);
      ASSERT_LE(a, 1.0);
      ASSERT_GE(a, b) << "t=" << t << " mu=" << mu;
    }
  }
}

TEST(PoissonTail, AboveHalfWhenThresholdBelowFloorMu) {
  for (int k = 2; k <= 8; ++k)
    for (int mu = k + 2; mu <= k + 20; ++mu) EXPECT_GT(poisson_tail(k, mu), 0.5) << k << " " << mu;
}

TEST(Hrk, ClosedForms) {
  EXPECT_NEAR(h_rk({2, 2}, 1.0), 1.0 / (1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_NEAR(h_rk({2, 2}, 1.0), 1.5819767, 1e-7);
  EXPECT_NEAR(h_rk({3, 2}, 1.0), 2.5026503, 1e-7);
  for (int r = 2; r <= 6; ++r) EXPECT_EQ(h_rk({r, 1}, 2.0), 2.0);
}

TEST(Hrk, Errors) {
  EXPECT_THROW(h_rk({3, 2}, 0.0), DomainError);
  EXPECT_THROW(h_rk({3, 2}, -1.0), DomainError);
  EXPECT_THROW(h_rk({6, 30}, 1e-3), OverflowError);
}

TEST(Gk, ClosedFormAndLimit) {
  const double e = std::exp(-1.0);
  EXPECT_NEAR(g_k(2, 1.0), (1 - e) / (1 - 2 * e), 1e-14);
  EXPECT_NEAR(g_k(2, 1.0), 2.3922112, 1e-7);
  EXPECT_NEAR(g_k(2, 1e-9), 2.0, 1e-8);
  EXPECT_GT(g_k(2, 1e-9), 2.0);
  EXPECT_THROW(g_k(2, 0.0), DomainError);
  EXPECT_EQ(g_k(2, 0.0, true), 2.0);
  EXPECT_THROW(g_k(2, -1.0, true), DomainError);
  EXPECT_GT(g_k(3, 10.0), g_k(3, 5.0));
  EXPECT_GT(g_k(3, 5.0), 3.0);
}

TEST(Gk, StrictlyIncreasingOnGrid) {
  for (int k = 2; k <= 6; ++k) {
    double prev = g_k(k, 0.05);
    for (int i = 2; i <= 1000; ++i) {
      const double cur = g_k(k, 0.05 * i);
      ASSERT_LT(prev, cur) << "k=" << k << " lambda=" << 0.05 * i;
      prev = cur;
    }
  }
}

TEST(LambdaOf, RoundTrip) {
  EXPECT_NEAR(lambda_of(2, 2.3922112), 1.0, 1e-6);
  const RealTol tol;
  const double x = 2.0 + 1e-9;
  const double lam = lambda_of(2, x, tol);
  EXPECT_GT(lam, 0.0);
  EXPECT_LT(lam, 1e-6);
  EXPECT_NEAR(g_k(2, lam), x, 10 * tol.abs_tol);
}

TEST(LambdaOf, Errors) {
  EXPECT_THROW(lambda_of(3, 3.0), DomainError);
  EXPECT_THROW(lambda_of(3, 2.5), DomainError);
  RealTol starved{1e-12, 3};
  EXPECT_THROW(lambda_of(3, 7.0, starved), ConvergenceError);
}

TEST(LambdaOf, RoundTripGrid) {
  const RealTol tol;
  for (int r = 2; r <= 6; ++r)
    for (int k = 2; k <= 6; ++k) {
      const double lo = k + 1e-6, hi = 3.0 * r * k;
      for (int i = 0; i <= 100; ++i) {
        const double x = lo + (hi - lo) * i / 100.0;
        ASSERT_LE(std::abs(g_k(k, lambda_of(k, x, tol)) - x), 10 * tol.abs_tol) << "k=" << k << " x=" << x;
      }
    }
}

TEST(Psi, StrictlyDecreasingOnGrid) {
  for (int r = 2; r <= 6; ++r)
    for (int k = 2; k <= 6; ++k) {
      const double lo = k + 1e-3, hi = r * (k - 1) + 5.0;
      double prev = psi(k, lo);
      for (int i = 1; i < 1000; ++i) {
        const double cur = psi(k, lo + (hi - lo) * i / 999.0);
        ASSERT_LT(cur, prev) << "k=" << k << " i=" << i;
        ASSERT_GT(cur, 0.0);
        ASSERT_LT(cur, 1.0);
        prev = cur;
      }
    }
  EXPECT_GT(psi(2, 2.5), psi(2, 3.5));
}

TEST(RhoBar, Values) {
  // mpmath: e^{-1}/2 / (1 - 2 e^{-1})
  EXPECT_NEAR(rho_bar(2, 1.0), 0.696105595588666, 1e-12);
  EXPECT_LT(rho_bar(2, 200.0), 1e-50);
  EXPECT_THROW(rho_bar(2, 0.0), DomainError);
  for (int i = 1; i <= 100; ++i) {
    const double v = rho_bar(3, 0.1 * i);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(SecondDerivative, QuadraticCalibration) {
  const auto sq = [](double x) { return x * x; };
  EXPECT_NEAR(second_derivative(sq, 1.7, 1e-3), 2.0, 1e-8);
  EXPECT_NEAR(second_derivative_richardson(sq, 1.7, 1e-3), 2.0, 1e-8);
}

TEST(SecondDerivative, HrkPositiveAndStepStable) {
  for (int r = 2; r <= 6; ++r)
    for (int k = 2; k <= 6; ++k) {
      if (r == 2 && k == 2) continue;
      EXPECT_GT(h_second_derivative({r, k}, 1.0 + 0.5 * k, 1e-3), 0.0);
    }
  const double mu23 = 1.79328213290076;  // mpmath argmin for (2,3)
  const double a = h_second_derivative({2, 3}, mu23, 1e-3);
  const double b = h_second_derivative({2, 3}, mu23, 1e-4);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a, b, 1e-6);
  EXPECT_NEAR(a, 0.826597986706299, 1e-6);
  EXPECT_GT(h_second_derivative({3, 2}, 1.25643120862617, 1e-3), 0.0);
  EXPECT_THROW(h_second_derivative({2, 3}, 1.0, 0.5), DomainError);
  EXPECT_THROW(h_second_derivative({2, 3}, 1.0, 0.0), DomainError);
}

TEST(Params, Validation) {
  EXPECT_THROW(ParamsRK({2, 2}).validate(), DomainError);
  EXPECT_THROW(ParamsRK({1, 3}).validate(), DomainError);
  EXPECT_THROW(ParamsRK({3, 1}).validate(), DomainError);
  EXPECT_NO_THROW(ParamsRK({2, 3}).validate());
  EXPECT_THROW(RealTol({0.0, 10}).validate(), DomainError);
  EXPECT_THROW(RealTol({1e-12, 0}).validate(), DomainError);
}
