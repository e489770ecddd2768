#pragma once

// Core-emergence threshold c_{r,k} and the core-size predictions around it.

#include <cmath>
#include <string>
#include <vector>

#include "kcore/errors.hpp"
#include "kcore/numeric.hpp"

namespace kcore {

struct CriticalPoint {
  ParamsRK params;
  double mu_rk = 0;    // argmin of h
  double c_rk = 0;     // h(mu_rk) / r, edges per vertex
  double alpha = 0;    // core vertex fraction at criticality
  double beta = 0;     // core edge fraction at criticality
  double zeta = 0;     // r beta / alpha, mean core degree
  double p_star = 0;   // psi(zeta)
  double rho_bar = 0;  // share of degree-k vertices in the core
  double k1 = 0;       // mu(c) - mu_rk ~ k1 (c - c_rk)^{1/2}
  // Leading constants of alpha(c) - alpha and beta(c) - beta in the same
  // expansion. Finite-difference estimates, not closed forms.
  double k2_approx = 0;
  double k3_approx = 0;
};

struct SupercriticalPoint {
  ParamsRK params;
  double c = 0;
  double mu_c = 0;  // larger root of h(mu) = r c
  double alpha_c = 0;
  double beta_c = 0;

  double predicted_core_vertices(double n) const { return alpha_c * n; }
  double predicted_core_edges(double n) const { return beta_c * n; }
};

struct IdentityCheck {
  std::string name;
  bool passed = false;
  double residual = 0;
};

struct IdentityReport {
  ParamsRK params;
  std::vector<IdentityCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const IdentityCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline double h_or_inf(ParamsRK p, double mu) {
  try {
    return h_rk(p, mu);
  } catch (const OverflowError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Sign of h'(mu): h' = 0  <=>  scaled_tail(k-1, mu) = (k-1)(r-1).
inline double stationarity(ParamsRK p, double mu) {
  return scaled_tail(p.k - 1, mu) - static_cast<double>((p.k - 1) * (p.r - 1));
}

inline double golden_section_min(ParamsRK p, double a, double b, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double hc = h_or_inf(p, c);
  double hd = h_or_inf(p, d);
  for (int it = 0; it < 500 && (b - a) > x_tol; ++it) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h_or_inf(p, c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h_or_inf(p, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

inline CriticalPoint solve_critical(ParamsRK p, RealTol tol = {}) {
  p.validate();
  tol.validate();

  double lo = 1e-6;
  double hi = 10.0 * p.r * p.k;
  while (detail::h_or_inf(p, hi) < detail::h_or_inf(p, 0.5 * (lo + hi))) {
    hi *= 2.0;
    if (hi > 1e6) throw ConvergenceError("solve_critical: no interior minimum of h");
  }
  const double golden = detail::golden_section_min(p, lo, hi, 1e-9);
  if (!(golden > lo * 1.01 && golden < hi * 0.99)) throw ConvergenceError("solve_critical: minimum at bracket edge");

  // h is flat at its minimum, so golden section alone pins mu only to about
  // sqrt(eps). Polish with bisection on the stationarity condition.
  double width = 1e-3 * golden;
  double a = golden - width;
  double b = golden + width;
  for (int it = 0; detail::stationarity(p, a) > 0.0 || detail::stationarity(p, b) < 0.0; ++it) {
    if (it > 60) throw ConvergenceError("solve_critical: stationarity bracket failed");
    width *= 2.0;
    a = std::max(0.5 * a, golden - width);
    b = golden + width;
  }
  for (int it = 0; it < tol.max_iter && b - a > 2.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
    const double mid = 0.5 * (a + b);
    if (detail::stationarity(p, mid) < 0.0)
      a = mid;
    else
      b = mid;
  }
  const double mu = 0.5 * (a + b);

  CriticalPoint cp;
  cp.params = p;
  cp.mu_rk = mu;
  cp.c_rk = h_rk(p, mu) / p.r;
  cp.alpha = poisson_tail(p.k, mu);
  cp.beta = mu * poisson_tail(p.k - 1, mu) / p.r;
  cp.zeta = g_k(p.k, mu);
  cp.p_star = psi(p.k, cp.zeta, tol);
  cp.rho_bar = rho_bar(p.k, mu);

  const double h2 = second_derivative_richardson([p](double m) { return h_rk(p, m); }, mu, 1e-3);
  // h(mu) = r c, so (mu - mu_rk)^2 h''/2 = r (c - c_rk).
  cp.k1 = std::sqrt(2.0 * p.r / h2);

  const double s = 1e-5;
  const auto alpha_at = [p](double m) { return poisson_tail(p.k, m); };
  const auto beta_at = [p](double m) { return m * poisson_tail(p.k - 1, m) / p.r; };
  cp.k2_approx = (alpha_at(mu + s) - alpha_at(mu - s)) / (2 * s) * cp.k1;
  cp.k3_approx = (beta_at(mu + s) - beta_at(mu - s)) / (2 * s) * cp.k1;
  return cp;
}

inline SupercriticalPoint solve_supercritical(const CriticalPoint& crit, double c, RealTol tol = {}) {
  tol.validate();
  const ParamsRK p = crit.params;
  if (!std::isfinite(c) || c < crit.c_rk - tol.abs_tol)
    throw DomainError("solve_supercritical: c below c_rk = " + std::to_string(crit.c_rk));

  SupercriticalPoint sp;
  sp.params = p;
  sp.c = c;
  double mu = crit.mu_rk;
  const double target = p.r * c;
  if (c > crit.c_rk) {
    double lo = crit.mu_rk;
    double hi = std::max(2.0 * crit.mu_rk, 1.0);
    while (h_rk(p, hi) <= target) hi *= 2.0;
    for (int it = 0; it < std::max(tol.max_iter, 200); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (h_rk(p, mid) < target)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    mu = 0.5 * (lo + hi);
  }
  sp.mu_c = mu;
  sp.alpha_c = poisson_tail(p.k, mu);
  sp.beta_c = mu * poisson_tail(p.k - 1, mu) / p.r;
  return sp;
}

inline SupercriticalPoint solve_supercritical(ParamsRK p, double c, RealTol tol = {}) {
  return solve_supercritical(solve_critical(p, tol), c, tol);
}

// Numerical check of the identities tying the critical quantities together.
inline IdentityReport verify_identities(ParamsRK p, RealTol tol = {}, double threshold = 1e-8) {
  p.validate();
  const CriticalPoint cp = solve_critical(p, tol);
  const double r = p.r;
  const double k = p.k;
  const double target = 1.0 / ((r - 1.0) * (k - 1.0));

  IdentityReport rep;
  rep.params = p;
  const auto add = [&](std::string name, double residual, bool extra_ok = true) {
    rep.checks.push_back({std::move(name), extra_ok && residual <= threshold, residual});
  };

  // Stationarity by symmetric difference quotient, scaled by h.
  {
    const double s = 1e-5;
    const double hp = (h_rk(p, cp.mu_rk + s) - h_rk(p, cp.mu_rk - s)) / (2 * s);
    add("stationarity", std::abs(hp) / h_rk(p, cp.mu_rk));
  }
  add("degree_k_share", std::abs(k * cp.rho_bar * cp.alpha / (r * cp.beta) - target));
  add("critical_pmf_ratio", std::abs(poisson_pmf(p.k - 1, cp.mu_rk) / poisson_tail(p.k - 1, cp.mu_rk) - target));
  {
    const double below = std::max(0.0, k - cp.zeta);
    const double above = std::max(0.0, cp.zeta - r * (k - 1.0));
    add("zeta_bounds", below + above, cp.zeta > k && cp.zeta < r * (k - 1.0));
  }
  add("zeta_equals_g", std::abs(cp.zeta - g_k(p.k, cp.mu_rk)));
  add("psi_zeta", std::abs(psi(p.k, cp.zeta, tol) - target));
  {
    // Appendix h(x) = e^{-x} x^{k-1} / (f_{k-1}(x) (k-2)!) at x* = r(k-1) - r/(r-1).
    const double x_star = r * (k - 1.0) - r / (r - 1.0);
    const double h_tilde = (k - 1.0) / detail::scaled_tail(p.k - 1, x_star);
    add("h_tilde_at_x_star", std::max(0.0, h_tilde - 1.0 / (r - 1.0)), h_tilde < 1.0 / (r - 1.0));
  }
  {
    double worst = 0.0;
    bool ok = true;
    for (int kk = 2; kk <= 8; ++kk) {
      for (int mu = kk + 2; mu <= kk + 20; ++mu) {
        const double f = poisson_tail(kk, mu);
        if (!(f > 0.5)) ok = false;
        worst = std::max(worst, 0.5 - f);
      }
    }
    add("tail_above_half", std::max(0.0, worst), ok);
  }
  return rep;
}

}  // namespace kcore
