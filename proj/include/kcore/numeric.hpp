#pragma once

// Poisson tail functions and the truncated-Poisson helpers built on them.
//
// Notation used throughout the library:
//   f_t(mu)  = P(Po(mu) >= t)
//   h(mu)    = mu / f_{k-1}(mu)^{r-1}
//   g_k(l)   = l f_{k-1}(l) / f_k(l)   (mean of a k-truncated Poisson)
//   psi(x)   = P(a uniform heavy copy sits in a degree-k bin | mean degree x)

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kcore/errors.hpp"

namespace kcore {

struct ParamsRK {
  int r = 0;  // edge arity
  int k = 0;  // core threshold

  bool valid() const { return r >= 2 && k >= 2 && !(r == 2 && k == 2); }

  void validate() const {
    if (!valid()) {
      throw DomainError("invalid (r,k) = (" + std::to_string(r) + "," + std::to_string(k) +
                        "): need r,k >= 2 and (r,k) != (2,2)");
    }
  }

  friend bool operator==(const ParamsRK&, const ParamsRK&) = default;
};

struct RealTol {
  double abs_tol = 1e-12;
  int max_iter = 200;

  void validate() const {
    if (!(abs_tol > 0.0) || max_iter < 1) throw DomainError("RealTol: need abs_tol > 0, max_iter >= 1");
  }
};

namespace detail {

// Neumaier variant of compensated summation.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Sum_{j>=0} lambda^j * k0! / (k0+j)!  ==  f_{k0}(lambda) / P(Po(lambda) = k0).
// Stays finite where both the tail and the pmf underflow.
inline double scaled_tail(int k0, double lambda) {
  if (lambda > 500.0) {
    const double log_pmf = -lambda + k0 * std::log(lambda) - std::lgamma(k0 + 1.0);
    double tail = 1.0;
    double term = std::exp(-lambda);
    CompensatedSum lower;
    if (term > 0.0) {
      for (int i = 0; i < k0; ++i) {
        lower.add(term);
        term *= lambda / (i + 1);
      }
      tail = 1.0 - lower.value();
    }
    return std::exp(std::log(tail) - log_pmf);
  }
  CompensatedSum s;
  double term = 1.0;
  for (int j = 0;; ++j) {
    if (j > 0) term *= lambda / (k0 + j);
    s.add(term);
    if (j > lambda && term < 1e-18 * s.value()) break;
  }
  return s.value();
}

}  // namespace detail

inline double poisson_pmf(int i, double mu) {
  if (i < 0) return 0.0;
  if (mu == 0.0) return i == 0 ? 1.0 : 0.0;
  return std::exp(-mu + i * std::log(mu) - std::lgamma(i + 1.0));
}

// f_t(mu) = P(Po(mu) >= t).
inline double poisson_tail(int t, double mu) {
  if (t < 0) throw DomainError("poisson_tail: t < 0");
  if (!std::isfinite(mu) || mu < 0.0) throw DomainError("poisson_tail: mu must be finite and >= 0");
  if (t == 0) return 1.0;
  if (mu == 0.0) return 0.0;

  // Small mean relative to t: the upper series converges geometrically and
  // keeps full relative accuracy where 1 - lower would cancel.
  if (mu < t) {
    detail::CompensatedSum s;
    double term = poisson_pmf(t, mu);
    for (int i = t; term > 0.0; ++i) {
      s.add(term);
      if (term < 1e-18 * s.value()) break;
      term *= mu / (i + 1);
    }
    return std::clamp(s.value(), 0.0, 1.0);
  }

  detail::CompensatedSum lower;
  if (mu <= 700.0) {
    double term = std::exp(-mu);
    for (int i = 0; i < t; ++i) {
      lower.add(term);
      term *= mu / (i + 1);
    }
  } else {
    const double log_mu = std::log(mu);
    for (int i = 0; i < t; ++i) lower.add(std::exp(-mu + i * log_mu - std::lgamma(i + 1.0)));
  }
  return std::clamp(1.0 - lower.value(), 0.0, 1.0);
}

// h_{r,k}(mu) = mu / f_{k-1}(mu)^{r-1}. Accepts any r >= 1, k >= 1.
inline double h_rk(ParamsRK p, double mu) {
  if (p.r < 1 || p.k < 1) throw DomainError("h_rk: need r >= 1, k >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("h_rk: mu must be > 0");
  const double denom = std::pow(poisson_tail(p.k - 1, mu), p.r - 1);
  if (!(denom > 0.0)) throw OverflowError("h_rk: f_{k-1}(mu)^{r-1} underflows");
  return mu / denom;
}

// g_k(lambda) = lambda f_{k-1}(lambda) / f_k(lambda); g_k(0+) = k.
inline double g_k(int k, double lambda, bool allow_zero = false) {
  if (k < 1) throw DomainError("g_k: k < 1");
  if (lambda == 0.0 && allow_zero) return static_cast<double>(k);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("g_k: lambda must be > 0");
  return k * detail::scaled_tail(k - 1, lambda) / detail::scaled_tail(k, lambda);
}

// Unique lambda > 0 with g_k(lambda) = x, for x > k.
inline double lambda_of(int k, double x, RealTol tol = {}) {
  tol.validate();
  if (k < 1) throw DomainError("lambda_of: k < 1");
  if (!(x > k) || !std::isfinite(x)) throw DomainError("lambda_of: need x > k");

  double lo = 1e-12;
  double hi = std::max(4.0 * x, 4.0 * k);
  while (g_k(k, lo) > x) {
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  }
  while (g_k(k, hi) < x) hi *= 2.0;

  double best = lo;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < tol.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double err = g_k(k, mid) - x;
    if (std::abs(err) < best_err) {
      best_err = std::abs(err);
      best = mid;
    }
    if (std::abs(err) <= tol.abs_tol) return mid;
    if (err < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      if (best_err <= 10.0 * tol.abs_tol) return best;
      break;
    }
  }
  throw ConvergenceError("lambda_of: no convergence for k=" + std::to_string(k) + ", x=" + std::to_string(x));
}

// psi(x) = e^{-l} l^{k-1} / (f_{k-1}(l) (k-1)!) with l = lambda_of(k, x).
inline double psi(int k, double x, RealTol tol = {}) {
  const double lambda = lambda_of(k, x, tol);
  return 1.0 / detail::scaled_tail(k - 1, lambda);
}

inline double psi(ParamsRK p, double x, RealTol tol = {}) { return psi(p.k, x, tol); }

// Share of degree-k vertices among k-truncated Poisson(mu) draws.
inline double rho_bar(int k, double mu) {
  if (k < 0) throw DomainError("rho_bar: k < 0");
  if (!(mu > 0.0)) throw DomainError("rho_bar: mu must be > 0");
  if (!std::isfinite(mu)) return 0.0;
  return 1.0 / detail::scaled_tail(k, mu);
}

inline double rho_bar(ParamsRK p, double mu) { return rho_bar(p.k, mu); }

// Five-point central difference for f''(x).
template <class F>
double second_derivative(F&& f, double x, double step) {
  const double s = step;
  return (-f(x + 2 * s) + 16 * f(x + s) - 30 * f(x) + 16 * f(x - s) - f(x - 2 * s)) / (12 * s * s);
}

// One Richardson step over (step, step/2); cancels the O(step^4) term.
template <class F>
double second_derivative_richardson(F&& f, double x, double step) {
  const double coarse = second_derivative(f, x, step);
  const double fine = second_derivative(f, x, 0.5 * step);
  return (16.0 * fine - coarse) / 15.0;
}

inline double h_second_derivative(ParamsRK p, double mu, double step) {
  if (!(mu > 0.0)) throw DomainError("h_second_derivative: mu must be > 0");
  if (!(step > 0.0) || step > mu / 10.0) throw DomainError("h_second_derivative: step must lie in (0, mu/10]");
  return second_derivative([p](double m) { return h_rk(p, m); }, mu, step);
}

}  // namespace kcore
