#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library under test.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int max_depth = 50) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Log-normal density written out directly.
inline double lognormal_density(double s, double s0, double drift, double sigma, double t) {
  if (s <= 0.0) return 0.0;
  const double mu = std::log(s0) + (drift - 0.5 * sigma * sigma) * t;
  const double z = (std::log(s) - mu) / (sigma * std::sqrt(t));
  return std::exp(-0.5 * z * z) / (s * sigma * std::sqrt(2.0 * std::numbers::pi * t));
}

/// Integral of g over (0, inf) against the log-normal law, done in log space
/// (x = ln s) on mu +- 12 sd, which carries all mass to double precision.
inline double lognormal_expectation(const std::function<double(double)>& g, double s0, double drift, double sigma,
                                    double t, double tol = 1e-13) {
  const double mu = std::log(s0) + (drift - 0.5 * sigma * sigma) * t;
  const double sd = sigma * std::sqrt(t);
  auto integrand = [&](double x) {
    const double z = (x - mu) / sd;
    return g(std::exp(x)) * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  };
  return integrate(integrand, mu - 12.0 * sd, mu + 12.0 * sd, tol);
}

/// Little-endian base-d digits.
inline std::vector<int> digits(std::size_t value, int d, int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = static_cast<int>(value % static_cast<std::size_t>(d));
    value /= static_cast<std::size_t>(d);
  }
  return out;
}

inline std::size_t ipow(int d, int n) {
  std::size_t r = 1;
  for (int j = 0; j < n; ++j) r *= static_cast<std::size_t>(d);
  return r;
}

/// Grid points and normalized probabilities straight from the midpoint rule.
struct Grid {
  double s_min = 0.0;
  double s_max = 0.0;
  double omega = 0.0;
  std::vector<double> points;
  std::vector<double> probs;
};

inline Grid grid(double s0, double drift, double sigma, double t, std::size_t size, double trunc = 3.0) {
  const double mean = s0 * std::exp(drift * t);
  const double sd = mean * std::sqrt(std::exp(sigma * sigma * t) - 1.0);
  Grid g;
  g.s_min = std::max(0.0, mean - trunc * sd);
  g.s_max = mean + trunc * sd;
  g.omega = (g.s_max - g.s_min) / static_cast<double>(size);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double s = g.s_min + (static_cast<double>(i) + 0.5) * g.omega;
    g.points.push_back(s);
    g.probs.push_back(lognormal_density(s, s0, drift, sigma, t));
    total += g.probs.back();
  }
  for (double& p : g.probs) p /= total;
  return g;
}

/// Sum_i p_i sin^2(theta_i) for the two-branch payoff rotation.
inline double payoff_p1(const std::vector<double>& points, const std::vector<double>& probs, double strike,
                        std::size_t k, double c) {
  const double den = points.back() - strike;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double angle = i < k ? std::numbers::pi / 4.0 - c
                               : 2.0 * c * (points[i] - strike) / den + std::numbers::pi / 4.0 - c;
    total += probs[i] * std::sin(angle) * std::sin(angle);
  }
  return total;
}

/// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
