#include "qdp/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdp/errors.hpp"

namespace qdp {

void GbmParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(s0)) throw DomainError("GbmParams: s0 must be > 0, got " + std::to_string(s0));
  if (!positive(volatility))
    throw DomainError("GbmParams: volatility must be > 0, got " + std::to_string(volatility));
  if (!positive(maturity))
    throw DomainError("GbmParams: maturity must be > 0, got " + std::to_string(maturity));
  if (!std::isfinite(drift) || !std::isfinite(risk_free_rate))
    throw DomainError("GbmParams: drift and risk_free_rate must be finite");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double lognormal_pdf(double s, const GbmParams& params, double t) {
  if (!(s > 0.0)) throw DomainError("lognormal_pdf: price must be > 0");
  if (!(t > 0.0)) throw DomainError("lognormal_pdf: time must be > 0");
  const double var = params.volatility * params.volatility * t;
  const double centre = std::log(s / params.s0) - (params.drift - 0.5 * params.volatility * params.volatility) * t;
  return std::exp(-centre * centre / (2.0 * var)) / (s * std::sqrt(2.0 * std::numbers::pi * var));
}

LognormalMoments gbm_moments(const GbmParams& params, double t) {
  if (!(t > 0.0)) throw DomainError("gbm_moments: time must be > 0");
  const double mean = params.s0 * std::exp(params.drift * t);
  // expm1 keeps the small-sigma limit accurate.
  const double sd = mean * std::sqrt(std::expm1(params.volatility * params.volatility * t));
  return {mean, sd};
}

PricePath sample_gbm_path(const GbmParams& params, std::size_t steps, RandomStream& rng) {
  if (steps == 0) throw DomainError("sample_gbm_path: steps must be >= 1");
  const double dt = params.maturity / static_cast<double>(steps);
  const double mu_dt = (params.drift - 0.5 * params.volatility * params.volatility) * dt;
  const double sig_sqrt_dt = params.volatility * std::sqrt(dt);

  PricePath path;
  path.times.reserve(steps + 1);
  path.prices.reserve(steps + 1);
  path.times.push_back(0.0);
  path.prices.push_back(params.s0);
  double log_s = std::log(params.s0);
  for (std::size_t i = 1; i <= steps; ++i) {
    log_s += mu_dt + sig_sqrt_dt * rng.standard_normal();
    path.times.push_back(i == steps ? params.maturity : dt * static_cast<double>(i));
    path.prices.push_back(std::exp(log_s));
  }
  return path;
}

double sample_terminal_price(const GbmParams& params, RandomStream& rng) {
  const double t = params.maturity;
  return params.s0 * std::exp((params.drift - 0.5 * params.volatility * params.volatility) * t +
                              params.volatility * std::sqrt(t) * rng.standard_normal());
}

double discount(double value, double rate, double t) { return value * std::exp(-rate * t); }

double analytic_expected_payoff(const GbmParams& params, double strike) {
  if (!(strike > 0.0)) throw DomainError("analytic_expected_payoff: strike must be > 0");
  const double t = params.maturity;
  const double vol_sqrt_t = params.volatility * std::sqrt(t);
  const double d1 = (std::log(params.s0 / strike) + (params.drift + 0.5 * params.volatility * params.volatility) * t) / vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  return params.s0 * std::exp(params.drift * t) * normal_cdf(d1) - strike * normal_cdf(d2);
}

MonteCarloEstimate mc_expected_payoff(const GbmParams& params, double strike, std::size_t m,
                                      RandomStream& rng) {
  if (m < 2) throw DomainError("mc_expected_payoff: need at least 2 samples");
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = payoff_call(sample_terminal_price(params, rng), strike);
    const double delta = f - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (f - mean);
  }
  const double var = m2 / static_cast<double>(m - 1);
  return {mean, std::sqrt(var / static_cast<double>(m))};
}

double truncated_expected_payoff(const GbmParams& params, double strike, double s_min,
                                 double s_max) {
  if (!(s_max > s_min)) throw DomainError("truncated_expected_payoff: empty domain");
  using boost::math::quadrature::gauss_kronrod;
  const double t = params.maturity;
  auto density = [&](double s) { return s > 0.0 ? lognormal_pdf(s, params, t) : 0.0; };

  constexpr unsigned kDepth = 20;
  constexpr double kTol = 1e-13;
  const double mass = gauss_kronrod<double, 61>::integrate(density, s_min, s_max, kDepth, kTol);
  const double lo = std::max(s_min, strike);
  if (lo >= s_max || !(mass > 0.0)) return 0.0;
  const double payoff = gauss_kronrod<double, 61>::integrate(
      [&](double s) { return (s - strike) * density(s); }, lo, s_max, kDepth, kTol);
  return payoff / mass;
}

}  // namespace qdp
