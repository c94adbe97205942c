#pragma once

#include <cstddef>
#include <vector>

#include "qdp/random.hpp"

namespace qdp {

/// Black-Scholes-Merton market model.
///
/// `drift` and `risk_free_rate` are kept separate: risk-neutral pricing is the
/// caller's choice of `drift == risk_free_rate`.
struct GbmParams {
  double s0 = 1.0;
  double drift = 0.0;
  double volatility = 0.2;
  double maturity = 1.0;
  double risk_free_rate = 0.0;

  /// Throws DomainError unless s0, volatility and maturity are positive and finite.
  void validate() const;
  [[nodiscard]] bool risk_neutral() const noexcept { return drift == risk_free_rate; }
};

struct PricePath {
  std::vector<double> times;
  std::vector<double> prices;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

struct LognormalMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Standard normal CDF, erfc-based.
double normal_cdf(double x);

/// Log-normal density of S_t under GBM. Throws DomainError for s <= 0 or t <= 0.
double lognormal_pdf(double s, const GbmParams& params, double t);

/// Mean S0 e^{drift t} and standard deviation mean * sqrt(e^{sigma^2 t} - 1).
LognormalMoments gbm_moments(const GbmParams& params, double t);

/// Samples a path on a uniform time grid of `steps` intervals using exact
/// log-normal increments.
PricePath sample_gbm_path(const GbmParams& params, std::size_t steps, RandomStream& rng);

/// Draws S_T directly.
double sample_terminal_price(const GbmParams& params, RandomStream& rng);

inline double payoff_call(double s, double strike) { return s > strike ? s - strike : 0.0; }

double discount(double value, double rate, double t);

/// Undiscounted E[max(0, S_T - K)] for the log-normal terminal law (closed form).
double analytic_expected_payoff(const GbmParams& params, double strike);

/// Sample mean of the payoff over m terminal prices, with stderr = sd / sqrt(m).
MonteCarloEstimate mc_expected_payoff(const GbmParams& params, double strike, std::size_t m,
                                      RandomStream& rng);

/// E[max(0, S_T - K) | s_min <= S_T <= s_max] by adaptive Gauss-Kronrod quadrature.
double truncated_expected_payoff(const GbmParams& params, double strike, double s_min,
                                 double s_max);

}  // namespace qdp
