#include "qdp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "qdp/errors.hpp"
#include "qdp/format.hpp"

namespace qdp {

std::size_t checked_power(int d, int n) {
  if (d < 2) throw DomainError("dimension d must be >= 2, got " + std::to_string(d));
  if (n < 1) throw DomainError("qudit count n must be >= 1, got " + std::to_string(n));
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) {
    total *= static_cast<std::size_t>(d);
    if (total > kMaxTotalDim)
      throw ResourceError("d^n = " + std::to_string(d) + "^" + std::to_string(n) +
                          " exceeds the dense cap of " + std::to_string(kMaxTotalDim));
  }
  return total;
}

AssetGrid grid_from_weights(double s_min, double s_max, int d, int n,
                            const std::vector<double>& weights) {
  const std::size_t size = checked_power(d, n);
  if (weights.size() != size) throw DomainError("grid_from_weights: expected d^n weights");
  if (!(s_max > s_min)) throw DomainError("grid_from_weights: s_max must exceed s_min");

  AssetGrid grid;
  grid.s_min = s_min;
  grid.s_max = s_max;
  grid.omega = (s_max - s_min) / static_cast<double>(size);
  grid.d = d;
  grid.n = n;
  grid.points.resize(size);
  for (std::size_t i = 0; i < size; ++i)
    grid.points[i] = s_min + (static_cast<double>(i) + 0.5) * grid.omega;

  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("grid_from_weights: weights must be finite and >= 0");
  grid.norm = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(grid.norm > 0.0)) throw DomainError("grid_from_weights: all weights are zero");
  grid.probs.resize(size);
  std::transform(weights.begin(), weights.end(), grid.probs.begin(),
                 [&](double w) { return w / grid.norm; });
  return grid;
}

AssetGrid build_grid(const GbmParams& params, int d, int n, double trunc_sigmas) {
  params.validate();
  if (!(trunc_sigmas > 0.0)) throw DomainError("build_grid: trunc_sigmas must be > 0");
  const std::size_t size = checked_power(d, n);
  const auto [mean, sd] = gbm_moments(params, params.maturity);
  const double s_min = std::max(0.0, mean - trunc_sigmas * sd);
  const double s_max = mean + trunc_sigmas * sd;
  if (!(s_max > s_min)) throw DomainError("build_grid: degenerate truncation window");

  const double omega = (s_max - s_min) / static_cast<double>(size);
  std::vector<double> weights(size);
  for (std::size_t i = 0; i < size; ++i)
    weights[i] = lognormal_pdf(s_min + (static_cast<double>(i) + 0.5) * omega, params, params.maturity);
  return grid_from_weights(s_min, s_max, d, n, weights);
}

int strike_index(const AssetGrid& grid, double strike, StrikeRounding rounding) {
  if (!(strike >= grid.s_min && strike <= grid.s_max))
    throw DomainError("strike_index: strike " + std::to_string(strike) + " outside [" +
                      std::to_string(grid.s_min) + ", " + std::to_string(grid.s_max) + "]");
  const double k_star = (strike - grid.s_min) / grid.omega - 0.5;
  // Snap values within rounding noise of an integer or half-integer so that
  // points[i] maps back to i and exact midpoints round up.
  const double snapped = std::round(k_star * 2.0) / 2.0;
  const double k_clean = std::abs(k_star - snapped) < 1e-9 ? snapped : k_star;
  const double k = rounding == StrikeRounding::Nearest ? std::floor(k_clean + 0.5) : std::ceil(k_clean);
  const double top = static_cast<double>(grid.size() - 1);
  return static_cast<int>(std::clamp(k, 0.0, top));
}

double discretized_expected_payoff(const AssetGrid& grid, double strike) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) total += grid.probs[i] * payoff_call(grid.points[i], strike);
  return total;
}

void write_grid_csv(std::ostream& out, const AssetGrid& grid) {
  out << "index,s_i,p_i\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << i << ',' << format_real(grid.points[i]) << ',' << format_real(grid.probs[i]) << '\n';
}

}  // namespace qdp
