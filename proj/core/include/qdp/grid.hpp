#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qdp/market.hpp"

namespace qdp {

/// Largest register dimension any dense object in this library will allocate.
inline constexpr std::size_t kMaxTotalDim = 4096;

/// Truncated, discretized asset-price law on d^n cell midpoints.
///
/// points[i] = s_min + (i + 1/2) * omega and probs[i] = pdf(points[i]) / norm.
struct AssetGrid {
  double s_min = 0.0;
  double s_max = 0.0;
  double omega = 0.0;
  int d = 2;
  int n = 1;
  std::vector<double> points;
  std::vector<double> probs;
  double norm = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] double last_point() const { return points.back(); }
};

/// How a strike that falls between grid points is mapped to a register integer.
///
/// Nearest rounds k* = (K - s_min)/omega - 1/2 half-up. Up takes ceil(k*), so the
/// comparator's i >= k coincides with s_i >= K.
enum class StrikeRounding { Nearest, Up };

/// d^n with overflow check against kMaxTotalDim; throws ResourceError.
std::size_t checked_power(int d, int n);

/// Truncates at mean -/+ trunc_sigmas * sd (analytic moments at maturity, lower
/// bound floored at 0) and samples the density at d^n midpoints.
AssetGrid build_grid(const GbmParams& params, int d, int n, double trunc_sigmas = 3.0);

/// Builds a grid from explicit unnormalized density samples on [s_min, s_max].
AssetGrid grid_from_weights(double s_min, double s_max, int d, int n,
                            const std::vector<double>& weights);

/// Register integer for a strike in [s_min, s_max], clamped to [0, d^n - 1].
int strike_index(const AssetGrid& grid, double strike,
                 StrikeRounding rounding = StrikeRounding::Nearest);

/// Sum_i p_i max(0, s_i - K).
double discretized_expected_payoff(const AssetGrid& grid, double strike);

/// CSV with header `index,s_i,p_i`.
void write_grid_csv(std::ostream& out, const AssetGrid& grid);

}  // namespace qdp
