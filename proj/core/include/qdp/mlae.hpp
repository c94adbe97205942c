#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "qdp/random.hpp"
#include "qdp/state.hpp"

namespace qdp {

/// Grover-power schedule m_0 = 0, m_l = 2^(l-1) for l = 1..levels.
struct Schedule {
  int levels = 0;
  int shots = 1;
  std::vector<unsigned long> m_values;

  /// Throws DomainError for levels < 0, shots < 1 or levels > 62.
  static Schedule make(int levels, int shots);
  /// Sum_l shots * (2 m_l + 1).
  [[nodiscard]] unsigned long long oracle_calls() const;
};

struct ShotRecord {
  int level = 0;
  unsigned long m = 0;
  int shots = 0;
  int hits = 0;
};

struct MleResult {
  double theta_hat = 0.0;
  double p1_hat = 0.0;
  unsigned long long oracle_calls = 0;
  double log_likelihood = 0.0;
};

/// I - 2|0><0| over the whole composite space (ancillas included).
MatrixOp zero_reflection(const RegisterLayout& layout);

/// I - 2 (I (x) |1><1|_payoff). Throws LayoutError without a payoff qubit.
MatrixOp payoff_reflection(const RegisterLayout& layout);

/// Q = -(A S_0 A^dagger) S_payoff.
MatrixOp build_grover(const MatrixOp& a);

/// sin^2((2j + 1) theta).
double grover_power_probability(double theta, unsigned long j);

/// Prepares Q^{m_l} A|0> once per level (powers by repeated squaring, cached)
/// and samples the payoff qubit `shots` times.
std::vector<ShotRecord> run_schedule(const MatrixOp& a, const MatrixOp& q, const Schedule& schedule,
                                     RandomStream& rng);

/// Same schedule with Q applied implicitly as -A S_0 A^dagger S_payoff, one
/// matrix-vector product chain per Grover step. Levels are reached
/// incrementally, so the cost is O(m_max D^2) instead of O(D^3 log m_max).
std::vector<ShotRecord> run_schedule(const MatrixOp& a, const Schedule& schedule, RandomStream& rng);

/// Q|psi> without forming Q.
StateVector apply_grover(const MatrixOp& a, const StateVector& state);

/// Binomial tallies drawn straight from sin^2((2 m_l + 1) theta).
std::vector<ShotRecord> synthetic_records(double theta, const Schedule& schedule, RandomStream& rng);

/// Sum_l [ h_l ln sin^2((2m_l+1) theta) + (N - h_l) ln cos^2((2m_l+1) theta) ],
/// probabilities clamped to [1e-15, 1 - 1e-15]. Binomial coefficients omitted.
double log_likelihood(double theta, std::span<const ShotRecord> records);

/// Grid search over [0, pi/2] (ties toward smaller theta), then root-finding on
/// the score inside the winning grid cell to 1e-12.
MleResult mle_estimate(std::span<const ShotRecord> records, std::size_t grid_points = 100000);

unsigned long long oracle_calls(std::span<const ShotRecord> records);

struct ScalingPoint {
  int levels = 0;
  int shots = 0;
  unsigned long long oracle_calls = 0;
  double rmse = 0.0;
};

/// RMSE(theta_hat) across `seeds` synthetic runs for each cutoff in `levels`.
std::vector<ScalingPoint> error_scaling_experiment(double theta, int shots, std::span<const int> levels,
                                                   int seeds, const RandomStream& rng);

/// No amplification (levels = 0), growing shot counts: the classical sampling rate.
std::vector<ScalingPoint> classical_scaling_experiment(double theta, std::span<const int> shots, int seeds,
                                                       const RandomStream& rng);

/// Least-squares slope of ln(rmse) against ln(oracle_calls).
double loglog_slope(std::span<const ScalingPoint> points);

/// CSV with header `ell,m,N,hits`.
void write_records_csv(std::ostream& out, std::span<const ShotRecord> records);

}  // namespace qdp
