#include "qdp/mlae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qdp/errors.hpp"

namespace qdp {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kProbFloor = 1e-15;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

// d/dtheta of the log-likelihood, ignoring the clamp.
double score(double theta, std::span<const ShotRecord> records) {
  double total = 0.0;
  for (const auto& r : records) {
    const double a = 2.0 * static_cast<double>(r.m) + 1.0;
    const double s = std::sin(a * theta);
    const double c = std::cos(a * theta);
    total += 2.0 * a * (r.hits * c / s - (r.shots - r.hits) * s / c);
  }
  return total;
}

}  // namespace

Schedule Schedule::make(int levels, int shots) {
  if (levels < 0 || levels > 62) throw DomainError("Schedule: levels must lie in [0, 62]");
  if (shots < 1) throw DomainError("Schedule: shots must be >= 1");
  Schedule s;
  s.levels = levels;
  s.shots = shots;
  s.m_values.push_back(0);
  for (int l = 1; l <= levels; ++l) s.m_values.push_back(1UL << (l - 1));
  return s;
}

unsigned long long Schedule::oracle_calls() const {
  unsigned long long total = 0;
  for (unsigned long m : m_values) total += static_cast<unsigned long long>(shots) * (2ULL * m + 1ULL);
  return total;
}

MatrixOp zero_reflection(const RegisterLayout& layout) {
  require_dense(layout);
  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  m(0, 0) = -1.0;
  return MatrixOp(layout, std::move(m));
}

MatrixOp payoff_reflection(const RegisterLayout& layout) {
  require_dense(layout);
  const auto payoff = layout.positions_with_role(Role::Payoff);
  if (payoff.size() != 1 || layout[payoff.front()].dim != 2)
    throw LayoutError("payoff_reflection: layout needs exactly one payoff qubit");
  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  for (std::size_t b = 0; b < layout.total_dim(); ++b)
    if (layout.digit(b, payoff.front()) == 1) m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = -1.0;
  return MatrixOp(layout, std::move(m));
}

MatrixOp build_grover(const MatrixOp& a) {
  const MatrixOp s_psi = a * zero_reflection(a.layout()) * a.adjoint();
  const MatrixOp product = s_psi * payoff_reflection(a.layout());
  return MatrixOp(a.layout(), -product.matrix());
}

double grover_power_probability(double theta, unsigned long j) {
  const double s = std::sin((2.0 * static_cast<double>(j) + 1.0) * theta);
  return s * s;
}

std::vector<ShotRecord> run_schedule(const MatrixOp& a, const MatrixOp& q, const Schedule& schedule,
                                     RandomStream& rng) {
  if (!(a.layout() == q.layout())) throw LayoutError("run_schedule: A and Q act on different layouts");
  const auto payoff = a.layout().positions_with_role(Role::Payoff);
  if (payoff.size() != 1) throw LayoutError("run_schedule: layout needs exactly one payoff qubit");
  const std::string& payoff_name = a.layout()[payoff.front()].name;

  const StateVector prepared = apply_matrix(init_ground(a.layout()), a);
  std::map<unsigned long, MatrixOp> powers;
  auto power_of = [&](unsigned long m) -> const MatrixOp& {
    if (auto it = powers.find(m); it != powers.end()) return it->second;
    // Schedules are powers of two, so the previous square is usually cached.
    if (m % 2 == 0) {
      if (auto half = powers.find(m / 2); half != powers.end())
        return powers.emplace(m, half->second * half->second).first->second;
    }
    return powers.emplace(m, q.power(m)).first->second;
  };

  std::vector<ShotRecord> records;
  records.reserve(schedule.m_values.size());
  for (std::size_t l = 0; l < schedule.m_values.size(); ++l) {
    const unsigned long m = schedule.m_values[l];
    const StateVector state = m == 0 ? prepared : apply_matrix(prepared, power_of(m));
    ShotRecord rec{static_cast<int>(l), m, schedule.shots, 0};
    for (int shot = 0; shot < schedule.shots; ++shot) rec.hits += sample_measurement(state, payoff_name, rng);
    records.push_back(rec);
  }
  return records;
}

StateVector apply_grover(const MatrixOp& a, const StateVector& state) {
  if (!(a.layout() == state.layout())) throw LayoutError("apply_grover: state and A act on different layouts");
  const auto payoff = a.layout().positions_with_role(Role::Payoff);
  if (payoff.size() != 1) throw LayoutError("apply_grover: layout needs exactly one payoff qubit");
  const std::size_t pos = payoff.front();

  ComplexVector v = state.amps();
  for (std::size_t b = 0; b < a.layout().total_dim(); ++b)
    if (a.layout().digit(b, pos) == 1) v(static_cast<Eigen::Index>(b)) = -v(static_cast<Eigen::Index>(b));
  ComplexVector w = a.matrix().adjoint() * v;
  w(0) = -w(0);
  v.noalias() = a.matrix() * w;
  return StateVector(a.layout(), -v);
}

std::vector<ShotRecord> run_schedule(const MatrixOp& a, const Schedule& schedule, RandomStream& rng) {
  const auto payoff = a.layout().positions_with_role(Role::Payoff);
  if (payoff.size() != 1) throw LayoutError("run_schedule: layout needs exactly one payoff qubit");
  const std::string& payoff_name = a.layout()[payoff.front()].name;

  StateVector state = apply_matrix(init_ground(a.layout()), a);
  unsigned long applied = 0;
  std::vector<ShotRecord> records;
  records.reserve(schedule.m_values.size());
  for (std::size_t l = 0; l < schedule.m_values.size(); ++l) {
    const unsigned long m = schedule.m_values[l];
    if (m < applied) {
      state = apply_matrix(init_ground(a.layout()), a);
      applied = 0;
    }
    for (; applied < m; ++applied) state = apply_grover(a, state);
    ShotRecord rec{static_cast<int>(l), m, schedule.shots, 0};
    for (int shot = 0; shot < schedule.shots; ++shot) rec.hits += sample_measurement(state, payoff_name, rng);
    records.push_back(rec);
  }
  return records;
}

std::vector<ShotRecord> synthetic_records(double theta, const Schedule& schedule, RandomStream& rng) {
  std::vector<ShotRecord> records;
  records.reserve(schedule.m_values.size());
  for (std::size_t l = 0; l < schedule.m_values.size(); ++l) {
    const unsigned long m = schedule.m_values[l];
    std::binomial_distribution<int> draw(schedule.shots, std::clamp(grover_power_probability(theta, m), 0.0, 1.0));
    records.push_back({static_cast<int>(l), m, schedule.shots, draw(rng.engine())});
  }
  return records;
}

double log_likelihood(double theta, std::span<const ShotRecord> records) {
  double total = 0.0;
  for (const auto& r : records) {
    const double p = clamp_prob(grover_power_probability(theta, r.m));
    total += r.hits * std::log(p) + (r.shots - r.hits) * std::log1p(-p);
  }
  return total;
}

MleResult mle_estimate(std::span<const ShotRecord> records, std::size_t grid_points) {
  if (records.empty()) throw DomainError("mle_estimate: no records");
  if (grid_points < 3) throw DomainError("mle_estimate: need at least 3 grid points");

  const double step = kHalfPi / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double ll = log_likelihood(static_cast<double>(g) * step, records);
    if (ll > best_ll) {
      best_ll = ll;
      best = g;
    }
  }
  double theta = static_cast<double>(best) * step;

  if (best > 0 && best + 1 < grid_points) {
    const double lo = theta - step;
    const double hi = theta + step;
    const double g_lo = score(lo, records);
    const double g_hi = score(hi, records);
    double candidate = theta;
    if (std::isfinite(g_lo) && std::isfinite(g_hi) && g_lo > 0.0 && g_hi < 0.0) {
      auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          [&](double t) { return score(t, records); }, lo, hi, g_lo, g_hi, tol, iters);
      candidate = 0.5 * (a + b);
    } else {
      const auto [t, neg] = boost::math::tools::brent_find_minima(
          [&](double t) { return -log_likelihood(t, records); }, lo, hi, std::numeric_limits<double>::digits);
      candidate = t;
    }
    if (log_likelihood(candidate, records) >= best_ll) theta = candidate;
  }

  const double s = std::sin(theta);
  return {theta, s * s, oracle_calls(records), log_likelihood(theta, records)};
}

unsigned long long oracle_calls(std::span<const ShotRecord> records) {
  unsigned long long total = 0;
  for (const auto& r : records) total += static_cast<unsigned long long>(r.shots) * (2ULL * r.m + 1ULL);
  return total;
}

namespace {

double rmse_over_seeds(double theta, const Schedule& schedule, int seeds, const RandomStream& base) {
  double sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    RandomStream rng = base.split(static_cast<std::uint64_t>(s));
    const auto records = synthetic_records(theta, schedule, rng);
    const double err = mle_estimate(records).theta_hat - theta;
    sum_sq += err * err;
  }
  return std::sqrt(sum_sq / seeds);
}

}  // namespace

std::vector<ScalingPoint> error_scaling_experiment(double theta, int shots, std::span<const int> levels,
                                                   int seeds, const RandomStream& rng) {
  if (seeds < 1) throw DomainError("error_scaling_experiment: seeds must be >= 1");
  std::vector<ScalingPoint> out;
  for (int t : levels) {
    const Schedule schedule = Schedule::make(t, shots);
    const RandomStream level_stream = rng.split(static_cast<std::uint64_t>(t));
    out.push_back({t, shots, schedule.oracle_calls(), rmse_over_seeds(theta, schedule, seeds, level_stream)});
  }
  return out;
}

std::vector<ScalingPoint> classical_scaling_experiment(double theta, std::span<const int> shots, int seeds,
                                                       const RandomStream& rng) {
  if (seeds < 1) throw DomainError("classical_scaling_experiment: seeds must be >= 1");
  std::vector<ScalingPoint> out;
  for (int n : shots) {
    const Schedule schedule = Schedule::make(0, n);
    const RandomStream shot_stream = rng.split(static_cast<std::uint64_t>(n));
    out.push_back({0, n, schedule.oracle_calls(), rmse_over_seeds(theta, schedule, seeds, shot_stream)});
  }
  return out;
}

double loglog_slope(std::span<const ScalingPoint> points) {
  if (points.size() < 2) throw DomainError("loglog_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double x = std::log(static_cast<double>(p.oracle_calls));
    const double y = std::log(p.rmse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_records_csv(std::ostream& out, std::span<const ShotRecord> records) {
  out << "ell,m,N,hits\n";
  for (const auto& r : records) out << r.level << ',' << r.m << ',' << r.shots << ',' << r.hits << '\n';
}

}  // namespace qdp
