#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qdp/grid.hpp"
#include "qdp/state.hpp"

namespace qdp {

/// Comparator constructions.
///
/// LinearAncilla ripples the carry through n-1 carry qubits (the top carry is
/// written straight onto the comparator qubit). SingleAncilla uses one carry
/// qubit and one multi-controlled X per carry-propagation pattern.
enum class ComparatorVariant { LinearAncilla, SingleAncilla };

std::string_view to_string(ComparatorVariant variant) noexcept;

/// Base-d digits of `value`, least significant first, exactly n of them.
std::vector<int> to_digits(std::size_t value, int d, int n);

/// (d-1)'s complement of k plus one, as n little-endian digits (= d^n - k).
/// Returns nullopt for k = 0: i >= 0 always holds and the comparator is an
/// unconditional flip. Throws DomainError for k outside [0, d^n).
std::optional<std::vector<int>> complement_digits(std::size_t k, int d, int n);

/// Carry qubits a comparator variant needs for n asset qudits.
int carry_count(ComparatorVariant variant, int n);

/// Asset qudits i0..i{n-1}, carries a0.., comparator `c` and, optionally, payoff `p`.
RegisterLayout pricing_layout(int d, int n, ComparatorVariant variant, bool with_payoff = true);

/// Householder loader: unitary whose asset-space block has first column sqrt(p),
/// acting as identity on every non-asset subsystem.
MatrixOp build_probability_loader(const AssetGrid& grid, const RegisterLayout& layout);

/// Asset-space Householder matrix I - w w^T / (1 - sqrt(p0)), w = sqrt(p) - e0.
Eigen::MatrixXd householder_loader_matrix(const std::vector<double>& probs);

/// Gate list mapping |i>|0..0>_carry|0>_c to |i>|0..0>_carry|i >= k>_c.
Circuit build_comparator(std::size_t k, const AssetGrid& grid, const RegisterLayout& layout,
                         ComparatorVariant variant);

/// Payoff rotation parameters. Angles are
///   pi/4 - c                                  for i < k,
///   2c (s_i - K) / (s_last - K) + pi/4 - c    for i >= k.
class PayoffEncoding {
 public:
  static constexpr double kShift = std::numbers::pi / 4.0;

  /// Throws DomainError when c is outside [0, pi/4], when K >= s_last (degenerate
  /// denominator) or when any angle leaves [0, pi/2]. c = 0 is accepted as a
  /// degenerate encoding for testing; estimators reject it.
  PayoffEncoding(const AssetGrid& grid, double strike, std::size_t k, double c);

  [[nodiscard]] const AssetGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double strike() const noexcept { return strike_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] double denominator() const noexcept { return grid_.last_point() - strike_; }

  /// Scaled payoff f~(i) in the comparator-branch form used by the circuit.
  [[nodiscard]] double scaled_payoff(std::size_t i) const;
  [[nodiscard]] double angle(std::size_t i) const { return c_ * scaled_payoff(i) + kShift; }

 private:
  AssetGrid grid_;
  double strike_;
  std::size_t k_;
  double c_;
};

/// Base rotation, comparator-controlled offset, and one comparator-and-digit
/// controlled rotation per (qudit, nonzero digit value).
Circuit build_payoff_loader(const PayoffEncoding& enc, const RegisterLayout& layout);

/// Register integer used by the pricing pipeline: strike_index inside the
/// grid window, 0 below it. Strikes above s_max are rejected.
std::size_t pricing_strike_index(const AssetGrid& grid, double strike, StrikeRounding rounding);

struct PricingOracle {
  RegisterLayout layout;
  MatrixOp a;
  PayoffEncoding encoding;
  Circuit comparator;
  Circuit payoff_loader;
};

/// A = L_f C_k P as one dense unitary.
PricingOracle build_oracle_A(const AssetGrid& grid, double strike, double c, ComparatorVariant variant,
                             StrikeRounding rounding = StrikeRounding::Up);

/// Sum_i p_i sin^2(angle_i): the exact payoff-qubit |1> probability.
double exact_p1(const PayoffEncoding& enc);

/// First-order expansion of exact_p1 (sin^2(x + pi/4) ~ x + 1/2).
double linear_p1(const PayoffEncoding& enc);

/// Sum_i p_i |c f~(i)|^3, bounding |exact_p1 - linear_p1|.
double cubic_error_bound(const PayoffEncoding& enc);

/// Inverts the linear relation P1 = 1/2 - c + 2c E[f] / (s_last - K). The result
/// can be slightly negative from the cubic encoding error; it is returned as is.
double expected_payoff_from_p1(double p1, const AssetGrid& grid, double strike, double c);

/// One line per gate: action, target, control sets.
std::string format_circuit(const Circuit& circuit);
void write_circuit(std::ostream& out, const Circuit& circuit);

}  // namespace qdp
