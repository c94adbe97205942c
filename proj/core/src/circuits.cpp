#include "qdp/circuits.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qdp/errors.hpp"

namespace qdp {

std::string_view to_string(ComparatorVariant variant) noexcept {
  return variant == ComparatorVariant::LinearAncilla ? "linear" : "single";
}

std::vector<int> to_digits(std::size_t value, int d, int n) {
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (auto& digit : digits) {
    digit = static_cast<int>(value % static_cast<std::size_t>(d));
    value /= static_cast<std::size_t>(d);
  }
  return digits;
}

std::optional<std::vector<int>> complement_digits(std::size_t k, int d, int n) {
  const std::size_t size = checked_power(d, n);
  if (k >= size) throw DomainError("complement_digits: k = " + std::to_string(k) + " not below d^n");
  if (k == 0) return std::nullopt;

  // Digit-wise (d-1)'s complement, then add one with carry.
  std::vector<int> digits = to_digits(k, d, n);
  for (auto& digit : digits) digit = d - 1 - digit;
  int carry = 1;
  for (auto& digit : digits) {
    const int sum = digit + carry;
    digit = sum % d;
    carry = sum / d;
  }
  return digits;
}

int carry_count(ComparatorVariant variant, int n) {
  if (n <= 1) return 0;
  return variant == ComparatorVariant::LinearAncilla ? n - 1 : 1;
}

RegisterLayout pricing_layout(int d, int n, ComparatorVariant variant, bool with_payoff) {
  checked_power(d, n);
  std::vector<Subsystem> subs;
  for (int j = 0; j < n; ++j) subs.push_back({"i" + std::to_string(j), d, Role::Asset});
  for (int j = 0; j < carry_count(variant, n); ++j) subs.push_back({"a" + std::to_string(j), 2, Role::Carry});
  subs.push_back({"c", 2, Role::Comparator});
  if (with_payoff) subs.push_back({"p", 2, Role::Payoff});
  return RegisterLayout(std::move(subs));
}

namespace {

struct PricingRegisters {
  std::vector<std::size_t> asset;
  std::vector<std::size_t> carry;
  std::size_t comparator = 0;
};

std::size_t single_role(const RegisterLayout& layout, Role role) {
  const auto found = layout.positions_with_role(role);
  if (found.size() != 1)
    throw LayoutError("layout needs exactly one " + std::string(to_string(role)) + " subsystem, found " +
                      std::to_string(found.size()));
  if (layout[found.front()].dim != 2) throw LayoutError(std::string(to_string(role)) + " subsystem must be a qubit");
  return found.front();
}

PricingRegisters resolve_registers(const AssetGrid& grid, const RegisterLayout& layout) {
  PricingRegisters regs;
  regs.asset = layout.positions_with_role(Role::Asset);
  if (regs.asset.size() != static_cast<std::size_t>(grid.n))
    throw LayoutError("layout has " + std::to_string(regs.asset.size()) + " asset subsystems, grid needs " +
                      std::to_string(grid.n));
  for (std::size_t pos : regs.asset)
    if (layout[pos].dim != grid.d) throw LayoutError("asset subsystem '" + layout[pos].name + "' dimension differs from grid d");
  regs.carry = layout.positions_with_role(Role::Carry);
  for (std::size_t pos : regs.carry)
    if (layout[pos].dim != 2) throw LayoutError("carry subsystem '" + layout[pos].name + "' must be a qubit");
  regs.comparator = single_role(layout, Role::Comparator);
  return regs;
}

template <typename Pred>
std::vector<int> digit_set(int d, Pred pred) {
  std::vector<int> values;
  for (int v = 0; v < d; ++v)
    if (pred(v)) values.push_back(v);
  return values;
}

bool falls_away(const ControlledGate& gate) {
  for (const auto& control : gate.controls)
    if (control.values.empty()) return true;
  return false;
}

void push_live(Circuit& circuit, ControlledGate gate) {
  if (!falls_away(gate)) circuit.push_back(std::move(gate));
}

Circuit linear_comparator(const std::vector<int>& kc, int d, const std::vector<std::string>& digits,
                          const std::vector<std::string>& carries, const std::string& comparator) {
  const std::size_t n = digits.size();
  Circuit compute;
  push_live(compute, {{{digits[0], digit_set(d, [&](int v) { return v + kc[0] >= d; })}}, carries[0], PauliX{}});
  for (std::size_t j = 1; j + 1 < n; ++j) {
    // Carry propagates only when the incoming carry is set; generated regardless of it.
    push_live(compute, {{{digits[j], digit_set(d, [&](int v) { return v + kc[j] == d - 1; })}, {carries[j - 1], {1}}},
                        carries[j], PauliX{}});
    push_live(compute, {{{digits[j], digit_set(d, [&](int v) { return v + kc[j] >= d; })}}, carries[j], PauliX{}});
  }
  Circuit out = compute;
  const std::size_t top = n - 1;
  push_live(out, {{{digits[top], digit_set(d, [&](int v) { return v + kc[top] == d - 1; })}, {carries[top - 1], {1}}},
                  comparator, PauliX{}});
  push_live(out, {{{digits[top], digit_set(d, [&](int v) { return v + kc[top] >= d; })}}, comparator, PauliX{}});
  out.insert(out.end(), compute.rbegin(), compute.rend());
  return out;
}

Circuit single_comparator(const std::vector<int>& kc, int d, const std::vector<std::string>& digits,
                          const std::string& carry, const std::string& comparator) {
  const std::size_t n = digits.size();
  const std::size_t patterns = std::size_t{1} << (n - 1);
  Circuit compute;
  // Each pattern fixes the carry out of digits 0..n-2; the patterns are disjoint
  // and together cover every input with a carry out of the top digit.
  for (std::size_t p = patterns; p-- > 0;) {
    auto carry_out = [&](std::size_t j) { return static_cast<int>((p >> (n - 2 - j)) & 1U); };
    ControlledGate gate{{}, carry, PauliX{}};
    for (std::size_t j = 0; j < n; ++j) {
      const int cin = j == 0 ? 0 : carry_out(j - 1);
      const bool want_carry = j + 1 == n ? true : carry_out(j) == 1;
      gate.controls.push_back({digits[j], digit_set(d, [&](int v) { return (v + kc[j] + cin >= d) == want_carry; })});
    }
    push_live(compute, std::move(gate));
  }
  Circuit out = compute;
  out.push_back({{{carry, {1}}}, comparator, PauliX{}});
  out.insert(out.end(), compute.rbegin(), compute.rend());
  return out;
}

}  // namespace

Eigen::MatrixXd householder_loader_matrix(const std::vector<double>& probs) {
  const auto size = static_cast<Eigen::Index>(probs.size());
  Eigen::VectorXd w(size);
  for (Eigen::Index i = 0; i < size; ++i) w(i) = std::sqrt(std::max(0.0, probs[static_cast<std::size_t>(i)]));
  const double root_p0 = w(0);
  w(0) -= 1.0;
  const double denom = 1.0 - root_p0;
  Eigen::MatrixXd loader = Eigen::MatrixXd::Identity(size, size);
  // p0 = 1 gives w = 0 and the identity.
  if (denom > 0.0 && w.squaredNorm() > 0.0) loader -= (w * w.transpose()) / denom;
  return loader;
}

MatrixOp build_probability_loader(const AssetGrid& grid, const RegisterLayout& layout) {
  require_dense(layout);
  const PricingRegisters regs = resolve_registers(grid, layout);
  const Eigen::MatrixXd block = householder_loader_matrix(grid.probs);
  const std::size_t asset_size = grid.size();

  // offsets[a] is the composite-index contribution of asset value a.
  std::vector<std::size_t> offsets(asset_size, 0);
  for (std::size_t a = 0; a < asset_size; ++a) {
    const auto digits = to_digits(a, grid.d, grid.n);
    for (std::size_t j = 0; j < regs.asset.size(); ++j)
      offsets[a] += static_cast<std::size_t>(digits[j]) * layout.stride(regs.asset[j]);
  }

  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  for (std::size_t b = 0; b < layout.total_dim(); ++b) {
    std::size_t asset_value = 0;
    std::size_t rest = b;
    std::size_t place = 1;
    for (std::size_t j = 0; j < regs.asset.size(); ++j) {
      const auto digit = static_cast<std::size_t>(layout.digit(b, regs.asset[j]));
      asset_value += digit * place;
      place *= static_cast<std::size_t>(grid.d);
      rest -= digit * layout.stride(regs.asset[j]);
    }
    for (std::size_t a = 0; a < asset_size; ++a) {
      const double entry = block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(asset_value));
      if (entry != 0.0) full(static_cast<Eigen::Index>(rest + offsets[a]), static_cast<Eigen::Index>(b)) = entry;
    }
  }
  return MatrixOp::assume_unitary(layout, std::move(full));
}

Circuit build_comparator(std::size_t k, const AssetGrid& grid, const RegisterLayout& layout,
                         ComparatorVariant variant) {
  if (k >= grid.size())
    throw DomainError("build_comparator: k = " + std::to_string(k) + " outside [0, " + std::to_string(grid.size()) + ")");
  const PricingRegisters regs = resolve_registers(grid, layout);
  const std::string& comparator = layout[regs.comparator].name;
  const int d = grid.d;
  const auto n = static_cast<std::size_t>(grid.n);

  const auto kc = complement_digits(k, d, grid.n);
  if (!kc) return {ControlledGate{{}, comparator, PauliX{}}};

  std::vector<std::string> digits;
  for (std::size_t pos : regs.asset) digits.push_back(layout[pos].name);

  if (n == 1) {
    const int threshold = static_cast<int>(k);
    return {ControlledGate{{{digits[0], digit_set(d, [&](int v) { return v >= threshold; })}}, comparator, PauliX{}}};
  }

  const auto needed = static_cast<std::size_t>(carry_count(variant, grid.n));
  if (regs.carry.size() < needed)
    throw LayoutError("build_comparator: variant '" + std::string(to_string(variant)) + "' needs " +
                      std::to_string(needed) + " carry qubits, layout has " + std::to_string(regs.carry.size()));
  std::vector<std::string> carries;
  for (std::size_t j = 0; j < needed; ++j) carries.push_back(layout[regs.carry[j]].name);

  if (variant == ComparatorVariant::LinearAncilla) return linear_comparator(*kc, d, digits, carries, comparator);
  return single_comparator(*kc, d, digits, carries.front(), comparator);
}

// ---------------------------------------------------------------------------
// Payoff encoding

PayoffEncoding::PayoffEncoding(const AssetGrid& grid, double strike, std::size_t k, double c)
    : grid_(grid), strike_(strike), k_(k), c_(c) {
  if (!(c >= 0.0 && c <= kShift)) throw DomainError("PayoffEncoding: c must lie in (0, pi/4]");
  if (k >= grid_.size()) throw DomainError("PayoffEncoding: k outside the grid");
  if (!(denominator() > 0.0))
    throw DomainError("PayoffEncoding: strike must lie below the last grid point (degenerate denominator s_last - K)");
  constexpr double kSlack = 1e-12;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double a = angle(i);
    if (a < -kSlack || a > 2.0 * kShift + kSlack)
      throw DomainError("PayoffEncoding: rotation angle for i = " + std::to_string(i) + " leaves [0, pi/2]; reduce c");
  }
}

double PayoffEncoding::scaled_payoff(std::size_t i) const {
  if (i < k_) return -1.0;
  return 2.0 * (grid_.points[i] - strike_) / denominator() - 1.0;
}

Circuit build_payoff_loader(const PayoffEncoding& enc, const RegisterLayout& layout) {
  const AssetGrid& grid = enc.grid();
  const PricingRegisters regs = resolve_registers(grid, layout);
  const std::string& comparator = layout[regs.comparator].name;
  const std::string& payoff = layout[single_role(layout, Role::Payoff)].name;
  const double slope = 2.0 * enc.c() / enc.denominator();

  Circuit circuit;
  circuit.push_back({{}, payoff, RotationY{PayoffEncoding::kShift - enc.c()}});
  circuit.push_back({{{comparator, {1}}}, payoff, RotationY{slope * (grid.points.front() - enc.strike())}});
  double place = 1.0;
  for (std::size_t j = 0; j < regs.asset.size(); ++j) {
    const std::string& digit = layout[regs.asset[j]].name;
    for (int v = 1; v < grid.d; ++v)
      circuit.push_back({{{comparator, {1}}, {digit, {v}}}, payoff, RotationY{slope * grid.omega * place * v}});
    place *= grid.d;
  }
  return circuit;
}

std::size_t pricing_strike_index(const AssetGrid& grid, double strike, StrikeRounding rounding) {
  if (strike < grid.s_min) return 0;
  if (strike > grid.s_max)
    throw DomainError("strike " + std::to_string(strike) + " above the truncation window; the option is never in the money");
  return static_cast<std::size_t>(strike_index(grid, strike, rounding));
}

PricingOracle build_oracle_A(const AssetGrid& grid, double strike, double c, ComparatorVariant variant,
                             StrikeRounding rounding) {
  const std::size_t k = pricing_strike_index(grid, strike, rounding);
  PayoffEncoding encoding(grid, strike, k, c);
  RegisterLayout layout = pricing_layout(grid.d, grid.n, variant);
  Circuit comparator = build_comparator(k, grid, layout, variant);
  Circuit loader = build_payoff_loader(encoding, layout);

  ComplexMatrix m = build_probability_loader(grid, layout).matrix();
  apply_circuit_to_columns(layout, comparator, m);
  apply_circuit_to_columns(layout, loader, m);
  MatrixOp a = MatrixOp::assume_unitary(layout, std::move(m));
  return {std::move(layout), std::move(a), std::move(encoding), std::move(comparator), std::move(loader)};
}

double exact_p1(const PayoffEncoding& enc) {
  double total = 0.0;
  for (std::size_t i = 0; i < enc.grid().size(); ++i) {
    const double s = std::sin(enc.angle(i));
    total += enc.grid().probs[i] * s * s;
  }
  return total;
}

double linear_p1(const PayoffEncoding& enc) {
  double total = 0.0;
  for (std::size_t i = 0; i < enc.grid().size(); ++i)
    total += enc.grid().probs[i] * (enc.c() * enc.scaled_payoff(i) + 0.5);
  return total;
}

double cubic_error_bound(const PayoffEncoding& enc) {
  double total = 0.0;
  for (std::size_t i = 0; i < enc.grid().size(); ++i)
    total += enc.grid().probs[i] * std::pow(std::abs(enc.c() * enc.scaled_payoff(i)), 3);
  return total;
}

double expected_payoff_from_p1(double p1, const AssetGrid& grid, double strike, double c) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("expected_payoff_from_p1: p1 must lie in [0, 1]");
  if (!(c > 0.0)) throw DomainError("expected_payoff_from_p1: c must be > 0");
  return (p1 - 0.5 + c) * (grid.last_point() - strike) / (2.0 * c);
}

std::string format_circuit(const Circuit& circuit) {
  std::ostringstream out;
  write_circuit(out, circuit);
  return out.str();
}

void write_circuit(std::ostream& out, const Circuit& circuit) {
  for (const auto& gate : circuit) {
    struct Name {
      std::string operator()(const PauliX&) const { return "X"; }
      std::string operator()(const RotationY& r) const {
        std::ostringstream s;
        s.precision(10);
        s << "RY(" << r.angle << ")";
        return s.str();
      }
      std::string operator()(const Unitary& u) const { return "U[" + std::to_string(u.matrix.rows()) + "]"; }
    };
    out << std::visit(Name{}, gate.action) << ' ' << gate.target;
    for (std::size_t i = 0; i < gate.controls.size(); ++i) {
      out << (i == 0 ? " | " : ", ") << gate.controls[i].subsystem << " in {";
      for (std::size_t v = 0; v < gate.controls[i].values.size(); ++v)
        out << (v ? "," : "") << gate.controls[i].values[v];
      out << '}';
    }
    out << '\n';
  }
}

}  // namespace qdp
