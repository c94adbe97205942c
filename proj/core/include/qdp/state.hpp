#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qdp/random.hpp"

namespace qdp {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class Role { Asset, Carry, Comparator, Payoff };

std::string_view to_string(Role role) noexcept;

struct Subsystem {
  std::string name;
  int dim = 2;
  Role role = Role::Asset;

  bool operator==(const Subsystem&) const = default;
};

/// Layouts themselves may describe spaces up to kMaxLayoutDim (so gate lists for
/// large registers can still be built and inspected); anything dense is capped
/// at kMaxTotalDim.
inline constexpr std::size_t kMaxLayoutDim = std::size_t{1} << 40;

/// Ordered tensor-product layout. Subsystem 0 is the least-significant digit of
/// the composite index: index = digit_0 + dim_0 * (digit_1 + dim_1 * (...)).
class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Subsystem> subsystems);

  [[nodiscard]] const std::vector<Subsystem>& subsystems() const noexcept { return subsystems_; }
  [[nodiscard]] std::size_t size() const noexcept { return subsystems_.size(); }
  [[nodiscard]] std::size_t total_dim() const noexcept { return total_dim_; }
  [[nodiscard]] const Subsystem& operator[](std::size_t pos) const { return subsystems_.at(pos); }

  /// Position of a named subsystem; throws LayoutError if absent.
  [[nodiscard]] std::size_t position(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const noexcept;
  [[nodiscard]] std::vector<std::size_t> positions_with_role(Role role) const;

  [[nodiscard]] std::size_t stride(std::size_t pos) const { return strides_.at(pos); }
  [[nodiscard]] int digit(std::size_t basis, std::size_t pos) const;
  [[nodiscard]] std::vector<int> decode(std::size_t basis) const;
  [[nodiscard]] std::size_t encode(std::span<const int> digits) const;

  bool operator==(const RegisterLayout& other) const { return subsystems_ == other.subsystems_; }

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

/// Throws ResourceError when the layout is too large for dense objects.
void require_dense(const RegisterLayout& layout);

/// Normalized amplitude vector over a layout.
class StateVector {
 public:
  /// Throws LayoutError on length mismatch and ValidationError if the norm is
  /// off by more than 1e-10.
  StateVector(RegisterLayout layout, ComplexVector amps);

  [[nodiscard]] const RegisterLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const ComplexVector& amps() const noexcept { return amps_; }
  [[nodiscard]] Complex amp(std::size_t basis) const { return amps_(static_cast<Eigen::Index>(basis)); }
  [[nodiscard]] double norm_squared() const { return amps_.squaredNorm(); }

 private:
  RegisterLayout layout_;
  ComplexVector amps_;
};

// ---------------------------------------------------------------------------
// Controlled single-subsystem gates

struct Control {
  std::string subsystem;
  std::vector<int> values;  // accepted digit values; empty => gate is identity
};

struct PauliX {};

/// R_Y(angle)|0> = cos(angle)|0> + sin(angle)|1>.
struct RotationY {
  double angle = 0.0;
};

struct Unitary {
  ComplexMatrix matrix;
};

using GateAction = std::variant<PauliX, RotationY, Unitary>;

struct ControlledGate {
  std::vector<Control> controls;
  std::string target;
  GateAction action;
};

using Circuit = std::vector<ControlledGate>;

ComplexMatrix rotation_y(double angle);

/// Matrix of a gate action on a target of dimension `target_dim`.
ComplexMatrix action_matrix(const GateAction& action, int target_dim);

/// Checks subsystem names, control ranges, target dimension and action
/// unitarity (1e-12). Throws LayoutError / ValidationError.
void validate_gate(const ControlledGate& gate, const RegisterLayout& layout);

// ---------------------------------------------------------------------------
// Full-space operators

/// Dense operator over a layout, unitary to 1e-10 by construction.
class MatrixOp {
 public:
  static constexpr double kUnitaryTolerance = 1e-10;

  MatrixOp(RegisterLayout layout, ComplexMatrix matrix);

  static MatrixOp identity(const RegisterLayout& layout);
  /// Skips the O(D^3) unitarity check. For matrices assembled from parts that
  /// are unitary by construction (validated gates, Householder blocks).
  static MatrixOp assume_unitary(RegisterLayout layout, ComplexMatrix matrix);

  [[nodiscard]] const RegisterLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] MatrixOp adjoint() const;

  /// this * rhs (apply rhs first).
  [[nodiscard]] MatrixOp operator*(const MatrixOp& rhs) const;
  [[nodiscard]] MatrixOp power(unsigned long exponent) const;

 private:
  struct Trusted {};
  MatrixOp(Trusted, RegisterLayout layout, ComplexMatrix matrix);

  RegisterLayout layout_;
  ComplexMatrix matrix_;
};

/// max_ij |(M^dagger M - I)_ij|.
double unitarity_defect(const ComplexMatrix& matrix);

// ---------------------------------------------------------------------------
// Operations

StateVector init_ground(const RegisterLayout& layout);
StateVector basis_state(const RegisterLayout& layout, std::size_t basis);

StateVector apply_gate(const StateVector& state, const ControlledGate& gate);
StateVector apply_circuit(const StateVector& state, const Circuit& circuit);
StateVector apply_matrix(const StateVector& state, const MatrixOp& op);

/// Born-rule probability that `subsystem` reads `value`.
double marginal_probability(const StateVector& state, std::string_view subsystem, int value);
std::vector<double> marginal_distribution(const StateVector& state, std::string_view subsystem);

/// Draws one outcome from the marginal of `subsystem`. The state is not
/// collapsed; callers re-prepare for every shot.
int sample_measurement(const StateVector& state, std::string_view subsystem, RandomStream& rng);

MatrixOp gate_to_matrix(const RegisterLayout& layout, const ControlledGate& gate);

/// Applies `circuit` to every column of `columns` in place (columns are states
/// on `layout`). Builds circuit matrices without O(D^3) products.
void apply_circuit_to_columns(const RegisterLayout& layout, const Circuit& circuit,
                              ComplexMatrix& columns);

MatrixOp circuit_to_matrix(const RegisterLayout& layout, const Circuit& circuit);

/// CSV with header `index,re,im`.
void write_amplitudes_csv(std::ostream& out, const StateVector& state);

}  // namespace qdp
