#include "qdp/state.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "qdp/errors.hpp"
#include "qdp/format.hpp"
#include "qdp/grid.hpp"

namespace qdp {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Asset: return "asset";
    case Role::Carry: return "carry";
    case Role::Comparator: return "comparator";
    case Role::Payoff: return "payoff";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// RegisterLayout

RegisterLayout::RegisterLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw LayoutError("RegisterLayout: no subsystems");
  std::unordered_set<std::string> names;
  strides_.reserve(subsystems_.size());
  total_dim_ = 1;
  for (const auto& sub : subsystems_) {
    if (sub.dim < 2) throw LayoutError("RegisterLayout: subsystem '" + sub.name + "' has dim < 2");
    if (!names.insert(sub.name).second) throw LayoutError("RegisterLayout: duplicate name '" + sub.name + "'");
    strides_.push_back(total_dim_);
    total_dim_ *= static_cast<std::size_t>(sub.dim);
    if (total_dim_ > kMaxLayoutDim)
      throw ResourceError("RegisterLayout: total dimension exceeds " + std::to_string(kMaxLayoutDim));
  }
}

std::size_t RegisterLayout::position(std::string_view name) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].name == name) return i;
  throw LayoutError("RegisterLayout: no subsystem named '" + std::string(name) + "'");
}

bool RegisterLayout::contains(std::string_view name) const noexcept {
  return std::any_of(subsystems_.begin(), subsystems_.end(), [&](const Subsystem& s) { return s.name == name; });
}

std::vector<std::size_t> RegisterLayout::positions_with_role(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].role == role) out.push_back(i);
  return out;
}

int RegisterLayout::digit(std::size_t basis, std::size_t pos) const {
  return static_cast<int>((basis / strides_.at(pos)) % static_cast<std::size_t>(subsystems_[pos].dim));
}

std::vector<int> RegisterLayout::decode(std::size_t basis) const {
  std::vector<int> digits(subsystems_.size());
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    digits[i] = static_cast<int>(basis % static_cast<std::size_t>(subsystems_[i].dim));
    basis /= static_cast<std::size_t>(subsystems_[i].dim);
  }
  return digits;
}

std::size_t RegisterLayout::encode(std::span<const int> digits) const {
  if (digits.size() != subsystems_.size()) throw LayoutError("RegisterLayout::encode: wrong digit count");
  std::size_t basis = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= subsystems_[i].dim)
      throw LayoutError("RegisterLayout::encode: digit out of range for '" + subsystems_[i].name + "'");
    basis += static_cast<std::size_t>(digits[i]) * strides_[i];
  }
  return basis;
}

// ---------------------------------------------------------------------------
// StateVector

void require_dense(const RegisterLayout& layout) {
  if (layout.total_dim() > kMaxTotalDim)
    throw ResourceError("total dimension " + std::to_string(layout.total_dim()) + " exceeds the dense cap of " +
                        std::to_string(kMaxTotalDim));
}

StateVector::StateVector(RegisterLayout layout, ComplexVector amps)
    : layout_(std::move(layout)), amps_(std::move(amps)) {
  require_dense(layout_);
  if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim())
    throw LayoutError("StateVector: amplitude count does not match layout");
  if (std::abs(amps_.squaredNorm() - 1.0) > 1e-10) throw ValidationError("StateVector: state is not normalized");
}

// ---------------------------------------------------------------------------
// Gates

ComplexMatrix rotation_y(double angle) {
  ComplexMatrix m(2, 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m << c, -s, s, c;
  return m;
}

ComplexMatrix action_matrix(const GateAction& action, int target_dim) {
  struct Visitor {
    int dim;
    ComplexMatrix operator()(const PauliX&) const {
      if (dim != 2) throw LayoutError("X-flip requires a dimension-2 target");
      ComplexMatrix m(2, 2);
      m << 0, 1, 1, 0;
      return m;
    }
    ComplexMatrix operator()(const RotationY& r) const {
      if (dim != 2) throw LayoutError("R_Y requires a dimension-2 target");
      return rotation_y(r.angle);
    }
    ComplexMatrix operator()(const Unitary& u) const {
      if (u.matrix.rows() != dim || u.matrix.cols() != dim)
        throw LayoutError("unitary action does not match target dimension");
      return u.matrix;
    }
  };
  return std::visit(Visitor{target_dim}, action);
}

double unitarity_defect(const ComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) return INFINITY;
  const ComplexMatrix gram = matrix.adjoint() * matrix;
  return (gram - ComplexMatrix::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
}

namespace {

struct ResolvedControl {
  std::size_t stride;
  int dim;
  std::vector<char> accept;
};

struct ResolvedGate {
  std::size_t target_stride = 1;
  int target_dim = 2;
  ComplexMatrix matrix;
  std::vector<ResolvedControl> controls;
  bool trivial = false;  // some control set is empty
};

ResolvedGate resolve(const ControlledGate& gate, const RegisterLayout& layout) {
  validate_gate(gate, layout);
  ResolvedGate out;
  const std::size_t target = layout.position(gate.target);
  out.target_stride = layout.stride(target);
  out.target_dim = layout[target].dim;
  out.matrix = action_matrix(gate.action, out.target_dim);
  for (const auto& control : gate.controls) {
    if (control.values.empty()) {
      out.trivial = true;
      continue;
    }
    const std::size_t pos = layout.position(control.subsystem);
    ResolvedControl rc{layout.stride(pos), layout[pos].dim, std::vector<char>(static_cast<std::size_t>(layout[pos].dim), 0)};
    for (int v : control.values) rc.accept[static_cast<std::size_t>(v)] = 1;
    out.controls.push_back(std::move(rc));
  }
  return out;
}

bool controls_satisfied(const ResolvedGate& gate, std::size_t basis) {
  for (const auto& c : gate.controls)
    if (!c.accept[(basis / c.stride) % static_cast<std::size_t>(c.dim)]) return false;
  return true;
}

// Applies the resolved gate to the vector in place. Every basis index whose
// target digit is 0 anchors one block of target_dim amplitudes.
template <typename Vec>
void apply_resolved(const ResolvedGate& gate, Vec&& amps, std::size_t total_dim) {
  if (gate.trivial) return;
  const auto dim = static_cast<std::size_t>(gate.target_dim);
  const std::size_t stride = gate.target_stride;
  ComplexVector block(static_cast<Eigen::Index>(dim));
  for (std::size_t base = 0; base < total_dim; ++base) {
    if ((base / stride) % dim != 0) continue;
    if (!controls_satisfied(gate, base)) continue;
    for (std::size_t v = 0; v < dim; ++v) block(static_cast<Eigen::Index>(v)) = amps(static_cast<Eigen::Index>(base + v * stride));
    const ComplexVector result = gate.matrix * block;
    for (std::size_t v = 0; v < dim; ++v) amps(static_cast<Eigen::Index>(base + v * stride)) = result(static_cast<Eigen::Index>(v));
  }
}

}  // namespace

void validate_gate(const ControlledGate& gate, const RegisterLayout& layout) {
  const std::size_t target = layout.position(gate.target);
  const ComplexMatrix m = action_matrix(gate.action, layout[target].dim);
  if (unitarity_defect(m) > 1e-12) throw ValidationError("gate action on '" + gate.target + "' is not unitary");
  for (const auto& control : gate.controls) {
    const std::size_t pos = layout.position(control.subsystem);
    if (pos == target) throw LayoutError("subsystem '" + gate.target + "' cannot control itself");
    for (int v : control.values)
      if (v < 0 || v >= layout[pos].dim)
        throw ValidationError("control value " + std::to_string(v) + " outside the range of '" + control.subsystem + "'");
  }
}

// ---------------------------------------------------------------------------
// MatrixOp

MatrixOp::MatrixOp(RegisterLayout layout, ComplexMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  require_dense(layout_);
  const auto dim = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim) throw LayoutError("MatrixOp: matrix does not match layout dimension");
  if (unitarity_defect(matrix_) > kUnitaryTolerance) throw ValidationError("MatrixOp: matrix is not unitary");
}

MatrixOp::MatrixOp(Trusted, RegisterLayout layout, ComplexMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {}

MatrixOp MatrixOp::identity(const RegisterLayout& layout) {
  require_dense(layout);
  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  return MatrixOp(Trusted{}, layout, ComplexMatrix::Identity(dim, dim));
}

MatrixOp MatrixOp::assume_unitary(RegisterLayout layout, ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != layout.total_dim())
    throw LayoutError("MatrixOp: matrix size does not match layout");
  return MatrixOp(Trusted{}, std::move(layout), std::move(matrix));
}

MatrixOp MatrixOp::adjoint() const { return MatrixOp(Trusted{}, layout_, matrix_.adjoint()); }

MatrixOp MatrixOp::operator*(const MatrixOp& rhs) const {
  if (!(layout_ == rhs.layout_)) throw LayoutError("MatrixOp: layouts differ");
  return MatrixOp(Trusted{}, layout_, matrix_ * rhs.matrix_);
}

MatrixOp MatrixOp::power(unsigned long exponent) const {
  MatrixOp result = identity(layout_);
  MatrixOp base = *this;
  while (exponent > 0) {
    if (exponent & 1UL) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Operations

StateVector basis_state(const RegisterLayout& layout, std::size_t basis) {
  require_dense(layout);
  if (basis >= layout.total_dim()) throw LayoutError("basis_state: index out of range");
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  amps(static_cast<Eigen::Index>(basis)) = 1.0;
  return StateVector(layout, std::move(amps));
}

StateVector init_ground(const RegisterLayout& layout) { return basis_state(layout, 0); }

StateVector apply_gate(const StateVector& state, const ControlledGate& gate) {
  const ResolvedGate resolved = resolve(gate, state.layout());
  ComplexVector amps = state.amps();
  apply_resolved(resolved, amps, state.layout().total_dim());
  return StateVector(state.layout(), std::move(amps));
}

StateVector apply_circuit(const StateVector& state, const Circuit& circuit) {
  ComplexVector amps = state.amps();
  for (const auto& gate : circuit) apply_resolved(resolve(gate, state.layout()), amps, state.layout().total_dim());
  return StateVector(state.layout(), std::move(amps));
}

StateVector apply_matrix(const StateVector& state, const MatrixOp& op) {
  if (!(state.layout() == op.layout())) throw LayoutError("apply_matrix: layouts differ");
  return StateVector(state.layout(), op.matrix() * state.amps());
}

std::vector<double> marginal_distribution(const StateVector& state, std::string_view subsystem) {
  const auto& layout = state.layout();
  const std::size_t pos = layout.position(subsystem);
  std::vector<double> probs(static_cast<std::size_t>(layout[pos].dim), 0.0);
  for (std::size_t b = 0; b < layout.total_dim(); ++b)
    probs[static_cast<std::size_t>(layout.digit(b, pos))] += std::norm(state.amp(b));
  return probs;
}

double marginal_probability(const StateVector& state, std::string_view subsystem, int value) {
  const std::size_t pos = state.layout().position(subsystem);
  if (value < 0 || value >= state.layout()[pos].dim)
    throw DomainError("marginal_probability: value " + std::to_string(value) + " outside the range of '" +
                      std::string(subsystem) + "'");
  return marginal_distribution(state, subsystem)[static_cast<std::size_t>(value)];
}

int sample_measurement(const StateVector& state, std::string_view subsystem, RandomStream& rng) {
  const std::vector<double> probs = marginal_distribution(state, subsystem);
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  int last_nonzero = 0;
  for (std::size_t v = 0; v < probs.size(); ++v) {
    if (probs[v] <= 0.0) continue;
    last_nonzero = static_cast<int>(v);
    acc += probs[v];
    if (u < acc) return static_cast<int>(v);
  }
  return last_nonzero;
}

void apply_circuit_to_columns(const RegisterLayout& layout, const Circuit& circuit, ComplexMatrix& columns) {
  if (static_cast<std::size_t>(columns.rows()) != layout.total_dim())
    throw LayoutError("apply_circuit_to_columns: row count does not match layout");
  for (const auto& gate : circuit) {
    const ResolvedGate resolved = resolve(gate, layout);
    for (Eigen::Index col = 0; col < columns.cols(); ++col) apply_resolved(resolved, columns.col(col), layout.total_dim());
  }
}

MatrixOp circuit_to_matrix(const RegisterLayout& layout, const Circuit& circuit) {
  require_dense(layout);
  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  apply_circuit_to_columns(layout, circuit, m);
  return MatrixOp::assume_unitary(layout, std::move(m));
}

MatrixOp gate_to_matrix(const RegisterLayout& layout, const ControlledGate& gate) {
  return circuit_to_matrix(layout, Circuit{gate});
}

void write_amplitudes_csv(std::ostream& out, const StateVector& state) {
  out << "index,re,im\n";
  for (std::size_t b = 0; b < state.layout().total_dim(); ++b) {
    const Complex a = state.amp(b);
    out << b << ',' << format_real(a.real()) << ',' << format_real(a.imag()) << '\n';
  }
}

}  // namespace qdp
