#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "qdp/errors.hpp"
#include "qdp/random.hpp"
#include "qdp/state.hpp"

using namespace qdp;

namespace {

RegisterLayout qudit_qubit(int d) {
  return RegisterLayout({{"q", d, Role::Asset}, {"p", 2, Role::Payoff}});
}

RegisterLayout mixed_layout() {
  return RegisterLayout({{"i0", 3, Role::Asset}, {"i1", 3, Role::Asset}, {"a0", 2, Role::Carry}, {"c", 2, Role::Comparator},
                         {"p", 2, Role::Payoff}});
}

ComplexMatrix random_unitary(int dim, RandomStream& rng) {
  ComplexMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(rng.standard_normal(), rng.standard_normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  return qr.householderQ();
}

StateVector random_state(const RegisterLayout& layout, RandomStream& rng) {
  ComplexVector v(static_cast<Eigen::Index>(layout.total_dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.standard_normal(), rng.standard_normal());
  v.normalize();
  return StateVector(layout, v);
}

ControlledGate random_gate(const RegisterLayout& layout, RandomStream& rng) {
  const std::size_t target = rng.engine()() % layout.size();
  ControlledGate gate;
  gate.target = layout[target].name;
  const int dim = layout[target].dim;
  switch (rng.engine()() % 3) {
    case 0:
      gate.action = dim == 2 ? GateAction{PauliX{}} : GateAction{Unitary{random_unitary(dim, rng)}};
      break;
    case 1:
      gate.action = dim == 2 ? GateAction{RotationY{rng.uniform() * 6.0 - 3.0}} : GateAction{Unitary{random_unitary(dim, rng)}};
      break;
    default:
      gate.action = Unitary{random_unitary(dim, rng)};
  }
  for (std::size_t pos = 0; pos < layout.size(); ++pos) {
    if (pos == target || rng.uniform() < 0.5) continue;
    Control c{layout[pos].name, {}};
    for (int v = 0; v < layout[pos].dim; ++v)
      if (rng.uniform() < 0.6) c.values.push_back(v);
    gate.controls.push_back(c);
  }
  return gate;
}

}  // namespace

TEST(RegisterLayout, LittleEndianIndexing) {
  const RegisterLayout l({{"a", 3, Role::Asset}, {"b", 4, Role::Asset}, {"c", 2, Role::Comparator}});
  EXPECT_EQ(l.total_dim(), 24u);
  EXPECT_EQ(l.stride(0), 1u);
  EXPECT_EQ(l.stride(1), 3u);
  EXPECT_EQ(l.stride(2), 12u);
  const std::vector<int> digits{2, 1, 1};
  EXPECT_EQ(l.encode(digits), 2u + 3u * 1u + 12u * 1u);
  for (std::size_t b = 0; b < l.total_dim(); ++b) EXPECT_EQ(l.encode(l.decode(b)), b);
}

TEST(RegisterLayout, AssetDigitRoundTrip) {
  for (int d : {2, 3, 5, 7}) {
    for (int n : {1, 2, 3}) {
      std::vector<Subsystem> subs;
      for (int j = 0; j < n; ++j) subs.push_back({"i" + std::to_string(j), d, Role::Asset});
      const RegisterLayout l(subs);
      std::size_t size = 1;
      for (int j = 0; j < n; ++j) size *= static_cast<std::size_t>(d);
      for (std::size_t i = 0; i < size; ++i) {
        std::size_t rebuilt = 0, place = 1;
        for (int j = 0; j < n; ++j) {
          rebuilt += static_cast<std::size_t>(l.digit(i, static_cast<std::size_t>(j))) * place;
          place *= static_cast<std::size_t>(d);
        }
        ASSERT_EQ(rebuilt, i);
      }
    }
  }
}

TEST(RegisterLayout, Rejections) {
  EXPECT_THROW(RegisterLayout({{"a", 2, Role::Asset}, {"a", 2, Role::Payoff}}), LayoutError);
  EXPECT_THROW(RegisterLayout({{"a", 1, Role::Asset}}), LayoutError);
  EXPECT_THROW(RegisterLayout(std::vector<Subsystem>{}), LayoutError);
  const RegisterLayout big({{"a", 4096, Role::Asset}, {"p", 2, Role::Payoff}});
  EXPECT_THROW(init_ground(big), ResourceError);
  EXPECT_THROW(MatrixOp::identity(big), ResourceError);
  const RegisterLayout l = qudit_qubit(3);
  EXPECT_THROW((void)l.position("zz"), LayoutError);
  EXPECT_TRUE(l.contains("p"));
  EXPECT_EQ(l.positions_with_role(Role::Payoff), std::vector<std::size_t>{1});
}

TEST(StateVector, GroundStates) {
  const StateVector one = init_ground(RegisterLayout({{"p", 2, Role::Payoff}}));
  EXPECT_EQ(one.amps().size(), 2);
  EXPECT_EQ(one.amp(0), Complex(1.0));
  EXPECT_EQ(one.amp(1), Complex(0.0));
  const StateVector s = init_ground(qudit_qubit(5));
  EXPECT_EQ(s.amps().size(), 10);
  EXPECT_EQ(s.amp(0), Complex(1.0));
  EXPECT_EQ(s.norm_squared(), 1.0);
}

TEST(StateVector, RejectsBadAmplitudes) {
  const RegisterLayout l = qudit_qubit(3);
  EXPECT_THROW(StateVector(l, ComplexVector::Zero(5)), LayoutError);
  ComplexVector v = ComplexVector::Zero(6);
  v(0) = 0.9;
  EXPECT_THROW(StateVector(l, v), ValidationError);
}

TEST(ApplyGate, EmptyControlSetIsIdentity) {
  RandomStream rng(1);
  const RegisterLayout l = mixed_layout();
  const StateVector s = random_state(l, rng);
  const StateVector out = apply_gate(s, ControlledGate{{{"i0", {}}}, "p", PauliX{}});
  EXPECT_EQ((out.amps() - s.amps()).norm(), 0.0);
}

TEST(ApplyGate, RotationYOnGround) {
  for (double theta : {0.0, 0.3, std::numbers::pi / 4, 1.2, -0.7}) {
    const StateVector out = apply_gate(init_ground(qudit_qubit(3)), ControlledGate{{}, "p", RotationY{theta}});
    const std::size_t one = qudit_qubit(3).stride(1);
    EXPECT_NEAR(out.amp(0).real(), std::cos(theta), 1e-15);
    EXPECT_NEAR(out.amp(one).real(), std::sin(theta), 1e-15);
  }
}

TEST(ApplyGate, FullControlSetEqualsUncontrolled) {
  RandomStream rng(2);
  const RegisterLayout l = mixed_layout();
  const StateVector s = random_state(l, rng);
  const StateVector a = apply_gate(s, ControlledGate{{{"i0", {0, 1, 2}}, {"c", {0, 1}}}, "p", PauliX{}});
  const StateVector b = apply_gate(s, ControlledGate{{}, "p", PauliX{}});
  EXPECT_LT((a.amps() - b.amps()).norm(), 1e-15);
}

TEST(ApplyGate, ControlsSelectBasisStates) {
  const RegisterLayout l = mixed_layout();
  for (std::size_t b = 0; b < l.total_dim(); ++b) {
    const StateVector out = apply_gate(basis_state(l, b), ControlledGate{{{"i1", {1, 2}}, {"a0", {1}}}, "c", PauliX{}});
    auto digits = l.decode(b);
    if ((digits[1] == 1 || digits[1] == 2) && digits[2] == 1) digits[3] ^= 1;
    EXPECT_EQ(out.amp(l.encode(digits)), Complex(1.0));
  }
}

TEST(ApplyGate, QuditTargetUnitary) {
  RandomStream rng(3);
  const RegisterLayout l = mixed_layout();
  const ComplexMatrix u = random_unitary(3, rng);
  const StateVector s = random_state(l, rng);
  const StateVector out = apply_gate(s, ControlledGate{{{"p", {1}}}, "i1", Unitary{u}});
  for (std::size_t b = 0; b < l.total_dim(); ++b) {
    const auto digits = l.decode(b);
    Complex expected = s.amp(b);
    if (digits[4] == 1) {
      expected = 0.0;
      for (int v = 0; v < 3; ++v) {
        auto src = digits;
        src[1] = v;
        expected += u(digits[1], v) * s.amp(l.encode(src));
      }
    }
    EXPECT_LT(std::abs(out.amp(b) - expected), 1e-14);
  }
}

TEST(ApplyGate, ValidationErrors) {
  const RegisterLayout l = mixed_layout();
  const StateVector s = init_ground(l);
  EXPECT_THROW(apply_gate(s, ControlledGate{{}, "i0", PauliX{}}), LayoutError);
  EXPECT_THROW(apply_gate(s, ControlledGate{{}, "i0", RotationY{0.1}}), LayoutError);
  EXPECT_THROW(apply_gate(s, ControlledGate{{}, "nope", PauliX{}}), LayoutError);
  EXPECT_THROW(apply_gate(s, ControlledGate{{{"p", {1}}}, "p", PauliX{}}), LayoutError);
  EXPECT_THROW(apply_gate(s, ControlledGate{{{"i0", {3}}}, "p", PauliX{}}), ValidationError);
  ComplexMatrix bad = ComplexMatrix::Identity(3, 3);
  bad(0, 0) = 1.01;
  EXPECT_THROW(apply_gate(s, ControlledGate{{}, "i0", Unitary{bad}}), ValidationError);
  EXPECT_THROW(apply_gate(s, ControlledGate{{}, "i0", Unitary{ComplexMatrix::Identity(2, 2)}}), LayoutError);
}

TEST(ApplyGate, NormPreservedOverManyRandomGates) {
  RandomStream rng(4);
  const RegisterLayout l = mixed_layout();
  StateVector s = random_state(l, rng);
  for (int i = 0; i < 1000; ++i) {
    s = apply_gate(s, random_gate(l, rng));
    ASSERT_LE(std::abs(s.norm_squared() - 1.0), 1e-12) << "gate " << i;
  }
  EXPECT_LE(std::abs(s.norm_squared() - 1.0), 1e-10);
}

TEST(ApplyGate, RotationHomomorphism) {
  RandomStream rng(5);
  const RegisterLayout l = mixed_layout();
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector s = random_state(l, rng);
    const double a = rng.uniform() * 4 - 2;
    const double b = rng.uniform() * 4 - 2;
    const Control ctrl{"i0", {0, 2}};
    const StateVector two = apply_circuit(s, {ControlledGate{{ctrl}, "p", RotationY{a}}, ControlledGate{{ctrl}, "p", RotationY{b}}});
    const StateVector one = apply_gate(s, ControlledGate{{ctrl}, "p", RotationY{a + b}});
    EXPECT_LT((two.amps() - one.amps()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GateToMatrix, MatchesApplyGateOnEveryBasisState) {
  RandomStream rng(6);
  const RegisterLayout l = mixed_layout();  // 72 states
  for (int trial = 0; trial < 30; ++trial) {
    const ControlledGate g = random_gate(l, rng);
    const MatrixOp m = gate_to_matrix(l, g);
    for (std::size_t b = 0; b < l.total_dim(); ++b) {
      const StateVector via_matrix = apply_matrix(basis_state(l, b), m);
      const StateVector via_gate = apply_gate(basis_state(l, b), g);
      ASSERT_LT((via_matrix.amps() - via_gate.amps()).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(GateToMatrix, ExhaustiveForLayoutsUpTo200) {
  RandomStream rng(7);
  const RegisterLayout l({{"i0", 5, Role::Asset}, {"i1", 5, Role::Asset}, {"c", 2, Role::Comparator}, {"p", 2, Role::Payoff}});
  ASSERT_EQ(l.total_dim(), 100u);
  for (int trial = 0; trial < 10; ++trial) {
    const ControlledGate g = random_gate(l, rng);
    const ComplexMatrix m = gate_to_matrix(l, g).matrix();
    for (std::size_t b = 0; b < l.total_dim(); ++b)
      ASSERT_LT((m.col(static_cast<Eigen::Index>(b)) - apply_gate(basis_state(l, b), g).amps()).norm(), 1e-14);
  }
}

TEST(GateToMatrix, IdentityAndProducts) {
  RandomStream rng(8);
  const RegisterLayout l = mixed_layout();
  const auto dim = static_cast<Eigen::Index>(l.total_dim());
  const MatrixOp id = gate_to_matrix(l, ControlledGate{{{"c", {}}}, "p", PauliX{}});
  EXPECT_EQ((id.matrix() - ComplexMatrix::Identity(dim, dim)).norm(), 0.0);

  Circuit circuit;
  for (int i = 0; i < 8; ++i) circuit.push_back(random_gate(l, rng));
  MatrixOp product = MatrixOp::identity(l);
  for (const auto& g : circuit) product = gate_to_matrix(l, g) * product;
  const StateVector s = random_state(l, rng);
  EXPECT_LT((apply_matrix(s, product).amps() - apply_circuit(s, circuit).amps()).norm(), 1e-13);
  EXPECT_LT((product.matrix() - circuit_to_matrix(l, circuit).matrix()).norm(), 1e-13);
}

TEST(ApplyMatrix, IdentityAdjointAndPermutation) {
  RandomStream rng(9);
  const RegisterLayout l({{"q", 3, Role::Asset}});
  const StateVector s = random_state(l, rng);
  EXPECT_EQ((apply_matrix(s, MatrixOp::identity(l)).amps() - s.amps()).norm(), 0.0);

  const MatrixOp u(l, random_unitary(3, rng));
  const StateVector back = apply_matrix(apply_matrix(s, u), u.adjoint());
  EXPECT_LT((back.amps() - s.amps()).cwiseAbs().maxCoeff(), 1e-12);

  ComplexMatrix perm = ComplexMatrix::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;  // |v> -> |v+1 mod 3>
  const StateVector p = apply_matrix(s, MatrixOp(l, perm));
  for (int v = 0; v < 3; ++v) EXPECT_EQ(p.amp(static_cast<std::size_t>((v + 1) % 3)), s.amp(static_cast<std::size_t>(v)));
}

TEST(ApplyMatrix, RejectsNonUnitaryAndMismatchedLayouts) {
  const RegisterLayout l({{"q", 3, Role::Asset}});
  ComplexMatrix m = ComplexMatrix::Identity(3, 3);
  m(2, 2) = 1.0 + 1e-8;
  EXPECT_THROW(MatrixOp(l, m), ValidationError);
  EXPECT_THROW(MatrixOp(l, ComplexMatrix::Identity(4, 4)), LayoutError);
  EXPECT_THROW(apply_matrix(init_ground(qudit_qubit(3)), MatrixOp::identity(l)), LayoutError);
}

TEST(MatrixOp, PowerMatchesRepeatedProduct) {
  RandomStream rng(10);
  const RegisterLayout l = qudit_qubit(3);
  const MatrixOp u(l, random_unitary(6, rng));
  MatrixOp acc = MatrixOp::identity(l);
  for (unsigned long e = 0; e <= 13; ++e) {
    EXPECT_LT((u.power(e).matrix() - acc.matrix()).cwiseAbs().maxCoeff(), 1e-12) << e;
    acc = u * acc;
  }
}

TEST(Marginals, Examples) {
  const RegisterLayout l = qudit_qubit(4);
  const StateVector g = init_ground(l);
  EXPECT_EQ(marginal_probability(g, "p", 1), 0.0);
  const StateVector r = apply_gate(g, ControlledGate{{}, "p", RotationY{std::numbers::pi / 4}});
  EXPECT_NEAR(marginal_probability(r, "p", 1), 0.5, 1e-15);
  RandomStream rng(11);
  const StateVector s = random_state(l, rng);
  double total = 0.0;
  for (int v = 0; v < 4; ++v) total += marginal_probability(s, "q", v);
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_THROW(marginal_probability(s, "q", 4), DomainError);
  EXPECT_THROW(marginal_probability(s, "p", -1), DomainError);
}

TEST(SampleMeasurement, DeterministicState) {
  const RegisterLayout l = qudit_qubit(5);
  const StateVector s = basis_state(l, 3);
  RandomStream rng(12);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_measurement(s, "q", rng), 3);
}

TEST(SampleMeasurement, FairCoinFrequency) {
  const StateVector s = apply_gate(init_ground(qudit_qubit(2)), ControlledGate{{}, "p", RotationY{std::numbers::pi / 4}});
  RandomStream rng(13);
  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += sample_measurement(s, "p", rng);
  EXPECT_NEAR(ones / 100000.0, 0.5, 0.01);
}

TEST(SampleMeasurement, Reproducible) {
  RandomStream r0(14);
  const StateVector s = random_state(mixed_layout(), r0);
  RandomStream a(15), b(15);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_measurement(s, "i1", a), sample_measurement(s, "i1", b));
}

TEST(WriteAmplitudesCsv, Format) {
  const StateVector s = apply_gate(init_ground(RegisterLayout({{"p", 2, Role::Payoff}})), ControlledGate{{}, "p", RotationY{0.5}});
  std::ostringstream out;
  write_amplitudes_csv(out, s);
  std::istringstream in(out.str());
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "index,re,im");
  EXPECT_EQ(std::stod(row0.substr(2)), std::cos(0.5));
  EXPECT_EQ(row1.rfind("1,", 0), 0u);
}
