#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/dense_oracle.hpp"
#include "oracles/generators.hpp"
#include "qntk/error.hpp"
#include "qntk/gate.hpp"
#include "qntk/pauli.hpp"
#include "qntk/state_vector.hpp"

using namespace qntk;

namespace {

void expect_state_near(const StateVector& s, const std::vector<Complex>& ref, double tol = 1e-12) {
  ASSERT_EQ(s.dimension(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(s[i].real(), ref[i].real(), tol) << "i=" << i << " (real)";
    EXPECT_NEAR(s[i].imag(), ref[i].imag(), tol) << "i=" << i << " (imag)";
  }
}

}  // namespace

// ---------- state vector ----------
TEST(StateVector, ZeroStateAndBasis) {
  StateVector s(3);
  EXPECT_EQ(s.dimension(), 8u);
  EXPECT_EQ(s[0], Complex(1, 0));
  const auto b = StateVector::basis(3, 5);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(std::abs(b[i]), i == 5 ? 1.0 : 0.0);
}

TEST(StateVector, RejectsBadSizes) {
  EXPECT_THROW(StateVector(0), DimensionError);
  EXPECT_THROW(StateVector(kMaxQubits + 1), DimensionError);
  EXPECT_THROW(StateVector::from_amplitudes(std::vector<Complex>(6)), DimensionError);
  EXPECT_THROW(StateVector::basis(2, 4), DimensionError);
}

TEST(StateVector, InnerProductBasics) {
  EXPECT_EQ(inner_product(StateVector::basis(1, 0), StateVector::basis(1, 0)), Complex(1, 0));
  EXPECT_EQ(inner_product(StateVector::basis(1, 0), StateVector::basis(1, 1)), Complex(0, 0));
  EXPECT_THROW(inner_product(StateVector(1), StateVector(2)), DimensionError);
}

TEST(StateVector, InnerProductConjugateSymmetry) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = gen::random_state(3, rng), b = gen::random_state(3, rng);
    const Complex ab = inner_product(a, b), ba = inner_product(b, a);
    EXPECT_NEAR(std::abs(ab - std::conj(ba)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ab - oracle::to_vec(a).dot(oracle::to_vec(b))), 0.0, 1e-14);
  }
}

// ---------- Pauli strings ----------
TEST(PauliString, ParseAndPrint) {
  const auto p = PauliString::parse("-XYZ");
  EXPECT_EQ(p.n_qubits(), 3u);
  EXPECT_EQ(p.phase(), -1.0);
  EXPECT_EQ(p.letters()[0], Pauli::X);
  EXPECT_EQ(p.letters()[2], Pauli::Z);
  EXPECT_EQ(p.to_string(), "-XYZ");
  EXPECT_EQ(p.operator_norm(), 1.0);
  EXPECT_THROW(PauliString::parse("XQ"), ParseError);
  EXPECT_THROW(PauliString::parse(""), ParseError);
}

TEST(PauliString, LeftmostLetterActsOnQubitZero) {
  // X on qubit 0 flips the least significant bit.
  const auto out = PauliString::parse("XI").apply(StateVector::basis(2, 0));
  expect_state_near(out, {0, 1, 0, 0});
}

TEST(PauliString, MatchesDenseOracle) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto p = gen::random_pauli(n, rng, trial % 2 ? -0.7 : 1.3);
    const auto s = gen::random_state(n, rng);
    EXPECT_LT(oracle::max_diff(p.apply(s), oracle::pauli_matrix(p) * oracle::to_vec(s)), 1e-12);
  }
}

TEST(PauliString, Commutation) {
  EXPECT_FALSE(PauliString::parse("X").commutes_with(PauliString::parse("Z")));
  EXPECT_TRUE(PauliString::parse("XX").commutes_with(PauliString::parse("ZZ")));
  EXPECT_TRUE(PauliString::parse("XI").commutes_with(PauliString::parse("IZ")));
}

TEST(PauliObservable, ParseTerms) {
  const auto o = PauliObservable::parse("0.5*ZZI - XII + 2e-1*IYY");
  ASSERT_EQ(o.terms().size(), 3u);
  EXPECT_DOUBLE_EQ(o.terms()[0].phase(), 0.5);
  EXPECT_DOUBLE_EQ(o.terms()[1].phase(), -1.0);
  EXPECT_DOUBLE_EQ(o.terms()[2].phase(), 0.2);
  EXPECT_DOUBLE_EQ(o.norm_bound(), 1.7);
  EXPECT_EQ(PauliObservable::parse(o.to_string()).to_string(), o.to_string());
  EXPECT_THROW(PauliObservable::parse("ZZ XX"), ParseError);
  EXPECT_THROW(PauliObservable::parse("ZZ + X"), DimensionError);
}

// ---------- rotations ----------
TEST(PauliRotation, ZeroAngleIsIdentity) {
  const auto out = apply_pauli_rotation(StateVector(1), PauliString::parse("Z"), 0.0);
  expect_state_near(out, {1, 0});
}

TEST(PauliRotation, YQuarterTurnSendsZeroToMinusOne) {
  const auto out = apply_pauli_rotation(StateVector(1), PauliString::parse("Y"), kPi / 2);
  expect_state_near(out, {0, -1});
  // independent 2x2 matrix exponential
  const oracle::CVec ref = oracle::rotation_matrix(PauliString::parse("Y"), kPi / 2) * oracle::to_vec(StateVector(1));
  EXPECT_LT(oracle::max_diff(out, ref), 1e-12);
}

TEST(PauliRotation, EigenvectorPicksUpPhase) {
  const double theta = 0.731;
  const auto out = apply_pauli_rotation(StateVector(2), PauliString::parse("ZZ"), theta);
  expect_state_near(out, {std::polar(1.0, theta), 0, 0, 0});
}

TEST(PauliRotation, RejectsNonUnitPhaseAndMismatch) {
  EXPECT_THROW(apply_pauli_rotation(StateVector(1), PauliString::parse("Y").with_phase(0.5), 0.1),
               ValidationError);
  EXPECT_THROW(apply_pauli_rotation(StateVector(2), PauliString::parse("Y"), 0.1), DimensionError);
}

TEST(PauliRotation, InverseAndDenseOracle) {
  gen::Rng rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto g = gen::random_pauli(n, rng, trial % 2 ? -1.0 : 1.0);
    const auto s = gen::random_state(n, rng);
    const double a = u(rng);
    const auto r = apply_pauli_rotation(s, g, a);
    EXPECT_NEAR(r.norm(), 1.0, 1e-10);
    EXPECT_LT(max_abs_diff(apply_pauli_rotation(r, g, -a), s), 1e-12);
    EXPECT_LT(oracle::max_diff(r, oracle::rotation_matrix(g, a) * oracle::to_vec(s)), 1e-10);
  }
}

// ---------- dense gates ----------
TEST(DenseGate, HadamardOnZero) {
  const double h = 1 / std::sqrt(2.0);
  expect_state_near(apply_dense_gate(StateVector(1), hadamard(0)), {h, h});
}

TEST(DenseGate, CxTruthTable) {
  // |10> written as q1 q0: control qubit 1 set, target qubit 0 flips
  expect_state_near(apply_dense_gate(StateVector::basis(2, 0b10), cx(1, 0)), {0, 0, 0, 1});
  expect_state_near(apply_dense_gate(StateVector::basis(2, 0b01), cx(1, 0)), {0, 1, 0, 0});
  expect_state_near(apply_dense_gate(StateVector::basis(2, 0b01), cx(0, 1)), {0, 0, 0, 1});
}

TEST(DenseGate, RejectsNonUnitaryAndBadTargets) {
  EXPECT_THROW(DenseGate({0}, {1, 1, 0, 1}), ValidationError);
  EXPECT_THROW(DenseGate({1, 1}, std::vector<Complex>(16)), ValidationError);
  EXPECT_THROW(DenseGate({0}, {1, 0, 0}), ValidationError);
  EXPECT_THROW(apply_dense_gate(StateVector(2), hadamard(2)), DimensionError);
}

TEST(DenseGate, RandomTwoQubitMatchesDenseOracle) {
  gen::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen::random_state(3, rng);
    std::size_t a = rng() % 3, b = rng() % 3;
    while (b == a) b = rng() % 3;
    const auto g = gen::random_two_qubit_gate(a, b, rng);
    const auto out = apply_dense_gate(s, g);
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
    EXPECT_LT(oracle::max_diff(out, oracle::gate_matrix(g, 3) * oracle::to_vec(s)), 1e-12);
    EXPECT_LT(max_abs_diff(apply_dense_gate(out, g.adjoint()), s), 1e-12);
  }
}

// ---------- expectation ----------
TEST(Expectation, Basics) {
  EXPECT_DOUBLE_EQ(expectation(StateVector(1), PauliObservable::parse("Z")), 1.0);
  const auto plus = apply_dense_gate(StateVector(1), hadamard(0));
  EXPECT_NEAR(expectation(plus, PauliObservable::parse("Z")), 0.0, 1e-15);
  EXPECT_THROW(expectation(StateVector(2), PauliObservable::parse("Z")), DimensionError);
}

TEST(Expectation, RealAndMatchesDenseOracle) {
  gen::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto s = gen::random_state(n, rng);
    const auto o = gen::random_observable(n, 3, rng);
    const Complex e = expectation_complex(s, o);
    EXPECT_LT(std::abs(e.imag()), 1e-10);
    const Complex ref = oracle::quadratic_form(oracle::to_vec(s), oracle::observable_matrix(o));
    EXPECT_NEAR(e.real(), ref.real(), 1e-10);
  }
}

TEST(Expectation, ObservableApplyMatchesDenseOracle) {
  gen::Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto s = gen::random_state(n, rng);
    const auto o = gen::random_observable(n, 4, rng);
    EXPECT_LT(oracle::max_diff(o.apply(s), oracle::observable_matrix(o) * oracle::to_vec(s)), 1e-12);
  }
}

TEST(Norm, PreservedUnderLongRandomSequences) {
  gen::Rng rng(17);
  std::uniform_real_distribution<double> u(-4, 4);
  auto s = gen::random_state(4, rng);
  for (int k = 0; k < 500; ++k) {
    if (k % 2) {
      apply_pauli_rotation_inplace(s, gen::random_pauli(4, rng), u(rng));
    } else {
      std::size_t a = rng() % 4, b = rng() % 4;
      while (b == a) b = rng() % 4;
      apply_dense_gate_inplace(s, gen::random_two_qubit_gate(a, b, rng));
    }
  }
  EXPECT_LT(std::abs(s.norm() - 1.0), 1e-10);
}

TEST(TraceInner, DistinctStringsAreOrthogonal) {
  EXPECT_EQ(normalized_trace_inner(PauliString::parse("XZ"), PauliString::parse("XZ")), 1.0);
  EXPECT_EQ(normalized_trace_inner(PauliString::parse("XZ"), PauliString::parse("ZX")), 0.0);
}
