#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "qmsim/coleman_hepp.hpp"
#include "qmsim/random.hpp"

using namespace qmsim;
using namespace qmsim::ch;

namespace {

const double r2 = std::numbers::sqrt2 / 2;

ChainModel model(std::size_t n, cplx a1, cplx a2) {
  ChainModel m;
  m.n_atoms = n;
  m.a1 = a1;
  m.a2 = a2;
  return m;
}

// Controlled exp(-i theta X) from the matrix exponential, control = qubit 0
// of two.
oracle::Mat controlled_pulse(double theta) {
  const oracle::Mat up = oracle::ket("u") * oracle::ket("u").adjoint();
  const oracle::Mat dn = oracle::ket("d") * oracle::ket("d").adjoint();
  return oracle::kron(up, oracle::id2()) + oracle::kron(dn, oracle::expm_minus_i(oracle::sx(), theta));
}

oracle::Mat dense_heisenberg(std::size_t n_atoms, double j) {
  const std::size_t nq = n_atoms + 1;
  oracle::Mat h = oracle::Mat::Zero(Eigen::Index{1} << nq, Eigen::Index{1} << nq);
  for (std::size_t i = 1; i < n_atoms; ++i) {
    for (char l : {'X', 'Y', 'Z'}) h += j * oracle::pauli({{i, l}, {i + 1, l}}, nq);
  }
  return h;
}

}  // namespace

TEST(InitialState, Examples) {
  const auto s1 = initial_state(model(3, 1.0, 0.0));
  EXPECT_EQ(s1[0], cplx(1.0));
  EXPECT_NEAR(s1.norm(), 1.0, 1e-15);
  const auto s2 = initial_state(model(2, r2, r2));
  const std::vector<cplx> expected{r2, 0, 0, 0, r2, 0, 0, 0};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(s2[i], expected[i]);
  EXPECT_NEAR(s2.norm(), 1.0, 1e-15);
}

TEST(InitialState, RejectsInvalidModels) {
  EXPECT_THROW(initial_state(model(0, 1.0, 0.0)), PreconditionError);
  EXPECT_THROW(initial_state(model(2, 1.0, 1.0)), PreconditionError);
}

TEST(PassageStep, UpProbeLeavesAtomAlone) {
  const auto layout = chain_layout(1);
  const auto s = passage_step(StateVector::basis(layout, 0), 1);
  EXPECT_EQ(s[0], cplx(1.0));
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(PassageStep, DownProbeFlipsWithMinusI) {
  const auto layout = chain_layout(1);
  const oracle::Mat u = controlled_pulse(std::numbers::pi / 2);
  const oracle::Vec in = oracle::ket("du");
  const oracle::Vec expected = u * in;  // -i |dd>
  EXPECT_NEAR(std::abs(expected[3] - cplx(0, -1)), 0.0, 1e-15);
  const auto s = passage_step(StateVector(layout, in), 1);
  EXPECT_LE(oracle::max_abs(s.amplitudes() - expected), 1e-15);
  const auto twice = passage_step(s, 1);
  EXPECT_LE(oracle::max_abs(twice.amplitudes() - (u * expected)), 1e-15);
  EXPECT_NEAR(std::abs(twice[2] - cplx(-1.0)), 0.0, 1e-15);
}

TEST(PassageStep, ArbitraryAngleMatchesMatrixExponential) {
  Rng rng(10);
  const auto layout = chain_layout(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = rng.uniform(0.0, 2 * std::numbers::pi);
    StateVector psi(layout, rng.normalized_vector(4));
    const auto out = passage_step(psi, 1, theta);
    EXPECT_LE(oracle::max_abs(out.amplitudes() - controlled_pulse(theta) * psi.amplitudes()), 1e-12);
  }
}

TEST(PassageStep, PreservesInnerProducts) {
  Rng rng(12);
  const auto layout = chain_layout(4);
  for (int trial = 0; trial < 50; ++trial) {
    StateVector a(layout, rng.normalized_vector(32));
    StateVector b(layout, rng.normalized_vector(32));
    const std::size_t atom = 1 + rng.next() % 4;
    const double theta = rng.uniform(0.0, 3.0);
    const auto a2 = passage_step(a, atom, theta);
    const auto b2 = passage_step(b, atom, theta);
    EXPECT_NEAR(a2.norm(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(a2.inner(b2) - a.inner(b)), 0.0, 1e-12);
  }
}

TEST(PassageStep, InvalidIndexAndRevisit) {
  const auto layout = chain_layout(2);
  EXPECT_THROW(passage_step(StateVector::basis(layout, 0), 0), PreconditionError);
  EXPECT_THROW(passage_step(StateVector::basis(layout, 0), 3), PreconditionError);
  Passage p(model(2, r2, r2));
  p.step(1);
  EXPECT_THROW(p.step(1), PreconditionError);
  p.step(2);
  EXPECT_TRUE(p.complete());
}

TEST(FullPassage, SingleAtomEqualAmplitudes) {
  const auto s = full_passage(model(1, r2, r2));
  const oracle::Vec expected = r2 * (oracle::ket("uu") + cplx(0, -1) * oracle::ket("dd"));
  EXPECT_LE(oracle::max_abs(s.amplitudes() - expected), 1e-15);
}

TEST(FullPassage, FourAtomsBranchPhaseIsOne) {
  const auto s = full_passage(model(4, r2, r2));
  EXPECT_NEAR(std::abs(s[31] - cplx(r2)), 0.0, 1e-15);
}

TEST(FullPassage, MatchesClosedFormOnRandomAmplitudes) {
  Rng rng(2024);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto [a1, a2] = rng.amplitude_pair();
      const auto m = model(n, a1, a2);
      const auto stepped = full_passage(m);
      const auto closed = closed_form_final(m);
      EXPECT_GE(std::abs(stepped.inner(closed)), 1.0 - 1e-12);
      EXPECT_LE(oracle::max_abs(stepped.amplitudes() - closed.amplitudes()), 1e-12);
    }
  }
}

TEST(Operators, Definitions) {
  EXPECT_EQ(pointer_operator(1).str(), "Z1");
  EXPECT_EQ(it_operator(1).str(), "X0*Y1");
  EXPECT_EQ(it_operator(3).str(), "X0*Y1*Y2*Y3");
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_TRUE(pointer_operator(n).is_hermitian());
    EXPECT_TRUE(it_operator(n).is_hermitian());
    EXPECT_FALSE(pointer_operator(n).support().count(0));
  }
}

TEST(Operators, PointerAndItExpectations) {
  Rng rng(55);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto m = model(n, std::sqrt(0.7), std::sqrt(0.3));
    EXPECT_NEAR(expectation(pointer_operator(n), full_passage(m)), 0.4, 1e-12);
    for (int trial = 0; trial < 10; ++trial) {
      const auto [a1, a2] = rng.amplitude_pair();
      const auto mm = model(n, a1, a2);
      const auto mixed = mixture_of(final_branches(mm));
      EXPECT_EQ(expectation_mixed(it_operator(n), mixed), 0.0);
      const double pure = expectation(it_operator(n), full_passage(mm));
      EXPECT_NEAR(pure, it_expectation_closed_form(n, a1, a2), 1e-12);
      EXPECT_NEAR(std::abs(pure - 0.0), std::abs(2.0 * (std::conj(a1) * a2).real()), 1e-12);
    }
  }
}

TEST(Operators, DenseOracleItExpectation) {
  // (-1)^N (a1* a2 + a1 a2*) against a Kronecker-built B at N <= 4.
  Rng rng(66);
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::size_t, char> letters{{0, 'X'}};
    for (std::size_t i = 1; i <= n; ++i) letters[i] = 'Y';
    const oracle::Mat b = oracle::pauli(letters, n + 1);
    const auto [a1, a2] = rng.amplitude_pair();
    const auto psi = full_passage(model(n, a1, a2));
    const double dense_value = psi.amplitudes().dot(b * psi.amplitudes()).real();
    EXPECT_NEAR(dense_value, it_expectation_closed_form(n, a1, a2), 1e-12);
  }
}

TEST(Operators, PointerAndItNeverCommute) {
  for (std::size_t n = 1; n <= 8; ++n) {
    EXPECT_FALSE(commutator(pointer_operator(n), it_operator(n)).empty());
  }
}

TEST(StrictCheck, ExactOnFinalState) {
  const auto m = model(4, std::sqrt(0.7), cplx(0, std::sqrt(0.3)));
  const auto r = strict_check(PauliString::single(Letter::Z, 0), pointer_operator(4), full_passage(m));
  EXPECT_NEAR(r.q_expect, 0.4, 1e-12);
  EXPECT_NEAR(r.delta, 0.0, 1e-12);
  EXPECT_EQ(r.delta, r.q_expect - r.qo_expect);
}

TEST(StrictCheck, NotYetCorrelatedOnInitialState) {
  const auto m = model(3, std::sqrt(0.2), std::sqrt(0.8));
  const auto r = strict_check(PauliString::single(Letter::Z, 0), pointer_operator(3), initial_state(m));
  EXPECT_NEAR(r.qo_expect, 1.0, 1e-12);
  EXPECT_NEAR(r.delta, (0.2 - 0.8) - 1.0, 1e-12);
}

TEST(StrictCheck, TransverseSpinIsNotRecorded) {
  const auto m = model(3, std::sqrt(0.6), std::polar(std::sqrt(0.4), 0.3));
  const auto psi = full_passage(m);
  const auto r = strict_check(PauliString::single(Letter::X, 0), pointer_operator(3), psi);
  EXPECT_NEAR(r.q_expect, 0.0, 1e-12);
  EXPECT_NEAR(r.delta, -expectation(pointer_operator(3), psi), 1e-12);
}

TEST(StrictCheck, ExactAcrossRandomAmplitudes) {
  Rng rng(77);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto [a1, a2] = rng.amplitude_pair();
      const auto r = strict_check(PauliString::single(Letter::Z, 0), pointer_operator(n), full_passage(model(n, a1, a2)));
      EXPECT_LE(std::abs(r.delta), 1e-12);
    }
  }
}

TEST(StrictCheck, SupportViolations) {
  const auto psi = full_passage(model(2, r2, r2));
  EXPECT_THROW(strict_check(PauliString::single(Letter::Z, 1), pointer_operator(2), psi), PreconditionError);
  EXPECT_THROW(strict_check(PauliString::single(Letter::Z, 0), PauliSum(PauliString::single(Letter::Z, 0)), psi),
               PreconditionError);
}

TEST(Heisenberg, AllUpIsEigenstate) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const double j = 0.75;
    const auto h = heisenberg_hamiltonian(n, j);
    const auto up = StateVector::basis(chain_layout(n), 0);
    const auto r = eigenstate_residual(h, up);
    EXPECT_NEAR(r.eigenvalue, j * static_cast<double>(n - 1), 1e-12);
    EXPECT_LE(r.residual, 1e-12);
    if (n <= 5) {
      const oracle::Mat hd = dense_heisenberg(n, j);
      EXPECT_LE(oracle::max_abs(to_matrix(h, chain_layout(n)) - hd), 1e-15);
      const oracle::Vec v = hd * up.amplitudes();
      EXPECT_LE((v - j * static_cast<double>(n - 1) * up.amplitudes()).norm(), 1e-12);
    }
  }
}

TEST(Heisenberg, SingleFlipIsNotEigenstate) {
  for (std::size_t n = 3; n <= 5; ++n) {
    const auto layout = chain_layout(n);
    // |u0> |d u ... u>: first atom down.
    const auto s = StateVector::basis(layout, layout.stride(1));
    const auto r = eigenstate_residual(heisenberg_hamiltonian(n, 1.0), s);
    const oracle::Mat hd = dense_heisenberg(n, 1.0);
    const double lambda = s.amplitudes().dot(hd * s.amplitudes()).real();
    const double dense_residual = (hd * s.amplitudes() - lambda * s.amplitudes()).norm();
    EXPECT_NEAR(r.residual, dense_residual, 1e-12);
    EXPECT_NEAR(r.residual, 2.0, 1e-12);
  }
}

TEST(Heisenberg, IdentityAndErrors) {
  Rng rng(3);
  StateVector psi(chain_layout(3), rng.normalized_vector(16));
  EXPECT_LE(eigenstate_residual(PauliSum::identity(), psi).residual, 1e-12);
  EXPECT_THROW(heisenberg_hamiltonian(1, 1.0), PreconditionError);
}
