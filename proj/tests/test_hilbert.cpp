#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/random.hpp"

using namespace qmsim;

namespace {

const double r2 = std::numbers::sqrt2 / 2;

StateVector qubit(cplx up, cplx down, const std::string& label) {
  Eigen::VectorXcd v(2);
  v << up, down;
  return {HilbertLayout::qubits({label}), v};
}

}  // namespace

TEST(HilbertLayout, RejectsDuplicateLabels) {
  EXPECT_THROW(HilbertLayout::qubits({"a", "a"}), PreconditionError);
}

TEST(HilbertLayout, EnforcesDimensionCap) {
  std::vector<std::string> labels;
  for (int i = 0; i < 15; ++i) labels.push_back("q" + std::to_string(i));
  EXPECT_THROW(HilbertLayout::qubits(labels), DimensionCapError);
  labels.pop_back();
  EXPECT_EQ(HilbertLayout::qubits(labels).dim(), std::size_t{1} << 14);
}

TEST(HilbertLayout, IndexMappingRoundTrips) {
  HilbertLayout layout({{"a", 2, SubsystemKind::qubit}, {"m", 3, SubsystemKind::mode}, {"b", 2, SubsystemKind::qubit}});
  ASSERT_EQ(layout.dim(), 12u);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    const auto d = layout.digits(i);
    EXPECT_EQ(layout.flat_index(d), i);
    seen.insert(layout.flat_index(d));
  }
  EXPECT_EQ(seen.size(), layout.dim());
  // Row-major: first subsystem most significant.
  const std::vector<std::size_t> digits{1, 2, 0};
  EXPECT_EQ(layout.flat_index(digits), 1u * 6 + 2u * 2 + 0u);
  EXPECT_EQ(layout.qubit_position(1), 2u);
}

TEST(Tensor, BasisComposition) {
  const auto up = qubit(1, 0, "a");
  const auto up2 = qubit(1, 0, "b");
  const auto s = tensor({up, up2});
  Eigen::VectorXcd expected(4);
  expected << 1, 0, 0, 0;
  EXPECT_LE((s.amplitudes() - expected).norm(), 1e-15);
}

TEST(Tensor, Linearity) {
  const cplx a1{0.6}, a2{0.0, 0.8};
  const auto s = tensor({qubit(a1, a2, "a"), qubit(1, 0, "b")});
  Eigen::VectorXcd expected(4);
  expected << a1, 0, a2, 0;
  EXPECT_LE((s.amplitudes() - expected).norm(), 1e-15);
}

TEST(Tensor, PreservesNormOnRandomInputs) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    StateVector s1(HilbertLayout::qubits({"a", "b"}), rng.normalized_vector(4));
    StateVector s2(HilbertLayout({{"m", 3, SubsystemKind::mode}}), rng.normalized_vector(3));
    const auto t = tensor({s1, s2});
    // Oracle: squared norm as a direct double sum over the factors.
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) direct += std::norm(s1.amplitudes()[i] * s2.amplitudes()[j]);
    }
    EXPECT_NEAR(t.norm(), 1.0, 1e-12);
    EXPECT_NEAR(t.norm() * t.norm(), direct, 1e-12);
  }
}

TEST(Tensor, Errors) {
  EXPECT_THROW(tensor({qubit(1, 0, "a"), qubit(1, 0, "a")}), PreconditionError);
  Limits tiny;
  tiny.dimension_cap = 2;
  EXPECT_THROW(tensor({qubit(1, 0, "a"), qubit(1, 0, "b")}, tiny), DimensionCapError);
}

TEST(Premeasurement, SingleBranchIsProduct) {
  std::vector<PointerPair> ptr{{qubit(1, 0, "s"), qubit(0, 1, "s")},
                               {qubit(1, 0, "D"), qubit(0, 1, "D")},
                               {qubit(1, 0, "O"), qubit(0, 1, "O")}};
  const auto b = build_premeasurement(1.0, 0.0, ptr);
  EXPECT_EQ(b.size(), 1u);
  const auto s = b.superposition();
  EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

TEST(Premeasurement, EqualAmplitudesGiveGhzForm) {
  std::vector<PointerPair> ptr{{qubit(1, 0, "s"), qubit(0, 1, "s")},
                               {qubit(1, 0, "D"), qubit(0, 1, "D")},
                               {qubit(1, 0, "O"), qubit(0, 1, "O")}};
  const auto b = build_premeasurement(r2, r2, ptr);
  const auto s = b.superposition();
  // Dense construction: (|uuu> + |ddd>)/sqrt2.
  const oracle::Vec ghz = r2 * (oracle::ket("uuu") + oracle::ket("ddd"));
  EXPECT_LE((s.amplitudes() - ghz).norm(), 1e-12);
  EXPECT_NEAR(std::abs(b.branches()[0].state.inner(b.branches()[1].state)), 0.0, 1e-15);
}

TEST(Premeasurement, Errors) {
  std::vector<PointerPair> good{{qubit(1, 0, "s"), qubit(0, 1, "s")}};
  EXPECT_THROW(build_premeasurement(1.0, 1.0, good), PreconditionError);
  std::vector<PointerPair> bad{{qubit(1, 0, "s"), qubit(r2, r2, "s")}};
  EXPECT_THROW(build_premeasurement(r2, r2, bad), PreconditionError);
}

TEST(PartialTrace, ProductStateFactorizes) {
  Rng rng(3);
  const Eigen::MatrixXcd ra = rng.density(2);
  const Eigen::MatrixXcd rb = rng.density(2);
  DensityMatrix rho(HilbertLayout::qubits({"A", "B"}), oracle::kron(ra, rb));
  const auto reduced = partial_trace(rho, {"A"});
  EXPECT_LE(oracle::max_abs(reduced.matrix() - ra), 1e-12);
  EXPECT_NEAR(reduced.trace(), 1.0, 1e-12);
}

TEST(PartialTrace, GhzRemainderIsClassicallyCorrelated) {
  std::vector<PointerPair> ptr{{qubit(1, 0, "s"), qubit(0, 1, "s")},
                               {qubit(1, 0, "D"), qubit(0, 1, "D")},
                               {qubit(1, 0, "O"), qubit(0, 1, "O")}};
  const auto s = build_premeasurement(r2, r2, ptr).superposition();
  const auto rho = DensityMatrix::pure(s);
  const auto reduced = partial_trace(rho, {"D", "O"});
  const oracle::Mat expected = oracle::partial_trace_qubits(rho.matrix(), 3, {1, 2});
  EXPECT_LE(oracle::max_abs(reduced.matrix() - expected), 1e-12);
  // diag(1/2, 0, 0, 1/2): correlated but no coherence left.
  EXPECT_NEAR(reduced.matrix()(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(reduced.matrix()(3, 3).real(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(reduced.matrix()(0, 3)), 0.0, 1e-12);
  EXPECT_NEAR(reduced.purity(), 0.5, 1e-12);
}

TEST(PartialTrace, LinearAndTracePreservingOnRandomInputs) {
  Rng rng(11);
  const auto layout = HilbertLayout::qubits({"a", "b", "c"});
  const std::vector<std::vector<std::size_t>> keeps{{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1, 2}, {}};
  const std::vector<std::string> names{"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXcd m1 = rng.density(8);
    const Eigen::MatrixXcd m2 = rng.density(8);
    const double w = rng.uniform();
    const auto& keep = keeps[static_cast<std::size_t>(trial) % keeps.size()];
    std::set<std::string> labels;
    for (auto q : keep) labels.insert(names[q]);
    const auto t1 = partial_trace(DensityMatrix(layout, m1), labels);
    const auto t2 = partial_trace(DensityMatrix(layout, m2), labels);
    const auto tmix = partial_trace(DensityMatrix(layout, w * m1 + (1 - w) * m2), labels);
    EXPECT_NEAR(t1.trace(), 1.0, 1e-12);
    EXPECT_LE(oracle::max_abs(tmix.matrix() - (w * t1.matrix() + (1 - w) * t2.matrix())), 1e-12);
    EXPECT_LE(oracle::max_abs(t1.matrix() - oracle::partial_trace_qubits(m1, 3, keep)), 1e-12);
  }
}

TEST(PartialTrace, UnknownLabel) {
  DensityMatrix rho = DensityMatrix::pure(qubit(1, 0, "a"));
  EXPECT_THROW(partial_trace(rho, {"zz"}), PreconditionError);
}

TEST(Mixture, SingleBranchIsProjector) {
  const auto s = qubit(0.6, cplx(0, 0.8), "a");
  BranchDecomposition b(s.layout(), {{1.0, s}});
  EXPECT_LE(oracle::max_abs(mixture_of(b).matrix() - s.amplitudes() * s.amplitudes().adjoint()), 1e-15);
}

TEST(Mixture, TwoEqualBranchesAndPurity) {
  const auto u = qubit(1, 0, "a");
  const auto d = qubit(0, 1, "a");
  const auto m = mixture_of(BranchDecomposition(u.layout(), {{r2, u}, {cplx(0, r2), d}}));
  EXPECT_LE(oracle::max_abs(m.matrix() - 0.5 * oracle::id2()), 1e-15);
  // Purity = sum |a_i|^4 for a generic split.
  const double w = 0.3;
  const auto m2 = mixture_of(BranchDecomposition(u.layout(), {{std::sqrt(w), u}, {std::sqrt(1 - w), d}}));
  const oracle::Mat dense = m2.matrix() * m2.matrix();
  EXPECT_NEAR(dense.trace().real(), w * w + (1 - w) * (1 - w), 1e-12);
  EXPECT_LT(m2.purity(), 1.0);
}

TEST(Mixture, RejectsNonOrthogonalBranches) {
  const auto u = qubit(1, 0, "a");
  const auto p = qubit(r2, r2, "a");
  EXPECT_THROW(BranchDecomposition(u.layout(), {{r2, u}, {r2, p}}), PreconditionError);
}

TEST(DensityMatrix, ValidatesInvariants) {
  const auto layout = HilbertLayout::qubits({"a"});
  Eigen::MatrixXcd not_hermitian(2, 2);
  not_hermitian << 0.5, 0.3, 0.0, 0.5;
  EXPECT_THROW(DensityMatrix(layout, not_hermitian), PreconditionError);
  EXPECT_THROW(DensityMatrix(layout, Eigen::MatrixXcd::Identity(2, 2)), PreconditionError);
  Eigen::MatrixXcd negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityMatrix(layout, negative), PreconditionError);
}
