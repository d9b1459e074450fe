#pragma once

// Observer made of m chains. Chain 1 records the probe's z spin; chain 2
// records the IT operator B of (probe + chain 1); every later chain records
// the joint IT operator of the previous branch pair.
//
// Qubit ordinals: 0 is the probe, then chain 1 atoms, chain 2 atoms, ...

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qmsim/coleman_hepp.hpp"
#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/pauli.hpp"
#include "qmsim/superselection.hpp"

namespace qmsim::cascade {

struct CascadeModel {
  std::vector<std::size_t> chains{1, 1};
  cplx a1{std::numbers::sqrt2 / 2};
  cplx a2{std::numbers::sqrt2 / 2};

  std::size_t m() const { return chains.size(); }

  void validate(double tol = kDefaultTolerance) const {
    require(!chains.empty(), "chain_cascade: at least one chain is required");
    for (auto n : chains) require(n >= 1, "chain_cascade: every chain needs N >= 1 atoms");
    require(std::abs(std::norm(a1) + std::norm(a2) - 1.0) <= tol, "chain_cascade: |a1|^2 + |a2|^2 must equal 1");
  }

  /// Qubit ordinals of chain k (1-based).
  std::vector<std::size_t> chain_qubits(std::size_t k) const {
    require(k >= 1 && k <= chains.size(), "chain_cascade: chain " + std::to_string(k) + " does not exist");
    std::size_t first = 1;
    for (std::size_t j = 1; j < k; ++j) first += chains[j - 1];
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < chains[k - 1]; ++i) out.push_back(first + i);
    return out;
  }

  /// Every qubit belonging to the observer (all chains, not the probe).
  std::set<std::size_t> observer_qubits() const {
    std::set<std::size_t> out;
    for (std::size_t k = 1; k <= chains.size(); ++k) {
      for (auto q : chain_qubits(k)) out.insert(q);
    }
    return out;
  }

  HilbertLayout layout(const Limits& limits = {}) const {
    std::vector<std::string> labels{"S0"};
    for (std::size_t k = 1; k <= chains.size(); ++k) {
      for (std::size_t i = 1; i <= chains[k - 1]; ++i) labels.push_back("C" + std::to_string(k) + "_" + std::to_string(i));
    }
    return HilbertLayout::qubits(labels, limits.dimension_cap);
  }
};

/// Pointer of chain k: (1/N_k) sum Z over its atoms.
inline PauliSum chain_pointer(const CascadeModel& model, std::size_t k) {
  const auto q = model.chain_qubits(k);
  return ch::pointer_operator(q.size(), q.front());
}

/// X_0 prod Y over chain 1.
inline PauliSum chain1_it_operator(const CascadeModel& model) {
  const auto q = model.chain_qubits(1);
  return ch::it_operator(q.size(), q.front(), 0);
}

struct BEigenbranches {
  cplx b1;             // amplitude on the B = +1 eigenvector
  cplx b2;             // amplitude on the B = -1 eigenvector
  StateVector plus;    // (e + B e)/sqrt2
  StateVector minus;   // (e - B e)/sqrt2
  double reconstruction_error = 0.0;
};

/// Writes psi = b1|B+> + b2|B-> with |B+-> = (e +- B e)/sqrt2 built from the
/// unit reference vector e (e and B e orthogonal). psi must lie in their span.
inline BEigenbranches b_eigenbranches(const StateVector& psi, const PauliSum& b, const StateVector& reference,
                                      double tol = kDefaultTolerance) {
  require(max_coefficient_distance(b * b, PauliSum::identity()) <= tol, "b_eigenbranches: B is not an involution");
  require_hermitian(b, tol);
  require_normalized(reference, tol, "b_eigenbranches reference");
  const StateVector be = apply(b, reference);
  require(std::abs(reference.inner(be)) <= tol, "b_eigenbranches: reference and B reference are not orthogonal");
  const double r = std::numbers::sqrt2 / 2;
  BEigenbranches out{cplx{0.0}, cplx{0.0}, r * (reference + be), r * (reference - be), 0.0};
  out.b1 = out.plus.inner(psi);
  out.b2 = out.minus.inner(psi);
  out.reconstruction_error = (psi - (out.b1 * out.plus + out.b2 * out.minus)).norm();
  require(out.reconstruction_error <= std::max(tol, 1e-12),
          "b_eigenbranches: state is not in the span of the B eigenvectors");
  return out;
}

/// Phase-free flip X...X of the target qubits.
inline PauliString flip_string(const std::vector<std::size_t>& target) {
  PauliString f;
  for (auto q : target) f = f * PauliString::single(Letter::X, q);
  return f;
}

/// Residual weight outside "every target qubit up".
inline double target_not_ready(const StateVector& state, const std::vector<std::size_t>& target) {
  const auto& layout = state.layout();
  std::vector<std::size_t> strides;
  for (auto q : target) strides.push_back(layout.stride(layout.qubit_position(q)));
  double w = 0.0;
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    for (auto s : strides) {
      if ((idx / s) % 2 == 1) {
        w += std::norm(state[idx]);
        break;
      }
    }
  }
  return w;
}

/// psi - P psi + F P psi where P psi = `minus_part` and F = prod_j (-i X_j)
/// over the target chain: the chain flips (with a -i per atom, as in the
/// probe passage) exactly on the -1 eigencomponent.
inline StateVector flip_on_minus(const StateVector& state, const StateVector& minus_part,
                                 const std::vector<std::size_t>& target, double tol = kDefaultTolerance) {
  require(!target.empty(), "chain_cascade: empty target chain");
  require(target_not_ready(state, target) <= tol, "chain_cascade: target chain is not in the all-up ready state");
  const PauliString f = flip_string(target).with_phase(-static_cast<int>(target.size()));
  return state - minus_part + apply(f, minus_part);
}

/// Controlled measurement of an involution B by a fresh chain.
inline StateVector second_chain_measure(const StateVector& state, const PauliSum& b,
                                        const std::vector<std::size_t>& target, double tol = kDefaultTolerance) {
  require(max_coefficient_distance(b * b, PauliSum::identity()) <= tol,
          "second_chain_measure: B is not an involution");
  for (auto q : target) {
    require(!b.support().count(q), "second_chain_measure: B acts on the target chain");
  }
  const StateVector minus = 0.5 * (state - apply(b, state));
  return flip_on_minus(state, minus, target, tol);
}

/// |phi1><phi2| + |phi2><phi1| for a two-branch decomposition.
inline Eigen::MatrixXcd joint_it_operator(const BranchDecomposition& branches, const Limits& limits = {}) {
  require(branches.size() == 2, "joint_it_operator: needs exactly two branches");
  if (branches.layout().dim() > limits.dense_cap) {
    throw DimensionCapError("joint_it_operator: layout [" + branches.layout().describe() + "] exceeds dense cap " +
                            std::to_string(limits.dense_cap));
  }
  const auto& p1 = branches.branches()[0].state.amplitudes();
  const auto& p2 = branches.branches()[1].state.amplitudes();
  return p1 * p2.adjoint() + p2 * p1.adjoint();
}

/// prod_{j in chain 2} Y_j * sum_{n=0}^{N} B^p_n with
/// B^p_n = (Z_0 if n even) * sum over n-subsets S of chain 1 of prod_{i in S} X_i.
inline PauliSum build_b2_reference(const std::vector<std::size_t>& chain1, const std::vector<std::size_t>& chain2) {
  require(!chain1.empty(), "build_b2_reference: chain 1 must be non-empty");
  const std::size_t n = chain1.size();
  PauliSum sum;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    PauliString term;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) term = term * PauliString::single(Letter::X, chain1[i]);
    }
    if (std::popcount(mask) % 2 == 0) term = PauliString::single(Letter::Z, 0) * term;
    sum.add(1.0, term);
  }
  PauliString ys;
  for (auto q : chain2) ys = ys * PauliString::single(Letter::Y, q);
  return PauliSum(ys) * sum;
}

struct Stage {
  std::size_t chain = 0;        // chain written by this stage (1-based)
  StateVector state;            // full state after the stage
  BranchDecomposition branches; // the branch pair after the stage
};

/// Runs every stage: chain 1 by the probe passage, chain 2 by B, chain k > 2
/// by the joint IT operator of stage k-1's branch pair.
inline std::vector<Stage> run_cascade(const CascadeModel& model, double tol = kDefaultTolerance,
                                      const Limits& limits = {}) {
  model.validate(tol);
  const auto layout = model.layout(limits);
  std::vector<Stage> stages;

  // Stage 1: probe passes chain 1.
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
  v0[0] = model.a1;
  v0[static_cast<Eigen::Index>(layout.stride(0))] = model.a2;
  StateVector state(layout, std::move(v0));
  const auto c1 = model.chain_qubits(1);
  for (auto q : c1) state = ch::controlled_rotation(state, 0, q);
  const StateVector up = StateVector::basis(layout, 0);
  const StateVector down = apply(PauliString::single(Letter::X, 0) * flip_string(c1), up);
  stages.push_back({1, state,
                    BranchDecomposition(layout,
                                        {{model.a1, up}, {model.a2 * i_power(-static_cast<int>(c1.size())), down}},
                                        tol)});

  for (std::size_t k = 2; k <= model.m(); ++k) {
    const auto target = model.chain_qubits(k);
    const auto flip = flip_string(target);
    StateVector plus = StateVector::zero(layout);
    StateVector minus = StateVector::zero(layout);
    StateVector next = state;
    if (k == 2) {
      const auto eig = b_eigenbranches(state, chain1_it_operator(model), up, tol);
      plus = eig.plus;
      minus = eig.minus;
      next = second_chain_measure(state, chain1_it_operator(model), target, tol);
    } else {
      const auto& prev = stages.back().branches.branches();
      const double r = std::numbers::sqrt2 / 2;
      plus = r * (prev[0].state + prev[1].state);
      minus = r * (prev[0].state - prev[1].state);
      next = flip_on_minus(state, minus.inner(state) * minus, target, tol);
    }
    const cplx beta1 = plus.inner(state);
    const cplx beta2 = minus.inner(state) * i_power(-static_cast<int>(target.size()));
    stages.push_back({k, next, BranchDecomposition(layout, {{beta1, plus}, {beta2, apply(flip, minus)}}, tol)});
    state = next;
  }
  return stages;
}

struct TradeoffReport {
  double mu_before = 0.0;     // chain-1 pointer after stage 1
  double b_before = 0.0;      // <B> after stage 1
  double mu_after = 0.0;      // chain-1 pointer after stage 2
  double bprime_after = 0.0;  // chain-2 pointer after stage 2
  cplx b1;
  cplx b2;
};

inline TradeoffReport information_tradeoff(const CascadeModel& model, double tol = kDefaultTolerance,
                                           const Limits& limits = {}) {
  require(model.m() >= 2, "information_tradeoff: needs at least two chains");
  CascadeModel two = model;
  two.chains.resize(2);
  const auto stages = run_cascade(two, tol, limits);
  TradeoffReport r;
  const PauliSum mu1 = chain_pointer(two, 1);
  const PauliSum b = chain1_it_operator(two);
  r.mu_before = expectation(mu1, stages[0].state, tol);
  r.b_before = expectation(b, stages[0].state, tol);
  r.mu_after = expectation(mu1, stages[1].state, tol);
  r.bprime_after = expectation(chain_pointer(two, 2), stages[1].state, tol);
  const auto eig = b_eigenbranches(stages[0].state, b, StateVector::basis(stages[0].state.layout(), 0), tol);
  r.b1 = eig.b1;
  r.b2 = eig.b2;
  return r;
}

/// Qubit ordinals on which a dense operator acts non-trivially: M acts
/// trivially on q iff M = I_q (x) Tr_q(M)/2.
inline std::set<std::size_t> operator_support(const Eigen::MatrixXcd& m, const HilbertLayout& layout,
                                              double tol = kDefaultTolerance) {
  std::set<std::size_t> out;
  for (std::size_t q = 0; q < layout.qubit_count(); ++q) {
    const std::size_t s = layout.stride(layout.qubit_position(q));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto di = (static_cast<std::size_t>(i) / s) % 2;
      const auto bi = static_cast<Eigen::Index>(static_cast<std::size_t>(i) - di * s);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const auto dj = (static_cast<std::size_t>(j) / s) % 2;
        const auto bj = static_cast<Eigen::Index>(static_cast<std::size_t>(j) - dj * s);
        const auto st = static_cast<Eigen::Index>(s);
        const cplx expected = di == dj ? 0.5 * (m(bi, bj) + m(bi + st, bj + st)) : cplx{0.0};
        worst = std::max(worst, std::abs(m(i, j) - expected));
      }
    }
    if (worst > tol) out.insert(q);
  }
  return out;
}

struct TerminalWitness {
  Eigen::MatrixXcd op;
  std::set<std::size_t> support;
  bool covers_observer = false;  // support includes every observer qubit
  double deviation = 0.0;        // pure/mixed deviation of op on the final stage
  bool exists = false;           // covers_observer && deviation > tol
};

/// After all chains are consumed: the terminal joint IT operator, its
/// support and its power to separate the final pure state from its mixture.
inline TerminalWitness unmeasured_it_exists(const CascadeModel& model, double tol = kDefaultTolerance,
                                            const Limits& limits = {}) {
  const auto stages = run_cascade(model, tol, limits);
  const auto& last = stages.back();
  TerminalWitness w;
  w.op = joint_it_operator(last.branches, limits);
  w.support = operator_support(w.op, last.state.layout(), tol);
  const auto obs = model.observer_qubits();
  w.covers_observer = std::includes(w.support.begin(), w.support.end(), obs.begin(), obs.end());
  const auto mixed = mixture_of(last.branches, limits);
  w.deviation = pure_mixed_deviation(Observable::dense("B_m", w.op), last.state, mixed);
  w.exists = w.covers_observer && w.deviation > tol;
  return w;
}

}  // namespace qmsim::cascade
