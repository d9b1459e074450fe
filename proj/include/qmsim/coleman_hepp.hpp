#pragma once

// Spin-chain detector: a probe spin S0 passes N atoms, each of which flips
// only when the probe is down. Qubit ordinal 0 is the probe, ordinals 1..N
// are the atoms.

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/pauli.hpp"

namespace qmsim::ch {

inline constexpr double kFullFlip = std::numbers::pi / 2;

struct ChainModel {
  std::size_t n_atoms = 4;
  cplx a1{std::numbers::sqrt2 / 2};
  cplx a2{std::numbers::sqrt2 / 2};
  double pulse_angle = kFullFlip;  // radians; pi/2 completes each flip

  void validate(double tol = kDefaultTolerance) const {
    require(n_atoms >= 1, "coleman_hepp: chain needs N >= 1 atoms");
    require(std::abs(std::norm(a1) + std::norm(a2) - 1.0) <= tol, "coleman_hepp: |a1|^2 + |a2|^2 must equal 1");
  }
};

/// S0 followed by A1..AN.
inline HilbertLayout chain_layout(std::size_t n_atoms, const Limits& limits = {}) {
  std::vector<std::string> labels{"S0"};
  for (std::size_t i = 1; i <= n_atoms; ++i) labels.push_back("A" + std::to_string(i));
  return HilbertLayout::qubits(labels, limits.dimension_cap);
}

/// cos and sin of the pulse angle, exact at multiples of pi/2.
inline std::pair<double, double> pulse_cos_sin(double angle) {
  const double quarters = angle / kFullFlip;
  const double nearest = std::round(quarters);
  if (std::abs(quarters - nearest) <= 1e-15 * std::max(1.0, std::abs(quarters))) {
    switch (((static_cast<long long>(nearest) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(angle), std::sin(angle)};
}

/// |u_c><u_c| (x) I + |d_c><d_c| (x) exp(-i angle X_t) on qubit ordinals
/// control and target.
inline StateVector controlled_rotation(const StateVector& state, std::size_t control, std::size_t target,
                                       double angle = kFullFlip) {
  const auto& layout = state.layout();
  require(control != target, "control and target must differ");
  const std::size_t cs = layout.stride(layout.qubit_position(control));
  const std::size_t ts = layout.stride(layout.qubit_position(target));
  const auto [c, s] = pulse_cos_sin(angle);
  const cplx minus_is{0.0, -s};
  Eigen::VectorXcd out = state.amplitudes();
  const auto& in = state.amplitudes();
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    const bool control_down = (idx / cs) % 2 == 1;
    const bool target_down = (idx / ts) % 2 == 1;
    if (!control_down || target_down) continue;
    const auto up = static_cast<Eigen::Index>(idx);
    const auto dn = static_cast<Eigen::Index>(idx + ts);
    out[up] = c * in[up] + minus_is * in[dn];
    out[dn] = minus_is * in[up] + c * in[dn];
  }
  return {layout, std::move(out)};
}

/// One interaction stage: the probe passes atom `atom_index` (1-based).
inline StateVector passage_step(const StateVector& state, std::size_t atom_index, double angle = kFullFlip) {
  require(atom_index >= 1 && atom_index < state.layout().qubit_count(),
          "coleman_hepp: atom index " + std::to_string(atom_index) + " out of range");
  return controlled_rotation(state, 0, atom_index, angle);
}

/// (a1|u0> + a2|d0>) (x) |u...u>
inline StateVector initial_state(const ChainModel& model, const Limits& limits = {}) {
  model.validate();
  const auto layout = chain_layout(model.n_atoms, limits);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
  v[0] = model.a1;
  v[static_cast<Eigen::Index>(layout.stride(0))] = model.a2;
  return {layout, std::move(v)};
}

/// Stage-wise passage that refuses to revisit an atom.
class Passage {
 public:
  explicit Passage(const ChainModel& model, const Limits& limits = {})
      : angle_(model.pulse_angle), n_atoms_(model.n_atoms), state_(initial_state(model, limits)) {}

  void step(std::size_t atom_index) {
    require(!visited_.count(atom_index), "coleman_hepp: atom " + std::to_string(atom_index) + " already visited");
    state_ = passage_step(state_, atom_index, angle_);
    visited_.insert(atom_index);
  }

  bool complete() const { return visited_.size() == n_atoms_; }
  const StateVector& state() const { return state_; }

 private:
  double angle_;
  std::size_t n_atoms_;
  StateVector state_;
  std::set<std::size_t> visited_;
};

inline StateVector full_passage(const ChainModel& model, const Limits& limits = {}) {
  Passage p(model, limits);
  for (std::size_t i = 1; i <= model.n_atoms; ++i) p.step(i);
  return p.state();
}

/// Pointer branches of the completed passage (both kept, even at zero amplitude):
/// a1 |u0>|u...u>  and  a2 (-i)^N |d0>|d...d>.
inline BranchDecomposition final_branches(const ChainModel& model, const Limits& limits = {}) {
  model.validate();
  const auto layout = chain_layout(model.n_atoms, limits);
  std::vector<Branch> branches{
      {model.a1, StateVector::basis(layout, 0)},
      {model.a2 * i_power(-static_cast<int>(model.n_atoms)), StateVector::basis(layout, layout.dim() - 1)}};
  return {layout, std::move(branches)};
}

inline StateVector closed_form_final(const ChainModel& model, const Limits& limits = {}) {
  return final_branches(model, limits).superposition();
}

/// (1/N) sum_i Z_i over atoms first_atom .. first_atom+N-1.
inline PauliSum pointer_operator(std::size_t n_atoms, std::size_t first_atom = 1) {
  require(n_atoms >= 1, "coleman_hepp: pointer needs N >= 1");
  PauliSum out;
  for (std::size_t i = 0; i < n_atoms; ++i) {
    out.add(1.0 / static_cast<double>(n_atoms), PauliString::single(Letter::Z, first_atom + i));
  }
  return out;
}

/// Interference-term operator X_0 prod_i Y_i: flips the probe and every atom.
inline PauliSum it_operator(std::size_t n_atoms, std::size_t first_atom = 1, std::size_t probe = 0) {
  require(n_atoms >= 1, "coleman_hepp: IT operator needs N >= 1");
  PauliString p = PauliString::single(Letter::X, probe);
  for (std::size_t i = 0; i < n_atoms; ++i) p = p * PauliString::single(Letter::Y, first_atom + i);
  return p;
}

/// Reference commutator form (i/N) X_0 sum_i X_i prod_{j != i} Y_j.
inline PauliSum reference_commutator(std::size_t n_atoms) {
  require(n_atoms >= 1, "coleman_hepp: N >= 1");
  PauliSum out;
  for (std::size_t i = 1; i <= n_atoms; ++i) {
    PauliString p = PauliString::single(Letter::X, 0);
    for (std::size_t j = 1; j <= n_atoms; ++j) p = p * PauliString::single(j == i ? Letter::X : Letter::Y, j);
    out.add(cplx{0.0, 1.0 / static_cast<double>(n_atoms)}, p);
  }
  return out;
}

/// Closed-form IT expectation on the final state under these conventions:
/// (-1)^N (a1* a2 + a1 a2*).
inline double it_expectation_closed_form(std::size_t n_atoms, cplx a1, cplx a2) {
  const double sign = n_atoms % 2 == 0 ? 1.0 : -1.0;
  return sign * 2.0 * (std::conj(a1) * a2).real();
}

/// Reference value .5 (a1* a2 + a1 a2*).
inline double it_expectation_reference(cplx a1, cplx a2) { return (std::conj(a1) * a2).real(); }

struct StrictMeasurementReport {
  double q_expect = 0.0;
  double qo_expect = 0.0;
  double delta = 0.0;  // q_expect - qo_expect
};

/// Compares a system observable with an apparatus observable on `state`.
/// `system_qubits` and `apparatus_qubits` bound the supports of q and qo.
inline StrictMeasurementReport strict_check(const PauliSum& q, const PauliSum& qo, const StateVector& state,
                                            const std::set<std::size_t>& system_qubits,
                                            const std::set<std::size_t>& apparatus_qubits,
                                            double tol = kDefaultTolerance) {
  for (auto s : q.support()) {
    require(system_qubits.count(s), "strict_check: Q acts on qubit " + std::to_string(s) + " outside the system");
  }
  for (auto s : qo.support()) {
    require(apparatus_qubits.count(s),
            "strict_check: Q_o acts on qubit " + std::to_string(s) + " outside the apparatus");
  }
  StrictMeasurementReport r;
  r.q_expect = expectation(q, state, tol);
  r.qo_expect = expectation(qo, state, tol);
  r.delta = r.q_expect - r.qo_expect;
  return r;
}

/// Probe qubit 0 against atoms 1..N.
inline StrictMeasurementReport strict_check(const PauliSum& q, const PauliSum& qo, const StateVector& state,
                                            double tol = kDefaultTolerance) {
  std::set<std::size_t> atoms;
  for (std::size_t i = 1; i < state.layout().qubit_count(); ++i) atoms.insert(i);
  return strict_check(q, qo, state, {0}, atoms, tol);
}

/// Nearest-neighbour ferromagnet J sum_i (X_i X_i+1 + Y_i Y_i+1 + Z_i Z_i+1)
/// over atoms first_atom .. first_atom+N-1, uniform coupling.
inline PauliSum heisenberg_hamiltonian(std::size_t n_atoms, double coupling, std::size_t first_atom = 1) {
  require(n_atoms >= 2, "coleman_hepp: Heisenberg chain needs N >= 2");
  PauliSum h;
  for (std::size_t i = first_atom; i + 1 < first_atom + n_atoms; ++i) {
    for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
      h.add(coupling, PauliString::single(l, i) * PauliString::single(l, i + 1));
    }
  }
  return h;
}

struct EigenResidual {
  double eigenvalue = 0.0;  // <psi|H|psi>
  double residual = 0.0;    // ||H psi - eigenvalue psi||
};

inline EigenResidual eigenstate_residual(const PauliSum& h, const StateVector& state,
                                         double tol = kDefaultTolerance) {
  EigenResidual r;
  r.eigenvalue = expectation(h, state, tol);
  r.residual = (apply(h, state).amplitudes() - r.eigenvalue * state.amplitudes()).norm();
  return r;
}

}  // namespace qmsim::ch
