#pragma once

// Radiation decoherence: a particle path qubit, a lattice qubit (L / L') and
// truncated photon modes. One branch leaves the field in the vacuum, the
// other emits photons; photodetection observables are functions of the
// photon numbers only.
//
// Layout order: "path", "lattice", emission modes "m0".."m{M-1}", then
// background modes "bg0".. that carry a fixed occupation in both branches.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/pauli.hpp"
#include "qmsim/random.hpp"
#include "qmsim/superselection.hpp"

namespace qmsim::rd {

struct PhotonPattern {
  std::vector<std::size_t> occupation;  // one entry per emission mode
  cplx amplitude;
};

struct RadiationModel {
  cplx a1{std::numbers::sqrt2 / 2};
  cplx a2{std::numbers::sqrt2 / 2};
  std::size_t modes = 1;
  std::size_t cutoff = 3;  // local dimension d per mode: occupations 0..d-1
  std::vector<PhotonPattern> photons{{{1}, cplx{std::numbers::sqrt2 / 2}}, {{2}, cplx{std::numbers::sqrt2 / 2}}};
  std::vector<std::size_t> background;  // uncorrelated occupations, one per extra mode

  std::size_t field_modes() const { return modes + background.size(); }

  std::size_t field_dim() const {
    std::size_t d = 1;
    for (std::size_t k = 0; k < field_modes(); ++k) d *= cutoff;
    return d;
  }

  void validate(double tol = kDefaultTolerance) const {
    require(modes >= 1, "radiation_decoherence: at least one mode is required");
    require(cutoff >= 2, "radiation_decoherence: mode cutoff d must be >= 2");
    require(std::abs(std::norm(a1) + std::norm(a2) - 1.0) <= tol,
            "radiation_decoherence: |a1|^2 + |a2|^2 must equal 1");
    require(!photons.empty(), "radiation_decoherence: at least one photon pattern is required");
    double w = 0.0;
    for (std::size_t j = 0; j < photons.size(); ++j) {
      const auto& p = photons[j];
      require(p.occupation.size() == modes, "radiation_decoherence: pattern " + std::to_string(j) +
                                                " must list one occupation per mode");
      std::size_t total = 0;
      for (auto n : p.occupation) {
        require(n < cutoff, "radiation_decoherence: occupation exceeds the mode cutoff");
        total += n;
      }
      require(total >= 1, "radiation_decoherence: photon pattern " + std::to_string(j) + " is the vacuum");
      for (std::size_t k = 0; k < j; ++k) {
        require(photons[k].occupation != p.occupation, "radiation_decoherence: duplicate photon pattern");
      }
      w += std::norm(p.amplitude);
    }
    require(std::abs(w - 1.0) <= tol, "radiation_decoherence: sum |c_j|^2 must equal 1");
    for (auto n : background) require(n < cutoff, "radiation_decoherence: background occupation exceeds cutoff");
  }

  HilbertLayout layout(const Limits& limits = {}) const {
    std::vector<Subsystem> subs{{"path", 2, SubsystemKind::qubit}, {"lattice", 2, SubsystemKind::qubit}};
    for (std::size_t k = 0; k < modes; ++k) subs.push_back({"m" + std::to_string(k), cutoff, SubsystemKind::mode});
    for (std::size_t k = 0; k < background.size(); ++k) {
      subs.push_back({"bg" + std::to_string(k), cutoff, SubsystemKind::mode});
    }
    return HilbertLayout(std::move(subs), limits.dimension_cap);
  }

  /// Field-space index of an emission pattern, with the background appended.
  std::size_t field_index(const std::vector<std::size_t>& emission) const {
    std::size_t idx = 0;
    for (auto n : emission) idx = idx * cutoff + n;
    for (auto n : background) idx = idx * cutoff + n;
    return idx;
  }

  std::size_t vacuum_index() const { return field_index(std::vector<std::size_t>(modes, 0)); }
};

struct FinalState {
  StateVector state;
  BranchDecomposition branches;
};

/// a1 |x1>|L>|V0> + a2 sum_j c_j |x2>|L'>|j photons>
inline FinalState build_final_state(const RadiationModel& model, const Limits& limits = {}) {
  model.validate();
  const auto layout = model.layout(limits);
  const std::size_t fd = model.field_dim();
  const auto n = static_cast<Eigen::Index>(layout.dim());
  // path and lattice are the two most significant digits: (path, lattice, field).
  auto flat = [&](std::size_t path, std::size_t lattice, std::size_t field) {
    return static_cast<Eigen::Index>((path * 2 + lattice) * fd + field);
  };
  Eigen::VectorXcd phi1 = Eigen::VectorXcd::Zero(n);
  phi1[flat(0, 0, model.vacuum_index())] = 1.0;
  Eigen::VectorXcd phi2 = Eigen::VectorXcd::Zero(n);
  for (const auto& p : model.photons) phi2[flat(1, 1, model.field_index(p.occupation))] = p.amplitude;
  BranchDecomposition branches(layout, {{model.a1, StateVector(layout, phi1)}, {model.a2, StateVector(layout, phi2)}});
  auto state = branches.superposition();
  return {std::move(state), std::move(branches)};
}

/// An operator on the field space (all emission and background modes).
struct FieldObservable {
  enum class Kind { number_diagonal, general };
  Kind kind = Kind::number_diagonal;
  std::string name;
  Eigen::VectorXd diagonal;  // number_diagonal
  Eigen::MatrixXcd matrix;   // general

  Eigen::MatrixXcd dense() const {
    if (kind == Kind::number_diagonal) return diagonal.cast<cplx>().asDiagonal();
    return matrix;
  }
};

/// Occupation of field mode k (emission modes first, then background) at a field index.
inline std::size_t occupation(const RadiationModel& model, std::size_t field_idx, std::size_t k) {
  std::size_t div = 1;
  for (std::size_t j = k + 1; j < model.field_modes(); ++j) div *= model.cutoff;
  return (field_idx / div) % model.cutoff;
}

/// Field observable F(n_0, n_1, ...) for an arbitrary function of the occupations.
template <typename F>
FieldObservable number_function(const RadiationModel& model, std::string name, F&& f) {
  FieldObservable q{FieldObservable::Kind::number_diagonal, std::move(name), {}, {}};
  const std::size_t fd = model.field_dim();
  q.diagonal.resize(static_cast<Eigen::Index>(fd));
  std::vector<std::size_t> occ(model.field_modes());
  for (std::size_t i = 0; i < fd; ++i) {
    for (std::size_t k = 0; k < occ.size(); ++k) occ[k] = occupation(model, i, k);
    q.diagonal[static_cast<Eigen::Index>(i)] = f(occ);
  }
  return q;
}

inline FieldObservable number_operator(const RadiationModel& model, std::size_t k) {
  return number_function(model, "n" + std::to_string(k),
                         [k](const std::vector<std::size_t>& occ) { return static_cast<double>(occ[k]); });
}

/// a_k + a_k^dagger, truncated at the cutoff: connects occupations n and n+1.
inline FieldObservable quadrature(const RadiationModel& model, std::size_t k) {
  const std::size_t fd = model.field_dim();
  FieldObservable q{FieldObservable::Kind::general, "quadrature" + std::to_string(k), {}, {}};
  q.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(fd), static_cast<Eigen::Index>(fd));
  std::size_t stride = 1;
  for (std::size_t j = k + 1; j < model.field_modes(); ++j) stride *= model.cutoff;
  for (std::size_t i = 0; i < fd; ++i) {
    const auto n = occupation(model, i, k);
    if (n + 1 >= model.cutoff) continue;
    const double amp = std::sqrt(static_cast<double>(n + 1));
    q.matrix(static_cast<Eigen::Index>(i + stride), static_cast<Eigen::Index>(i)) = amp;
    q.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + stride)) = amp;
  }
  return q;
}

/// system (x) field on the full layout; `system` is 4x4 over (path, lattice).
inline Eigen::MatrixXcd full_operator(const Eigen::MatrixXcd& system, const FieldObservable& field) {
  require(system.rows() == 4 && system.cols() == 4, "system factor must be 4x4 over (path, lattice)");
  const Eigen::MatrixXcd f = field.dense();
  const auto fd = f.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(4 * fd, 4 * fd);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (system(i, j) != cplx{0.0}) out.block(i * fd, j * fd, fd, fd) = system(i, j) * f;
    }
  }
  return out;
}

/// The 16 Pauli strings on (path, lattice) as 4x4 matrices, with names.
inline std::vector<std::pair<std::string, Eigen::MatrixXcd>> system_basis() {
  const auto layout = HilbertLayout::qubits({"path", "lattice"});
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> out;
  for (const auto& p : all_pauli_strings(2)) out.emplace_back(p.letters_str(), to_matrix(PauliSum(p), layout));
  return out;
}

/// Number-function field generators: n_k, n_k^2 per mode and n_k n_l per
/// mode pair.
inline std::vector<FieldObservable> glauber_field_generators(const RadiationModel& model) {
  std::vector<FieldObservable> out;
  const std::size_t m = model.field_modes();
  for (std::size_t k = 0; k < m; ++k) {
    out.push_back(number_operator(model, k));
    out.push_back(number_function(model, "n" + std::to_string(k) + "^2", [k](const std::vector<std::size_t>& occ) {
      return static_cast<double>(occ[k] * occ[k]);
    }));
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = k + 1; l < m; ++l) {
      out.push_back(number_function(model, "n" + std::to_string(k) + "*n" + std::to_string(l),
                                    [k, l](const std::vector<std::size_t>& occ) {
                                      return static_cast<double>(occ[k] * occ[l]);
                                    }));
    }
  }
  return out;
}

/// Every field generator tensored with every (path, lattice) Pauli string.
inline ObservableSet glauber_generators(const RadiationModel& model) {
  ObservableSet set{"glauber", {}, 2};
  const auto basis = system_basis();
  for (const auto& f : glauber_field_generators(model)) {
    for (const auto& [sname, s] : basis) {
      set.generators.push_back(Observable::dense(sname + "(x)" + f.name, full_operator(s, f)));
    }
  }
  return set;
}

/// max_j |<V0|Q_E|j photons>| over the model's emission patterns.
inline double check_no_vacuum_interference(const FieldObservable& q, const RadiationModel& model) {
  model.validate();
  const Eigen::MatrixXcd m = q.dense();
  require(static_cast<std::size_t>(m.rows()) == model.field_dim(), "field observable dimension mismatch");
  const auto v = static_cast<Eigen::Index>(model.vacuum_index());
  double worst = 0.0;
  for (const auto& p : model.photons) {
    worst = std::max(worst, std::abs(m(v, static_cast<Eigen::Index>(model.field_index(p.occupation)))));
  }
  return worst;
}

/// X_path X_lattice (x) quadrature(mode 0): connects the vacuum branch with
/// the one-photon component of the emission branch.
inline Observable vacuum_connecting_observable(const RadiationModel& model) {
  const auto layout = HilbertLayout::qubits({"path", "lattice"});
  const PauliSum xx(PauliString::single(Letter::X, 0) * PauliString::single(Letter::X, 1));
  return Observable::dense("X0*X1(x)quadrature0", full_operator(to_matrix(xx, layout), quadrature(model, 0)));
}

/// `count` observables (random Hermitian system factor) (x) (random real number function).
inline ObservableSet random_glauber_observables(const RadiationModel& model, std::size_t count, Rng& rng) {
  ObservableSet set{"glauber_random", {}, 1};
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::MatrixXcd sys = rng.hermitian(4);
    FieldObservable f = number_function(model, "F", [&](const std::vector<std::size_t>&) { return rng.normal(); });
    set.generators.push_back(Observable::dense("random_glauber_" + std::to_string(i), full_operator(sys, f)));
  }
  return set;
}

/// Pure final state against its branch mixture under the allowed set.
inline DiscriminationVerdict check_c22(const RadiationModel& model, const ObservableSet& allowed,
                                       double tol = kDefaultTolerance, const Limits& limits = {}) {
  const auto fs = build_final_state(model, limits);
  return discriminate(fs.state, mixture_of(fs.branches, limits), allowed, tol, limits);
}

/// Unmeasured particles after `depth` detector generations: N_e^depth.
inline std::uint64_t cascade_growth(std::uint64_t emission_factor, std::uint64_t depth,
                                    std::uint64_t bound = std::numeric_limits<std::uint64_t>::max()) {
  require(emission_factor > 1, "cascade_growth: emission factor N_e must be > 1");
  std::uint64_t n = 1;
  for (std::uint64_t g = 0; g < depth; ++g) {
    if (n > bound / emission_factor) {
      throw std::overflow_error("cascade_growth: " + std::to_string(emission_factor) + "^" + std::to_string(depth) +
                              " exceeds the bound " + std::to_string(bound));
    }
    n *= emission_factor;
  }
  return n;
}

}  // namespace qmsim::rd
