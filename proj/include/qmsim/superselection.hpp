#pragma once

// Observer-side machinery: pointer sectors, sector-preserving observables,
// the sector decoherence map and the pure-versus-mixed discrimination test.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/pauli.hpp"

namespace qmsim {

/// A Hermitian operator given either as a Pauli sum or as a dense matrix.
struct Observable {
  std::string name;
  std::variant<PauliSum, Eigen::MatrixXcd> op;

  static Observable pauli(PauliSum s) {
    auto n = s.str();
    return {std::move(n), std::move(s)};
  }
  static Observable pauli(std::string name, PauliSum s) { return {std::move(name), std::move(s)}; }
  static Observable dense(std::string name, Eigen::MatrixXcd m) { return {std::move(name), std::move(m)}; }

  bool is_pauli() const { return std::holds_alternative<PauliSum>(op); }
  const PauliSum& as_pauli() const { return std::get<PauliSum>(op); }

  Eigen::MatrixXcd matrix(const HilbertLayout& layout, const Limits& limits = {}) const {
    if (is_pauli()) return to_matrix(as_pauli(), layout, limits);
    const auto& m = std::get<Eigen::MatrixXcd>(op);
    require(static_cast<std::size_t>(m.rows()) == layout.dim() && m.rows() == m.cols(),
            "observable '" + name + "' does not match layout dimension");
    return m;
  }

  bool is_hermitian(double tol = kDefaultTolerance) const {
    if (is_pauli()) return as_pauli().is_hermitian(tol);
    const auto& m = std::get<Eigen::MatrixXcd>(op);
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  /// Operator-norm estimate: the coefficient 1-norm for Pauli sums (exact
  /// for a single string), the spectral norm for dense matrices.
  double norm_estimate() const {
    if (is_pauli()) return as_pauli().one_norm();
    const auto& m = std::get<Eigen::MatrixXcd>(op);
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  double expectation(const StateVector& s) const {
    if (is_pauli()) return matrix_element(as_pauli(), s, s).real();
    const auto& m = std::get<Eigen::MatrixXcd>(op);
    require(static_cast<std::size_t>(m.rows()) == s.dim(), "observable '" + name + "' dimension mismatch");
    return s.amplitudes().dot(m * s.amplitudes()).real();
  }

  double expectation(const DensityMatrix& rho) const {
    if (is_pauli()) {
      cplx acc{0.0};
      for (const auto& [p, c] : as_pauli().terms()) acc += c * trace_with(p, rho);
      return acc.real();
    }
    return rho.trace_with(std::get<Eigen::MatrixXcd>(op)).real();
  }
};

/// A named generating family of allowed observables. Discrimination closes
/// the family under Hermitian parts of products up to `closure_depth`.
struct ObservableSet {
  std::string name;
  std::vector<Observable> generators;
  int closure_depth = 2;

  void validate(double tol = kDefaultTolerance) const {
    require(closure_depth >= 1, "observable set '" + name + "': closure depth must be >= 1");
    for (const auto& g : generators) {
      require(g.is_hermitian(tol), "observable set '" + name + "': generator '" + g.name + "' is not Hermitian");
    }
  }
};

/// Orthogonal projectors summing to the identity, one per sector label.
struct SectorDecomposition {
  HilbertLayout layout;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXcd> projectors;

  /// max(||P_k P_l - delta_kl P_k||, ||sum_k P_k - I||)
  double defect() const {
    const auto n = static_cast<Eigen::Index>(layout.dim());
    if (all_diagonal()) {
      Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n);
      double worst = 0.0;
      for (std::size_t k = 0; k < projectors.size(); ++k) {
        const Eigen::VectorXcd dk = projectors[k].diagonal();
        sum += dk;
        for (std::size_t l = k; l < projectors.size(); ++l) {
          Eigen::VectorXcd prod = dk.cwiseProduct(projectors[l].diagonal());
          if (k == l) prod -= dk;
          worst = std::max(worst, prod.norm());
        }
      }
      return std::max(worst, (sum - Eigen::VectorXcd::Ones(n)).norm());
    }
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    double worst = 0.0;
    for (std::size_t k = 0; k < projectors.size(); ++k) {
      sum += projectors[k];
      for (std::size_t l = k; l < projectors.size(); ++l) {
        Eigen::MatrixXcd prod = projectors[k] * projectors[l];
        if (k == l) prod -= projectors[k];
        worst = std::max(worst, prod.norm());
      }
    }
    return std::max(worst, (sum - Eigen::MatrixXcd::Identity(n, n)).norm());
  }

  bool all_diagonal() const {
    return std::all_of(projectors.begin(), projectors.end(), [](const Eigen::MatrixXcd& p) {
      return (p - Eigen::MatrixXcd(p.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    });
  }
};

namespace detail {

inline std::string format_value(double v) {
  if (std::abs(v) < 1e-15) v = 0.0;
  return format_double(v);
}

// Groups (value, index) pairs whose values lie within tol of the cluster's first value.
inline std::vector<std::pair<double, std::vector<Eigen::Index>>> cluster(std::vector<std::pair<double, Eigen::Index>> v,
                                                                        double tol) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::pair<double, std::vector<Eigen::Index>>> out;
  for (const auto& [val, idx] : v) {
    if (out.empty() || std::abs(out.back().first - val) > tol) out.push_back({val, {}});
    out.back().second.push_back(idx);
  }
  return out;
}

}  // namespace detail

/// Spectral projectors of a Hermitian matrix grouped by distinct eigenvalue
/// (largest first). Labels are "<name>=<eigenvalue>".
inline SectorDecomposition spectral_sectors(const Eigen::MatrixXcd& m, const HilbertLayout& layout,
                                            const std::string& name = "q",
                                            double degeneracy_tol = kDegeneracyTolerance) {
  require(static_cast<std::size_t>(m.rows()) == layout.dim(), "pointer dimension does not match layout");
  SectorDecomposition out{layout, {}, {}};
  const bool diagonal = (m - Eigen::MatrixXcd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  std::vector<std::pair<double, Eigen::Index>> values;
  Eigen::MatrixXcd vectors;
  if (diagonal) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) values.emplace_back(m(i, i).real(), i);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < m.rows(); ++i) values.emplace_back(es.eigenvalues()[i], i);
  }
  for (const auto& [val, members] : detail::cluster(std::move(values), degeneracy_tol)) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (auto i : members) {
      if (diagonal) {
        p(i, i) = 1.0;
      } else {
        p += vectors.col(i) * vectors.col(i).adjoint();
      }
    }
    out.labels.push_back(name + "=" + detail::format_value(val));
    out.projectors.push_back(std::move(p));
  }
  return out;
}

/// Sectors of a Hermitian pointer observable.
inline SectorDecomposition pointer_sectors(const PauliSum& pointer, const HilbertLayout& layout,
                                           const std::string& name = "pointer",
                                           double degeneracy_tol = kDegeneracyTolerance, const Limits& limits = {}) {
  require_hermitian(pointer, kDefaultTolerance);
  return spectral_sectors(to_matrix(pointer, layout, limits), layout, name, degeneracy_tol);
}

/// Common refinement: nonzero products P_k Q_l of commuting decompositions.
inline SectorDecomposition refine(const SectorDecomposition& a, const SectorDecomposition& b,
                                  double tol = kDefaultTolerance) {
  require(a.layout == b.layout, "refine: layout mismatch");
  SectorDecomposition out{a.layout, {}, {}};
  const bool diagonal = a.all_diagonal() && b.all_diagonal();
  for (std::size_t k = 0; k < a.projectors.size(); ++k) {
    for (std::size_t l = 0; l < b.projectors.size(); ++l) {
      if (diagonal) {
        const Eigen::VectorXcd d = a.projectors[k].diagonal().cwiseProduct(b.projectors[l].diagonal());
        if (d.sum().real() <= 0.5) continue;
        out.labels.push_back(a.labels[k] + "," + b.labels[l]);
        out.projectors.push_back(d.asDiagonal());
        continue;
      }
      const Eigen::MatrixXcd pq = a.projectors[k] * b.projectors[l];
      require((pq - b.projectors[l] * a.projectors[k]).cwiseAbs().maxCoeff() <= tol,
              "refine: sector projectors do not commute");
      if (pq.trace().real() <= 0.5) continue;  // rank 0
      out.labels.push_back(a.labels[k] + "," + b.labels[l]);
      out.projectors.push_back(pq);
    }
  }
  return out;
}

/// ||(prod_j P_j) psi - psi||. Zero iff psi is a +1 eigenvector of every P_j.
inline double structure_residual(const StateVector& state, const std::vector<Eigen::MatrixXcd>& projectors,
                                 double tol = kDefaultTolerance) {
  Eigen::VectorXcd v = state.amplitudes();
  for (std::size_t j = projectors.size(); j-- > 0;) {
    const auto& p = projectors[j];
    require(static_cast<std::size_t>(p.rows()) == state.dim() && p.rows() == p.cols(),
            "structure projector " + std::to_string(j) + " has the wrong shape");
    require((p * p - p).cwiseAbs().maxCoeff() <= tol, "structure projector " + std::to_string(j) + " is not idempotent");
    v = p * v;
  }
  return (v - state.amplitudes()).norm();
}

namespace detail {

/// Sector index of every basis state when all projectors are diagonal 0/1 matrices.
inline std::optional<std::vector<std::size_t>> basis_sector_labels(const SectorDecomposition& sectors) {
  std::vector<std::size_t> label(sectors.layout.dim(), sectors.projectors.size());
  for (std::size_t k = 0; k < sectors.projectors.size(); ++k) {
    const auto& p = sectors.projectors[k];
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const cplx v = p(i, j);
        if (v == cplx{0.0}) continue;
        if (i != j || v != cplx{1.0} || label[i] != sectors.projectors.size()) return std::nullopt;
        label[i] = k;
      }
    }
  }
  for (auto l : label) {
    if (l == sectors.projectors.size()) return std::nullopt;
  }
  return label;
}

}  // namespace detail

/// sum_k P_k rho P_k
inline DensityMatrix sector_decohere(const DensityMatrix& rho, const SectorDecomposition& sectors) {
  require(rho.layout() == sectors.layout, "sector_decohere: layout mismatch");
  const auto n = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  if (const auto label = detail::basis_sector_labels(sectors)) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if ((*label)[i] == (*label)[j]) out(i, j) = rho.matrix()(i, j);
      }
    }
    return DensityMatrix::trusted(rho.layout(), std::move(out));
  }
  for (const auto& p : sectors.projectors) out += p * rho.matrix() * p;
  return DensityMatrix::trusted(rho.layout(), std::move(out));
}

namespace detail {

/// max_k ||[Q, P_k]||_F for a Pauli sum against diagonal sectors, without forming Q.
inline double pauli_sector_commutator_norm(const PauliSum& q, const HilbertLayout& layout,
                                           const std::vector<std::size_t>& label, std::size_t n_sectors) {
  std::map<std::uint64_t, std::vector<std::pair<cplx, BoundString>>> by_flip;
  for (const auto& [p, c] : q.terms()) by_flip[p.x_mask()].emplace_back(c, BoundString(p, layout));
  std::vector<double> sq(n_sectors, 0.0);
  for (const auto& [mask, group] : by_flip) {
    for (std::size_t j = 0; j < layout.dim(); ++j) {
      std::size_t target = j;
      cplx v{0.0};
      for (const auto& [c, b] : group) {
        const auto [t, f] = b.map(j);
        target = t;
        v += c * f;
      }
      if (label[target] == label[j]) continue;
      const double w = std::norm(v);
      sq[label[target]] += w;
      sq[label[j]] += w;
    }
  }
  double worst = 0.0;
  for (double s : sq) worst = std::max(worst, std::sqrt(s));
  return worst;
}

}  // namespace detail

/// max_k ||[Q, P_k]||_F
inline double sector_commutator_norm(const Observable& q, const SectorDecomposition& sectors,
                                     const Limits& limits = {}) {
  if (q.is_pauli()) {
    if (auto label = detail::basis_sector_labels(sectors)) {
      return detail::pauli_sector_commutator_norm(q.as_pauli(), sectors.layout, *label, sectors.projectors.size());
    }
  }
  const Eigen::MatrixXcd m = q.matrix(sectors.layout, limits);
  double worst = 0.0;
  for (const auto& p : sectors.projectors) {
    const Eigen::VectorXcd d = p.diagonal();
    if ((p - Eigen::MatrixXcd(d.asDiagonal())).cwiseAbs().maxCoeff() == 0.0) {
      // Diagonal P: [Q, P]_ij = Q_ij (d_j - d_i).
      double sq = 0.0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) sq += std::norm(m(i, j) * (d[j] - d[i]));
      }
      worst = std::max(worst, std::sqrt(sq));
    } else {
      worst = std::max(worst, (m * p - p * m).norm());
    }
  }
  return worst;
}

/// The candidates that commute with every sector projector.
inline ObservableSet restricted_algebra(const SectorDecomposition& sectors, const ObservableSet& pool,
                                        double tol = kDefaultTolerance, const Limits& limits = {}) {
  ObservableSet out{pool.name + "/sector_preserving", {}, pool.closure_depth};
  const auto label = detail::basis_sector_labels(sectors);
  for (const auto& g : pool.generators) {
    const double r = g.is_pauli() && label ? detail::pauli_sector_commutator_norm(g.as_pauli(), sectors.layout, *label,
                                                                                  sectors.projectors.size())
                                           : sector_commutator_norm(g, sectors, limits);
    if (r <= tol) out.generators.push_back(g);
  }
  return out;
}

namespace detail {

// Key identifying a Pauli sum up to a nonzero real factor: rescaled so its
// first coefficient is 1.
inline std::string ray_key(const PauliSum& s) {
  if (s.empty()) return "0";
  const cplx lead = s.terms().begin()->second;
  return ((1.0 / lead) * s).chopped(1e-15).str();
}

inline std::vector<Observable> hermitian_parts(const Observable& a, const Observable& b, const HilbertLayout& layout,
                                               const Limits& limits) {
  std::vector<Observable> out;
  if (a.is_pauli() && b.is_pauli()) {
    const PauliSum ab = a.as_pauli() * b.as_pauli();
    const PauliSum ba = b.as_pauli() * a.as_pauli();
    PauliSum sym = (0.5 * (ab + ba)).chopped(1e-15);
    PauliSum anti = (cplx{0.0, 0.5} * (ab - ba)).chopped(1e-15);
    if (!sym.empty()) out.push_back(Observable::pauli(std::move(sym)));
    if (!anti.empty()) out.push_back(Observable::pauli(std::move(anti)));
    return out;
  }
  const Eigen::MatrixXcd ma = a.matrix(layout, limits);
  const Eigen::MatrixXcd mb = b.matrix(layout, limits);
  const Eigen::MatrixXcd ab = ma * mb;
  const Eigen::MatrixXcd ba = mb * ma;
  Eigen::MatrixXcd sym = 0.5 * (ab + ba);
  Eigen::MatrixXcd anti = cplx{0.0, 0.5} * (ab - ba);
  if (sym.cwiseAbs().maxCoeff() > 1e-15) out.push_back(Observable::dense("{" + a.name + "," + b.name + "}/2", sym));
  if (anti.cwiseAbs().maxCoeff() > 1e-15) {
    out.push_back(Observable::dense("i[" + a.name + "," + b.name + "]/2", anti));
  }
  return out;
}

}  // namespace detail

/// Generators plus Hermitian parts of products, up to the set's closure depth.
inline std::vector<Observable> closure(const ObservableSet& set, const HilbertLayout& layout,
                                       const Limits& limits = {}) {
  std::vector<Observable> all = set.generators;
  std::set<std::string> seen;
  for (const auto& g : all) {
    if (g.is_pauli()) seen.insert(detail::ray_key(g.as_pauli()));
  }
  std::vector<Observable> frontier = set.generators;
  for (int depth = 2; depth <= set.closure_depth; ++depth) {
    std::vector<Observable> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (std::size_t j = 0; j < set.generators.size(); ++j) {
        for (auto& h : detail::hermitian_parts(frontier[i], set.generators[j], layout, limits)) {
          if (h.is_pauli() && !seen.insert(detail::ray_key(h.as_pauli())).second) continue;
          next.push_back(std::move(h));
        }
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

struct DiscriminationVerdict {
  double max_deviation = 0.0;
  std::optional<std::string> witness;  // present iff distinguishable
  bool distinguishable = false;
};

/// Normalized |<pure|Q|pure> - Tr(mixed Q)| for one observable; zero-norm observables give 0.
inline double pure_mixed_deviation(const Observable& q, const StateVector& pure, const DensityMatrix& mixed) {
  const double norm = q.norm_estimate();
  if (norm <= 0.0) return 0.0;
  return std::abs(q.expectation(pure) - q.expectation(mixed)) / norm;
}

/// Largest normalized pure/mixed deviation over the closed observable set.
inline DiscriminationVerdict discriminate(const StateVector& pure, const DensityMatrix& mixed,
                                          const ObservableSet& allowed, double tol = kDefaultTolerance,
                                          const Limits& limits = {}) {
  require(pure.layout() == mixed.layout(), "discriminate: pure and mixed layouts differ");
  require(!allowed.generators.empty(), "discriminate: observable set '" + allowed.name + "' is empty");
  allowed.validate(std::max(tol, 1e-12));
  DiscriminationVerdict v;
  std::string argmax;
  for (const auto& q : closure(allowed, pure.layout(), limits)) {
    const double d = pure_mixed_deviation(q, pure, mixed);
    if (d > v.max_deviation + 1e-14) {  // earlier members win near-ties
      v.max_deviation = d;
      argmax = q.name;
    }
  }
  v.distinguishable = v.max_deviation > tol;
  if (v.distinguishable) v.witness = argmax;
  return v;
}

/// Every Pauli string on `n_qubits` qubits (4^n of them), canonical order.
inline std::vector<PauliString> all_pauli_strings(std::size_t n_qubits) {
  require(n_qubits <= 10, "all_pauli_strings: refusing to enumerate more than 4^10 strings");
  std::vector<PauliString> out;
  const std::size_t count = std::size_t{1} << (2 * n_qubits);
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<std::pair<std::size_t, Letter>> letters;
    for (std::size_t q = 0; q < n_qubits; ++q) {
      const auto l = static_cast<Letter>((code >> (2 * q)) & 3U);
      if (l != Letter::I) letters.emplace_back(q, l);
    }
    out.emplace_back(letters);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ObservableSet all_strings_set(std::size_t n_qubits) {
  ObservableSet s{"all_strings", {}, 1};
  for (const auto& p : all_pauli_strings(n_qubits)) s.generators.push_back(Observable::pauli(PauliSum(p)));
  return s;
}

}  // namespace qmsim
