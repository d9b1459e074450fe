#pragma once

// Layouts, pure and mixed states, tensor composition and partial trace.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmsim/errors.hpp"

namespace qmsim {

enum class SubsystemKind { qubit, mode };

struct Subsystem {
  std::string label;
  std::size_t dim = 2;
  SubsystemKind kind = SubsystemKind::qubit;

  bool operator==(const Subsystem&) const = default;
};

/// Ordered list of labeled subsystems. Flat indices are row-major in
/// subsystem order: the first subsystem is the most significant digit.
///
/// Qubit subsystems are also addressed by ordinal (the k-th qubit in
/// declaration order); Pauli strings use these ordinals.
class HilbertLayout {
 public:
  HilbertLayout() = default;

  explicit HilbertLayout(std::vector<Subsystem> subsystems,
                         std::size_t dimension_cap = Limits{}.dimension_cap)
      : subsystems_(std::move(subsystems)) {
    std::set<std::string> seen;
    dim_ = 1;
    for (const auto& s : subsystems_) {
      require(!s.label.empty(), "subsystem label must be non-empty");
      require(seen.insert(s.label).second, "duplicate subsystem label '" + s.label + "'");
      require(s.dim >= 1, "subsystem '" + s.label + "' must have positive dimension");
      require(s.kind != SubsystemKind::qubit || s.dim == 2,
              "qubit subsystem '" + s.label + "' must have dimension 2");
      if (dim_ > dimension_cap / s.dim) {
        throw DimensionCapError("layout [" + describe() + "] exceeds dimension cap " +
                                std::to_string(dimension_cap));
      }
      dim_ *= s.dim;
    }
    strides_.assign(subsystems_.size(), 1);
    for (std::size_t p = subsystems_.size(); p-- > 1;) {
      strides_[p - 1] = strides_[p] * subsystems_[p].dim;
    }
    for (std::size_t p = 0; p < subsystems_.size(); ++p) {
      if (subsystems_[p].kind == SubsystemKind::qubit) qubit_positions_.push_back(p);
    }
  }

  static HilbertLayout qubits(const std::vector<std::string>& labels,
                              std::size_t dimension_cap = Limits{}.dimension_cap) {
    std::vector<Subsystem> subs;
    subs.reserve(labels.size());
    for (const auto& l : labels) subs.push_back({l, 2, SubsystemKind::qubit});
    return HilbertLayout(std::move(subs), dimension_cap);
  }

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t stride(std::size_t position) const { return strides_.at(position); }
  std::size_t qubit_count() const { return qubit_positions_.size(); }

  std::size_t qubit_position(std::size_t ordinal) const {
    require(ordinal < qubit_positions_.size(),
            "qubit ordinal " + std::to_string(ordinal) + " not in layout [" + describe() + "]");
    return qubit_positions_[ordinal];
  }

  bool contains(std::string_view label) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
  }

  std::size_t position(std::string_view label) const {
    for (std::size_t p = 0; p < subsystems_.size(); ++p) {
      if (subsystems_[p].label == label) return p;
    }
    throw PreconditionError("unknown subsystem label '" + std::string(label) + "'");
  }

  std::size_t flat_index(std::span<const std::size_t> digits) const {
    require(digits.size() == subsystems_.size(), "digit count does not match layout");
    std::size_t flat = 0;
    for (std::size_t p = 0; p < digits.size(); ++p) {
      require(digits[p] < subsystems_[p].dim, "digit out of range for '" + subsystems_[p].label + "'");
      flat += digits[p] * strides_[p];
    }
    return flat;
  }

  std::vector<std::size_t> digits(std::size_t flat) const {
    require(flat < dim_, "flat index out of range");
    std::vector<std::size_t> out(subsystems_.size());
    for (std::size_t p = 0; p < subsystems_.size(); ++p) out[p] = digit(flat, p);
    return out;
  }

  std::size_t digit(std::size_t flat, std::size_t position) const {
    return (flat / strides_[position]) % subsystems_[position].dim;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& s : subsystems_) out.push_back(s.label);
    return out;
  }

  std::string describe() const {
    std::string out;
    for (const auto& s : subsystems_) {
      if (!out.empty()) out += ", ";
      out += s.label + ":" + std::to_string(s.dim);
    }
    return out;
  }

  bool operator==(const HilbertLayout& other) const { return subsystems_ == other.subsystems_; }

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> qubit_positions_;
  std::size_t dim_ = 1;
};

/// Layout of `a` followed by `b`; labels must be disjoint.
inline HilbertLayout concat(const HilbertLayout& a, const HilbertLayout& b,
                            std::size_t dimension_cap = Limits{}.dimension_cap) {
  auto subs = a.subsystems();
  subs.insert(subs.end(), b.subsystems().begin(), b.subsystems().end());
  return HilbertLayout(std::move(subs), dimension_cap);
}

class StateVector {
 public:
  StateVector(HilbertLayout layout, Eigen::VectorXcd amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    require(static_cast<std::size_t>(amplitudes_.size()) == layout_.dim(),
            "amplitude count " + std::to_string(amplitudes_.size()) + " does not match layout dimension " +
                std::to_string(layout_.dim()));
  }

  static StateVector basis(const HilbertLayout& layout, std::size_t flat) {
    require(flat < layout.dim(), "basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
    v[static_cast<Eigen::Index>(flat)] = 1.0;
    return {layout, std::move(v)};
  }

  static StateVector basis(const HilbertLayout& layout, std::span<const std::size_t> digits) {
    return basis(layout, layout.flat_index(digits));
  }

  static StateVector zero(const HilbertLayout& layout) {
    return {layout, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()))};
  }

  const HilbertLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return layout_.dim(); }
  cplx operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amplitudes_.norm(); }

  /// <this|other>
  cplx inner(const StateVector& other) const {
    require(layout_ == other.layout_, "inner product across different layouts");
    return amplitudes_.dot(other.amplitudes_);
  }

  StateVector normalized() const {
    const double n = norm();
    require(n > 0.0, "cannot normalize the zero vector");
    return {layout_, amplitudes_ / n};
  }

  StateVector operator+(const StateVector& other) const {
    require(layout_ == other.layout_, "sum across different layouts");
    return {layout_, amplitudes_ + other.amplitudes_};
  }

  StateVector operator-(const StateVector& other) const {
    require(layout_ == other.layout_, "difference across different layouts");
    return {layout_, amplitudes_ - other.amplitudes_};
  }

  friend StateVector operator*(cplx c, const StateVector& s) { return {s.layout_, c * s.amplitudes_}; }

 private:
  HilbertLayout layout_;
  Eigen::VectorXcd amplitudes_;
};

inline void require_normalized(const StateVector& s, double tol, const std::string& what) {
  require(std::abs(s.norm() - 1.0) <= tol, what + " is not normalized (norm " + std::to_string(s.norm()) + ")");
}

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity within `tol`.
  DensityMatrix(HilbertLayout layout, Eigen::MatrixXcd matrix, double tol = kDefaultTolerance)
      : DensityMatrix(unchecked, std::move(layout), std::move(matrix)) {
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    require((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol * scale, "density matrix is not Hermitian");
    require(std::abs(matrix_.trace() - cplx{1.0}) <= tol * static_cast<double>(layout_.dim()),
            "density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -std::max(tol, 1e-12) * static_cast<double>(layout_.dim()),
            "density matrix has a negative eigenvalue");
  }

  static DensityMatrix pure(const StateVector& s, const Limits& limits = {}) {
    if (s.dim() > limits.dense_cap) {
      throw DimensionCapError("layout [" + s.layout().describe() + "] exceeds dense cap " +
                              std::to_string(limits.dense_cap));
    }
    return {unchecked, s.layout(), s.amplitudes() * s.amplitudes().adjoint()};
  }

  /// For outputs of operations that preserve the density-matrix invariants.
  static DensityMatrix trusted(HilbertLayout layout, Eigen::MatrixXcd matrix) {
    return {unchecked, std::move(layout), std::move(matrix)};
  }

  const HilbertLayout& layout() const { return layout_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t dim() const { return layout_.dim(); }

  double trace() const { return matrix_.trace().real(); }
  double purity() const { return (matrix_ * matrix_).trace().real(); }

  /// Tr(rho Q) for a dense operator.
  cplx trace_with(const Eigen::MatrixXcd& q) const {
    require(q.rows() == matrix_.rows() && q.cols() == matrix_.cols(), "operator dimension mismatch");
    return (matrix_.transpose().cwiseProduct(q)).sum();
  }

 private:
  struct Unchecked {};
  static constexpr Unchecked unchecked{};

  DensityMatrix(Unchecked, HilbertLayout layout, Eigen::MatrixXcd matrix)
      : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    require(static_cast<std::size_t>(matrix_.rows()) == layout_.dim() && matrix_.rows() == matrix_.cols(),
            "density matrix shape does not match layout");
  }

  HilbertLayout layout_;
  Eigen::MatrixXcd matrix_;
};

struct Branch {
  cplx amplitude;
  StateVector state;  // normalized
};

/// A superposition written as a sum of mutually orthogonal normalized
/// components, sum_i amplitude_i |state_i>.
class BranchDecomposition {
 public:
  BranchDecomposition(HilbertLayout layout, std::vector<Branch> branches, double tol = kDefaultTolerance)
      : layout_(std::move(layout)), branches_(std::move(branches)) {
    require(!branches_.empty(), "branch decomposition needs at least one branch");
    double weight = 0.0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      require(branches_[i].state.layout() == layout_, "branch layout mismatch");
      require_normalized(branches_[i].state, tol, "branch state " + std::to_string(i));
      weight += std::norm(branches_[i].amplitude);
      for (std::size_t j = 0; j < i; ++j) {
        require(std::abs(branches_[j].state.inner(branches_[i].state)) <= tol,
                "branches " + std::to_string(j) + " and " + std::to_string(i) + " are not orthogonal");
      }
    }
    require(std::abs(weight - 1.0) <= tol, "branch weights do not sum to 1");
  }

  /// Splits `state` into its nonzero components along mutually orthogonal
  /// (unnormalized) pieces that sum to it.
  static BranchDecomposition from_components(const std::vector<StateVector>& components,
                                             double tol = kDefaultTolerance) {
    require(!components.empty(), "no components");
    std::vector<Branch> out;
    for (const auto& c : components) {
      const double n = c.norm();
      if (n <= tol) continue;
      out.push_back({cplx{n}, c.normalized()});
    }
    return {components.front().layout(), std::move(out), tol};
  }

  const HilbertLayout& layout() const { return layout_; }
  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }

  StateVector superposition() const {
    auto acc = StateVector::zero(layout_);
    for (const auto& b : branches_) acc = acc + b.amplitude * b.state;
    return acc;
  }

 private:
  HilbertLayout layout_;
  std::vector<Branch> branches_;
};

/// Kronecker composition in the given order.
inline StateVector tensor(std::span<const StateVector> states, const Limits& limits = {}) {
  require(!states.empty(), "tensor of an empty list");
  HilbertLayout layout = states.front().layout();
  Eigen::VectorXcd amps = states.front().amplitudes();
  for (std::size_t k = 1; k < states.size(); ++k) {
    layout = concat(layout, states[k].layout(), limits.dimension_cap);
    const auto& rhs = states[k].amplitudes();
    Eigen::VectorXcd next(amps.size() * rhs.size());
    for (Eigen::Index i = 0; i < amps.size(); ++i) next.segment(i * rhs.size(), rhs.size()) = amps[i] * rhs;
    amps = std::move(next);
  }
  return {std::move(layout), std::move(amps)};
}

inline StateVector tensor(std::initializer_list<StateVector> states, const Limits& limits = {}) {
  return tensor(std::span<const StateVector>(states.begin(), states.size()), limits);
}

/// One orthogonal pair of pointer states for a single factor (system,
/// detector, observer, ...).
struct PointerPair {
  StateVector first;
  StateVector second;
};

/// a1 |s1>|D1>|O1>... + a2 |s2>|D2>|O2>... with one pointer pair per factor.
inline BranchDecomposition build_premeasurement(cplx a1, cplx a2, std::span<const PointerPair> pointers,
                                                double tol = kDefaultTolerance, const Limits& limits = {}) {
  require(!pointers.empty(), "premeasurement needs at least one pointer pair");
  require(std::abs(std::norm(a1) + std::norm(a2) - 1.0) <= tol, "amplitudes are not normalized");
  std::vector<StateVector> firsts, seconds;
  for (std::size_t k = 0; k < pointers.size(); ++k) {
    const auto& p = pointers[k];
    require(p.first.layout() == p.second.layout(), "pointer pair " + std::to_string(k) + " layout mismatch");
    require_normalized(p.first, tol, "pointer state");
    require_normalized(p.second, tol, "pointer state");
    require(std::abs(p.first.inner(p.second)) <= tol, "pointer pair " + std::to_string(k) + " is not orthogonal");
    firsts.push_back(p.first);
    seconds.push_back(p.second);
  }
  auto b1 = tensor(std::span<const StateVector>(firsts), limits);
  auto b2 = tensor(std::span<const StateVector>(seconds), limits);
  std::vector<Branch> branches;
  if (std::abs(a1) > 0.0) branches.push_back({a1, std::move(b1)});
  if (std::abs(a2) > 0.0) branches.push_back({a2, std::move(b2)});
  auto layout = branches.front().state.layout();
  return {std::move(layout), std::move(branches), tol};
}

/// Reduced density matrix on the subsystems named in `keep` (kept in layout order).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::string>& keep) {
  const auto& layout = rho.layout();
  for (const auto& l : keep) require(layout.contains(l), "unknown label '" + l + "' in partial trace");
  std::vector<Subsystem> kept, traced;
  std::vector<std::size_t> kept_pos, traced_pos;
  for (std::size_t p = 0; p < layout.size(); ++p) {
    if (keep.count(layout.subsystems()[p].label)) {
      kept.push_back(layout.subsystems()[p]);
      kept_pos.push_back(p);
    } else {
      traced.push_back(layout.subsystems()[p]);
      traced_pos.push_back(p);
    }
  }
  // Offsets of each kept / traced sub-index inside the full flat index.
  auto offsets = [&](const std::vector<Subsystem>& subs, const std::vector<std::size_t>& pos) {
    std::size_t n = 1;
    for (const auto& s : subs) n *= s.dim;
    std::vector<std::size_t> off(n, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::size_t rem = idx;
      for (std::size_t k = subs.size(); k-- > 0;) {
        off[idx] += (rem % subs[k].dim) * layout.stride(pos[k]);
        rem /= subs[k].dim;
      }
    }
    return off;
  };
  const auto koff = offsets(kept, kept_pos);
  const auto toff = offsets(traced, traced_pos);
  const auto nk = static_cast<Eigen::Index>(koff.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nk, nk);
  const auto& m = rho.matrix();
  for (Eigen::Index i = 0; i < nk; ++i) {
    for (Eigen::Index j = 0; j < nk; ++j) {
      cplx acc{0.0};
      for (auto t : toff) acc += m(static_cast<Eigen::Index>(koff[i] + t), static_cast<Eigen::Index>(koff[j] + t));
      out(i, j) = acc;
    }
  }
  return DensityMatrix::trusted(HilbertLayout(std::move(kept)), std::move(out));
}

/// sum_i |a_i|^2 |psi_i><psi_i| : the superposition's projector with the
/// interbranch terms removed.
inline DensityMatrix mixture_of(const BranchDecomposition& branches, const Limits& limits = {}) {
  if (branches.layout().dim() > limits.dense_cap) {
    throw DimensionCapError("layout [" + branches.layout().describe() + "] exceeds dense cap " +
                            std::to_string(limits.dense_cap));
  }
  const auto n = static_cast<Eigen::Index>(branches.layout().dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& b : branches.branches()) {
    m += std::norm(b.amplitude) * (b.state.amplitudes() * b.state.amplitudes().adjoint());
  }
  return DensityMatrix::trusted(branches.layout(), std::move(m));
}

}  // namespace qmsim
