#pragma once

// Pauli strings and sums of Pauli strings.
//
// Conventions (|u> is local basis index 0, |d> index 1):
//   X|u> = |d>,  Y|u> = i|d>,  Z|u> = |u>
//   X|d> = |u>,  Y|d> = -i|u>, Z|d> = -|d>
//
// Qubits are addressed by ordinal: qubit k is the k-th qubit subsystem of a
// HilbertLayout in declaration order.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"

namespace qmsim {

enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::size_t kMaxPauliQubits = 64;

inline char letter_char(Letter l) { return "IXYZ"[static_cast<int>(l)]; }

inline cplx i_power(int k) {
  static constexpr std::array<cplx, 4> table{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
  return table[static_cast<std::size_t>(((k % 4) + 4) % 4)];
}

/// phase * (tensor product of single-qubit letters); phase is i^k.
class PauliString {
 public:
  PauliString() = default;

  PauliString(const std::vector<std::pair<std::size_t, Letter>>& letters, int phase_power = 0) {
    for (auto [q, l] : letters) *this = *this * single(l, q);
    *this = with_phase(phase_ + phase_power);
  }

  static PauliString identity() { return {}; }

  static PauliString single(Letter l, std::size_t qubit) {
    require(qubit < kMaxPauliQubits, "qubit ordinal " + std::to_string(qubit) + " exceeds Pauli string capacity");
    PauliString p;
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    if (l == Letter::X || l == Letter::Y) p.x_ |= bit;
    if (l == Letter::Z || l == Letter::Y) p.z_ |= bit;
    return p;
  }

  Letter letter(std::size_t qubit) const {
    if (qubit >= kMaxPauliQubits) return Letter::I;
    const bool x = (x_ >> qubit) & 1U;
    const bool z = (z_ >> qubit) & 1U;
    if (x && z) return Letter::Y;
    if (x) return Letter::X;
    if (z) return Letter::Z;
    return Letter::I;
  }

  int phase_power() const { return phase_; }
  cplx phase() const { return i_power(phase_); }
  std::uint64_t support_mask() const { return x_ | z_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  int weight() const { return std::popcount(support_mask()); }
  bool is_identity() const { return support_mask() == 0; }
  bool is_hermitian() const { return phase_ % 2 == 0; }

  /// Number of qubit ordinals needed to host this string.
  std::size_t span() const { return kMaxPauliQubits - static_cast<std::size_t>(std::countl_zero(support_mask())); }

  std::vector<std::pair<std::size_t, Letter>> letters() const {
    std::vector<std::pair<std::size_t, Letter>> out;
    for (auto m = support_mask(); m != 0; m &= m - 1) {
      const auto q = static_cast<std::size_t>(std::countr_zero(m));
      out.emplace_back(q, letter(q));
    }
    return out;
  }

  /// Same letters, phase reset to +1.
  PauliString unsigned_part() const {
    PauliString p = *this;
    p.phase_ = 0;
    return p;
  }

  PauliString with_phase(int phase_power) const {
    PauliString p = *this;
    p.phase_ = static_cast<std::uint8_t>(((phase_power % 4) + 4) % 4);
    return p;
  }

  bool commutes_with(const PauliString& other) const {
    const int anti = std::popcount((x_ & other.z_) ^ (z_ & other.x_));
    return anti % 2 == 0;
  }

  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    int k = a.phase_ + b.phase_;
    const std::uint64_t both = a.support_mask() & b.support_mask();
    for (auto m = both; m != 0; m &= m - 1) {
      const auto q = static_cast<std::size_t>(std::countr_zero(m));
      k += product_phase(a.letter(q), b.letter(q));
    }
    PauliString out;
    out.x_ = a.x_ ^ b.x_;
    out.z_ = a.z_ ^ b.z_;
    out.phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4);
    return out;
  }

  /// Letters only, e.g. "X0*Y1"; identity prints as "I".
  std::string letters_str() const {
    if (is_identity()) return "I";
    std::string out;
    for (auto [q, l] : letters()) {
      if (!out.empty()) out += '*';
      out += letter_char(l);
      out += std::to_string(q);
    }
    return out;
  }

  /// Letters with a phase prefix: "+X0*Y1", "-iZ2".
  std::string str() const {
    static constexpr std::array<const char*, 4> prefix{"+", "+i", "-", "-i"};
    return std::string(prefix[phase_]) + letters_str();
  }

  /// Canonical order: lexicographic over the (qubit, letter) sequence; phase last.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.x_ != b.x_ || a.z_ != b.z_) {
      const auto la = a.letters();
      const auto lb = b.letters();
      return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
    }
    return a.phase_ < b.phase_;
  }

  bool operator==(const PauliString&) const = default;

 private:
  // Phase exponent of i in the single-qubit product a*b.
  static int product_phase(Letter a, Letter b) {
    if (a == Letter::I || b == Letter::I || a == b) return 0;
    const int ia = static_cast<int>(a);
    const int ib = static_cast<int>(b);
    // X*Y = iZ, Y*Z = iX, Z*X = iY
    return ((ib - ia + 3) % 3 == 1) ? 1 : 3;
  }

  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  std::uint8_t phase_ = 0;
};

/// Linear combination of Pauli strings in canonical form: every key string
/// has phase +1 (phases live in the coefficients), like strings are merged,
/// exact zeros are dropped, iteration follows the canonical string order.
class PauliSum {
 public:
  using Terms = std::map<PauliString, cplx>;

  PauliSum() = default;
  PauliSum(const PauliString& p) { add(1.0, p); }  // NOLINT(google-explicit-constructor)

  static PauliSum identity(cplx c = 1.0) {
    PauliSum s;
    s.add(c, PauliString::identity());
    return s;
  }

  PauliSum& add(cplx coefficient, const PauliString& p) {
    const cplx c = coefficient * p.phase();
    if (c == cplx{0.0}) return *this;
    const auto key = p.unsigned_part();
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx{0.0}) terms_.erase(it);
    }
    return *this;
  }

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  cplx coefficient(const PauliString& p) const {
    auto it = terms_.find(p.unsigned_part());
    return it == terms_.end() ? cplx{0.0} : it->second / p.phase();
  }

  /// Drops terms with |coefficient| <= tol.
  PauliSum chopped(double tol) const {
    PauliSum out;
    for (const auto& [p, c] : terms_) {
      if (std::abs(c) > tol) out.terms_.emplace(p, c);
    }
    return out;
  }

  bool is_hermitian(double tol = kDefaultTolerance) const {
    for (const auto& [p, c] : terms_) {
      if (std::abs(c.imag()) > tol) return false;
    }
    return true;
  }

  double one_norm() const {
    double n = 0.0;
    for (const auto& [p, c] : terms_) n += std::abs(c);
    return n;
  }

  std::uint64_t support_mask() const {
    std::uint64_t m = 0;
    for (const auto& [p, c] : terms_) m |= p.support_mask();
    return m;
  }

  std::size_t span() const {
    std::size_t s = 0;
    for (const auto& [p, c] : terms_) s = std::max(s, p.span());
    return s;
  }

  std::set<std::size_t> support() const {
    std::set<std::size_t> out;
    for (auto m = support_mask(); m != 0; m &= m - 1) out.insert(static_cast<std::size_t>(std::countr_zero(m)));
    return out;
  }

  PauliSum adjoint() const {
    PauliSum out;
    for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
    return out;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) {
    for (const auto& [p, c] : b.terms_) a.add(c, p);
    return a;
  }

  friend PauliSum operator-(PauliSum a, const PauliSum& b) {
    for (const auto& [p, c] : b.terms_) a.add(-c, p);
    return a;
  }

  friend PauliSum operator*(cplx k, const PauliSum& a) {
    PauliSum out;
    for (const auto& [p, c] : a.terms_) out.add(k * c, p);
    return out;
  }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    PauliSum out;
    for (const auto& [pa, ca] : a.terms_) {
      for (const auto& [pb, cb] : b.terms_) out.add(ca * cb, pa * pb);
    }
    return out;
  }

  /// Largest coefficient difference over the union of strings.
  friend double max_coefficient_distance(const PauliSum& a, const PauliSum& b) {
    double d = 0.0;
    for (const auto& [p, c] : a.terms_) d = std::max(d, std::abs(c - b.coefficient(p)));
    for (const auto& [p, c] : b.terms_) d = std::max(d, std::abs(c - a.coefficient(p)));
    return d;
  }

  bool operator==(const PauliSum&) const = default;

  /// Text form, e.g. "0.5*X0*Y1 - (0,2)*Z0 + I". Coefficients use the
  /// shortest round-trip decimal form, so parse(str()) reproduces the sum.
  std::string str() const;
  static PauliSum parse(std::string_view text);

 private:
  Terms terms_;
};

inline PauliSum commutator(const PauliSum& a, const PauliSum& b) { return a * b - b * a; }

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string format_coefficient(cplx c) {
  if (c.imag() == 0.0) return format_double(c.real());
  return "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
}

class SumParser {
 public:
  explicit SumParser(std::string_view text) : text_(text) {}

  PauliSum run() {
    PauliSum out;
    skip_ws();
    double sign = 1.0;
    if (peek('+') || peek('-')) sign = take() == '-' ? -1.0 : 1.0;
    for (;;) {
      auto [coef, string] = term();
      out.add(sign * coef, string);
      skip_ws();
      if (pos_ == text_.size()) break;
      if (!(peek('+') || peek('-'))) fail("expected '+' or '-'");
      sign = take() == '-' ? -1.0 : 1.0;
    }
    return out;
  }

 private:
  std::pair<cplx, PauliString> term() {
    cplx coef{1.0};
    PauliString string;
    bool any = false;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) fail("expected a factor");
      const char ch = text_[pos_];
      if (ch == '(') {
        coef *= complex_literal();
      } else if (ch == 'i') {
        ++pos_;
        coef *= cplx{0.0, 1.0};
      } else if (ch == 'I') {
        ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) qubit();
      } else if (ch == 'X' || ch == 'Y' || ch == 'Z') {
        ++pos_;
        const Letter l = ch == 'X' ? Letter::X : (ch == 'Y' ? Letter::Y : Letter::Z);
        string = string * PauliString::single(l, qubit());
      } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        coef *= number();
      } else {
        fail(std::string("unexpected character '") + ch + "'");
      }
      any = true;
      skip_ws();
      if (!peek('*')) break;
      ++pos_;
    }
    if (!any) fail("empty term");
    return {coef, string};
  }

  cplx complex_literal() {
    ++pos_;  // '('
    const double re = signed_number();
    skip_ws();
    if (!peek(',')) fail("expected ',' in complex coefficient");
    ++pos_;
    const double im = signed_number();
    skip_ws();
    if (!peek(')')) fail("expected ')' in complex coefficient");
    ++pos_;
    return {re, im};
  }

  double signed_number() {
    skip_ws();
    double sign = 1.0;
    if (peek('+') || peek('-')) sign = take() == '-' ? -1.0 : 1.0;
    skip_ws();
    return sign * number();
  }

  double number() {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  std::size_t qubit() {
    std::size_t q = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), q);
    if (ec != std::errc{}) fail("expected a qubit ordinal");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return q;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }
  char take() { return text_[pos_++]; }

  [[noreturn]] void fail(const std::string& why) const {
    throw PreconditionError("operator text '" + std::string(text_) + "' at column " + std::to_string(pos_ + 1) +
                            ": " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string PauliSum::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [p, c] : terms_) {
    cplx shown = c;
    if (!out.empty()) {
      // Pull a leading minus out of purely real coefficients for readability.
      if (c.imag() == 0.0 && std::signbit(c.real())) {
        out += " - ";
        shown = -c;
      } else {
        out += " + ";
      }
    }
    if (shown == cplx{1.0}) {
      out += p.letters_str();
    } else {
      out += detail::format_coefficient(shown) + "*" + p.letters_str();
    }
  }
  return out;
}

inline PauliSum PauliSum::parse(std::string_view text) { return detail::SumParser(text).run(); }

// ---------------------------------------------------------------------------
// Kernels acting directly on amplitude arrays.

/// A Pauli string bound to a layout: per support qubit its stride and letter.
class BoundString {
 public:
  BoundString(const PauliString& p, const HilbertLayout& layout) : phase_power_(p.phase_power()) {
    require(p.span() <= layout.qubit_count(), "Pauli string " + p.str() + " addresses qubit outside layout [" +
                                                  layout.describe() + "]");
    for (auto [q, l] : p.letters()) factors_.push_back({layout.stride(layout.qubit_position(q)), l});
  }

  /// P|idx> = factor * |target>
  std::pair<std::size_t, cplx> map(std::size_t idx) const {
    std::size_t target = idx;
    int k = phase_power_;
    for (const auto& f : factors_) {
      const bool down = (idx / f.stride) % 2 == 1;
      switch (f.letter) {
        case Letter::X:
          target = down ? target - f.stride : target + f.stride;
          break;
        case Letter::Y:
          target = down ? target - f.stride : target + f.stride;
          k += down ? 3 : 1;
          break;
        case Letter::Z:
          k += down ? 2 : 0;
          break;
        case Letter::I:
          break;
      }
    }
    return {target, i_power(k)};
  }

 private:
  struct Factor {
    std::size_t stride;
    Letter letter;
  };
  int phase_power_;
  std::vector<Factor> factors_;
};

inline StateVector apply(const PauliString& p, const StateVector& state) {
  const BoundString bound(p, state.layout());
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    const auto [t, f] = bound.map(idx);
    out[static_cast<Eigen::Index>(t)] += f * in[static_cast<Eigen::Index>(idx)];
  }
  return {state.layout(), std::move(out)};
}

inline StateVector apply(const PauliSum& op, const StateVector& state) {
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (const auto& [p, c] : op.terms()) {
    const BoundString bound(p, state.layout());
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
      const auto [t, f] = bound.map(idx);
      out[static_cast<Eigen::Index>(t)] += c * f * in[static_cast<Eigen::Index>(idx)];
    }
  }
  return {state.layout(), std::move(out)};
}

/// <state|P|state> without materializing P|state>.
inline cplx matrix_element(const PauliString& p, const StateVector& bra, const StateVector& ket) {
  require(bra.layout() == ket.layout(), "matrix element across different layouts");
  const BoundString bound(p, ket.layout());
  const auto& a = bra.amplitudes();
  const auto& b = ket.amplitudes();
  cplx acc{0.0};
  for (std::size_t idx = 0; idx < ket.dim(); ++idx) {
    const auto [t, f] = bound.map(idx);
    acc += std::conj(a[static_cast<Eigen::Index>(t)]) * f * b[static_cast<Eigen::Index>(idx)];
  }
  return acc;
}

inline cplx matrix_element(const PauliSum& op, const StateVector& bra, const StateVector& ket) {
  cplx acc{0.0};
  for (const auto& [p, c] : op.terms()) acc += c * matrix_element(p, bra, ket);
  return acc;
}

inline void require_hermitian(const PauliSum& op, double tol) {
  require(op.is_hermitian(tol), "operator " + op.str() + " is not Hermitian");
}

/// <state|op|state> for Hermitian op; the imaginary part must vanish within tol.
inline double expectation(const PauliSum& op, const StateVector& state, double tol = kDefaultTolerance) {
  require_hermitian(op, tol);
  const cplx v = matrix_element(op, state, state);
  require(std::abs(v.imag()) <= std::max(tol, 1e-12) * std::max(1.0, op.one_norm()),
          "expectation has a non-negligible imaginary part");
  return v.real();
}

/// Tr(rho P) using one matrix entry per basis index.
inline cplx trace_with(const PauliString& p, const DensityMatrix& rho) {
  const BoundString bound(p, rho.layout());
  const auto& m = rho.matrix();
  cplx acc{0.0};
  for (std::size_t idx = 0; idx < rho.dim(); ++idx) {
    const auto [t, f] = bound.map(idx);
    acc += f * m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(t));
  }
  return acc;
}

inline double expectation_mixed(const PauliSum& op, const DensityMatrix& rho, double tol = kDefaultTolerance) {
  require_hermitian(op, tol);
  cplx acc{0.0};
  for (const auto& [p, c] : op.terms()) acc += c * trace_with(p, rho);
  require(std::abs(acc.imag()) <= std::max(tol, 1e-12) * std::max(1.0, op.one_norm()),
          "expectation has a non-negligible imaginary part");
  return acc.real();
}

/// Dense matrix of `op` on `layout`, built column by column from the kernel.
inline Eigen::MatrixXcd to_matrix(const PauliSum& op, const HilbertLayout& layout, const Limits& limits = {}) {
  if (layout.dim() > limits.dense_cap) {
    throw DimensionCapError("layout [" + layout.describe() + "] exceeds dense cap " + std::to_string(limits.dense_cap));
  }
  const auto n = static_cast<Eigen::Index>(layout.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [p, c] : op.terms()) {
    const BoundString bound(p, layout);
    for (std::size_t idx = 0; idx < layout.dim(); ++idx) {
      const auto [t, f] = bound.map(idx);
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(idx)) += c * f;
    }
  }
  return m;
}

}  // namespace qmsim

namespace qmsim {

/// k such that a == k * b within tol, if one exists. Both sums must be nonzero.
inline std::optional<cplx> proportionality_constant(const PauliSum& a, const PauliSum& b,
                                                    double tol = kDefaultTolerance) {
  if (a.empty() || b.empty()) return std::nullopt;
  // Anchor on b's largest coefficient to keep the ratio well conditioned.
  auto anchor = b.terms().begin();
  for (auto it = b.terms().begin(); it != b.terms().end(); ++it) {
    if (std::abs(it->second) > std::abs(anchor->second)) anchor = it;
  }
  const cplx k = a.coefficient(anchor->first) / anchor->second;
  if (max_coefficient_distance(a, k * b) > tol * std::max(1.0, std::abs(k))) return std::nullopt;
  return k;
}

}  // namespace qmsim
