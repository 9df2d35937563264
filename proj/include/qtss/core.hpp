// Dense state-vector engine for registers of qutrits.
//
// Register convention: qutrits are labelled 1..n and label 1 is the most
// significant base-3 digit of the amplitude index, so |d1 d2 ... dn> sits at
// index d1*3^(n-1) + ... + dn.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtss/error.hpp"
#include "qtss/rng.hpp"

namespace qtss {

using Complex = std::complex<double>;

inline constexpr std::size_t kQutritDim = 3;
inline constexpr std::size_t kMaxQutrits = 16;

/// Accepted deviation of a caller-supplied norm from 1 before renormalizing.
inline constexpr double kInputNormTolerance = 1e-6;
/// Orthonormality tolerance for measurement families and unitaries.
inline constexpr double kBasisTolerance = 1e-9;
/// Branches with Born weight at or below this are treated as impossible.
inline constexpr double kZeroProbability = 1e-13;

constexpr std::size_t pow3(std::size_t k) noexcept {
  std::size_t r = 1;
  while (k-- > 0) r *= 3;
  return r;
}

/// Base-3 digit of `index` belonging to qutrit `label` in an n-qutrit register.
constexpr std::size_t digit_of(std::size_t index, std::size_t label, std::size_t n) noexcept {
  return (index / pow3(n - label)) % 3;
}

/// ω^k with ω = e^{2πi/3}; k is reduced mod 3 so the three values are exact-ish
/// and identical wherever they are used.
inline Complex omega(long long k) {
  static const std::array<Complex, 3> table{
      Complex{1.0, 0.0},
      Complex{-0.5, std::numbers::sqrt3 / 2.0},
      Complex{-0.5, -std::numbers::sqrt3 / 2.0},
  };
  return table[static_cast<std::size_t>(((k % 3) + 3) % 3)];
}

namespace detail {

inline void require_finite(std::span<const Complex> amps) {
  for (const auto& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorCode::NonFiniteAmplitude, "amplitude is NaN or infinite");
    }
  }
}

inline double norm_squared(std::span<const Complex> amps) {
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  return total;
}

}  // namespace detail

/// Normalized pure state of `num_qutrits` qutrits.
///
/// A zero-qutrit state (a single amplitude of modulus 1) only arises as the
/// remainder after measuring every qutrit of a register.
class PureState {
 public:
  /// Renormalizes any non-zero finite vector; used for internally produced
  /// projections whose weight lives elsewhere.
  static PureState from_unnormalized(std::vector<Complex> amps, std::size_t num_qutrits) {
    if (num_qutrits > kMaxQutrits) {
      throw Error(ErrorCode::SizeOutOfRange, "register too large: " + std::to_string(num_qutrits));
    }
    if (amps.size() != pow3(num_qutrits)) {
      throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(pow3(num_qutrits)) +
                                                 " amplitudes, got " + std::to_string(amps.size()));
    }
    detail::require_finite(amps);
    const double n2 = detail::norm_squared(amps);
    if (!(n2 > 0.0)) throw Error(ErrorCode::NotNormalized, "zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps) a *= inv;
    return PureState(num_qutrits, std::move(amps));
  }

  /// Computational basis state |index> of an n-qutrit register.
  static PureState basis(std::size_t num_qutrits, std::size_t index) {
    if (num_qutrits > kMaxQutrits) throw Error(ErrorCode::SizeOutOfRange, "register too large");
    if (index >= pow3(num_qutrits)) throw Error(ErrorCode::LengthMismatch, "basis index out of range");
    std::vector<Complex> amps(pow3(num_qutrits));
    amps[index] = 1.0;
    return PureState(num_qutrits, std::move(amps));
  }

  std::size_t num_qutrits() const noexcept { return num_qutrits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  double norm_squared() const { return detail::norm_squared(amps_); }

  friend bool operator==(const PureState&, const PureState&) = default;

 private:
  PureState(std::size_t n, std::vector<Complex> amps) : num_qutrits_(n), amps_(std::move(amps)) {}

  std::size_t num_qutrits_ = 0;
  std::vector<Complex> amps_;
};

/// Checked constructor for caller-supplied amplitudes. Rejects vectors whose
/// norm is off by more than `tolerance`, then renormalizes exactly.
inline PureState make_state(std::vector<Complex> amps, std::size_t num_qutrits,
                            double tolerance = kInputNormTolerance) {
  if (num_qutrits == 0 || num_qutrits > kMaxQutrits) {
    throw Error(ErrorCode::SizeOutOfRange, "num_qutrits must be in 1.." + std::to_string(kMaxQutrits));
  }
  if (amps.size() != pow3(num_qutrits)) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(pow3(num_qutrits)) +
                                               " amplitudes, got " + std::to_string(amps.size()));
  }
  detail::require_finite(amps);
  const double norm = std::sqrt(detail::norm_squared(amps));
  if (std::abs(norm - 1.0) > tolerance) {
    throw Error(ErrorCode::NotNormalized, "norm " + std::to_string(norm) + " deviates from 1");
  }
  return PureState::from_unnormalized(std::move(amps), num_qutrits);
}

/// Haar-random single-qutrit state: three complex Gaussians, normalized.
inline PureState random_qutrit(Rng& rng) {
  std::vector<Complex> amps(3);
  for (auto& a : amps) a = Complex{rng.gaussian(), rng.gaussian()};
  return PureState::from_unnormalized(std::move(amps), 1);
}

/// a ⊗ b with a's qutrits first.
inline PureState tensor(const PureState& a, const PureState& b) {
  const std::size_t n = a.num_qutrits() + b.num_qutrits();
  if (n > kMaxQutrits) throw Error(ErrorCode::SizeOutOfRange, "tensor product too large");
  std::vector<Complex> out;
  out.reserve(a.dimension() * b.dimension());
  for (const auto& x : a.amplitudes()) {
    for (const auto& y : b.amplitudes()) out.push_back(x * y);
  }
  return PureState::from_unnormalized(std::move(out), n);
}

/// Inserts single-qutrit state `q` so that it becomes qutrit `label` of the result.
inline PureState insert_qutrit(const PureState& s, std::size_t label, const PureState& q) {
  const std::size_t n = s.num_qutrits() + 1;
  if (q.num_qutrits() != 1) throw Error(ErrorCode::DimensionMismatch, "insert_qutrit expects one qutrit");
  if (label < 1 || label > n) throw Error(ErrorCode::LabelOutOfRange, "insert position out of range");
  if (n > kMaxQutrits) throw Error(ErrorCode::SizeOutOfRange, "register too large");
  const std::size_t low_span = pow3(n - label);
  std::vector<Complex> out(pow3(n));
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::size_t low = r % low_span;
    const std::size_t d = (r / low_span) % 3;
    const std::size_t high = r / (3 * low_span);
    out[r] = s[high * low_span + low] * q[d];
  }
  return PureState::from_unnormalized(std::move(out), n);
}

/// Single-qutrit unitary. Construction verifies U·U† = I within kBasisTolerance.
class Unitary3 {
 public:
  using Matrix = std::array<std::array<Complex, 3>, 3>;

  explicit Unitary3(const Matrix& m) : m_(m) {
    for (const auto& row : m_) detail::require_finite(row);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        Complex acc{};
        for (std::size_t k = 0; k < 3; ++k) acc += m_[r][k] * std::conj(m_[c][k]);
        const Complex expected = (r == c) ? 1.0 : 0.0;
        if (std::abs(acc - expected) > kBasisTolerance) {
          throw Error(ErrorCode::NotUnitary, "matrix is not unitary");
        }
      }
    }
  }

  static Unitary3 identity() {
    return Unitary3(Matrix{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}});
  }

  const Complex& operator()(std::size_t row, std::size_t col) const { return m_[row][col]; }
  const Matrix& matrix() const noexcept { return m_; }

  Unitary3 adjoint() const {
    Matrix out{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) out[r][c] = std::conj(m_[c][r]);
    return Unitary3(out);
  }

  friend Unitary3 operator*(const Unitary3& a, const Unitary3& b) {
    Matrix out{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < 3; ++k) out[r][c] += a.m_[r][k] * b.m_[k][c];
    return Unitary3(out);
  }

 private:
  Matrix m_;
};

/// True when a = e^{iφ} b for some φ, entrywise within `tol`.
inline bool equal_up_to_phase(const Unitary3& a, const Unitary3& b, double tol = 1e-12) {
  // Phase from the largest entry of b.
  std::size_t br = 0, bc = 0;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      if (std::abs(b(r, c)) > std::abs(b(br, bc))) br = r, bc = c;
  if (std::abs(a(br, bc)) < 1e-15) return false;
  const Complex phase = a(br, bc) / b(br, bc);
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      if (std::abs(a(r, c) - phase * b(r, c)) > tol) return false;
  return true;
}

/// Applies `u` to qutrit `target` (1-based label).
inline PureState apply_single(const Unitary3& u, std::size_t target, const PureState& s) {
  const std::size_t n = s.num_qutrits();
  if (target < 1 || target > n) {
    throw Error(ErrorCode::TargetOutOfRange, "target " + std::to_string(target) + " not in 1.." +
                                                 std::to_string(n));
  }
  const std::size_t stride = pow3(n - target);
  std::vector<Complex> out(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t base = 0; base < out.size(); ++base) {
    if (digit_of(base, target, n) != 0) continue;
    const Complex v0 = s[base], v1 = s[base + stride], v2 = s[base + 2 * stride];
    for (std::size_t r = 0; r < 3; ++r) {
      out[base + r * stride] = u(r, 0) * v0 + u(r, 1) * v1 + u(r, 2) * v2;
    }
  }
  return PureState::from_unnormalized(std::move(out), n);
}

/// <a|b>.
inline Complex inner(const PureState& a, const PureState& b) {
  if (a.num_qutrits() != b.num_qutrits()) {
    throw Error(ErrorCode::DimensionMismatch, "states act on different register sizes");
  }
  Complex acc{};
  for (std::size_t i = 0; i < a.dimension(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

/// |<a|b>|², clamped to [0, 1].
inline double fidelity(const PureState& a, const PureState& b) {
  return std::clamp(std::norm(inner(a, b)), 0.0, 1.0);
}

/// Orthonormal family of states on a subsystem, indexed by outcome.
using Family = std::vector<PureState>;

/// Computational basis of a k-qutrit subsystem.
inline Family computational_family(std::size_t k = 1) {
  Family f;
  f.reserve(pow3(k));
  for (std::size_t i = 0; i < pow3(k); ++i) f.push_back(PureState::basis(k, i));
  return f;
}

namespace detail {

// Splits every register index into (subsystem index, remainder index). The
// subsystem index reads `targets` in the given order, most significant first;
// the remainder reads the other labels in ascending order.
struct RegisterSplit {
  std::size_t sub_dim = 1;
  std::size_t rest_dim = 1;
  std::vector<std::size_t> rest_labels;
  std::vector<std::size_t> index;  // index[sub * rest_dim + rest] = register index
};

inline RegisterSplit split_register(std::size_t n, std::span<const std::size_t> targets,
                                    ErrorCode empty_error) {
  if (targets.empty()) throw Error(empty_error, "no qutrits selected");
  std::vector<bool> used(n + 1, false);
  for (auto t : targets) {
    if (t < 1 || t > n) throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(t) + " out of range");
    if (used[t]) throw Error(ErrorCode::TargetsOverlap, "label " + std::to_string(t) + " repeated");
    used[t] = true;
  }
  RegisterSplit split;
  for (std::size_t l = 1; l <= n; ++l)
    if (!used[l]) split.rest_labels.push_back(l);
  split.sub_dim = pow3(targets.size());
  split.rest_dim = pow3(split.rest_labels.size());
  split.index.resize(pow3(n));
  for (std::size_t i = 0; i < split.index.size(); ++i) {
    std::size_t sub = 0, rest = 0;
    for (auto t : targets) sub = sub * 3 + digit_of(i, t, n);
    for (auto l : split.rest_labels) rest = rest * 3 + digit_of(i, l, n);
    split.index[sub * split.rest_dim + rest] = i;
  }
  return split;
}

inline void require_orthonormal(std::span<const PureState> family, std::size_t width) {
  if (family.size() != pow3(width)) {
    throw Error(ErrorCode::NotOrthonormal, "family has " + std::to_string(family.size()) +
                                               " members; a complete family needs " +
                                               std::to_string(pow3(width)));
  }
  for (const auto& f : family) {
    if (f.num_qutrits() != width) throw Error(ErrorCode::NotOrthonormal, "family member has wrong width");
  }
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a; b < family.size(); ++b) {
      const Complex g = inner(family[a], family[b]);
      const double expected = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - expected) > kBasisTolerance) {
        throw Error(ErrorCode::NotOrthonormal, "Gram matrix deviates from identity");
      }
    }
  }
}

// Unnormalized remainder <f_k|_targets |s> for every family member.
struct Projections {
  std::vector<std::vector<Complex>> branches;
  std::vector<double> weights;
  std::size_t rest_qutrits = 0;
};

inline Projections project_all(const PureState& s, std::span<const std::size_t> targets,
                               std::span<const PureState> family) {
  const auto split = split_register(s.num_qutrits(), targets, ErrorCode::LabelOutOfRange);
  require_orthonormal(family, targets.size());
  Projections p;
  p.rest_qutrits = split.rest_labels.size();
  p.branches.assign(family.size(), std::vector<Complex>(split.rest_dim));
  p.weights.assign(family.size(), 0.0);
  for (std::size_t k = 0; k < family.size(); ++k) {
    auto& branch = p.branches[k];
    for (std::size_t t = 0; t < split.sub_dim; ++t) {
      const Complex c = std::conj(family[k][t]);
      if (c == Complex{}) continue;
      const std::size_t* row = &split.index[t * split.rest_dim];
      for (std::size_t r = 0; r < split.rest_dim; ++r) branch[r] += c * s[row[r]];
    }
    p.weights[k] = norm_squared(branch);
  }
  return p;
}

}  // namespace detail

/// Born weights of each family member measured on `targets`.
inline std::vector<double> born_distribution(const PureState& s, std::span<const std::size_t> targets,
                                             std::span<const PureState> family) {
  return detail::project_all(s, targets, family).weights;
}

/// Outcome of a projective measurement. `collapsed` is the remainder register
/// (measured qutrits removed, remaining labels kept in ascending order).
struct MeasurementRecord {
  std::size_t outcome_index = 0;
  double probability = 0.0;
  PureState collapsed = PureState::basis(0, 0);
};

/// Inverse-CDF sample over ascending index; impossible outcomes are skipped.
inline std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last = probabilities.size();
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= kZeroProbability) continue;
    last = k;
    cumulative += probabilities[k];
    if (u < cumulative) return k;
  }
  if (last == probabilities.size()) {
    throw Error(ErrorCode::ZeroProbabilityBranchSampled, "distribution has no positive entry");
  }
  return last;
}

/// Post-selects family member `outcome` on `targets`.
inline MeasurementRecord project_subsystem(const PureState& s, std::span<const std::size_t> targets,
                                           std::span<const PureState> family, std::size_t outcome) {
  auto p = detail::project_all(s, targets, family);
  if (outcome >= p.weights.size()) throw Error(ErrorCode::LabelOutOfRange, "outcome index out of range");
  if (p.weights[outcome] <= kZeroProbability) {
    throw Error(ErrorCode::ZeroProbabilityBranchSampled,
                "outcome " + std::to_string(outcome) + " has zero probability");
  }
  return MeasurementRecord{outcome, p.weights[outcome],
                           PureState::from_unnormalized(std::move(p.branches[outcome]), p.rest_qutrits)};
}

/// Projective measurement of `targets` in `family`, sampled from `rng`.
inline MeasurementRecord measure_subsystem(const PureState& s, std::span<const std::size_t> targets,
                                           std::span<const PureState> family, Rng& rng) {
  auto p = detail::project_all(s, targets, family);
  const std::size_t k = sample_index(p.weights, rng);
  return MeasurementRecord{k, p.weights[k],
                           PureState::from_unnormalized(std::move(p.branches[k]), p.rest_qutrits)};
}

/// Density matrix on `num_qutrits` qutrits, row-major.
struct DensityMatrix {
  std::size_t num_qutrits = 0;
  std::vector<Complex> entries;

  std::size_t dimension() const noexcept { return pow3(num_qutrits); }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries[r * dimension() + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return entries[r * dimension() + c]; }

  Complex trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dimension(); ++i) t += (*this)(i, i);
    return t;
  }

  bool is_hermitian(double tol = kBasisTolerance) const {
    for (std::size_t r = 0; r < dimension(); ++r)
      for (std::size_t c = r; c < dimension(); ++c)
        if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
  }

  /// Largest entrywise deviation from `other`.
  double distance(const DensityMatrix& other) const {
    if (other.num_qutrits != num_qutrits) throw Error(ErrorCode::DimensionMismatch, "density sizes differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) worst = std::max(worst, std::abs(entries[i] - other.entries[i]));
    return worst;
  }
};

/// |s><s|.
inline DensityMatrix projector(const PureState& s) {
  DensityMatrix rho{s.num_qutrits(), std::vector<Complex>(s.dimension() * s.dimension())};
  for (std::size_t r = 0; r < s.dimension(); ++r)
    for (std::size_t c = 0; c < s.dimension(); ++c) rho(r, c) = s[r] * std::conj(s[c]);
  return rho;
}

/// Partial trace keeping `keep` (in the given order).
inline DensityMatrix reduced_density(const PureState& s, std::span<const std::size_t> keep) {
  const auto split = detail::split_register(s.num_qutrits(), keep, ErrorCode::EmptyKeepSet);
  DensityMatrix rho{keep.size(), std::vector<Complex>(split.sub_dim * split.sub_dim)};
  for (std::size_t a = 0; a < split.sub_dim; ++a) {
    for (std::size_t b = a; b < split.sub_dim; ++b) {
      Complex acc{};
      for (std::size_t r = 0; r < split.rest_dim; ++r) {
        acc += s[split.index[a * split.rest_dim + r]] * std::conj(s[split.index[b * split.rest_dim + r]]);
      }
      rho(a, b) = acc;
      rho(b, a) = std::conj(acc);
    }
  }
  return rho;
}

}  // namespace qtss
