// States, bases and operators of the qutrit state-sharing protocol.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qtss/core.hpp"

namespace qtss {

/// Largest GHZ channel the constructors will build.
inline constexpr std::size_t kMaxGhzQutrits = 12;

constexpr int mod3(long long v) noexcept { return static_cast<int>(((v % 3) + 3) % 3); }

/// Dealer's generalized Bell result |Ψ_nm>: n is the phase index, m the shift.
struct BellOutcome {
  int n = 0;
  int m = 0;

  constexpr BellOutcome() = default;
  constexpr BellOutcome(long long phase, long long shift) : n(mod3(phase)), m(mod3(shift)) {}

  /// Position in bell_family(): 3n + m.
  constexpr std::size_t index() const noexcept { return static_cast<std::size_t>(3 * n + m); }
  static constexpr BellOutcome from_index(std::size_t k) noexcept {
    return BellOutcome(static_cast<long long>(k / 3), static_cast<long long>(k % 3));
  }

  friend constexpr bool operator==(BellOutcome, BellOutcome) = default;
};

/// Single-qutrit ξ-basis outcome.
struct XiOutcome {
  int l = 0;

  constexpr XiOutcome() = default;
  constexpr explicit XiOutcome(long long v) : l(mod3(v)) {}

  friend constexpr bool operator==(XiOutcome, XiOutcome) = default;
};

/// Helper outcomes summed mod 3.
struct HelperSum {
  int L = 0;

  constexpr HelperSum() = default;
  constexpr explicit HelperSum(long long v) : L(mod3(v)) {}

  template <typename Range>
  static constexpr HelperSum of(const Range& outcomes) {
    long long total = 0;
    for (const XiOutcome& o : outcomes) total += o.l;
    return HelperSum(total);
  }

  friend constexpr bool operator==(HelperSum, HelperSum) = default;
};

/// (|0...0> + |1...1> + |2...2>)/√3 on k qutrits.
inline PureState ghz_state(std::size_t k) {
  if (k < 1 || k > kMaxGhzQutrits) {
    throw Error(ErrorCode::SizeOutOfRange, "GHZ size must be in 1.." + std::to_string(kMaxGhzQutrits));
  }
  std::vector<Complex> amps(pow3(k));
  const std::size_t ones = (pow3(k) - 1) / 2;  // index of |1...1>
  const double a = 1.0 / std::numbers::sqrt3;
  amps[0] = a;
  amps[ones] = a;
  amps[2 * ones] = a;
  return PureState::from_unnormalized(std::move(amps), k);
}

/// Σ_j ω^{jn} |j>|j+m mod 3> / √3.
inline PureState bell_state(BellOutcome o) {
  std::vector<Complex> amps(9);
  const double a = 1.0 / std::numbers::sqrt3;
  for (int j = 0; j < 3; ++j) {
    amps[static_cast<std::size_t>(3 * j + mod3(j + o.m))] = a * omega(static_cast<long long>(j) * o.n);
  }
  return PureState::from_unnormalized(std::move(amps), 2);
}

/// (1/√3) Σ_k ω^{tk} |k>.
inline PureState xi_state(XiOutcome t) {
  std::vector<Complex> amps(3);
  const double a = 1.0 / std::numbers::sqrt3;
  for (int k = 0; k < 3; ++k) amps[static_cast<std::size_t>(k)] = a * omega(static_cast<long long>(t.l) * k);
  return PureState::from_unnormalized(std::move(amps), 1);
}

/// Nine Bell states ordered by BellOutcome::index().
inline Family bell_family() {
  Family f;
  for (std::size_t k = 0; k < 9; ++k) f.push_back(bell_state(BellOutcome::from_index(k)));
  return f;
}

inline Family xi_family() {
  return {xi_state(XiOutcome(0)), xi_state(XiOutcome(1)), xi_state(XiOutcome(2))};
}

/// X^a, X|j> = |j+1 mod 3>.
inline Unitary3 pauli_x(long long a) {
  Unitary3::Matrix m{};
  const int s = mod3(a);
  for (int j = 0; j < 3; ++j) m[static_cast<std::size_t>(mod3(j + s))][static_cast<std::size_t>(j)] = 1.0;
  return Unitary3(m);
}

/// Z^b = diag(1, ω^b, ω^{2b}).
inline Unitary3 pauli_z(long long b) {
  Unitary3::Matrix m{};
  for (int j = 0; j < 3; ++j) m[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = omega(b * j);
  return Unitary3(m);
}

/// Correction for the designated agent's qutrit.
///
/// After the Bell projection and the helpers' ξ measurements the designated
/// qutrit holds Σ_j ω^{-j(n+L)} c_j |j+m>. Shifting back by X^{-m} and
/// undoing the phase with Z^{n+L} restores Σ_j c_j |j>.
inline Unitary3 recovery_operator(BellOutcome o, HelperSum h) {
  return pauli_z(mod3(o.n + h.L)) * pauli_x(mod3(3 - o.m));
}

}  // namespace qtss
