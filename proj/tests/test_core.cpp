#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracle.hpp"
#include "qtss/core.hpp"
#include "qtss/protocol_math.hpp"
#include "test_util.hpp"

namespace qtss {
namespace {

using test_util::code_of;

TEST(MakeState, BasisVector) {
  const auto s = make_state({1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(s.num_qutrits(), 1u);
  EXPECT_EQ(s[0], Complex(1.0));
  EXPECT_EQ(s[1], Complex(0.0));
}

TEST(MakeState, UniformSuperpositionIsXiZero) {
  const double a = 1.0 / std::numbers::sqrt3;
  const auto s = make_state({a, a, a}, 1);
  EXPECT_NEAR(fidelity(s, xi_state(XiOutcome(0))), 1.0, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(s[i] - xi_state(XiOutcome(0))[i]), 0.0, 1e-15);
}

TEST(MakeState, Errors) {
  EXPECT_EQ(code_of([] { make_state({0.6, Complex(0, 0.8), 0.1}, 1); }), ErrorCode::NotNormalized);
  EXPECT_EQ(code_of([] { make_state({1.0, 0.0}, 1); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { make_state({std::nan(""), 0.0, 0.0}, 1); }), ErrorCode::NonFiniteAmplitude);
  EXPECT_EQ(code_of([] { make_state({}, 0); }), ErrorCode::SizeOutOfRange);
}

TEST(MakeState, RenormalizesWithinTolerance) {
  const auto s = make_state({1.0 + 5e-7, 0.0, 0.0}, 1);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
}

TEST(Tensor, BasisStates) {
  const auto s = tensor(PureState::basis(1, 0), PureState::basis(1, 0));
  EXPECT_EQ(s.num_qutrits(), 2u);
  EXPECT_EQ(s[0], Complex(1.0));
}

TEST(Tensor, SecretTimesGhzLayout) {
  Rng rng(11);
  const auto p = random_qutrit(rng);
  const auto phi = tensor(p, ghz_state(3));
  ASSERT_EQ(phi.num_qutrits(), 4u);
  // |k>_1 |i i i>_234 sits at 27k + 13i with amplitude c_k/√3.
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(std::abs(phi[27 * k + 13 * i] - p[k] / std::numbers::sqrt3), 0.0, 1e-15);
    }
  }
  EXPECT_NEAR(phi.norm_squared(), 1.0, 1e-12);
}

TEST(Tensor, NormIsMultiplicative) {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(tensor(random_qutrit(rng), tensor(random_qutrit(rng), random_qutrit(rng))).norm_squared(), 1.0,
                1e-12);
  }
}

TEST(ApplySingle, ShiftWrapsAround) {
  const auto out = apply_single(pauli_x(1), 1, PureState::basis(1, 2));
  EXPECT_NEAR(std::abs(out[0] - 1.0), 0.0, 1e-15);
}

TEST(ApplySingle, ClockTakesXiZeroToXiOne) {
  const auto out = apply_single(pauli_z(1), 1, xi_state(XiOutcome(0)));
  const auto xi1 = xi_state(XiOutcome(1));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(out[i] - xi1[i]), 0.0, 1e-15);
}

TEST(ApplySingle, IdentityLeavesStateAlone) {
  Rng rng(3);
  const auto s = tensor(random_qutrit(rng), random_qutrit(rng));
  for (std::size_t t = 1; t <= 2; ++t) {
    const auto out = apply_single(Unitary3::identity(), t, s);
    for (std::size_t i = 0; i < s.dimension(); ++i) EXPECT_NEAR(std::abs(out[i] - s[i]), 0.0, 1e-15);
  }
}

TEST(ApplySingle, ActsOnTheRightDigit) {
  // X on label 2 of |0 0 1> gives |0 1 1>.
  const auto out = apply_single(pauli_x(1), 2, PureState::basis(3, 1));
  EXPECT_NEAR(std::abs(out[4]), 1.0, 1e-15);
}

TEST(ApplySingle, TargetOutOfRange) {
  EXPECT_EQ(code_of([] { apply_single(pauli_x(1), 0, PureState::basis(2, 0)); }), ErrorCode::TargetOutOfRange);
  EXPECT_EQ(code_of([] { apply_single(pauli_x(1), 3, PureState::basis(2, 0)); }), ErrorCode::TargetOutOfRange);
}

TEST(ApplySingle, PreservesInnerProducts) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = oracle::random_unitary(rng);
    const auto a = tensor(random_qutrit(rng), tensor(random_qutrit(rng), random_qutrit(rng)));
    const auto b = tensor(random_qutrit(rng), tensor(random_qutrit(rng), random_qutrit(rng)));
    const std::size_t target = 1 + static_cast<std::size_t>(rng.below(3));
    const auto ua = apply_single(u, target, a);
    const auto ub = apply_single(u, target, b);
    EXPECT_NEAR(std::abs(inner(ua, ub) - inner(a, b)), 0.0, 1e-12);
    EXPECT_NEAR(ua.norm_squared(), 1.0, 1e-12);
  }
}

TEST(Unitary3, RejectsNonUnitary) {
  Unitary3::Matrix m{};
  m[0][0] = 1.0;
  m[1][1] = 1.0;
  EXPECT_EQ(code_of([&] { Unitary3{m}; }), ErrorCode::NotUnitary);
}

TEST(Fidelity, Examples) {
  Rng rng(1);
  const auto p = random_qutrit(rng);
  EXPECT_NEAR(fidelity(p, p), 1.0, 1e-15);
  EXPECT_EQ(fidelity(PureState::basis(1, 0), PureState::basis(1, 1)), 0.0);
  EXPECT_NEAR(fidelity(xi_state(XiOutcome(0)), PureState::basis(1, 0)), 1.0 / 3.0, 1e-15);
}

TEST(Fidelity, SymmetricAndPhaseInvariant) {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_qutrit(rng);
    const auto b = random_qutrit(rng);
    const Complex ph = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
    const auto b_phased = make_state({ph * b[0], ph * b[1], ph * b[2]}, 1);
    EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-15);
    EXPECT_NEAR(fidelity(a, b), fidelity(a, b_phased), 1e-14);
    EXPECT_GE(fidelity(a, b), 0.0);
    EXPECT_LE(fidelity(a, b), 1.0);
  }
}

TEST(Fidelity, DimensionMismatch) {
  EXPECT_EQ(code_of([] { fidelity(PureState::basis(1, 0), PureState::basis(2, 0)); }), ErrorCode::DimensionMismatch);
}

TEST(InsertQutrit, MatchesTensorOrdering) {
  Rng rng(4);
  const auto a = random_qutrit(rng), b = random_qutrit(rng), q = random_qutrit(rng);
  const auto middle = insert_qutrit(tensor(a, b), 2, q);
  const auto expected = tensor(a, tensor(q, b));
  for (std::size_t i = 0; i < 27; ++i) EXPECT_NEAR(std::abs(middle[i] - expected[i]), 0.0, 1e-15);
  EXPECT_EQ(code_of([&] { insert_qutrit(a, 3, q); }), ErrorCode::LabelOutOfRange);
}

TEST(BornDistribution, ComputationalOnGhz) {
  const std::array<std::size_t, 1> t{2};
  const auto p = born_distribution(ghz_state(3), t, computational_family());
  for (double x : p) EXPECT_NEAR(x, 1.0 / 3.0, 1e-12);
}

TEST(BornDistribution, AllZeroState) {
  const std::array<std::size_t, 2> t{1, 2};
  const auto p = born_distribution(PureState::basis(3, 0), t, computational_family(2));
  ASSERT_EQ(p.size(), 9u);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  for (std::size_t k = 1; k < 9; ++k) EXPECT_EQ(p[k], 0.0);
}

TEST(BornDistribution, SumsToOneForRandomStatesAndFamilies) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = tensor(random_qutrit(rng), tensor(random_qutrit(rng), ghz_state(2)));
    const auto u = oracle::random_unitary(rng);
    Family fam;
    for (std::size_t c = 0; c < 3; ++c) fam.push_back(make_state({u(0, c), u(1, c), u(2, c)}, 1));
    const std::array<std::size_t, 1> t{1 + static_cast<std::size_t>(rng.below(4))};
    double total = 0;
    for (double x : born_distribution(s, t, fam)) total += x;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(BornDistribution, Errors) {
  const auto s = PureState::basis(2, 0);
  const std::array<std::size_t, 1> one{1};
  Family dup{PureState::basis(1, 0), PureState::basis(1, 0), PureState::basis(1, 1)};
  EXPECT_EQ(code_of([&] { born_distribution(s, one, dup); }), ErrorCode::NotOrthonormal);
  Family partial{PureState::basis(1, 0), PureState::basis(1, 1)};
  EXPECT_EQ(code_of([&] { born_distribution(s, one, partial); }), ErrorCode::NotOrthonormal);
  const std::array<std::size_t, 2> overlap{1, 1};
  EXPECT_EQ(code_of([&] { born_distribution(s, overlap, computational_family(2)); }), ErrorCode::TargetsOverlap);
  const std::array<std::size_t, 1> bad{3};
  EXPECT_EQ(code_of([&] { born_distribution(s, bad, computational_family()); }), ErrorCode::LabelOutOfRange);
}

TEST(MeasureSubsystem, CollapsedKeepsRemainingLabelsInOrder) {
  // |0>|1>|2>, measure label 2: remainder is |0 2>.
  const auto s = PureState::basis(3, 0 * 9 + 1 * 3 + 2);
  Rng rng(1);
  const std::array<std::size_t, 1> t{2};
  const auto rec = measure_subsystem(s, t, computational_family(), rng);
  EXPECT_EQ(rec.outcome_index, 1u);
  EXPECT_NEAR(rec.probability, 1.0, 1e-15);
  ASSERT_EQ(rec.collapsed.num_qutrits(), 2u);
  EXPECT_NEAR(std::abs(rec.collapsed[2]), 1.0, 1e-15);
}

TEST(MeasureSubsystem, RepeatedMeasurementAgrees) {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = tensor(random_qutrit(rng), ghz_state(3));
    const std::array<std::size_t, 1> t{3};
    const auto first = measure_subsystem(s, t, xi_family(), rng);
    // Re-prepare the measured qutrit in its outcome state and measure again.
    const auto again = insert_qutrit(first.collapsed, 3, xi_family()[first.outcome_index]);
    const auto p = born_distribution(again, t, xi_family());
    EXPECT_NEAR(p[first.outcome_index], 1.0, 1e-12);
  }
}

TEST(MeasureSubsystem, EmpiricalMatchesBorn) {
  Rng prep(8);
  const auto s = tensor(random_qutrit(prep), random_qutrit(prep));
  const std::array<std::size_t, 2> t{1, 2};
  const auto fam = bell_family();
  const auto p = born_distribution(s, t, fam);
  std::vector<double> counts(9, 0.0);
  Rng rng(99);
  constexpr int kTrials = 100000;
  for (int i = 0; i < kTrials; ++i) counts[measure_subsystem(s, t, fam, rng).outcome_index] += 1.0;
  for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(counts[k] / kTrials, p[k], 0.01);
}

TEST(MeasureSubsystem, DeterministicForSeed) {
  const auto s = tensor(xi_state(XiOutcome(1)), ghz_state(2));
  const std::array<std::size_t, 1> t{2};
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const auto ra = measure_subsystem(s, t, xi_family(), a);
    const auto rb = measure_subsystem(s, t, xi_family(), b);
    EXPECT_EQ(ra.outcome_index, rb.outcome_index);
    EXPECT_EQ(ra.collapsed, rb.collapsed);
  }
}

TEST(MeasureSubsystem, ForcedZeroProbabilityBranchIsRejected) {
  const std::array<std::size_t, 1> t{1};
  EXPECT_EQ(code_of([&] { project_subsystem(PureState::basis(1, 0), t, computational_family(), 2); }),
            ErrorCode::ZeroProbabilityBranchSampled);
}

TEST(SampleIndex, SkipsImpossibleOutcomes) {
  const std::array<double, 4> p{0.0, 0.5, 0.0, 0.5};
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto k = sample_index(p, rng);
    EXPECT_TRUE(k == 1 || k == 3);
  }
}

TEST(ReducedDensity, GhzMarginalIsMaximallyMixed) {
  const std::array<std::size_t, 1> keep{2};
  const auto rho = reduced_density(ghz_state(3), keep);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(std::abs(rho(r, c) - (r == c ? 1.0 / 3.0 : 0.0)), 0.0, 1e-15);
}

TEST(ReducedDensity, PureSingleQutritIsProjector) {
  Rng rng(6);
  const auto p = random_qutrit(rng);
  const std::array<std::size_t, 1> keep{1};
  EXPECT_LT(reduced_density(p, keep).distance(projector(p)), 1e-15);
}

TEST(ReducedDensity, KeepingEverythingGivesProjector) {
  Rng rng(61);
  const auto s = tensor(random_qutrit(rng), tensor(ghz_state(2), random_qutrit(rng)));
  const std::array<std::size_t, 4> keep{1, 2, 3, 4};
  EXPECT_LT(reduced_density(s, keep).distance(projector(s)), 1e-12);
}

TEST(ReducedDensity, PhysicalOnRandomStates) {
  Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = tensor(random_qutrit(rng), ghz_state(3));
    s = apply_single(oracle::random_unitary(rng), 2, s);
    const std::array<std::size_t, 2> keep{3, 1};
    const auto rho = reduced_density(s, keep);
    EXPECT_TRUE(rho.is_hermitian());
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<Complex> x(9);
      for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
      Complex q{};
      for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 9; ++c) q += std::conj(x[r]) * rho(r, c) * x[c];
      EXPECT_GE(q.real(), -1e-9);
    }
  }
}

TEST(ReducedDensity, Errors) {
  const std::vector<std::size_t> none;
  EXPECT_EQ(code_of([&] { reduced_density(ghz_state(2), none); }), ErrorCode::EmptyKeepSet);
  const std::array<std::size_t, 1> bad{5};
  EXPECT_EQ(code_of([&] { reduced_density(ghz_state(2), bad); }), ErrorCode::LabelOutOfRange);
}

TEST(Rng, SubstreamsDiffer) {
  auto a = Rng::substream(1, 0), b = Rng::substream(1, 1), c = Rng::substream(2, 0);
  const auto x = a.next(), y = b.next(), z = c.next();
  EXPECT_NE(x, y);
  EXPECT_NE(x, z);
  auto a2 = Rng::substream(1, 0);
  EXPECT_EQ(a2.next(), x);
}

}  // namespace
}  // namespace qtss
