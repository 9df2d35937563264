// Eavesdropper models and Monte Carlo experiments against them.
//
// Outside attacker: intercept-resend on channel qutrits in transit.
// Inside attacker: a dishonest agent swaps another agent's channel qutrit for a
// fake one and keeps the genuine qutrit.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtss/engine.hpp"
#include "qtss/parallel.hpp"

namespace qtss {

struct AttackStats {
  std::size_t trials = 0;
  std::size_t attacker_successes = 0;
  std::size_t detections = 0;
  double success_rate = 0.0;
  double detection_rate = 0.0;
  std::uint64_t seed = 0;

  static AttackStats from_counts(std::size_t trials, std::size_t successes, std::size_t detections,
                                 std::uint64_t seed) {
    const double n = trials == 0 ? 1.0 : static_cast<double>(trials);
    return {trials, successes, detections, static_cast<double>(successes) / n,
            static_cast<double>(detections) / n, seed};
  }
};

// ---------------------------------------------------------------------------
// Outside attacker

enum class InterceptBasisPolicy { AlwaysComputational, AlwaysFourier, RandomPerQutrit };

struct OutsideAttack {
  /// 1-based positions within the transit list (1 = first travelling qutrit).
  std::vector<std::size_t> target_qutrits{1};
  InterceptBasisPolicy policy = InterceptBasisPolicy::AlwaysComputational;
};

/// Measures qutrit `label` in `basis` and re-prepares the observed basis state
/// in its place.
inline PureState outside_intercept_resend(const PureState& state, std::size_t label, CheckBasis basis, Rng& rng) {
  if (label < 1 || label > state.num_qutrits()) {
    throw Error(ErrorCode::LabelOutOfRange, "intercept label " + std::to_string(label) + " out of range");
  }
  const Family& family = check_family(basis);
  const std::array<std::size_t, 1> target{label};
  auto rec = measure_subsystem(state, target, family, rng);
  return insert_qutrit(rec.collapsed, label, family[rec.outcome_index]);
}

inline ChannelTamper make_tamper(const OutsideAttack& attack) {
  if (attack.target_qutrits.empty()) throw Error(ErrorCode::ConfigInvalid, "outside attack needs a target");
  return [attack](PureState& state, std::span<const std::size_t> transit, Rng& rng) {
    for (auto pos : attack.target_qutrits) {
      if (pos < 1 || pos > transit.size()) {
        throw Error(ErrorCode::LabelOutOfRange, "attack targets transit qutrit " + std::to_string(pos));
      }
      CheckBasis basis = CheckBasis::Computational;
      switch (attack.policy) {
        case InterceptBasisPolicy::AlwaysComputational: basis = CheckBasis::Computational; break;
        case InterceptBasisPolicy::AlwaysFourier: basis = CheckBasis::Fourier; break;
        case InterceptBasisPolicy::RandomPerQutrit:
          basis = rng.below(2) == 0 ? CheckBasis::Computational : CheckBasis::Fourier;
          break;
      }
      state = outside_intercept_resend(state, transit[pos - 1], basis, rng);
    }
  };
}

enum class CheckBasisPolicy { Computational, Fourier, Random };

struct OutsideExperimentResult {
  AttackStats stats;
  ChannelVerdict verdict;
};

/// Each trial distributes a fresh check GHZ, lets the attacker act, and runs
/// one verification round. attacker_successes counts attacked rounds that
/// passed the check.
inline OutsideExperimentResult run_outside_attack_experiment(std::size_t trials,
                                                             const std::optional<OutsideAttack>& attack,
                                                             CheckBasisPolicy check_policy, std::uint64_t seed,
                                                             std::size_t parties = 3, unsigned threads = 1) {
  if (trials < 1) throw Error(ErrorCode::ConfigInvalid, "trials must be positive");
  const ChannelTamper tamper = attack ? make_tamper(*attack) : ChannelTamper{};
  std::vector<CheckRecord> records(trials);
  detail::parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    CheckBasis basis = CheckBasis::Computational;
    switch (check_policy) {
      case CheckBasisPolicy::Computational: basis = CheckBasis::Computational; break;
      case CheckBasisPolicy::Fourier: basis = CheckBasis::Fourier; break;
      case CheckBasisPolicy::Random: basis = rng.below(2) == 0 ? CheckBasis::Computational : CheckBasis::Fourier; break;
    }
    records[t] = channel_check_round(basis, rng, tamper, parties);
  });
  const ChannelVerdict verdict = verify_correlations(records);
  const std::size_t detections = verdict.failures[0] + verdict.failures[1];
  const std::size_t successes = attack ? trials - detections : 0;
  return {AttackStats::from_counts(trials, successes, detections, seed), verdict};
}

// ---------------------------------------------------------------------------
// Inside attacker

enum class ComparisonMode { Exact, SingleCopyProjective };

/// Exact comparison flags any reconstruction below this fidelity.
inline constexpr double kExactComparisonTolerance = 1e-9;

struct InsideAttack {
  std::size_t dishonest_agent = 1;
  std::size_t victim = 2;
  PureState fake_state = PureState::basis(1, 0);
  /// No-op variant: the genuine qutrit is forwarded untouched.
  bool forward_genuine = false;
};

/// The dishonest agent pockets the victim's channel qutrit and hands the
/// victim `fake_state`, which is unentangled from everything else.
inline Session inside_capture_and_fake(Session session, const InsideAttack& attack) {
  const std::size_t n = session.config.num_agents;
  if (attack.dishonest_agent < 1 || attack.dishonest_agent > n || attack.victim < 1 || attack.victim > n) {
    throw Error(ErrorCode::ConfigInvalid, "attacker or victim is not an agent");
  }
  if (attack.dishonest_agent == attack.victim) {
    throw Error(ErrorCode::SelfCapture, "an agent cannot capture its own qutrit");
  }
  if (attack.fake_state.num_qutrits() != 1) throw Error(ErrorCode::DimensionMismatch, "fake state must be one qutrit");
  if (attack.forward_genuine) return session;

  session.state = tensor(session.state, attack.fake_state);
  session.stash[attack.dishonest_agent].push_back(session.holding[attack.victim]);
  session.holding[attack.victim] = session.state.num_qutrits();
  return session;
}

struct InsideTrialResult {
  PureState secret = PureState::basis(1, 0);
  std::size_t designated = 1;
  BellOutcome bell;
  /// Fidelity of what the designated agent reconstructs.
  double designated_fidelity = 0.0;
  /// Fidelity of the copy the attacker rebuilds from the genuine qutrits.
  double attacker_fidelity = 0.0;
  bool detected = false;
  bool attacker_success = false;
};

struct InsideExperimentOptions {
  std::size_t num_agents = 2;
  std::optional<std::size_t> forced_designation;
  /// Fixed secret; Haar-random per trial when unset.
  std::optional<PureState> secret;
  unsigned threads = 1;
};

/// One session under the inside attack, drawn from substream `trial` of `seed`.
///
/// Helpers measure their presented qutrit in the ξ basis as usual. When the
/// attacker is designated it ignores the victim's (meaningless) announcement,
/// measures the captured genuine qutrit itself and corrects its own share.
/// Otherwise it still corrects the genuine qutrit using the public
/// announcements, while the designated agent works on whatever it holds.
inline InsideTrialResult inside_attack_trial(std::size_t trial, std::uint64_t seed, const InsideAttack& attack,
                                             ComparisonMode mode, const InsideExperimentOptions& options = {}) {
  Rng rng = Rng::substream(seed, trial);
  InsideTrialResult out;
  out.secret = options.secret ? *options.secret : random_qutrit(rng);
  out.designated = options.forced_designation
                       ? *options.forced_designation
                       : static_cast<std::size_t>(rng.below(options.num_agents)) + 1;

  SessionConfig cfg;
  cfg.num_agents = options.num_agents;
  cfg.designated = out.designated;
  cfg.secret = out.secret;
  cfg.seed = seed;
  Session s = inside_capture_and_fake(distribute(cfg), attack);

  const auto bell = dealer_bell_measurement(s, rng);
  out.bell = bell.outcome;

  const bool attacker_designated = out.designated == attack.dishonest_agent;
  long long announced = 0;  // Σ of public helper announcements
  long long genuine = 0;    // Σ as the attacker knows it, with the victim's entry replaced
  for (std::size_t agent = 1; agent <= cfg.num_agents; ++agent) {
    if (agent == out.designated) continue;
    const auto step = xi_measurement(s, s.holding[agent], rng);
    announced += step.outcome.l;
    if (agent != attack.victim || attack.forward_genuine) genuine += step.outcome.l;
  }

  // The attacker's private qutrits, if any, are measured or corrected last.
  std::size_t captured = 0;
  if (!s.stash[attack.dishonest_agent].empty()) captured = s.stash[attack.dishonest_agent].front();

  if (attacker_designated) {
    if (captured != 0) {
      const auto own = xi_measurement(s, captured, rng);
      genuine += own.outcome.l;
    }
    const std::size_t label = s.holding[out.designated];
    const auto corrected = apply_single(recovery_operator(out.bell, HelperSum(genuine)), label, s.state);
    out.designated_fidelity = qutrit_fidelity(corrected, label, out.secret);
    out.attacker_fidelity = out.designated_fidelity;
  } else {
    const std::size_t label = s.holding[out.designated];
    PureState reg = apply_single(recovery_operator(out.bell, HelperSum(announced)), label, s.state);
    out.designated_fidelity = qutrit_fidelity(reg, label, out.secret);
    if (captured != 0) {
      // With a third agent designated the genuine qutrit is still entangled
      // with that agent's share, so this overlap is a mixed-state one.
      const auto fixed = apply_single(recovery_operator(out.bell, HelperSum(genuine)), captured, s.state);
      out.attacker_fidelity = qutrit_fidelity(fixed, captured, out.secret);
    }
  }

  switch (mode) {
    case ComparisonMode::Exact:
      out.detected = out.designated_fidelity < 1.0 - kExactComparisonTolerance;
      break;
    case ComparisonMode::SingleCopyProjective:
      out.detected = rng.uniform() < 1.0 - out.designated_fidelity;
      break;
  }
  out.attacker_success = attacker_designated && !out.detected;
  return out;
}

inline AttackStats run_inside_attack_experiment(std::size_t trials, const InsideAttack& attack, ComparisonMode mode,
                                                std::uint64_t seed, const InsideExperimentOptions& options = {}) {
  if (trials < 1) throw Error(ErrorCode::ConfigInvalid, "trials must be positive");
  if (options.num_agents < 2 || options.num_agents > kMaxAgents) {
    throw Error(ErrorCode::ConfigInvalid, "num_agents out of range");
  }
  std::atomic<std::size_t> successes{0}, detections{0};
  detail::parallel_for(trials, options.threads, [&](std::size_t t) {
    const auto r = inside_attack_trial(t, seed, attack, mode, options);
    if (r.attacker_success) successes.fetch_add(1, std::memory_order_relaxed);
    if (r.detected) detections.fetch_add(1, std::memory_order_relaxed);
  });
  return AttackStats::from_counts(trials, successes.load(), detections.load(), seed);
}

}  // namespace qtss
