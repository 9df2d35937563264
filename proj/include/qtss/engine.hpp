// Dealer/agent choreography for qutrit state sharing.
//
// Party 0 is the dealer. Agents are numbered 1..N. The dealer owns register
// qutrits 1 (secret) and 2 (her half of the channel); agent k receives channel
// qutrit k+2.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qtss/core.hpp"
#include "qtss/protocol_math.hpp"

namespace qtss {

inline constexpr std::size_t kMaxAgents = 10;
inline constexpr double kReconstructionTolerance = 1e-10;

using PartyId = std::size_t;
inline constexpr PartyId kDealer = 0;

struct SessionConfig {
  std::size_t num_agents = 2;
  std::size_t designated = 1;
  PureState secret = PureState::basis(1, 0);
  std::uint64_t seed = 0;

  void validate() const {
    if (num_agents < 2 || num_agents > kMaxAgents) {
      throw Error(ErrorCode::ConfigInvalid, "num_agents must be in 2.." + std::to_string(kMaxAgents));
    }
    if (designated < 1 || designated > num_agents) {
      throw Error(ErrorCode::ConfigInvalid, "designated agent must be in 1.." + std::to_string(num_agents));
    }
    if (secret.num_qutrits() != 1) throw Error(ErrorCode::ConfigInvalid, "secret must be a single qutrit");
  }
};

enum class AnnouncementKind { BellResult, Designation, HelperResult };

struct Announcement {
  AnnouncementKind kind = AnnouncementKind::BellResult;
  PartyId sender = kDealer;
  std::variant<BellOutcome, std::size_t, XiOutcome> payload;
};

struct Transcript {
  SessionConfig config;
  std::vector<Announcement> announcements;
  double bell_probability = 0.0;
  std::vector<double> helper_probabilities;
  PureState reconstructed = PureState::basis(1, 0);
  double fidelity_to_secret = 0.0;
};

/// True when announcements are BellResult, Designation, then N-1 HelperResults.
inline bool is_causally_ordered(const Transcript& t) {
  const auto& a = t.announcements;
  if (a.size() != t.config.num_agents + 1) return false;
  if (a[0].kind != AnnouncementKind::BellResult || a[0].sender != kDealer) return false;
  if (a[1].kind != AnnouncementKind::Designation || a[1].sender != kDealer) return false;
  for (std::size_t i = 2; i < a.size(); ++i) {
    if (a[i].kind != AnnouncementKind::HelperResult) return false;
    if (a[i].sender == t.config.designated || a[i].sender == kDealer) return false;
    if (i > 2 && a[i].sender <= a[i - 1].sender) return false;
  }
  return true;
}

/// Quantum register of a session together with who holds which qutrit.
///
/// Labels shift down whenever qutrits are measured out of the register;
/// consume() keeps the tables consistent.
struct Session {
  SessionConfig config;
  PureState state = PureState::basis(1, 0);
  std::array<std::size_t, 2> dealer_labels{1, 2};
  std::vector<std::size_t> holding;              // holding[k]: qutrit agent k presents as its share
  std::vector<std::vector<std::size_t>> stash;   // qutrits an agent keeps privately

  std::vector<std::size_t> transit_labels() const {
    return std::vector<std::size_t>(holding.begin() + 1, holding.end());
  }

  /// Drops `removed` labels from the bookkeeping after they were measured out.
  void consume(std::span<const std::size_t> removed) {
    auto shift = [&](std::size_t& label) {
      std::size_t below = 0;
      for (auto r : removed) {
        if (r == label) {
          label = 0;
          return;
        }
        if (r < label) ++below;
      }
      label -= below;
    };
    for (auto& l : dealer_labels)
      if (l != 0) shift(l);
    for (std::size_t k = 1; k < holding.size(); ++k)
      if (holding[k] != 0) shift(holding[k]);
    for (auto& s : stash) {
      for (auto& l : s) shift(l);
      std::erase(s, std::size_t{0});
    }
  }
};

/// Tampering applied to a register while channel qutrits are in transit. Must
/// leave the register size unchanged.
using ChannelTamper = std::function<void(PureState& state, std::span<const std::size_t> transit, Rng& rng)>;

/// secret ⊗ GHZ(N+1), channel qutrits handed to the agents.
inline Session distribute(const SessionConfig& cfg) {
  cfg.validate();
  Session s;
  s.config = cfg;
  s.state = tensor(cfg.secret, ghz_state(cfg.num_agents + 1));
  s.holding.assign(cfg.num_agents + 1, 0);
  for (std::size_t k = 1; k <= cfg.num_agents; ++k) s.holding[k] = k + 2;
  s.stash.assign(cfg.num_agents + 1, {});
  return s;
}

inline void apply_tamper(const ChannelTamper& tamper, PureState& state, std::span<const std::size_t> transit,
                         Rng& rng) {
  if (!tamper) return;
  const std::size_t before = state.num_qutrits();
  tamper(state, transit, rng);
  if (state.num_qutrits() != before) {
    throw Error(ErrorCode::DimensionMismatch, "channel tamper changed the register size");
  }
}

struct BellStep {
  BellOutcome outcome;
  double probability = 0.0;
};

/// Dealer measures her qutrits in the generalized Bell basis.
inline BellStep dealer_bell_measurement(Session& s, Rng& rng, std::optional<BellOutcome> forced = {}) {
  const std::array<std::size_t, 2> targets = s.dealer_labels;
  static const Family family = bell_family();
  auto rec = forced ? project_subsystem(s.state, targets, family, forced->index())
                    : measure_subsystem(s.state, targets, family, rng);
  s.state = std::move(rec.collapsed);
  s.consume(targets);
  return {BellOutcome::from_index(rec.outcome_index), rec.probability};
}

struct XiStep {
  XiOutcome outcome;
  double probability = 0.0;
};

/// One qutrit measured in the ξ basis and removed from the register.
inline XiStep xi_measurement(Session& s, std::size_t label, Rng& rng, std::optional<XiOutcome> forced = {}) {
  const std::array<std::size_t, 1> targets{label};
  static const Family family = xi_family();
  auto rec = forced ? project_subsystem(s.state, targets, family, static_cast<std::size_t>(forced->l))
                    : measure_subsystem(s.state, targets, family, rng);
  s.state = std::move(rec.collapsed);
  s.consume(targets);
  return {XiOutcome(static_cast<long long>(rec.outcome_index)), rec.probability};
}

/// Applies the recovery unitary for (bell, L) to a single-qutrit state.
inline PureState reconstruct(const PureState& collapsed, BellOutcome bell, HelperSum sum) {
  if (collapsed.num_qutrits() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruct expects a single-qutrit state");
  }
  return apply_single(recovery_operator(bell, sum), 1, collapsed);
}

/// ⟨target|ρ|target⟩ for qutrit `label` of `reg`; equals fidelity when the
/// qutrit is unentangled.
inline double qutrit_fidelity(const PureState& reg, std::size_t label, const PureState& target) {
  const std::array<std::size_t, 1> keep{label};
  const auto rho = reduced_density(reg, keep);
  Complex acc{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) acc += std::conj(target[r]) * rho(r, c) * target[c];
  return std::clamp(acc.real(), 0.0, 1.0);
}

/// Outcomes pinned in advance, for exhaustive enumeration. Helpers are listed
/// in ascending agent order, skipping the designated agent.
struct ForcedOutcomes {
  BellOutcome bell;
  std::vector<XiOutcome> helpers;
};

inline Transcript run_sharing_session(const SessionConfig& cfg, const ChannelTamper& tamper = {},
                                      const std::optional<ForcedOutcomes>& forced = {}) {
  cfg.validate();
  if (forced && forced->helpers.size() != cfg.num_agents - 1) {
    throw Error(ErrorCode::ConfigInvalid, "forced outcomes need one entry per helper");
  }
  Rng rng(cfg.seed);
  Session session = distribute(cfg);
  apply_tamper(tamper, session.state, session.transit_labels(), rng);

  Transcript t;
  t.config = cfg;
  const auto bell = dealer_bell_measurement(session, rng, forced ? std::optional(forced->bell) : std::nullopt);
  t.bell_probability = bell.probability;
  t.announcements.push_back({AnnouncementKind::BellResult, kDealer, bell.outcome});
  t.announcements.push_back({AnnouncementKind::Designation, kDealer, cfg.designated});

  std::vector<XiOutcome> helper_outcomes;
  for (std::size_t agent = 1; agent <= cfg.num_agents; ++agent) {
    if (agent == cfg.designated) continue;
    std::optional<XiOutcome> pinned;
    if (forced) pinned = forced->helpers[helper_outcomes.size()];
    const auto step = xi_measurement(session, session.holding[agent], rng, pinned);
    helper_outcomes.push_back(step.outcome);
    t.helper_probabilities.push_back(step.probability);
    t.announcements.push_back({AnnouncementKind::HelperResult, agent, step.outcome});
  }

  t.reconstructed = reconstruct(session.state, bell.outcome, HelperSum::of(helper_outcomes));
  t.fidelity_to_secret = fidelity(t.reconstructed, cfg.secret);
  return t;
}

enum class CheckBasis { Computational, Fourier };

inline std::string_view to_string(CheckBasis b) {
  return b == CheckBasis::Computational ? "computational" : "fourier";
}

inline const Family& check_family(CheckBasis b) {
  static const Family computational = computational_family(1);
  static const Family fourier = xi_family();
  return b == CheckBasis::Computational ? computational : fourier;
}

struct CheckRecord {
  CheckBasis basis = CheckBasis::Computational;
  std::vector<int> outcomes;
  bool passed = false;
};

/// Computational rounds pass when every party saw the same trit; Fourier
/// rounds pass when the trits sum to 0 mod 3.
inline bool correlations_hold(CheckBasis basis, std::span<const int> outcomes) {
  if (basis == CheckBasis::Computational) {
    return std::all_of(outcomes.begin(), outcomes.end(), [&](int o) { return o == outcomes.front(); });
  }
  long long total = 0;
  for (int o : outcomes) total += o;
  return mod3(total) == 0;
}

/// One verification round on a fresh GHZ copy shared by `parties` parties
/// (dealer plus agents). The dealer keeps qutrit 1; the rest travel.
inline CheckRecord channel_check_round(CheckBasis basis, Rng& rng, const ChannelTamper& tamper = {},
                                       std::size_t parties = 3) {
  if (parties < 2 || parties > kMaxGhzQutrits) throw Error(ErrorCode::ConfigInvalid, "bad party count");
  PureState state = ghz_state(parties);
  std::vector<std::size_t> transit;
  for (std::size_t l = 2; l <= parties; ++l) transit.push_back(l);
  apply_tamper(tamper, state, transit, rng);

  CheckRecord rec;
  rec.basis = basis;
  const std::array<std::size_t, 1> first{1};
  for (std::size_t p = 0; p < parties; ++p) {
    auto m = measure_subsystem(state, first, check_family(basis), rng);
    rec.outcomes.push_back(static_cast<int>(m.outcome_index));
    state = std::move(m.collapsed);
  }
  rec.passed = correlations_hold(basis, rec.outcomes);
  return rec;
}

struct ChannelVerdict {
  bool disturbed = false;
  std::array<std::size_t, 2> rounds{};    // indexed by CheckBasis
  std::array<std::size_t, 2> failures{};

  void tally(CheckBasis basis, bool passed) {
    const auto b = static_cast<std::size_t>(basis);
    ++rounds[b];
    if (!passed) {
      ++failures[b];
      disturbed = true;
    }
  }

  double failure_rate(CheckBasis basis) const {
    const auto b = static_cast<std::size_t>(basis);
    return rounds[b] == 0 ? 0.0 : static_cast<double>(failures[b]) / static_cast<double>(rounds[b]);
  }
};

inline ChannelVerdict verify_correlations(std::span<const CheckRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no check records");
  ChannelVerdict v;
  for (const auto& r : records) v.tally(r.basis, r.passed);
  return v;
}

/// Sharing rounds interleaved with channel checks. Each round independently
/// becomes a check with probability `check_fraction`; any failed check aborts
/// the batch.
struct SharingBatch {
  std::vector<CheckRecord> checks;
  std::vector<Transcript> sessions;
  ChannelVerdict verdict;
  bool aborted = false;
};

inline SharingBatch run_checked_sharing(const SessionConfig& cfg, std::size_t rounds, double check_fraction = 0.5,
                                        const ChannelTamper& tamper = {}) {
  cfg.validate();
  if (!(check_fraction >= 0.0 && check_fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "check_fraction must be in [0, 1]");
  }
  SharingBatch batch;
  for (std::size_t r = 0; r < rounds; ++r) {
    Rng rng = Rng::substream(cfg.seed, r);
    if (rng.uniform() < check_fraction) {
      const auto basis = rng.below(2) == 0 ? CheckBasis::Computational : CheckBasis::Fourier;
      batch.checks.push_back(channel_check_round(basis, rng, tamper, cfg.num_agents + 1));
      batch.verdict.tally(basis, batch.checks.back().passed);
    } else {
      SessionConfig round_cfg = cfg;
      round_cfg.seed = rng.next();
      batch.sessions.push_back(run_sharing_session(round_cfg, tamper));
    }
  }
  batch.aborted = batch.verdict.disturbed;
  return batch;
}

}  // namespace qtss
