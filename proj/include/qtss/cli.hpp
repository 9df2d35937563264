// Command-line front end: share | check-channel | attack.
//
// run_command() is the whole program minus process plumbing, so tests can
// drive it in-process with string streams.

#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "qtss/report.hpp"

namespace qtss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;
inline constexpr int kExitDisturbed = 4;

/// Secrets further than this from unit norm are refused outright.
inline constexpr double kGrossNormError = 1e-3;

// Substream ids for seed-derived choices made by the harness itself.
inline constexpr std::uint64_t kSecretStream = 0x5ec7e7;
inline constexpr std::uint64_t kDesignationStream = 0xde5161;
inline constexpr std::uint64_t kFakeStream = 0xfa4e;

struct ParsedSecret {
  PureState state = PureState::basis(1, 0);
  std::optional<std::string> warning;
};

namespace detail {

inline double parse_real(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// "re,im;re,im;re,im" or "random" (Haar-uniform from `rng`).
inline ParsedSecret parse_secret(std::string_view text, Rng& rng) {
  if (text == "random") return {random_qutrit(rng), std::nullopt};
  const auto parts = detail::split(text, ';');
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError, "secret needs three complex components, got " + std::to_string(parts.size()));
  }
  std::vector<Complex> amps;
  for (auto part : parts) {
    const auto ri = detail::split(part, ',');
    if (ri.size() != 2) throw Error(ErrorCode::ParseError, "component '" + std::string(part) + "' is not re,im");
    amps.emplace_back(detail::parse_real(ri[0]), detail::parse_real(ri[1]));
  }
  ParsedSecret out;
  double n2 = 0.0;
  for (const auto& a : amps) n2 += std::norm(a);
  const double deviation = std::abs(std::sqrt(n2) - 1.0);
  out.state = make_state(std::move(amps), 1, kGrossNormError);
  if (deviation > kInputNormTolerance) {
    out.warning = "secret norm deviated from 1 by " + std::to_string(deviation) + "; renormalized";
  }
  return out;
}

namespace detail {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out_path;
};

inline void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "RNG seed (drawn from entropy when omitted; always echoed)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out_path, "Write the report to PATH instead of stdout");
}

inline std::uint64_t resolve_seed(const CommonOptions& o) {
  if (o.seed) return *o.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline CheckBasisPolicy parse_check_policy(const std::string& s) {
  if (s == "computational") return CheckBasisPolicy::Computational;
  if (s == "fourier") return CheckBasisPolicy::Fourier;
  return CheckBasisPolicy::Random;
}

inline std::optional<OutsideAttack> parse_eve(const std::string& s) {
  if (s == "none") return std::nullopt;
  OutsideAttack a;
  if (s == "intercept-computational") a.policy = InterceptBasisPolicy::AlwaysComputational;
  else if (s == "intercept-fourier") a.policy = InterceptBasisPolicy::AlwaysFourier;
  else a.policy = InterceptBasisPolicy::RandomPerQutrit;
  return a;
}

inline const std::vector<std::string> kBasisChoices{"computational", "fourier", "random"};
inline const std::vector<std::string> kEveChoices{"none", "intercept-computational", "intercept-fourier",
                                                  "intercept-random"};

}  // namespace detail

/// Runs one CLI invocation; args excludes the program name. The report goes
/// to `out` (or --out), diagnostics to `err`.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qutrit state sharing simulator", "qtss"};
  app.require_subcommand(1);

  detail::CommonOptions common;

  auto* share = app.add_subcommand("share", "Run one sharing session");
  std::size_t agents = 2;
  std::optional<std::size_t> designate;
  std::string secret_text = "random";
  share->add_option("--agents", agents, "Number of agents N")->check(CLI::Range(std::size_t{2}, kMaxAgents));
  share->add_option("--designate", designate, "Agent that reconstructs (default: random)");
  share->add_option("--secret", secret_text, "re,im;re,im;re,im or 'random'");
  detail::add_common(share, common);

  auto* check = app.add_subcommand("check-channel", "Run channel verification rounds");
  std::size_t rounds = 1000;
  std::string basis = "random";
  std::string eve = "none";
  unsigned threads = 1;
  check->add_option("--rounds", rounds, "Number of check rounds")->check(CLI::PositiveNumber);
  check->add_option("--basis", basis, "Check basis")->check(CLI::IsMember(detail::kBasisChoices));
  check->add_option("--eve", eve, "Outside eavesdropper")->check(CLI::IsMember(detail::kEveChoices));
  check->add_option("--agents", agents, "Number of agents N (N+1 parties)")
      ->check(CLI::Range(std::size_t{2}, kMaxAgents));
  check->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  detail::add_common(check, common);

  auto* attack = app.add_subcommand("attack", "Run an attack experiment");
  std::string model;
  std::size_t trials = 10000;
  std::string comparison = "exact";
  std::string fake_text = "1,0;0,0;0,0";
  std::size_t attacker = 1, victim = 2;
  std::string eve_attack = "intercept-computational";
  attack->add_option("--model", model, "inside | outside")->required()->check(CLI::IsMember({"inside", "outside"}));
  attack->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  attack->add_option("--comparison", comparison, "Inside model: state comparison")
      ->check(CLI::IsMember({"exact", "single-copy"}));
  attack->add_option("--fake", fake_text, "Inside model: fake qutrit (re,im;re,im;re,im or 'random')");
  attack->add_option("--attacker", attacker, "Inside model: dishonest agent");
  attack->add_option("--victim", victim, "Inside model: agent whose qutrit is captured");
  attack->add_option("--designate", designate, "Inside model: force the designated agent");
  attack->add_option("--agents", agents, "Number of agents N")->check(CLI::Range(std::size_t{2}, kMaxAgents));
  attack->add_option("--basis", basis, "Outside model: check basis policy")->check(CLI::IsMember(detail::kBasisChoices));
  attack->add_option("--eve", eve_attack, "Outside model: intercept policy")->check(CLI::IsMember(detail::kEveChoices));
  attack->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  detail::add_common(attack, common);

  std::vector<const char*> argv{"qtss"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t seed = detail::resolve_seed(common);
  RunReport report;
  int exit_code = kExitOk;

  try {
    if (share->parsed()) {
      report.command = "share";
      Rng secret_rng = Rng::substream(seed, kSecretStream);
      const auto secret = parse_secret(secret_text, secret_rng);
      if (secret.warning) report.warnings.push_back(*secret.warning);
      SessionConfig cfg;
      cfg.num_agents = agents;
      cfg.secret = secret.state;
      cfg.seed = seed;
      if (designate) {
        cfg.designated = *designate;
      } else {
        Rng pick = Rng::substream(seed, kDesignationStream);
        cfg.designated = static_cast<std::size_t>(pick.below(agents)) + 1;
      }
      cfg.validate();
      report.config = {{"agents", agents}, {"designated", cfg.designated}, {"secret", secret_text},
                       {"seed", seed}, {"format", common.format}};
      const auto transcript = run_sharing_session(cfg);
      if (!is_causally_ordered(transcript)) {
        throw std::logic_error("transcript violates announcement order");
      }
      report.results = {{"transcript", transcript}};
    } else if (check->parsed()) {
      report.command = "check-channel";
      report.config = {{"rounds", rounds}, {"basis", basis}, {"eve", eve}, {"agents", agents},
                       {"seed", seed}, {"format", common.format}};
      const auto result =
          run_outside_attack_experiment(rounds, detail::parse_eve(eve), detail::parse_check_policy(basis), seed,
                                        agents + 1, threads);
      report.results = result.verdict;
      if (result.verdict.disturbed) exit_code = kExitDisturbed;
    } else {
      report.command = "attack";
      if (model == "inside") {
        Rng fake_rng = Rng::substream(seed, kFakeStream);
        const auto fake = parse_secret(fake_text, fake_rng);
        if (fake.warning) report.warnings.push_back("fake: " + *fake.warning);
        InsideAttack a{attacker, victim, fake.state, false};
        InsideExperimentOptions opts;
        opts.num_agents = agents;
        opts.forced_designation = designate;
        opts.threads = threads;
        if (designate && (*designate < 1 || *designate > agents)) {
          throw Error(ErrorCode::ConfigInvalid, "designated agent out of range");
        }
        const auto mode = comparison == "exact" ? ComparisonMode::Exact : ComparisonMode::SingleCopyProjective;
        report.config = {{"model", model}, {"trials", trials}, {"comparison", comparison}, {"fake", fake_text},
                         {"attacker", attacker}, {"victim", victim}, {"agents", agents}, {"seed", seed},
                         {"format", common.format}};
        if (designate) report.config["designate"] = *designate;
        report.results = {{"stats", run_inside_attack_experiment(trials, a, mode, seed, opts)}};
      } else {
        report.config = {{"model", model}, {"trials", trials}, {"basis", basis}, {"eve", eve_attack},
                         {"agents", agents}, {"seed", seed}, {"format", common.format}};
        const auto result = run_outside_attack_experiment(trials, detail::parse_eve(eve_attack),
                                                          detail::parse_check_policy(basis), seed, agents + 1,
                                                          threads);
        report.results = {{"stats", result.stats}, {"channel", result.verdict}};
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ParseError:
      case ErrorCode::NotNormalized:
      case ErrorCode::NonFiniteAmplitude:
      case ErrorCode::ConfigInvalid:
      case ErrorCode::SelfCapture:
        return kExitUsage;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }

  report.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();

  const std::string text = common.format == "csv" ? to_csv(report) : json(report).dump(2) + "\n";
  if (common.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(common.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << common.out_path << '\n';
      return kExitUsage;
    }
    file << text;
  }
  if (exit_code == kExitDisturbed) err << "channel disturbed: sharing aborted\n";
  return exit_code;
}

}  // namespace qtss::cli
