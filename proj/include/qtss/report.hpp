// JSON/CSV encoding of run reports. JSON is canonical; schema_version 1 is
// described by schema/run_report.schema.json.

#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtss/adversary.hpp"
#include "qtss/engine.hpp"

namespace qtss {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline json amplitudes_to_json(const PureState& s) {
  json arr = json::array();
  for (const auto& a : s.amplitudes()) arr.push_back({a.real(), a.imag()});
  return arr;
}

inline PureState amplitudes_from_json(const json& j) {
  std::vector<Complex> amps;
  for (const auto& a : j) amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  std::size_t n = 0;
  while (pow3(n) < amps.size()) ++n;
  return make_state(std::move(amps), n);
}

inline void to_json(json& j, const AttackStats& s) {
  j = json{{"trials", s.trials},
           {"attacker_successes", s.attacker_successes},
           {"detections", s.detections},
           {"success_rate", s.success_rate},
           {"detection_rate", s.detection_rate},
           {"seed", s.seed}};
}

inline void from_json(const json& j, AttackStats& s) {
  j.at("trials").get_to(s.trials);
  j.at("attacker_successes").get_to(s.attacker_successes);
  j.at("detections").get_to(s.detections);
  j.at("success_rate").get_to(s.success_rate);
  j.at("detection_rate").get_to(s.detection_rate);
  j.at("seed").get_to(s.seed);
}

inline void to_json(json& j, const ChannelVerdict& v) {
  j = json{{"verdict", v.disturbed ? "disturbed" : "clean"},
           {"rounds", {{"computational", v.rounds[0]}, {"fourier", v.rounds[1]}}},
           {"failures", {{"computational", v.failures[0]}, {"fourier", v.failures[1]}}},
           {"failure_rates",
            {{"computational", v.failure_rate(CheckBasis::Computational)},
             {"fourier", v.failure_rate(CheckBasis::Fourier)}}}};
}

inline void from_json(const json& j, ChannelVerdict& v) {
  v.disturbed = j.at("verdict").get<std::string>() == "disturbed";
  v.rounds = {j.at("rounds").at("computational").get<std::size_t>(), j.at("rounds").at("fourier").get<std::size_t>()};
  v.failures = {j.at("failures").at("computational").get<std::size_t>(),
                j.at("failures").at("fourier").get<std::size_t>()};
}

inline void to_json(json& j, const Announcement& a) {
  j = json{{"sender", a.sender}};
  switch (a.kind) {
    case AnnouncementKind::BellResult: {
      const auto& o = std::get<BellOutcome>(a.payload);
      j["kind"] = "bell_result";
      j["n"] = o.n;
      j["m"] = o.m;
      break;
    }
    case AnnouncementKind::Designation:
      j["kind"] = "designation";
      j["agent"] = std::get<std::size_t>(a.payload);
      break;
    case AnnouncementKind::HelperResult:
      j["kind"] = "helper_result";
      j["l"] = std::get<XiOutcome>(a.payload).l;
      break;
  }
}

inline void from_json(const json& j, Announcement& a) {
  const auto kind = j.at("kind").get<std::string>();
  a.sender = j.at("sender").get<PartyId>();
  if (kind == "bell_result") {
    a.kind = AnnouncementKind::BellResult;
    a.payload = BellOutcome(j.at("n").get<int>(), j.at("m").get<int>());
  } else if (kind == "designation") {
    a.kind = AnnouncementKind::Designation;
    a.payload = j.at("agent").get<std::size_t>();
  } else if (kind == "helper_result") {
    a.kind = AnnouncementKind::HelperResult;
    a.payload = XiOutcome(j.at("l").get<int>());
  } else {
    throw Error(ErrorCode::ParseError, "unknown announcement kind " + kind);
  }
}

inline void to_json(json& j, const Transcript& t) {
  j = json{{"config",
            {{"agents", t.config.num_agents},
             {"designated", t.config.designated},
             {"seed", t.config.seed},
             {"secret", amplitudes_to_json(t.config.secret)}}},
           {"announcements", t.announcements},
           {"bell_probability", t.bell_probability},
           {"helper_probabilities", t.helper_probabilities},
           {"reconstructed", amplitudes_to_json(t.reconstructed)},
           {"fidelity_to_secret", t.fidelity_to_secret}};
}

inline void from_json(const json& j, Transcript& t) {
  const auto& c = j.at("config");
  c.at("agents").get_to(t.config.num_agents);
  c.at("designated").get_to(t.config.designated);
  c.at("seed").get_to(t.config.seed);
  t.config.secret = amplitudes_from_json(c.at("secret"));
  j.at("announcements").get_to(t.announcements);
  j.at("bell_probability").get_to(t.bell_probability);
  j.at("helper_probabilities").get_to(t.helper_probabilities);
  t.reconstructed = amplitudes_from_json(j.at("reconstructed"));
  j.at("fidelity_to_secret").get_to(t.fidelity_to_secret);
}

struct RunReport {
  std::string command;
  json config = json::object();
  json results = json::object();
  std::vector<std::string> warnings;
  std::int64_t wall_time_ms = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline void to_json(json& j, const RunReport& r) {
  j = json{{"schema_version", kSchemaVersion},
           {"command", r.command},
           {"config", r.config},
           {"results", r.results},
           {"warnings", r.warnings},
           {"wall_time_ms", r.wall_time_ms}};
}

inline void from_json(const json& j, RunReport& r) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::ParseError, "unsupported schema_version");
  }
  j.at("command").get_to(r.command);
  r.config = j.at("config");
  r.results = j.at("results");
  j.at("warnings").get_to(r.warnings);
  j.at("wall_time_ms").get_to(r.wall_time_ms);
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const json& v) {
  if (v.is_number_float()) return csv_number(v.get<double>());
  std::string text = v.is_string() ? v.get<std::string>() : v.dump();
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

}  // namespace detail

/// One header row plus one data row; nested objects are flattened with '.'.
inline std::string to_csv(const RunReport& r) {
  json flat = json::object();
  flat["command"] = r.command;
  const json config = json(r.config).flatten();
  const json results = json(r.results).flatten();
  for (const auto& [k, v] : config.items()) flat["config" + k] = v;
  for (const auto& [k, v] : results.items()) flat["results" + k] = v;
  std::ostringstream header, row;
  bool first = true;
  for (const auto& [k, v] : flat.items()) {
    if (!first) header << ',', row << ',';
    first = false;
    std::string name = k;
    for (auto& ch : name)
      if (ch == '/') ch = '.';
    header << name;
    row << detail::csv_cell(v);
  }
  return header.str() + "\n" + row.str() + "\n";
}

}  // namespace qtss
