#pragma once

// JSON and CSV formats: state specs, scenarios, cost breakdowns, run reports
// and table dumps.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsim/errors.hpp"
#include "qsim/frame_rep.hpp"
#include "qsim/nebit.hpp"
#include "qsim/protocol.hpp"
#include "qsim/quantum_oracle.hpp"
#include "qsim/stats_costs.hpp"

namespace qsim::io {

using nlohmann::json;

// "x", "-y", "z" or "mx,my,mz".
inline BlochVector parse_direction(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s == "x" || s == "+x") return axes::X;
  if (s == "y" || s == "+y") return axes::Y;
  if (s == "z" || s == "+z") return axes::Z;
  if (s == "-x") return {-1.0, 0.0, 0.0};
  if (s == "-y") return {0.0, -1.0, 0.0};
  if (s == "-z") return {0.0, 0.0, -1.0};
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("cannot parse direction '" + text + "'");
    }
  }
  if (parts.size() != 3) throw ParseError("direction '" + text + "' needs three components");
  return {parts[0], parts[1], parts[2]};
}

// Semicolon-separated list of directions.
inline std::vector<BlochVector> parse_direction_list(const std::string& text) {
  std::vector<BlochVector> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_direction(item));
  }
  if (out.empty()) throw ParseError("empty direction list");
  return out;
}

inline json to_json(const BlochVector& v) { return json::array({v.x, v.y, v.z}); }

inline BlochVector bloch_from_json(const json& j) {
  if (j.is_string()) return parse_direction(j.get<std::string>());
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ParseError("Bloch vector needs three components");
  return {v[0], v[1], v[2]};
}

inline json to_json(const StateSpec& s) {
  switch (s.kind) {
    case StateSpec::Kind::ghz: return {{"kind", "ghz"}, {"n", s.n}};
    case StateSpec::Kind::product: {
      json b = json::array();
      for (const auto& v : s.bloch) b.push_back(to_json(v));
      return {{"kind", "product"}, {"bloch", b}};
    }
    case StateSpec::Kind::random_pure: return {{"kind", "random_pure"}, {"n", s.n}, {"seed", s.seed}};
    case StateSpec::Kind::random_mixed: return {{"kind", "random_mixed"}, {"n", s.n}, {"seed", s.seed}};
    case StateSpec::Kind::file: return {{"kind", "file"}, {"path", s.path}};
  }
  return {};
}

inline StateSpec state_spec_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "ghz") return StateSpec::ghz(j.at("n").get<int>());
    if (kind == "product") {
      std::vector<BlochVector> b;
      for (const auto& v : j.at("bloch")) b.push_back(bloch_from_json(v));
      return StateSpec::product(std::move(b));
    }
    if (kind == "random_pure") return StateSpec::random_pure(j.at("n").get<int>(), j.value("seed", std::uint64_t{0}));
    if (kind == "random_mixed") return StateSpec::random_mixed(j.at("n").get<int>(), j.value("seed", std::uint64_t{0}));
    if (kind == "file") return StateSpec::file(j.at("path").get<std::string>());
    throw ParseError("unknown state kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("state: ") + e.what());
  }
}

inline json to_json(const Scenario& s) {
  json m = json::array();
  for (const auto& v : s.directions) m.push_back(to_json(v));
  return {{"state", to_json(s.state)},
          {"measurements", m},
          {"rounds", s.rounds},
          {"seed", s.seed},
          {"decomposition", std::string(to_string(s.strategy))},
          {"coding", std::string(to_string(s.coding))},
          {"residual_policy", std::string(to_string(s.residual_policy))}};
}

inline Scenario scenario_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    Scenario s;
    s.state = state_spec_from_json(j.at("state"));
    for (const auto& v : j.at("measurements")) s.directions.push_back(bloch_from_json(v));
    const auto& rounds = j.at("rounds");
    if (!rounds.is_number_integer() || rounds.get<std::int64_t>() < 1) throw ParseError("rounds must be an integer >= 1");
    s.rounds = rounds.get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.strategy = parse_strategy(j.value("decomposition", std::string("minimal")));
    s.coding = parse_coding(j.value("coding", std::string("entropy_theoretical")));
    s.residual_policy = parse_residual_policy(j.value("residual_policy", std::string("fail")));
    for (const auto& m : s.directions) require_unit(m);
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const InvalidDirection& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

inline Scenario read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

inline json to_json(const CostBreakdown& c) {
  json j{{"n", c.n},
         {"deltas", c.deltas},
         {"rounds", c.rounds},
         {"f", c.f},
         {"inbound_alpha", c.inbound_alpha},
         {"inbound_r", c.inbound_r},
         {"outbound", c.outbound},
         {"total_bits", c.total_bits},
         {"total_bits_per_N", c.total_bits_per_N},
         {"per_entry_bits", c.per_entry_bits}};
  j["entropy_override"] = c.entropy_override ? json(*c.entropy_override) : json(nullptr);
  return j;
}

inline json to_json(const StochasticMatrix2x4& s) { return s.entries; }

inline json to_json(const NebitDecomposition& d) {
  return {{"delta", d.delta}, {"t", d.t}, {"s_plus", to_json(d.s_plus)}, {"s_minus", to_json(d.s_minus)}};
}

inline json outcome_map(const std::vector<double>& q, int n) {
  json j = json::object();
  for (std::size_t k = 0; k < q.size(); ++k) j[outcome_label(k, n)] = q[k];
  return j;
}

inline json to_json(const Message& m) {
  return {{"from", m.from},
          {"to", m.to},
          {"payload_kind", std::string(to_string(m.payload_kind))},
          {"symbol_count", m.symbol_count},
          {"raw_bits", m.raw_bits},
          {"coded_bits", m.coded_bits}};
}

struct RealizedBits {
  std::uint64_t inbound_alpha = 0;
  std::uint64_t inbound_r_raw = 0;
  double inbound_r_coded = 0.0;
  std::uint64_t outbound = 0;

  std::uint64_t total_raw() const { return inbound_alpha + inbound_r_raw + outbound; }
  double total_coded() const { return static_cast<double>(inbound_alpha + outbound) + inbound_r_coded; }
};

inline RealizedBits realized_bits(const std::vector<Message>& log) {
  RealizedBits b;
  for (const auto& m : log) {
    switch (m.payload_kind) {
      case PayloadKind::alpha_column: b.inbound_alpha += m.raw_bits; break;
      case PayloadKind::r_column:
        b.inbound_r_raw += m.raw_bits;
        b.inbound_r_coded += m.coded_bits;
        break;
      case PayloadKind::reduced_alpha_column: b.outbound += m.raw_bits; break;
    }
  }
  return b;
}

// Transcript summary without the per-round tables (those go to CSV).
inline json to_json(const ProtocolTranscript& t) {
  json messages = json::array();
  for (const auto& m : t.messages) messages.push_back(to_json(m));
  return {{"scenario", to_json(t.scenario)},
          {"n", t.n},
          {"deltas", t.deltas},
          {"branch_probabilities", t.branch_probabilities},
          {"messages", messages},
          {"reduced_rows", t.reduced_size()},
          {"residual_negative_count", t.removal.residual},
          {"residual_discarded", t.residual_discarded},
          {"estimates", outcome_map(t.estimates, t.n)},
          {"f_empirical", t.f_empirical}};
}

inline double total_variation_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("distributions differ in size");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s;
}

// Everything except duration_seconds is a function of the scenario alone.
inline json run_report(const ProtocolTranscript& t, const std::vector<double>& oracle, double duration_seconds) {
  json estimates = json::object();
  for (std::size_t k = 0; k < oracle.size(); ++k) {
    estimates[outcome_label(k, t.n)] = {{"estimate", t.estimates[k]}, {"oracle", oracle[k]}};
  }
  const CostBreakdown predicted = communication_cost(t.n, t.deltas, t.scenario.rounds);
  const RealizedBits bits = realized_bits(t.messages);
  json warnings = json::array();
  if (t.residual_discarded) {
    warnings.push_back("discarded " + std::to_string(t.removal.residual) +
                       " unmatched negative rounds; estimates are biased");
  }
  json messages = json::array();
  for (const auto& m : t.messages) messages.push_back(to_json(m));
  return {{"scenario", to_json(t.scenario)},
          {"seed", t.scenario.seed},
          {"n", t.n},
          {"rounds", t.scenario.rounds},
          {"reduced_rows", t.reduced_size()},
          {"deltas", t.deltas},
          {"branch_probabilities", t.branch_probabilities},
          {"estimates", estimates},
          {"total_variation_distance", total_variation_distance(t.estimates, oracle)},
          {"f_empirical", t.f_empirical},
          {"f_theoretical", survival_fraction(t.deltas).f},
          {"cost_predicted", to_json(predicted)},
          {"bits_realized",
           {{"inbound_alpha", bits.inbound_alpha},
            {"inbound_r_raw", bits.inbound_r_raw},
            {"inbound_r_coded", bits.inbound_r_coded},
            {"outbound", bits.outbound},
            {"total_raw", bits.total_raw()},
            {"total_coded", bits.total_coded()}}},
          {"messages", messages},
          {"residual_negative_count", t.removal.residual},
          {"residual_discarded", t.residual_discarded},
          {"warnings", warnings},
          {"duration_seconds", duration_seconds}};
}

// row, r1, alpha1, ..., rn, alphan
inline void write_pre_removal_csv(std::ostream& out, const ProtocolTranscript& t) {
  out << "row";
  for (int i = 1; i <= t.n; ++i) out << ",r" << i << ",alpha" << i;
  out << '\n';
  for (std::size_t k = 0; k < t.r_global.size(); ++k) {
    out << k + 1;
    for (const auto& p : t.parties) out << ',' << int{p.r[k]} << ',' << int{p.alpha[k]};
    out << '\n';
  }
}

// row, r, alpha1, ..., alphan; every surviving row has r = +1.
inline void write_reduced_csv(std::ostream& out, const ProtocolTranscript& t) {
  out << "row,r";
  for (int i = 1; i <= t.n; ++i) out << ",alpha" << i;
  out << '\n';
  for (std::size_t k = 0; k < t.removal.outcomes.size(); ++k) {
    out << k + 1 << ",1";
    for (int i = 0; i < t.n; ++i) out << ',' << outcome_sign(t.removal.outcomes[k], i, t.n);
    out << '\n';
  }
}

}  // namespace qsim::io
