#pragma once

// The n-party simulation game. Every party holds one pair of columns of a
// shared table drawn from the quasi state, samples (r_i, α_i) locally from its
// private nebit decomposition, and ships both columns to party 1. Party 1
// multiplies the signs, cancels negative rounds against positive rounds with
// the same outcome string and returns the surviving α columns.

#include <algorithm>
#include <cstdint>
#include <future>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qsim/errors.hpp"
#include "qsim/frame_rep.hpp"
#include "qsim/nebit.hpp"
#include "qsim/quantum_oracle.hpp"
#include "qsim/rng.hpp"
#include "qsim/stats_costs.hpp"

namespace qsim {

enum class CodingModel { raw, entropy_theoretical, entropy_empirical };
enum class ResidualPolicy { fail, discard };

inline std::string_view to_string(CodingModel c) {
  switch (c) {
    case CodingModel::raw: return "raw";
    case CodingModel::entropy_theoretical: return "entropy_theoretical";
    case CodingModel::entropy_empirical: return "entropy_empirical";
  }
  return "raw";
}

inline CodingModel parse_coding(std::string_view s) {
  if (s == "raw") return CodingModel::raw;
  if (s == "entropy_theoretical") return CodingModel::entropy_theoretical;
  if (s == "entropy_empirical") return CodingModel::entropy_empirical;
  throw ParseError("unknown coding model '" + std::string(s) + "'");
}

inline std::string_view to_string(ResidualPolicy p) { return p == ResidualPolicy::fail ? "fail" : "discard"; }

inline ResidualPolicy parse_residual_policy(std::string_view s) {
  if (s == "fail") return ResidualPolicy::fail;
  if (s == "discard") return ResidualPolicy::discard;
  throw ParseError("unknown residual policy '" + std::string(s) + "'");
}

struct Scenario {
  StateSpec state;
  std::vector<BlochVector> directions;
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  DecompositionStrategy strategy = DecompositionStrategy::minimal;
  CodingModel coding = CodingModel::entropy_theoretical;
  ResidualPolicy residual_policy = ResidualPolicy::fail;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// N rows of n tetra codes, row-major.
class SourceTable {
 public:
  SourceTable(int n, std::uint64_t rounds) : n_(n), rounds_(rounds), codes_(static_cast<std::size_t>(rounds) * n) {}

  int n_parties() const { return n_; }
  std::uint64_t rounds() const { return rounds_; }

  TetraIndex at(std::uint64_t row, int party) const {
    return TetraIndex::from_code(codes_[static_cast<std::size_t>(row) * n_ + party]);
  }
  void set(std::uint64_t row, int party, int code) {
    codes_[static_cast<std::size_t>(row) * n_ + party] = static_cast<std::uint8_t>(code);
  }

  // The only view a party gets of the table.
  std::vector<TetraIndex> column(int party) const {
    std::vector<TetraIndex> out;
    out.reserve(static_cast<std::size_t>(rounds_));
    for (std::uint64_t row = 0; row < rounds_; ++row) out.push_back(at(row, party));
    return out;
  }

  friend bool operator==(const SourceTable&, const SourceTable&) = default;

 private:
  int n_;
  std::uint64_t rounds_;
  std::vector<std::uint8_t> codes_;
};

inline SourceTable draw_source(const QuasiState& p, std::uint64_t rounds, std::uint64_t seed) {
  if (rounds == 0) throw DomainError("need at least one round");
  const int n = p.n_parties();
  std::vector<double> cumulative(p.size());
  std::partial_sum(p.weights().begin(), p.weights().end(), cumulative.begin());
  const double total = cumulative.back();

  rng::Stream stream(seed, "source");
  SourceTable table(n, rounds);
  for (std::uint64_t row = 0; row < rounds; ++row) {
    const double x = stream.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    auto index = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                   static_cast<std::ptrdiff_t>(p.size() - 1)));
    for (int party = 0; party < n; ++party) table.set(row, party, QuasiState::code_of(index, party, n));
  }
  return table;
}

struct PartyColumns {
  std::vector<std::int8_t> r;
  std::vector<std::int8_t> alpha;

  friend bool operator==(const PartyColumns&, const PartyColumns&) = default;
};

inline PartyColumns local_step(const std::vector<TetraIndex>& column, const NebitDecomposition& dec,
                               std::uint64_t seed) {
  rng::Stream stream(seed);
  PartyColumns out;
  out.r.reserve(column.size());
  out.alpha.reserve(column.size());
  for (const auto& idx : column) {
    const int r = sample_branch(dec, stream.uniform());
    const double draw = stream.uniform();
    const int alpha = apply_stochastic(r > 0 ? dec.s_plus : dec.s_minus, idx, draw);
    out.r.push_back(static_cast<std::int8_t>(r));
    out.alpha.push_back(static_cast<std::int8_t>(alpha));
  }
  return out;
}

enum class PayloadKind { alpha_column, r_column, reduced_alpha_column };

inline std::string_view to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::alpha_column: return "alpha_column";
    case PayloadKind::r_column: return "r_column";
    case PayloadKind::reduced_alpha_column: return "reduced_alpha_column";
  }
  return "alpha_column";
}

// Parties are numbered from 1 as in A_1 ... A_n.
struct Message {
  int from = 0;
  int to = 0;
  PayloadKind payload_kind = PayloadKind::alpha_column;
  std::vector<std::int8_t> payload;
  std::uint64_t symbol_count = 0;
  std::uint64_t raw_bits = 0;
  double coded_bits = 0.0;

  friend bool operator==(const Message&, const Message&) = default;
};

namespace detail {

inline double plus_frequency(const std::vector<std::int8_t>& column) {
  if (column.empty()) return 1.0;
  const auto plus = std::count(column.begin(), column.end(), std::int8_t{1});
  return static_cast<double>(plus) / static_cast<double>(column.size());
}

inline Message make_message(int from, int to, PayloadKind kind, std::vector<std::int8_t> payload) {
  Message m;
  m.from = from;
  m.to = to;
  m.payload_kind = kind;
  m.symbol_count = payload.size();
  m.raw_bits = payload.size();
  m.coded_bits = static_cast<double>(payload.size());
  m.payload = std::move(payload);
  return m;
}

}  // namespace detail

struct Exchange {
  std::vector<Message> messages;
  // Columns as party 1 sees them after receipt, indexed by party (0-based).
  std::vector<PartyColumns> received;
};

// branch_probabilities[i] is t_i, known to party i only; it sets the ideal
// code length of that party's r column under entropy_theoretical.
inline Exchange exchange(const std::vector<PartyColumns>& parties, const std::vector<double>& branch_probabilities,
                         CodingModel coding) {
  if (branch_probabilities.size() != parties.size()) throw ShapeError("need one t per party");
  Exchange ex;
  if (parties.empty()) return ex;
  ex.received.resize(parties.size());
  ex.received[0] = parties[0];
  for (std::size_t i = 1; i < parties.size(); ++i) {
    const int from = static_cast<int>(i) + 1;
    auto alpha = detail::make_message(from, 1, PayloadKind::alpha_column, parties[i].alpha);
    auto r = detail::make_message(from, 1, PayloadKind::r_column, parties[i].r);
    const double symbols = static_cast<double>(r.symbol_count);
    switch (coding) {
      case CodingModel::raw: break;
      case CodingModel::entropy_theoretical: r.coded_bits = symbols * binary_entropy(branch_probabilities[i]); break;
      case CodingModel::entropy_empirical:
        r.coded_bits = symbols * binary_entropy(detail::plus_frequency(parties[i].r));
        break;
    }
    ex.messages.push_back(std::move(alpha));
    ex.messages.push_back(std::move(r));
  }
  // Party 1 rebuilds the other columns from what arrived.
  for (const auto& m : ex.messages) {
    auto& slot = ex.received[static_cast<std::size_t>(m.from - 1)];
    (m.payload_kind == PayloadKind::r_column ? slot.r : slot.alpha) = m.payload;
  }
  return ex;
}

struct RemovalResult {
  std::vector<std::size_t> outcomes;  // reduced table, outcome index per surviving row
  std::vector<std::uint64_t> kept_rows;
  std::uint64_t residual = 0;  // unmatched negative rounds

  friend bool operator==(const RemovalResult&, const RemovalResult&) = default;
};

// Each r = −1 row cancels the earliest not-yet-cancelled r = +1 row with the
// same outcome string. Survivors keep their original order.
inline RemovalResult remove_pairs(const std::vector<std::int8_t>& r_global, const std::vector<std::size_t>& alpha_rows,
                                  ResidualPolicy policy) {
  if (r_global.size() != alpha_rows.size()) throw ShapeError("sign and outcome columns differ in length");

  std::unordered_map<std::size_t, std::uint64_t> negatives;
  for (std::size_t k = 0; k < r_global.size(); ++k) {
    if (r_global[k] < 0) ++negatives[alpha_rows[k]];
  }

  RemovalResult out;
  for (std::size_t k = 0; k < r_global.size(); ++k) {
    if (r_global[k] < 0) continue;
    auto it = negatives.find(alpha_rows[k]);
    if (it != negatives.end() && it->second > 0) {
      --it->second;
      continue;
    }
    out.outcomes.push_back(alpha_rows[k]);
    out.kept_rows.push_back(k);
  }
  for (const auto& [outcome, left] : negatives) out.residual += left;
  if (out.residual > 0 && policy == ResidualPolicy::fail) throw ResidualNegativeEvents(out.residual);
  return out;
}

// M_α / M over the reduced table.
inline std::vector<double> estimate(const std::vector<std::size_t>& reduced, int n) {
  if (reduced.empty()) throw EmptyTable("reduced table is empty");
  std::vector<double> q(std::size_t{1} << n, 0.0);
  for (std::size_t outcome : reduced) q.at(outcome) += 1.0;
  const double m = static_cast<double>(reduced.size());
  for (double& v : q) v /= m;
  return q;
}

struct ProtocolTranscript {
  Scenario scenario;
  int n = 0;
  std::vector<double> deltas;
  std::vector<double> branch_probabilities;
  SourceTable source{1, 1};
  std::vector<PartyColumns> parties;
  std::vector<Message> messages;
  std::vector<std::int8_t> r_global;
  std::vector<std::size_t> alpha_rows;
  RemovalResult removal;
  bool residual_discarded = false;
  std::vector<double> estimates;
  double f_empirical = 0.0;

  std::uint64_t reduced_size() const { return removal.outcomes.size(); }

  friend bool operator==(const ProtocolTranscript&, const ProtocolTranscript&) = default;
};

inline std::uint64_t party_seed(std::uint64_t master, int party) {
  return rng::derive_seed(master, "party", static_cast<std::uint64_t>(party));
}

inline ProtocolTranscript run_protocol(const Scenario& scenario) {
  if (scenario.rounds == 0) throw DomainError("need at least one round");
  const DensityMatrix rho = make_state(scenario.state);
  const int n = rho.n_qubits();
  if (scenario.directions.size() != static_cast<std::size_t>(n)) {
    throw ShapeError("scenario has " + std::to_string(scenario.directions.size()) + " directions for " +
                     std::to_string(n) + " qubits");
  }

  ProtocolTranscript tr;
  tr.scenario = scenario;
  tr.n = n;
  tr.source = draw_source(quasi_state_from_density(rho), scenario.rounds, scenario.seed);

  std::vector<NebitDecomposition> decs;
  for (const auto& m : scenario.directions) {
    decs.push_back(decompose(measurement_process(m), scenario.strategy));
    tr.deltas.push_back(decs.back().delta);
    tr.branch_probabilities.push_back(decs.back().t);
  }

  // Each party works on its own column with its own stream.
  std::vector<std::future<PartyColumns>> pending;
  for (int i = 0; i < n; ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      return local_step(tr.source.column(i), decs[static_cast<std::size_t>(i)], party_seed(scenario.seed, i));
    }));
  }
  for (auto& f : pending) tr.parties.push_back(f.get());

  Exchange ex = exchange(tr.parties, tr.branch_probabilities, scenario.coding);
  tr.messages = std::move(ex.messages);

  const std::size_t rounds = static_cast<std::size_t>(scenario.rounds);
  tr.r_global.assign(rounds, 1);
  tr.alpha_rows.assign(rounds, 0);
  std::vector<int> signs(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < rounds; ++k) {
    int r = 1;
    for (int i = 0; i < n; ++i) {
      const auto& cols = ex.received[static_cast<std::size_t>(i)];
      r *= cols.r[k];
      signs[static_cast<std::size_t>(i)] = cols.alpha[k];
    }
    tr.r_global[k] = static_cast<std::int8_t>(r);
    tr.alpha_rows[k] = outcome_index(signs);
  }

  tr.removal = remove_pairs(tr.r_global, tr.alpha_rows, scenario.residual_policy);
  tr.residual_discarded = tr.removal.residual > 0;
  tr.f_empirical = static_cast<double>(tr.removal.outcomes.size()) / static_cast<double>(rounds);

  for (int i = 1; i < n; ++i) {
    std::vector<std::int8_t> reduced_alpha;
    reduced_alpha.reserve(tr.removal.outcomes.size());
    for (std::size_t outcome : tr.removal.outcomes) {
      reduced_alpha.push_back(static_cast<std::int8_t>(outcome_sign(outcome, i, n)));
    }
    tr.messages.push_back(detail::make_message(1, i + 1, PayloadKind::reduced_alpha_column, std::move(reduced_alpha)));
  }

  tr.estimates = estimate(tr.removal.outcomes, n);
  return tr;
}

}  // namespace qsim
