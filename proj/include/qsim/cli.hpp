#pragma once

// Subcommand implementations behind tools/qsim. Each returns the process
// exit code: 0 success, 1 configuration or input error, 2 unmatched negative
// rounds under residual_policy = fail.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsim/errors.hpp"
#include "qsim/frame_rep.hpp"
#include "qsim/io.hpp"
#include "qsim/nebit.hpp"
#include "qsim/protocol.hpp"
#include "qsim/quantum_oracle.hpp"
#include "qsim/stats_costs.hpp"

namespace qsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitResidual = 2;

namespace detail {

inline void write_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path);
  if (!file) throw ParseError("cannot write " + path);
  file << j.dump(2) << '\n';
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream file(path);
  if (!file) throw ParseError("cannot write " + path);
  writer(file);
}

inline std::optional<std::uint64_t> parse_seed(const char* text) {
  if (text == nullptr || *text == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (text[used] != '\0') throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("QSIM_SEED is not an unsigned integer: ") + text);
  }
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ResidualNegativeEvents& e) {
    err << "error: " << e.what() << '\n';
    return kExitResidual;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace detail

inline std::optional<std::uint64_t> seed_from_env() { return detail::parse_seed(std::getenv("QSIM_SEED")); }

struct SimulateOptions {
  std::string config;
  std::string out;
  std::string dump_pre_removal;
  std::string dump_reduced;
  std::optional<std::uint64_t> seed_override;
};

// Builds the run report for a scenario. Throws on any failure.
inline nlohmann::json simulate(const Scenario& scenario, ProtocolTranscript* transcript_out = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  ProtocolTranscript transcript = run_protocol(scenario);
  const auto oracle = born_probabilities(make_state(scenario.state), scenario.directions);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto report = io::run_report(transcript, oracle, seconds);
  if (transcript_out) *transcript_out = std::move(transcript);
  return report;
}

inline int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    Scenario scenario = io::read_scenario(opts.config);
    if (opts.seed_override) scenario.seed = *opts.seed_override;
    ProtocolTranscript transcript;
    const auto report = simulate(scenario, &transcript);
    if (!opts.dump_pre_removal.empty()) {
      detail::write_file(opts.dump_pre_removal, [&](std::ostream& f) { io::write_pre_removal_csv(f, transcript); });
    }
    if (!opts.dump_reduced.empty()) {
      detail::write_file(opts.dump_reduced, [&](std::ostream& f) { io::write_reduced_csv(f, transcript); });
    }
    for (const auto& w : report.at("warnings")) err << "warning: " << w.get<std::string>() << '\n';
    detail::write_json(report, opts.out, out);
    return kExitOk;
  });
}

struct PredictCostOptions {
  std::optional<int> n;
  std::vector<double> deltas;
  std::string directions;
  DecompositionStrategy strategy = DecompositionStrategy::minimal;
  bool mermin = false;
  std::uint64_t rounds = 1;
  std::optional<double> entropy;  // fixed H in place of H_b(t_i)
  std::string csv;                // sweep over n = 2..sweep_max
  int sweep_max = 10;
  std::string out;
};

namespace detail {

inline std::vector<double> resolve_deltas(const PredictCostOptions& opts) {
  if (opts.mermin) {
    if (!opts.n) throw ParseError("--mermin needs --n");
    if (*opts.n < 1) throw DomainError("n must be >= 1");
    return std::vector<double>(static_cast<std::size_t>(*opts.n), kPauliNebit);
  }
  std::vector<double> deltas = opts.deltas;
  if (!opts.directions.empty()) {
    for (const auto& m : io::parse_direction_list(opts.directions)) {
      deltas.push_back(decompose(measurement_process(m), opts.strategy).delta);
    }
  }
  if (deltas.empty()) {
    if (!opts.n) throw ParseError("give --n, --deltas, --directions or --mermin");
    if (*opts.n < 1) throw DomainError("n must be >= 1");
    return std::vector<double>(static_cast<std::size_t>(*opts.n), kPauliNebit);
  }
  if (deltas.size() == 1 && opts.n && *opts.n > 1) deltas.assign(static_cast<std::size_t>(*opts.n), deltas[0]);
  if (opts.n && static_cast<std::size_t>(*opts.n) != deltas.size()) {
    throw ShapeError("--n does not match the number of deltas");
  }
  return deltas;
}

}  // namespace detail

inline nlohmann::json predict_cost(const PredictCostOptions& opts) {
  const auto deltas = detail::resolve_deltas(opts);
  const int n = static_cast<int>(deltas.size());
  const auto formula = communication_cost(n, deltas, opts.rounds);
  nlohmann::json j{{"n", n}, {"cost", io::to_json(formula)}};
  std::vector<double> entropies;
  for (std::size_t i = 1; i < deltas.size(); ++i) entropies.push_back(binary_entropy(branch_probability(deltas[i])));
  j["branch_entropies"] = entropies;
  const auto survival = survival_fraction(deltas);
  j["survival"] = {{"f", survival.f}, {"lower", survival.lower}, {"upper", survival.upper}};
  std::optional<double> quoted = opts.entropy;
  if (!quoted && opts.mermin) quoted = kQuotedPauliEntropy;
  if (quoted) j["cost_fixed_entropy"] = io::to_json(communication_cost(n, deltas, opts.rounds, quoted));
  return j;
}

inline int cmd_predict_cost(const PredictCostOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto j = predict_cost(opts);
    if (!opts.csv.empty()) {
      const auto formula = mermin_cost_table(opts.sweep_max, opts.rounds);
      const auto quoted = mermin_cost_table(opts.sweep_max, opts.rounds, opts.entropy.value_or(kQuotedPauliEntropy));
      detail::write_file(opts.csv, [&](std::ostream& f) {
        f << "n,f,per_entry_bits,per_entry_bits_fixed_entropy\n" << std::setprecision(17);
        for (std::size_t k = 0; k < formula.size(); ++k) {
          f << formula[k].n << ',' << formula[k].f << ',' << formula[k].per_entry_bits << ','
            << quoted[k].per_entry_bits << '\n';
        }
      });
    }
    detail::write_json(j, opts.out, out);
    return kExitOk;
  });
}

struct OracleOptions {
  std::string config;  // take state and measurements from a scenario file
  std::string state;   // inline state JSON
  std::optional<int> ghz;
  std::string product;
  std::string density_file;
  std::string directions;
  std::string out;
};

inline nlohmann::json oracle_table(const OracleOptions& opts) {
  std::optional<StateSpec> spec;
  std::vector<BlochVector> directions;
  if (!opts.config.empty()) {
    const Scenario s = io::read_scenario(opts.config);
    spec = s.state;
    directions = s.directions;
  }
  if (!opts.state.empty()) {
    try {
      spec = io::state_spec_from_json(nlohmann::json::parse(opts.state));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("--state: ") + e.what());
    }
  }
  if (opts.ghz) spec = StateSpec::ghz(*opts.ghz);
  if (!opts.product.empty()) spec = StateSpec::product(io::parse_direction_list(opts.product));
  if (!opts.density_file.empty()) spec = StateSpec::file(opts.density_file);
  if (!spec) throw ParseError("no state given");
  if (!opts.directions.empty()) directions = io::parse_direction_list(opts.directions);

  const DensityMatrix rho = make_state(*spec);
  const auto q = born_probabilities(rho, directions);
  nlohmann::json measurements = nlohmann::json::array();
  for (const auto& m : directions) measurements.push_back(io::to_json(m));
  return {{"n", rho.n_qubits()},
          {"state", io::to_json(*spec)},
          {"measurements", measurements},
          {"probabilities", io::outcome_map(q, rho.n_qubits())}};
}

inline int cmd_oracle(const OracleOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::write_json(oracle_table(opts), opts.out, out);
    return kExitOk;
  });
}

struct DecomposeOptions {
  std::string direction;
  DecompositionStrategy strategy = DecompositionStrategy::minimal;
  std::string out;
};

inline nlohmann::json decomposition_report(const DecomposeOptions& opts) {
  const BlochVector m = io::parse_direction(opts.direction);
  const auto eta = measurement_process(m);
  const auto dec = decompose(eta, opts.strategy);
  auto j = io::to_json(dec);
  j["direction"] = io::to_json(m);
  j["strategy"] = std::string(to_string(opts.strategy));
  j["negativity"] = negativity(eta);
  j["process"] = eta.entries;
  return j;
}

inline int cmd_decompose(const DecomposeOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::write_json(decomposition_report(opts), opts.out, out);
    return kExitOk;
  });
}

}  // namespace qsim::cli
