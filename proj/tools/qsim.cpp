#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Classical simulation of local qubit measurements with shared randomness and communication"};
  app.require_subcommand(1);

  qsim::cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the protocol for a scenario and report estimates");
  simulate->add_option("--config", sim.config, "Scenario JSON")->required();
  simulate->add_option("--out", sim.out, "Write the report here instead of stdout");
  simulate->add_option("--dump-pre-removal", sim.dump_pre_removal, "CSV of r_i, alpha_i per round");
  simulate->add_option("--dump-reduced", sim.dump_reduced, "CSV of the table after removal");

  qsim::cli::PredictCostOptions cost;
  std::string cost_strategy = "minimal";
  auto* predict = app.add_subcommand("predict-cost", "Closed-form communication cost");
  predict->add_option("--n", cost.n, "Number of parties");
  predict->add_option("--deltas", cost.deltas, "Nebit weights, comma separated")->delimiter(',');
  predict->add_option("--directions", cost.directions, "Directions, ';' separated (x, -z or mx,my,mz)");
  predict->add_option("--strategy", cost_strategy, "Decomposition for --directions")
      ->check(CLI::IsMember({"minimal", "uniform"}));
  predict->add_flag("--mermin", cost.mermin, "GHZ_n with Pauli measurements");
  predict->add_option("--rounds", cost.rounds, "Rounds N for absolute bit counts");
  predict->add_option("--entropy", cost.entropy, "Fixed per-party entropy in place of H_b(t_i)");
  predict->add_option("--csv", cost.csv, "Write a per-entry cost sweep over n");
  predict->add_option("--sweep-max", cost.sweep_max, "Largest n in the sweep");
  predict->add_option("--out", cost.out, "Write JSON here instead of stdout");

  qsim::cli::OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact Born-rule probabilities");
  oracle_cmd->add_option("--config", oracle.config, "Take state and measurements from a scenario");
  oracle_cmd->add_option("--state", oracle.state, "State spec JSON");
  oracle_cmd->add_option("--ghz", oracle.ghz, "GHZ state on n qubits");
  oracle_cmd->add_option("--product", oracle.product, "Product state Bloch vectors, ';' separated");
  oracle_cmd->add_option("--density-file", oracle.density_file, "Density matrix JSON");
  oracle_cmd->add_option("--directions", oracle.directions, "Directions, ';' separated");
  oracle_cmd->add_option("--out", oracle.out, "Write JSON here instead of stdout");

  qsim::cli::DecomposeOptions dec;
  std::string dec_strategy = "minimal";
  auto* decompose = app.add_subcommand("decompose", "Nebit decomposition of one measurement");
  decompose->add_option("--direction", dec.direction, "x, -z or mx,my,mz")->required();
  decompose->add_option("--strategy", dec_strategy)->check(CLI::IsMember({"minimal", "uniform"}));
  decompose->add_option("--out", dec.out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsim::cli::kExitConfig;
  }

  if (simulate->parsed()) {
    try {
      sim.seed_override = qsim::cli::seed_from_env();
    } catch (const qsim::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return qsim::cli::kExitConfig;
    }
    return qsim::cli::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (predict->parsed()) {
    cost.strategy = qsim::parse_strategy(cost_strategy);
    return qsim::cli::cmd_predict_cost(cost, std::cout, std::cerr);
  }
  if (oracle_cmd->parsed()) return qsim::cli::cmd_oracle(oracle, std::cout, std::cerr);
  dec.strategy = qsim::parse_strategy(dec_strategy);
  return qsim::cli::cmd_decompose(dec, std::cout, std::cerr);
}
