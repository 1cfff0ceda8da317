#include "qsim/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace qsim;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("qsim_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const auto p = (path_ / name).string();
    if (!content.empty()) std::ofstream(p) << content;
    return p;
  }

 private:
  fs::path path_;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const char* kGhzDiscard = R"({
  "state": {"kind": "ghz", "n": 3},
  "measurements": [[0, 0, 1], [0, 0, 1], [0, 0, 1]],
  "rounds": 20000,
  "seed": 11,
  "residual_policy": "discard"
})";

}  // namespace

TEST(Direction, parsing) {
  EXPECT_EQ(io::parse_direction("x"), axes::X);
  EXPECT_EQ(io::parse_direction("-y"), (BlochVector{0, -1, 0}));
  EXPECT_EQ(io::parse_direction("0.6,0,0.8"), (BlochVector{0.6, 0, 0.8}));
  EXPECT_EQ(io::parse_direction_list("x;z;-z").size(), 3u);
  EXPECT_THROW(io::parse_direction("w"), ParseError);
  EXPECT_THROW(io::parse_direction("1,2"), ParseError);
}

TEST(ScenarioJson, round_trip) {
  Scenario s;
  s.state = StateSpec::product({axes::Z, {0.1, 0.2, 0.3}});
  s.directions = {axes::X, {0.6, 0.0, 0.8}};
  s.rounds = 123;
  s.seed = 9;
  s.strategy = DecompositionStrategy::uniform;
  s.coding = CodingModel::entropy_empirical;
  s.residual_policy = ResidualPolicy::discard;
  EXPECT_EQ(io::scenario_from_json(io::to_json(s)), s);
  for (const auto& spec : {StateSpec::ghz(4), StateSpec::random_pure(2, 5), StateSpec::random_mixed(3, 6),
                           StateSpec::file("rho.json")}) {
    EXPECT_EQ(io::state_spec_from_json(io::to_json(spec)), spec);
  }
}

TEST(ScenarioJson, defaults) {
  const auto s = io::scenario_from_json(json::parse(
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 0, 0]], "rounds": 5, "seed": 1})"));
  EXPECT_EQ(s.strategy, DecompositionStrategy::minimal);
  EXPECT_EQ(s.coding, CodingModel::entropy_theoretical);
  EXPECT_EQ(s.residual_policy, ResidualPolicy::fail);
}

TEST(ScenarioJson, parse_errors) {
  const char* bad[] = {
      R"([1, 2])",
      R"({"measurements": [[1, 0, 0]], "rounds": 5, "seed": 1})",
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 0, 0]], "rounds": 0, "seed": 1})",
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 0, 0]], "rounds": 2.5, "seed": 1})",
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 1, 0]], "rounds": 5, "seed": 1})",
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 0]], "rounds": 5, "seed": 1})",
      R"({"state": {"kind": "bell"}, "measurements": [[1, 0, 0]], "rounds": 5, "seed": 1})",
      R"({"state": {"kind": "ghz", "n": 1}, "measurements": [[1, 0, 0]], "rounds": 5, "seed": 1, "coding": "zip"})",
  };
  for (const char* text : bad) EXPECT_THROW(io::scenario_from_json(json::parse(text)), ParseError) << text;
  EXPECT_THROW(io::read_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST(Simulate, config_errors_exit_one) {
  TempDir dir;
  std::ostringstream out;
  std::ostringstream err;
  cli::SimulateOptions opts;
  opts.config = dir.file("broken.json", "{ not json");
  EXPECT_EQ(cli::cmd_simulate(opts, out, err), cli::kExitConfig);
  EXPECT_NE(err.str().find("error"), std::string::npos);

  opts.config = dir.file("mismatch.json",
                         R"({"state": {"kind": "ghz", "n": 2}, "measurements": [[1, 0, 0]], "rounds": 5, "seed": 1})");
  EXPECT_EQ(cli::cmd_simulate(opts, out, err), cli::kExitConfig);
}

TEST(Simulate, forced_residual_exits_two) {
  // One round: if r = −1, nothing can cancel it. Search for such a seed.
  TempDir dir;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 50 && !found; ++seed) {
    Scenario s;
    s.state = StateSpec::ghz(1);
    s.directions = {axes::Z};
    s.rounds = 1;
    s.seed = seed;
    s.residual_policy = ResidualPolicy::fail;
    bool residual = false;
    try {
      run_protocol(s);
    } catch (const ResidualNegativeEvents& e) {
      residual = true;
      EXPECT_EQ(e.residual(), 1u);
    }
    if (!residual) continue;
    found = true;
    cli::SimulateOptions opts;
    opts.config = dir.file("one_round.json", io::to_json(s).dump());
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(cli::cmd_simulate(opts, out, err), cli::kExitResidual);
    EXPECT_TRUE(out.str().empty());
  }
  EXPECT_TRUE(found);
}

TEST(Simulate, report_is_deterministic_except_duration) {
  TempDir dir;
  cli::SimulateOptions opts;
  opts.config = dir.file("ghz.json", kGhzDiscard);
  std::ostringstream out1, out2, err;
  ASSERT_EQ(cli::cmd_simulate(opts, out1, err), cli::kExitOk);
  ASSERT_EQ(cli::cmd_simulate(opts, out2, err), cli::kExitOk);
  auto a = json::parse(out1.str());
  auto b = json::parse(out2.str());
  EXPECT_TRUE(a.contains("duration_seconds"));
  a.erase("duration_seconds");
  b.erase("duration_seconds");
  EXPECT_EQ(a, b);
}

TEST(Simulate, report_fields) {
  TempDir dir;
  cli::SimulateOptions opts;
  opts.config = dir.file("ghz.json", kGhzDiscard);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_simulate(opts, out, err), cli::kExitOk);
  const auto r = json::parse(out.str());
  for (const char* key : {"scenario", "seed", "n", "rounds", "reduced_rows", "deltas", "branch_probabilities",
                          "estimates", "total_variation_distance", "f_empirical", "f_theoretical", "cost_predicted",
                          "bits_realized", "messages", "residual_negative_count", "residual_discarded", "warnings"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(r["n"], 3);
  EXPECT_EQ(r["estimates"].size(), 8u);
  EXPECT_NEAR(r["estimates"]["+++"]["oracle"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(r["f_theoretical"].get<double>(), 1 / std::pow(std::sqrt(3.0), 3), 1e-12);
  if (r["residual_discarded"].get<bool>()) {
    EXPECT_EQ(r["warnings"].size(), 1u);
    EXPECT_NE(err.str().find("warning"), std::string::npos);
  }
  for (const auto& m : r["messages"]) {
    EXPECT_FALSE(m.contains("payload"));
    const auto kind = m["payload_kind"].get<std::string>();
    EXPECT_TRUE(kind == "alpha_column" || kind == "r_column" || kind == "reduced_alpha_column");
  }
}

TEST(Simulate, seed_override_and_environment) {
  TempDir dir;
  cli::SimulateOptions opts;
  opts.config = dir.file("ghz.json", kGhzDiscard);
  std::ostringstream base, over, err;
  ASSERT_EQ(cli::cmd_simulate(opts, base, err), cli::kExitOk);
  opts.seed_override = 12;
  ASSERT_EQ(cli::cmd_simulate(opts, over, err), cli::kExitOk);
  EXPECT_EQ(json::parse(over.str())["seed"], 12);
  EXPECT_NE(json::parse(base.str())["estimates"], json::parse(over.str())["estimates"]);

  ::setenv("QSIM_SEED", "4242", 1);
  EXPECT_EQ(cli::seed_from_env(), std::optional<std::uint64_t>(4242));
  ::setenv("QSIM_SEED", "abc", 1);
  EXPECT_THROW(cli::seed_from_env(), ParseError);
  ::unsetenv("QSIM_SEED");
  EXPECT_FALSE(cli::seed_from_env().has_value());
}

TEST(Simulate, csv_dumps) {
  TempDir dir;
  cli::SimulateOptions opts;
  opts.config = dir.file("ghz.json", kGhzDiscard);
  opts.dump_pre_removal = dir.file("pre.csv");
  opts.dump_reduced = dir.file("reduced.csv");
  opts.out = dir.file("report.json");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_simulate(opts, out, err), cli::kExitOk);
  EXPECT_TRUE(out.str().empty());
  const auto report = json::parse(read_all(opts.out));

  const auto pre = lines_of(read_all(opts.dump_pre_removal));
  ASSERT_EQ(pre.size(), 20001u);
  EXPECT_EQ(pre[0], "row,r1,alpha1,r2,alpha2,r3,alpha3");
  EXPECT_EQ(pre[1].substr(0, 2), "1,");

  const auto reduced = lines_of(read_all(opts.dump_reduced));
  EXPECT_EQ(reduced[0], "row,r,alpha1,alpha2,alpha3");
  EXPECT_EQ(reduced.size(), report["reduced_rows"].get<std::size_t>() + 1);
  for (std::size_t k = 1; k < reduced.size(); ++k) {
    EXPECT_EQ(reduced[k].find(std::to_string(k) + ",1,"), 0u);
  }
}

TEST(Simulate, realized_bits_match_prediction) {
  Scenario s;
  s.state = StateSpec::random_pure(3, 4);
  s.directions = {axes::X, {0.0, 0.6, 0.8}, axes::Z};
  s.rounds = 40000;
  s.seed = 3;
  s.residual_policy = ResidualPolicy::discard;
  ProtocolTranscript t;
  const auto report = cli::simulate(s, &t);
  const auto& predicted = report["cost_predicted"];
  const auto& realized = report["bits_realized"];
  EXPECT_EQ(realized["inbound_alpha"].get<double>(), predicted["inbound_alpha"].get<double>());
  EXPECT_NEAR(realized["inbound_r_coded"].get<double>(), predicted["inbound_r"].get<double>(), 1e-6);
  // Outbound depends on the realized M; the formula uses its mean f·N.
  EXPECT_EQ(realized["outbound"].get<double>(), 2.0 * static_cast<double>(t.reduced_size()));
  EXPECT_NEAR(realized["outbound"].get<double>() / predicted["outbound"].get<double>(),
              t.f_empirical / survival_fraction(t.deltas).f, 1e-9);
}

TEST(Oracle, ghz_and_product_tables) {
  cli::OracleOptions opts;
  opts.ghz = 3;
  opts.directions = "x;x;x";
  auto q = cli::oracle_table(opts)["probabilities"];
  EXPECT_NEAR(q["+++"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(q["++-"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(q["--+"].get<double>(), 0.25, 1e-12);

  opts.directions = "z;z;z";
  q = cli::oracle_table(opts)["probabilities"];
  EXPECT_NEAR(q["+++"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(q["---"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(q["+-+"].get<double>(), 0.0, 1e-12);

  cli::OracleOptions product;
  product.product = "z";
  product.directions = "z";
  q = cli::oracle_table(product)["probabilities"];
  EXPECT_NEAR(q["+"].get<double>(), 1.0, 1e-12);

  cli::OracleOptions inline_state;
  inline_state.state = R"({"kind": "ghz", "n": 2})";
  inline_state.directions = "x;x";
  EXPECT_NEAR(cli::oracle_table(inline_state)["probabilities"]["++"].get<double>(), 0.5, 1e-12);

  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_oracle(cli::OracleOptions{}, out, err), cli::kExitConfig);
  cli::OracleOptions mismatch;
  mismatch.ghz = 2;
  mismatch.directions = "x";
  EXPECT_EQ(cli::cmd_oracle(mismatch, out, err), cli::kExitConfig);
}

TEST(Oracle, density_file) {
  TempDir dir;
  const auto rho = random_mixed_state(2, 21);
  cli::OracleOptions opts;
  opts.density_file = dir.file("rho.json", density_to_json(rho).dump());
  opts.directions = "x;0.6,0,0.8";
  const auto q = cli::oracle_table(opts)["probabilities"];
  const auto expected = born_probabilities(rho, {axes::X, {0.6, 0, 0.8}});
  EXPECT_NEAR(q["+-"].get<double>(), expected[1], 1e-12);
}

TEST(PredictCost, mermin_three) {
  cli::PredictCostOptions opts;
  opts.mermin = true;
  opts.n = 3;
  const auto j = cli::predict_cost(opts);
  EXPECT_NEAR(j["cost"]["per_entry_bits"].get<double>(), 20.13, 0.01);
  EXPECT_NEAR(j["cost_fixed_entropy"]["per_entry_bits"].get<double>(), 22.40, 0.01);
  EXPECT_EQ(j["cost_fixed_entropy"]["entropy_override"].get<double>(), kQuotedPauliEntropy);
  EXPECT_EQ(j["branch_entropies"].size(), 2u);
}

TEST(PredictCost, single_party_and_mixed_deltas) {
  cli::PredictCostOptions one;
  one.n = 1;
  const auto j1 = cli::predict_cost(one);
  EXPECT_EQ(j1["cost"]["total_bits"].get<double>(), 0.0);
  EXPECT_EQ(j1["cost"]["per_entry_bits"].get<double>(), 0.0);

  cli::PredictCostOptions mixed;
  mixed.deltas = {0.366, 1.0};
  const auto j2 = cli::predict_cost(mixed);
  EXPECT_NEAR(j2["survival"]["f"].get<double>(), 0.19245, 1e-5);
  EXPECT_FALSE(j2.contains("cost_fixed_entropy"));

  cli::PredictCostOptions broadcast;
  broadcast.n = 4;
  broadcast.deltas = {0.5};
  EXPECT_EQ(cli::predict_cost(broadcast)["cost"]["deltas"].size(), 4u);

  cli::PredictCostOptions from_dirs;
  from_dirs.directions = "z;0.5773502691896258,0.5773502691896258,0.5773502691896258";
  const auto d = cli::predict_cost(from_dirs)["cost"]["deltas"];
  EXPECT_NEAR(d[0].get<double>(), kPauliNebit, 1e-12);
  EXPECT_NEAR(d[1].get<double>(), 1.0, 1e-9);

  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_predict_cost(cli::PredictCostOptions{}, out, err), cli::kExitConfig);
  cli::PredictCostOptions mismatch;
  mismatch.n = 3;
  mismatch.deltas = {0.4, 0.5};
  EXPECT_EQ(cli::cmd_predict_cost(mismatch, out, err), cli::kExitConfig);
}

TEST(PredictCost, csv_sweep) {
  TempDir dir;
  cli::PredictCostOptions opts;
  opts.mermin = true;
  opts.n = 3;
  opts.csv = dir.file("sweep.csv");
  opts.sweep_max = 6;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_predict_cost(opts, out, err), cli::kExitOk);
  const auto lines = lines_of(read_all(opts.csv));
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "n,f,per_entry_bits,per_entry_bits_fixed_entropy");
  EXPECT_EQ(lines[1].substr(0, 2), "2,");
  EXPECT_EQ(lines[5].substr(0, 2), "6,");
}

TEST(Decompose, report) {
  cli::DecomposeOptions opts;
  opts.direction = "z";
  const auto j = cli::decomposition_report(opts);
  EXPECT_NEAR(j["delta"].get<double>(), kPauliNebit, 1e-12);
  EXPECT_NEAR(j["t"].get<double>(), 0.7887, 1e-4);
  EXPECT_EQ(j["strategy"], "minimal");
  EXPECT_NEAR(j["negativity"].get<double>(), kPauliNebit, 1e-12);
  EXPECT_EQ(j["process"].size(), 2u);

  opts.strategy = DecompositionStrategy::uniform;
  EXPECT_NEAR(cli::decomposition_report(opts)["delta"].get<double>(), std::sqrt(3.0) - 1, 1e-12);

  std::ostringstream out, err;
  opts.direction = "0,0,2";
  EXPECT_EQ(cli::cmd_decompose(opts, out, err), cli::kExitConfig);
}

TEST(TotalVariation, values) {
  EXPECT_EQ(io::total_variation_distance({0.5, 0.5}, {0.5, 0.5}), 0.0);
  EXPECT_EQ(io::total_variation_distance({1.0, 0.0}, {0.0, 1.0}), 1.0);
  EXPECT_THROW(io::total_variation_distance({1.0}, {0.5, 0.5}), ShapeError);
}
