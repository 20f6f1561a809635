#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xorfold/experiment.hpp"
#include "xorfold/reports.hpp"

using namespace xorfold;

namespace {

ExperimentConfig small_config(const std::string& protocol) {
  ExperimentConfig c;
  c.protocol = protocol;
  c.ns = {6, 7, 8, 9};
  c.n_c_rule = {NcRuleKind::multiple, 3.0};
  c.instances = 3;
  c.seed = 17;
  c.runtime_grid = 2;
  c.restarts = 200;
  if (protocol != "qaoa" && protocol != "greedy") c.A = 0.8;
  return c;
}

std::string runs_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_runs_csv(os, r);
  return os.str();
}

std::string aggregate_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_aggregate_csv(os, r.rows, r.curves, r.config.n_c_rule.label(), r.config.epsilon);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Config, EmptyNListRejected) {
  auto c = small_config("qaoa");
  c.ns.clear();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, ValidationCatchesBadFields) {
  auto c = small_config("fold_aqc_quad");
  c.A.reset();
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("qaoa");
  c.instances = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("qaoa");
  c.ns = {40};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("annealing");
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("qaoa");
  c.n_c_rule.c = 100;  // more triples than exist at N = 6
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("greedy");
  c.ns = {40};
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTrip) {
  auto c = small_config("tma_3xor");
  c.t_r_per_n = 0.1;
  const auto text = to_json(c).dump();
  const auto back = config_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(to_json(back).dump(), text);
}

TEST(Config, JsonErrors) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"protocol": "qaoa", "N": [6], "n_c_rule": {"kind": "multiple", "c": 2}})")),
               ConfigError);  // no schema
  EXPECT_THROW(config_from_json(nlohmann::json::parse(
                   R"({"schema": 1, "protocol": "qaoa", "N": [6], "n_c_rule": {"kind": "cubic", "c": 2}})")),
               ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"schema": 1, "protocol": "qaoa", "N": "six"})")), ConfigError);
  const auto ok = config_from_json(nlohmann::json::parse(
      R"({"schema": 1, "protocol": "qaoa", "N": [9, 16], "n_c_rule": {"kind": "power", "c": 1.5}})"));
  EXPECT_TRUE(ok.sqrt_fit);
  EXPECT_EQ(ok.n_c_rule.count(16), 96);
}

TEST(Experiment, RowsCarryRegeneratingSeed) {
  const auto c = small_config("qaoa");
  const auto r = run_experiment(c, 1, false);
  ASSERT_EQ(r.runs.size(), 12u);
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& run = r.runs[i];
    EXPECT_EQ(run.seed, derive_seed(17, run.N, r.instance_index[i]));
    const auto inst = generate_ppsp(run.N, run.N_C, run.epsilon, run.seed);
    auto s = c.schedule_for(run.N);
    const auto again = runtime_average(inst, s, c.runtime_grid, nullptr, c.q_grid, c.d_grid);
    EXPECT_EQ(again.p_q, run.p_q);
  }
}

TEST(Experiment, ByteIdenticalAcrossRunsAndThreads) {
  for (const std::string p : {"qaoa", "fold_aqc_quad", "tma_3xor", "greedy"}) {
    const auto c = small_config(p);
    const auto a = run_experiment(c, 1, false);
    const auto b = run_experiment(c, 1, false);
    const auto t = run_experiment(c, 3, false);
    EXPECT_EQ(runs_csv(a), runs_csv(b)) << p;
    EXPECT_EQ(runs_csv(a), runs_csv(t)) << p;
    EXPECT_EQ(aggregate_csv(a), aggregate_csv(t)) << p;
    EXPECT_EQ(report_json(a).dump(), report_json(t).dump()) << p;
  }
}

TEST(Experiment, MassesAreProbabilities) {
  const auto r = run_experiment(small_config("tma_localz"), 2, false);
  for (const auto& run : r.runs) {
    for (std::size_t i = 0; i < run.p_q.size(); ++i) {
      EXPECT_GE(run.p_q[i], 0.0);
      EXPECT_LE(run.p_q[i], 1.0 + 1e-12);
      if (i) {
        EXPECT_LE(run.p_q[i], run.p_q[i - 1] + 1e-15);
      }
    }
    for (double p : run.p_d) EXPECT_LE(p, 1.0 + 1e-12);
  }
}

TEST(Experiment, WritesAllOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "xorfold_test_outputs";
  std::filesystem::remove_all(dir);
  const auto r = run_experiment(small_config("qaoa"), 1, false);
  write_outputs(r, dir);
  EXPECT_EQ(slurp(dir / "runs.csv"), runs_csv(r));
  EXPECT_EQ(slurp(dir / "aggregate.csv"), aggregate_csv(r));
  const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(rep.at("schema"), 1);
  EXPECT_TRUE(rep.contains("q_a"));
  EXPECT_EQ(rep.at("curves").size(), r.curves.size());
  std::filesystem::remove_all(dir);
}

TEST(Experiment, RefusesWhenMemoryIsShort) {
  auto c = small_config("qaoa");
  c.ns = {30};
  c.instances = 2;
  const auto est = estimate_resources(c, 4);
  EXPECT_EQ(est.required_bytes, 4 * (std::uint64_t{1} << 30) * 28);
  if (est.available_bytes && *est.available_bytes < est.required_bytes) {
    EXPECT_THROW(run_experiment(c, 4), ResourceError);
  }
}

TEST(Reports, TheoryPresets) {
  const auto ptas = theory_report("ptas");
  bool found = false;
  for (const auto& row : ptas.rows)
    if (row[0] == "0.2") {
      found = true;
      EXPECT_NEAR(std::stod(row[1]), 0.08, 0.005);
    }
  EXPECT_TRUE(found);
  const auto aqc = theory_report("aqc_gap");
  EXPECT_FALSE(aqc.rows.empty());
  EXPECT_THROW(theory_report("nope"), ParameterError);
}

TEST(Experiment, RunsCsvRebuildsIdenticalAggregates) {
  const auto r = run_experiment(small_config("fold_aqc_lin"), 1, false);
  std::istringstream is(runs_csv(r));
  const auto back = read_runs_csv(is, r.config);
  EXPECT_EQ(runs_csv(back), runs_csv(r));
  EXPECT_EQ(aggregate_csv(back), aggregate_csv(r));
  EXPECT_EQ(report_json(back).dump(), report_json(r).dump());
  std::istringstream bad("protocol,N\n");
  EXPECT_THROW(read_runs_csv(bad, r.config), ConfigError);
}
