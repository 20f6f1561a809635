// xorfold: generate PPSP instances, run greedy search or quantum protocols in
// batch, and write theory tables.
//
// Exit codes: 0 ok, 1 runtime failure, 2 bad config or arguments, 3 not
// enough memory.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "xorfold/experiment.hpp"
#include "xorfold/greedy.hpp"
#include "xorfold/instance_io.hpp"
#include "xorfold/reports.hpp"

namespace fs = std::filesystem;
using namespace xorfold;

namespace {

nlohmann::json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw ConfigError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

ExperimentConfig load_config(const fs::path& p) { return config_from_json(read_json(p)); }

unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string human_bytes(std::uint64_t b) {
  if (b < (1u << 20)) return std::to_string((b + 1023) >> 10) + " KiB";
  return std::to_string(b >> 20) + " MiB";
}

void print_estimate(const ExperimentConfig& c, unsigned threads) {
  const auto est = estimate_resources(c, threads);
  std::size_t runs = c.ns.size() * static_cast<std::size_t>(c.instances);
  std::cout << "protocol " << c.protocol << ", " << runs << " runs over N = {";
  for (std::size_t i = 0; i < c.ns.size(); ++i) std::cout << (i ? ", " : "") << c.ns[i];
  std::cout << "}\n";
  std::cout << "threads " << est.threads << ", peak memory about " << human_bytes(est.required_bytes);
  if (est.available_bytes) std::cout << " of " << human_bytes(*est.available_bytes) << " available";
  std::cout << '\n';
}

fs::path output_dir(const std::string& flag, const ExperimentConfig& c) {
  if (!flag.empty()) return flag;
  if (!c.output.empty()) return c.output;
  throw ConfigError("no output directory: pass --out or set \"output\" in the config");
}

int cmd_gen(const std::string& config, const std::string& out, int n, int nc, double eps, std::uint64_t seed) {
  if (!config.empty()) {
    const auto c = load_config(config);
    const fs::path dir = output_dir(out, c);
    fs::create_directories(dir);
    for (int size : c.ns)
      for (int i = 0; i < c.instances; ++i) {
        const auto s = derive_seed(c.seed, static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(i));
        const auto inst = generate_ppsp(size, c.n_c_rule.count(size), c.epsilon, s);
        std::ofstream f(dir / ("N" + std::to_string(size) + "_" + std::to_string(i) + ".json"));
        f << to_json(inst).dump() << '\n';
      }
    std::cout << "wrote " << c.ns.size() * static_cast<std::size_t>(c.instances) << " instances to " << dir.string() << '\n';
    return 0;
  }
  if (n == 0 || nc == 0) throw ConfigError("gen needs --config, or --n and --nc");
  const auto text = to_json(generate_ppsp(n, nc, eps, seed)).dump();
  if (out.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream f(out);
    f << text << '\n';
  }
  return 0;
}

int cmd_greedy(const std::string& instance, GreedyConfig cfg) {
  const auto inst = instance_from_json(read_json(instance));
  const auto res = restart_search(inst, cfg);
  nlohmann::ordered_json j;
  j["n"] = inst.n_vars();
  j["n_constraints"] = inst.n_constraints();
  j["restarts"] = res.restarts;
  j["best_energy"] = res.best_energy;
  j["best_string"] = bits_to_string(res.best_string, inst.n_vars());
  j["distinct_minima"] = res.minima_found.size();
  j["steps_total"] = res.steps_total;
  auto& s = j["success"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < res.q_grid.size(); ++i) s[level_label(Axis::q, res.q_grid[i])] = res.success[i];
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_run(const std::string& config, const std::string& out, int threads_flag, bool dry_run) {
  const auto c = load_config(config);
  const unsigned threads = resolve_threads(threads_flag);
  print_estimate(c, threads);
  if (dry_run) return 0;
  const fs::path dir = output_dir(out, c);
  const auto r = run_experiment(c, threads);
  write_outputs(r, dir);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << (dir / "runs.csv").string() << ", aggregate.csv, report.json\n";
  return 0;
}

int cmd_theory(const std::string& preset, const std::string& out) {
  const auto t = theory_report(preset);
  if (out.empty()) {
    t.write_csv(std::cout);
  } else {
    std::ofstream f(out);
    t.write_csv(f);
  }
  return 0;
}

int cmd_analyze(const std::string& in, const std::string& out) {
  const fs::path dir = in;
  const auto report = read_json(dir / "report.json");
  if (!report.contains("config")) throw ConfigError("report.json has no config");
  const auto c = config_from_json(report.at("config"));
  std::ifstream runs(dir / "runs.csv");
  if (!runs) throw ConfigError("cannot open " + (dir / "runs.csv").string());
  const auto r = read_runs_csv(runs, c);
  const fs::path target = out.empty() ? dir : fs::path(out);
  write_outputs(r, target);
  const auto j = report_json(r);
  std::cout << "q_a = " << (j["q_a"].is_null() ? std::string("none") : format_number(j["q_a"].get<double>())) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PPSP instances, greedy search, quantum protocol simulation and tunneling theory"};
  app.require_subcommand(1);

  std::string config, out, instance, preset = "appendixA", in;
  int threads = 0, n = 0, nc = 0;
  double eps = 0.1;
  std::uint64_t seed = 0;
  bool dry_run = false;
  GreedyConfig gcfg;

  auto* gen = app.add_subcommand("gen", "generate instances (one, or a suite from a config)");
  gen->add_option("--config", config, "experiment config; writes every (N, index) instance")->check(CLI::ExistingFile);
  gen->add_option("--out", out, "output file (single) or directory (suite)");
  gen->add_option("--n", n, "variables");
  gen->add_option("--nc", nc, "constraints");
  gen->add_option("--eps", eps, "violated fraction at the planted string");
  gen->add_option("--seed", seed, "seed");

  auto* greedy = app.add_subcommand("greedy", "quasi-greedy restarts on one instance");
  greedy->add_option("--instance", instance, "instance JSON")->required()->check(CLI::ExistingFile);
  greedy->add_option("--restarts", gcfg.restarts, "restarts")->default_val(1000);
  greedy->add_option("--weight-exponent", gcfg.weight_exponent, "class weight exponent")->default_val(2.0);
  greedy->add_option("--seed", gcfg.seed, "seed");
  greedy->add_option("--threads", gcfg.threads, "worker threads")->default_val(1);

  auto* run = app.add_subcommand("run", "batch experiment from a JSON config");
  run->add_option("--config", config, "experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (overrides config)");
  run->add_option("--threads", threads, "worker threads (0: all cores)");
  run->add_flag("--dry-run", dry_run, "print the resource estimate and stop");

  auto* theory = app.add_subcommand("theory", "tunneling theory tables as CSV");
  theory->add_option("--preset", preset, "table")->check(CLI::IsMember({"appendixA", "ptas", "aqc_gap", "p2"}));
  theory->add_option("--out", out, "output CSV (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "rebuild aggregate.csv and report.json from runs.csv");
  analyze->add_option("--in", in, "run directory with runs.csv and report.json")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", out, "output directory (default: in place)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(config, out, n, nc, eps, seed);
    if (*greedy) return cmd_greedy(instance, gcfg);
    if (*run) return cmd_run(config, out, threads, dry_run);
    if (*theory) return cmd_theory(preset, out);
    if (*analyze) return cmd_analyze(in, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
