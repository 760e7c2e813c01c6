// Command line front end: run, sweep, gen-demand, validate.

#include "rideshare/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kConfig = 3, kData = 4, kIo = 5, kInternal = 70 };

int run_cmd(const std::string& file, const std::string& out, bool trace) {
  const auto scenario = rideshare::load_scenario(file);
  const auto start = std::chrono::steady_clock::now();
  const auto report = rideshare::run_scenario(scenario, {out, trace});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "served " << report.served << "/" << report.total_requests << " (SR "
            << rideshare::format_number(report.service_rate) << "%), mean rounds "
            << rideshare::format_number(report.mean_rounds) << "\n";
  std::cerr << "wall " << secs << " s, " << report.mean_batch_wall_ms << " ms per batch\n";
  return kOk;
}

int sweep_cmd(const std::string& file, const std::string& out) {
  const auto spec = rideshare::load_sweep(file);
  const auto results = rideshare::run_static_sweep(spec);
  std::filesystem::create_directories(out);
  const auto path = std::filesystem::path(out) / "gaps.csv";
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw rideshare::IoError("cannot write " + path.string());
  rideshare::write_gaps_csv(csv, results);
  rideshare::write_gaps_csv(std::cout, results);
  return kOk;
}

int gen_demand_cmd(const std::string& params, std::uint64_t seed, const std::string& out) {
  const auto d = rideshare::load_demand_file(params);
  const auto net = rideshare::build_network(d.network);
  const auto requests = rideshare::generate_demand(d.demand, net, d.companies, seed);
  std::ofstream csv(out, std::ios::binary);
  if (!csv) throw rideshare::IoError("cannot write " + out);
  rideshare::write_requests_csv(csv, requests);
  std::cout << requests.size() << " requests written to " << out << "\n";
  return kOk;
}

int validate_cmd(const std::string& file) {
  const auto scenario = rideshare::load_scenario(file);
  const auto net = rideshare::build_network(scenario.network);
  const auto requests = rideshare::scenario_requests(scenario, net);
  std::cout << "ok: " << net.node_count() << " nodes, " << scenario.sim.companies.size() << " companies, "
            << requests.size() << " requests\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-company ridesharing dispatch simulator"};
  app.require_subcommand(1);

  std::string file, out = ".", params;
  bool trace = false;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Simulate a scenario");
  run->add_option("scenario", file, "Scenario JSON file")->required();
  run->add_option("--out", out, "Output directory");
  run->add_flag("--trace", trace, "Write events.jsonl");

  auto* sweep = app.add_subcommand("sweep", "Static optimality-gap sweep");
  sweep->add_option("sweep", file, "Sweep JSON file")->required();
  sweep->add_option("--out", out, "Output directory");

  auto* gen = app.add_subcommand("gen-demand", "Write a synthetic request CSV");
  gen->add_option("params", params, "Demand parameter JSON file")->required();
  gen->add_option("--seed", seed, "Random seed")->required();
  gen->add_option("--out", file, "Output CSV")->required();

  auto* check = app.add_subcommand("validate", "Check a scenario without running it");
  check->add_option("scenario", file, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_cmd(file, out, trace);
    if (*sweep) return sweep_cmd(file, out);
    if (*gen) return gen_demand_cmd(params, seed, file);
    if (*check) return validate_cmd(file);
  } catch (const rideshare::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const rideshare::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const rideshare::StructuralError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const rideshare::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
