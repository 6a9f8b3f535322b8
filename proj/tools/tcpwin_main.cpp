#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tcpwin/experiments.hpp"

namespace {

int cmd_run(const std::string& config_path, bool has_seed, std::uint64_t seed,
            std::uint64_t replicas, const std::string& out_dir) {
  tcpwin::ExperimentConfig config = tcpwin::load_config_file(config_path);
  if (has_seed) config.root_seed = seed;
  if (replicas > 0) config.n_replicas = replicas;
  if (!out_dir.empty()) config.output_dir = out_dir;

  const auto start = std::chrono::steady_clock::now();
  const tcpwin::ExperimentResult result = tcpwin::run_experiment(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const auto files = tcpwin::write_artifacts(result, config, wall);

  std::printf("experiment %s  seed %llu  wall %.2fs\n",
              result.experiment.c_str(),
              static_cast<unsigned long long>(config.root_seed), wall);
  for (const tcpwin::BoundReport& report : result.reports) {
    std::printf("  [%s] %s  theoretical=%.6g mc=%.6g se=%.3g\n",
                report.satisfied ? "ok" : "VIOLATED", report.name.c_str(),
                report.theoretical_value, report.mc_estimate, report.mc_stderr);
  }
  std::printf("bound checks: %zu/%zu satisfied\n", result.satisfied_count(),
              result.reports.size());
  for (const std::string& file : files) std::printf("wrote %s\n", file.c_str());
  return result.all_satisfied() ? 0 : 3;
}

int cmd_validate(const std::string& config_path) {
  const tcpwin::ExperimentConfig config = tcpwin::load_config_file(config_path);
  std::printf("OK %s (seed %llu)\n", config.experiment.c_str(),
              static_cast<unsigned long long>(config.root_seed));
  return 0;
}

int cmd_list() {
  for (const std::string& name : tcpwin::experiment_names()) {
    std::printf("%s\n", name.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AIMD window-size process: exact simulation and bound checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "JSON experiment config")->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the root seed");
  run->add_option("--replicas", replicas, "override the replica budget");
  run->add_option("--out", out_dir, "override the output directory");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config file and exit");
  validate->add_option("config", config_path, "JSON experiment config")
      ->required();

  CLI::App* list =
      app.add_subcommand("list-experiments", "print the experiment names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, seed_opt->count() > 0, seed, replicas,
                     out_dir);
    }
    if (validate->parsed()) return cmd_validate(config_path);
    if (list->parsed()) return cmd_list();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
