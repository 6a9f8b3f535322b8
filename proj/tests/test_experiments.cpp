#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <doctest.h>

#include "tcpwin/experiments.hpp"

using namespace tcpwin;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config parsing: minimal, overrides, unknown keys") {
  const nlohmann::json minimal = {{"experiment", "toy-chain"}};
  const ExperimentConfig config = config_from_json(minimal);
  CHECK(config.experiment == "toy-chain");
  CHECK(config.root_seed == kDefaultRootSeed);

  const nlohmann::json bad_key = {{"experiment", "toy-chain"},
                                  {"max_stepz", 10}};
  CHECK_THROWS_WITH_AS(config_from_json(bad_key),
                       doctest::Contains("max_stepz"), std::invalid_argument);

  const nlohmann::json wrong_exp = {{"experiment", "toy-chain"},
                                    {"lambda", 2.0}};
  CHECK_THROWS_AS(config_from_json(wrong_exp), std::invalid_argument);

  const nlohmann::json unknown_exp = {{"experiment", "no-such"}};
  CHECK_THROWS_WITH_AS(config_from_json(unknown_exp),
                       doctest::Contains("no-such"), std::invalid_argument);

  const nlohmann::json bad_value = {{"experiment", "invariant-law"},
                                    {"delta", 1.5}};
  CHECK_THROWS_WITH_AS(config_from_json(bad_value), doctest::Contains("delta"),
                       std::invalid_argument);
}

TEST_CASE("config round-trips through JSON losslessly") {
  nlohmann::json j = {
      {"experiment", "figure-comp"},
      {"root_seed", 99},
      {"n_replicas", 2000},
      {"marginal_replicas", 500},
      {"x0", 2.0},
      {"y0", 1.0},
      {"jump_law", {{"type", "dirac"}, {"delta", 0.5}}},
      {"time_grid", {{"start", 0.0}, {"stop", 2.0}, {"step", 0.5}}},
      {"output_dir", "out/fc"},
  };
  const ExperimentConfig config = config_from_json(j);
  const nlohmann::json dumped = config_to_json(config);
  const ExperimentConfig reparsed = config_from_json(dumped);
  CHECK(config_to_json(reparsed) == dumped);
  CHECK(dumped["time_grid"]["step"] == 0.5);

  // explicit grids survive too
  nlohmann::json j2 = {{"experiment", "continuous-decay"},
                       {"time_grid", {0.5, 1.0, 2.0}}};
  const nlohmann::json dumped2 = config_to_json(config_from_json(j2));
  CHECK(dumped2["time_grid"].is_array());
}

TEST_CASE("jump law serialisation covers all variants") {
  for (const nlohmann::json j :
       {nlohmann::json{{"type", "uniform01"}},
        nlohmann::json{{"type", "dirac"}, {"delta", 0.25}},
        nlohmann::json{{"type", "discrete"},
                       {"atoms",
                        {{{"value", 0.2}, {"weight", 0.5}},
                         {{"value", 0.8}, {"weight", 0.5}}}}}}) {
    CHECK(jump_law_to_json(jump_law_from_json(j)) == j);
  }
  CHECK_THROWS_AS(jump_law_from_json({{"type", "nope"}}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      jump_law_from_json({{"type", "dirac"}, {"delta", 0.5}, {"mu", 1.0}}),
      doctest::Contains("mu"), std::invalid_argument);
}

TEST_CASE("experiment list is complete") {
  const auto& names = experiment_names();
  CHECK(names.size() == 10);
  for (const char* expected :
       {"figure-comp", "embedded-contraction", "continuous-decay",
        "strong-ergodicity", "real-tcp", "constant-rate", "invariant-law",
        "concentration", "gross-tails", "toy-chain"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
}

TEST_CASE("same config and seed give byte-identical artifacts") {
  nlohmann::json j = {{"experiment", "constant-rate"},
                      {"n_replicas", 4000},
                      {"root_seed", 7},
                      {"time_grid", {1.0}}};
  ExperimentConfig config = config_from_json(j);

  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "tcpwin-determinism";
  std::filesystem::remove_all(base);
  config.output_dir = (base / "a").string();
  const ExperimentResult first = run_experiment(config);
  write_artifacts(first, config, 1.0);
  config.output_dir = (base / "b").string();
  const ExperimentResult second = run_experiment(config);
  write_artifacts(second, config, 2.0);  // different wall time on purpose

  for (const char* name : {"constant_rate_moments.csv",
                           "constant_rate_decay.csv", "bounds.json"}) {
    CHECK(slurp((base / "a" / name).string()) ==
          slurp((base / "b" / name).string()));
  }
  std::filesystem::remove_all(base);
}

TEST_CASE("artifacts include the seed and a config hash") {
  nlohmann::json j = {{"experiment", "toy-chain"}, {"root_seed", 31337}};
  ExperimentConfig config = config_from_json(j);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "tcpwin-manifest";
  std::filesystem::remove_all(dir);
  config.output_dir = dir.string();
  const ExperimentResult result = run_experiment(config);
  const auto files = write_artifacts(result, config, 0.5);
  CHECK(files.size() == result.curves.size() + 2);

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp((dir / "manifest.json").string()));
  CHECK(manifest["root_seed"] == 31337);
  CHECK(manifest["config_hash"] == config_hash(config));
  CHECK(manifest["code_version"] == kCodeVersion);
  CHECK(manifest["wall_seconds"] == 0.5);

  const nlohmann::json bounds =
      nlohmann::json::parse(slurp((dir / "bounds.json").string()));
  CHECK(bounds["root_seed"] == 31337);
  CHECK(bounds["reports"].size() == result.reports.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("curve tables render 17-significant-digit CSV") {
  CurveTable t{"demo", {"a", "b"}, {}};
  t.add_row({1.0 / 3.0, 2.0});
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "a,b\n0.33333333333333331,2\n");
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
}

TEST_CASE("small toy-chain run satisfies every report") {
  nlohmann::json j = {{"experiment", "toy-chain"}, {"max_steps", 50}};
  const ExperimentResult result = run_experiment(config_from_json(j));
  CHECK(result.all_satisfied());
  CHECK(result.reports.size() >= 6);
  REQUIRE(result.curves.size() == 2);
  CHECK(result.curves[0].rows.size() == 51);
}

TEST_CASE("reduced-budget stochastic experiments stay satisfied") {
  // tiny budgets: smoke coverage for the runner plumbing, generous bounds
  for (const nlohmann::json j :
       {nlohmann::json{{"experiment", "embedded-contraction"},
                       {"n_replicas", 3000},
                       {"max_steps", 6}},
        nlohmann::json{{"experiment", "continuous-decay"},
                       {"n_replicas", 3000},
                       {"time_grid", {0.5, 1.0}}},
        nlohmann::json{{"experiment", "invariant-law"},
                       {"n_replicas", 50000}}}) {
    const ExperimentResult result = run_experiment(config_from_json(j));
    CHECK(result.all_satisfied());
  }
}

TEST_CASE("figure-comp requires a dirac jump law") {
  nlohmann::json j = {{"experiment", "figure-comp"},
                      {"jump_law", {{"type", "uniform01"}}}};
  CHECK_THROWS_WITH_AS(run_experiment(config_from_json(j)),
                       doctest::Contains("dirac"), std::invalid_argument);
}
