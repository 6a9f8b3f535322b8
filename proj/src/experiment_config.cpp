#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tcpwin/experiments.hpp"

namespace tcpwin {

GridSpec GridSpec::uniform(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw std::invalid_argument("GridSpec::uniform: need step > 0 and stop >= start");
  }
  GridSpec g;
  g.start = start;
  g.stop = stop;
  g.step = step;
  return g;
}

GridSpec GridSpec::points(std::vector<double> pts) {
  if (pts.empty()) {
    throw std::invalid_argument("GridSpec::points: empty grid");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i] > pts[i - 1])) {
      throw std::invalid_argument("GridSpec::points: grid must be increasing");
    }
  }
  GridSpec g;
  g.explicit_points = true;
  g.points_list = std::move(pts);
  return g;
}

std::vector<double> GridSpec::points() const {
  if (explicit_points) return points_list;
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts[i] = start + static_cast<double>(i) * step;
  }
  return pts;
}

nlohmann::json jump_law_to_json(const MultiplicativeLaw& law) {
  nlohmann::json j;
  switch (law.kind()) {
    case JumpLawKind::Dirac:
      j["type"] = "dirac";
      j["delta"] = law.dirac_delta();
      break;
    case JumpLawKind::Uniform01:
      j["type"] = "uniform01";
      break;
    case JumpLawKind::DiscreteMixture: {
      j["type"] = "discrete";
      nlohmann::json atoms = nlohmann::json::array();
      for (const JumpAtom& atom : law.atoms()) {
        atoms.push_back({{"value", atom.value}, {"weight", atom.weight}});
      }
      j["atoms"] = atoms;
      break;
    }
  }
  return j;
}

MultiplicativeLaw jump_law_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument("jump_law: expected an object with a 'type' string");
  }
  const std::string type = j["type"].get<std::string>();
  std::set<std::string> allowed;
  if (type == "dirac") {
    allowed = {"type", "delta"};
  } else if (type == "uniform01") {
    allowed = {"type"};
  } else if (type == "discrete") {
    allowed = {"type", "atoms"};
  } else {
    throw std::invalid_argument("jump_law: unknown type '" + type + "'");
  }
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw std::invalid_argument("jump_law: unknown key '" + key + "'");
    }
  }
  if (type == "dirac") {
    if (!j.contains("delta") || !j["delta"].is_number()) {
      throw std::invalid_argument("jump_law: dirac requires a numeric 'delta'");
    }
    return MultiplicativeLaw::dirac(j["delta"].get<double>());
  }
  if (type == "uniform01") return MultiplicativeLaw::uniform01();
  if (!j.contains("atoms") || !j["atoms"].is_array()) {
    throw std::invalid_argument("jump_law: discrete requires an 'atoms' array");
  }
  std::vector<JumpAtom> atoms;
  for (const auto& atom : j["atoms"]) {
    if (!atom.is_object() || !atom.contains("value") || !atom.contains("weight")) {
      throw std::invalid_argument("jump_law: atom needs 'value' and 'weight'");
    }
    atoms.push_back(
        JumpAtom{atom["value"].get<double>(), atom["weight"].get<double>()});
  }
  return MultiplicativeLaw::discrete_mixture(std::move(atoms));
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "figure-comp",       "embedded-contraction",
      "continuous-decay",  "strong-ergodicity",
      "real-tcp",          "constant-rate",
      "invariant-law",     "concentration",
      "gross-tails",       "toy-chain",
  };
  return names;
}

namespace {

const std::set<std::string>& allowed_keys(const std::string& experiment) {
  static const std::set<std::string> common = {
      "experiment", "root_seed", "output_dir", "n_replicas", "jump_law"};
  static const std::map<std::string, std::set<std::string>> extras = {
      {"figure-comp", {"x0", "y0", "time_grid", "marginal_replicas"}},
      {"embedded-contraction", {"x0", "y0", "p", "max_steps", "step_grid"}},
      {"continuous-decay", {"x0", "y0", "a", "time_grid"}},
      {"strong-ergodicity", {"a"}},
      {"real-tcp", {"x0", "y0", "time_grid"}},
      {"constant-rate", {"lambda", "x0", "time_grid"}},
      {"invariant-law", {"delta", "time_grid"}},  // time_grid = export x-grid
      {"concentration", {"delta", "x0", "chain_steps", "runs"}},
      {"gross-tails", {"delta"}},
      {"toy-chain", {"max_steps"}},
  };
  static std::map<std::string, std::set<std::string>> cache;
  auto it = cache.find(experiment);
  if (it == cache.end()) {
    std::set<std::string> keys = common;
    const auto extra = extras.find(experiment);
    if (extra != extras.end()) {
      keys.insert(extra->second.begin(), extra->second.end());
    }
    it = cache.emplace(experiment, std::move(keys)).first;
  }
  return it->second;
}

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j[key].is_number()) {
    throw std::invalid_argument("config: field '" + key + "' must be a number");
  }
  return j[key].get<double>();
}

bool is_nonneg_integer(const nlohmann::json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t require_count(const nlohmann::json& j, const std::string& key) {
  if (!is_nonneg_integer(j[key]) || j[key].get<std::uint64_t>() == 0) {
    throw std::invalid_argument("config: field '" + key +
                                "' must be a positive integer");
  }
  return j[key].get<std::size_t>();
}

GridSpec grid_from_json(const nlohmann::json& j, const std::string& key) {
  if (j.is_array()) {
    std::vector<double> pts;
    for (const auto& v : j) {
      if (!v.is_number()) {
        throw std::invalid_argument("config: field '" + key +
                                    "' must contain numbers");
      }
      pts.push_back(v.get<double>());
    }
    return GridSpec::points(std::move(pts));
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k != "start" && k != "stop" && k != "step") {
        throw std::invalid_argument("config: unknown key '" + k + "' in '" +
                                    key + "'");
      }
    }
    if (!j.contains("start") || !j.contains("stop") || !j.contains("step")) {
      throw std::invalid_argument("config: field '" + key +
                                  "' needs start, stop and step");
    }
    return GridSpec::uniform(j["start"].get<double>(), j["stop"].get<double>(),
                             j["step"].get<double>());
  }
  throw std::invalid_argument("config: field '" + key +
                              "' must be an array or {start,stop,step}");
}

nlohmann::json grid_to_json(const GridSpec& grid) {
  if (grid.explicit_points) return nlohmann::json(grid.points_list);
  return nlohmann::json{
      {"start", grid.start}, {"stop", grid.stop}, {"step", grid.step}};
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be a JSON object");
  }
  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    throw std::invalid_argument("config: field 'experiment' (string) is required");
  }
  ExperimentConfig config;
  config.experiment = j["experiment"].get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), config.experiment) == names.end()) {
    throw std::invalid_argument("config: unknown experiment '" +
                                config.experiment + "'");
  }
  const std::set<std::string>& allowed = allowed_keys(config.experiment);
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw std::invalid_argument("config: unknown key '" + key +
                                  "' for experiment '" + config.experiment + "'");
    }
  }
  if (j.contains("root_seed")) {
    if (!is_nonneg_integer(j["root_seed"])) {
      throw std::invalid_argument(
          "config: field 'root_seed' must be a nonnegative integer");
    }
    config.root_seed = j["root_seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) {
      throw std::invalid_argument("config: field 'output_dir' must be a string");
    }
    config.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("n_replicas")) config.n_replicas = require_count(j, "n_replicas");
  if (j.contains("jump_law")) config.jump_law = jump_law_from_json(j["jump_law"]);
  if (j.contains("x0")) {
    config.x0 = require_number(j, "x0");
    if (!(*config.x0 >= 0.0)) {
      throw std::invalid_argument("config: field 'x0' must be nonnegative");
    }
  }
  if (j.contains("y0")) {
    config.y0 = require_number(j, "y0");
    if (!(*config.y0 >= 0.0)) {
      throw std::invalid_argument("config: field 'y0' must be nonnegative");
    }
  }
  if (j.contains("a")) {
    config.a = require_number(j, "a");
    if (!(*config.a >= 0.0)) {
      throw std::invalid_argument("config: field 'a' must be nonnegative");
    }
  }
  if (j.contains("lambda")) {
    config.lambda = require_number(j, "lambda");
    if (!(*config.lambda > 0.0)) {
      throw std::invalid_argument("config: field 'lambda' must be positive");
    }
  }
  if (j.contains("delta")) {
    config.delta = require_number(j, "delta");
    if (!(*config.delta > 0.0 && *config.delta < 1.0)) {
      throw std::invalid_argument("config: field 'delta' must lie in (0,1)");
    }
  }
  if (j.contains("p")) {
    config.p = require_number(j, "p");
    if (!(*config.p >= 1.0)) {
      throw std::invalid_argument("config: field 'p' must be >= 1");
    }
  }
  if (j.contains("time_grid")) {
    config.time_grid = grid_from_json(j["time_grid"], "time_grid");
  }
  if (j.contains("step_grid")) {
    if (!j["step_grid"].is_array()) {
      throw std::invalid_argument(
          "config: field 'step_grid' must be an array of integers");
    }
    std::vector<int> steps;
    for (const auto& v : j["step_grid"]) {
      if (!v.is_number_integer() || v.get<int>() < 0) {
        throw std::invalid_argument(
            "config: field 'step_grid' must contain integers >= 0");
      }
      steps.push_back(v.get<int>());
    }
    if (steps.empty()) {
      throw std::invalid_argument("config: field 'step_grid' must not be empty");
    }
    config.step_grid = std::move(steps);
  }
  if (j.contains("marginal_replicas")) {
    config.marginal_replicas = require_count(j, "marginal_replicas");
  }
  if (j.contains("runs")) config.runs = require_count(j, "runs");
  if (j.contains("chain_steps")) config.chain_steps = require_count(j, "chain_steps");
  if (j.contains("max_steps")) {
    if (!j["max_steps"].is_number_integer() || j["max_steps"].get<int>() < 1) {
      throw std::invalid_argument(
          "config: field 'max_steps' must be a positive integer");
    }
    config.max_steps = j["max_steps"].get<int>();
  }
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["experiment"] = config.experiment;
  j["root_seed"] = config.root_seed;
  j["output_dir"] = config.output_dir;
  if (config.n_replicas) j["n_replicas"] = *config.n_replicas;
  if (config.jump_law) j["jump_law"] = jump_law_to_json(*config.jump_law);
  if (config.x0) j["x0"] = *config.x0;
  if (config.y0) j["y0"] = *config.y0;
  if (config.a) j["a"] = *config.a;
  if (config.lambda) j["lambda"] = *config.lambda;
  if (config.delta) j["delta"] = *config.delta;
  if (config.p) j["p"] = *config.p;
  if (config.time_grid) j["time_grid"] = grid_to_json(*config.time_grid);
  if (config.step_grid) j["step_grid"] = *config.step_grid;
  if (config.marginal_replicas) j["marginal_replicas"] = *config.marginal_replicas;
  if (config.runs) j["runs"] = *config.runs;
  if (config.chain_steps) j["chain_steps"] = *config.chain_steps;
  if (config.max_steps) j["max_steps"] = *config.max_steps;
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: invalid JSON in '" + path +
                                "': " + e.what());
  }
  return config_from_json(j);
}

bool ExperimentResult::all_satisfied() const {
  for (const BoundReport& report : reports) {
    if (!report.satisfied) return false;
  }
  return true;
}

std::size_t ExperimentResult::satisfied_count() const {
  std::size_t count = 0;
  for (const BoundReport& report : reports) {
    if (report.satisfied) ++count;
  }
  return count;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<std::string> write_artifacts(const ExperimentResult& result,
                                         const ExperimentConfig& config,
                                         double wall_seconds) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" +
                             config.output_dir + "': " + ec.message());
  }
  std::vector<std::string> written;

  auto open_out = [&](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
  };

  for (const CurveTable& curve : result.curves) {
    const fs::path path = dir / (curve.name + ".csv");
    auto out = open_out(path);
    curve.write_csv(out);
    written.push_back(path.string());
  }

  {
    const fs::path path = dir / "bounds.json";
    auto out = open_out(path);
    nlohmann::json j;
    j["experiment"] = result.experiment;
    j["root_seed"] = config.root_seed;
    nlohmann::json reports = nlohmann::json::array();
    for (const BoundReport& report : result.reports) {
      reports.push_back(nlohmann::json::parse(report.to_json()));
    }
    j["reports"] = reports;
    out << j.dump(2) << '\n';
    written.push_back(path.string());
  }

  {
    const fs::path path = dir / "manifest.json";
    auto out = open_out(path);
    nlohmann::json j;
    j["experiment"] = result.experiment;
    j["config"] = config_to_json(config);
    j["config_hash"] = config_hash(config);
    j["root_seed"] = config.root_seed;
    j["code_version"] = kCodeVersion;
    j["wall_seconds"] = wall_seconds;
    nlohmann::json artifacts = nlohmann::json::array();
    for (const std::string& name : written) artifacts.push_back(name);
    j["artifacts"] = artifacts;
    out << j.dump(2) << '\n';
    written.push_back(path.string());
  }

  return written;
}

}  // namespace tcpwin
