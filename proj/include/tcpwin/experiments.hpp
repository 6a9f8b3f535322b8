#ifndef TCPWIN_EXPERIMENTS_HPP
#define TCPWIN_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcpwin/bounds.hpp"
#include "tcpwin/csv.hpp"
#include "tcpwin/jump_law.hpp"

namespace tcpwin {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultRootSeed = 424242;

// Either an explicit list of points or a uniform start/stop/step triple.
struct GridSpec {
  bool explicit_points = false;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::vector<double> points_list;

  static GridSpec uniform(double start, double stop, double step);
  static GridSpec points(std::vector<double> pts);
  std::vector<double> points() const;
};

// Declarative description of one experiment run. Every experiment ships its
// own Monte Carlo budget defaults; a config only has to name the experiment.
// Unknown keys are hard errors so a typo cannot silently change a stochastic
// experiment.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t root_seed = kDefaultRootSeed;
  std::string output_dir = "out";
  std::optional<std::size_t> n_replicas;
  std::optional<MultiplicativeLaw> jump_law;
  std::optional<double> x0;
  std::optional<double> y0;
  std::optional<double> a;
  std::optional<double> lambda;
  std::optional<double> delta;
  std::optional<double> p;
  std::optional<GridSpec> time_grid;
  std::optional<std::vector<int>> step_grid;
  std::optional<std::size_t> marginal_replicas;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> chain_steps;
  std::optional<int> max_steps;
};

// Strict parse: every key must be known to the named experiment, every value
// well-formed; error messages name the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

nlohmann::json jump_law_to_json(const MultiplicativeLaw& law);
MultiplicativeLaw jump_law_from_json(const nlohmann::json& j);

const std::vector<std::string>& experiment_names();

struct ExperimentResult {
  std::string experiment;
  std::vector<CurveTable> curves;
  std::vector<BoundReport> reports;

  bool all_satisfied() const;
  std::size_t satisfied_count() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes one CSV per curve plus bounds.json and manifest.json under
// config.output_dir; returns the file names written. Curve and bound files
// are byte-identical across reruns of the same config + seed; the manifest
// additionally records wall time.
std::vector<std::string> write_artifacts(const ExperimentResult& result,
                                         const ExperimentConfig& config,
                                         double wall_seconds);

std::string config_hash(const ExperimentConfig& config);

}  // namespace tcpwin

#endif  // TCPWIN_EXPERIMENTS_HPP
