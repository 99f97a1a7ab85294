#pragma once

#include "glbai/engine.hpp"
#include "glbai/theory.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace glbai {

/// Invalid or unreadable experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class SweepAxis { None, NumArms, Dim, Epsilon };

struct ExperimentConfig {
  std::string algorithm = "glgape";  ///< "glgape" | "gape"
  LinkKind link = LinkKind::Logistic;
  Index num_arms = 50;
  Index dim = 10;
  double epsilon = 0.1;
  double delta = 0.05;
  AlphaMode alpha_mode = AlphaMode::empirical();
  Index num_replications = 50;
  std::uint64_t base_seed = 1;
  Index max_steps = 200000;
  std::optional<Index> exploration_length;
  std::optional<double> param_bound;
  std::optional<double> reward_bound;
  double noise_sigma = 0.1;
  double norm_cap_factor = 10.0;
  bool track_coverage = true;
  std::optional<std::filesystem::path> features_csv;
  std::optional<std::filesystem::path> theta_csv;
  SweepAxis sweep_axis = SweepAxis::None;
  std::vector<double> sweep_values;
};

/// Parses the flat JSON config. Relative CSV paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);
std::string_view to_string(SweepAxis axis);

/// One row of the run CSV.
struct ReplicationOutcome {
  std::uint64_t seed;
  std::string algorithm;
  Index num_arms;
  Index dim;
  double epsilon;
  double delta;
  Index tau;
  Index returned_arm;
  Index best_arm;
  double true_gap;
  bool success;
  bool budget_exhausted;
  Diagnostics diagnostics;
  std::optional<ComplexityReport> theory;
  double alpha;
  /// C_t at the stopping round (GLGapE only).
  double final_width_scale;
};

inline constexpr const char* kRunCsvHeader =
    "seed,algorithm,K,d,epsilon,delta,tau,returned_arm,best_arm,true_gap,success,budget_exhausted";

/// Instance of replication `seed`: the CSV instance when configured,
/// otherwise a fresh synthetic instance drawn from the seed's instance stream.
BanditInstance replication_instance(const ExperimentConfig& config, std::uint64_t seed);

RunConfig run_config_for(const ExperimentConfig& config, std::uint64_t seed);

ReplicationOutcome run_replication(const ExperimentConfig& config, const std::string& algorithm,
                                   std::uint64_t seed);

/// Runs replications base_seed + r, r = 0..n-1, on `workers` threads
/// (0 = hardware concurrency). Results come back in replication order.
std::vector<ReplicationOutcome> run_replications(const ExperimentConfig& config, const std::string& algorithm,
                                                 unsigned workers, std::ostream* progress = nullptr);

std::string format_number(double v);
void write_run_csv(std::ostream& out, const std::vector<ReplicationOutcome>& rows);
nlohmann::json summarize(const std::vector<ReplicationOutcome>& rows);

/// `glbai run`: writes runs.csv and summary.json into out_dir.
nlohmann::json cmd_run(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned workers,
                       std::ostream* progress = nullptr);
/// `glbai sweep`: writes sweep.csv (long format) and sweep_summary.json.
nlohmann::json cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned workers,
                         std::ostream* progress = nullptr);
/// `glbai compare`: writes compare.csv (GLGapE and GapE rows per seed) and
/// compare_summary.json.
nlohmann::json cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned workers,
                           std::ostream* progress = nullptr);

/// Entry point of the `glbai` tool. Exit codes: 0 success, 2 configuration
/// error, 3 runtime error.
int cli_main(int argc, char** argv);

}  // namespace glbai
