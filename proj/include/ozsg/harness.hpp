#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ozsg/exact_eval.hpp"
#include "ozsg/game_model.hpp"
#include "ozsg/offline_data.hpp"
#include "ozsg/serialize.hpp"

namespace ozsg {

enum class Algorithm { kHoeffding, kBernstein };

std::string to_string(Algorithm alg);
Algorithm algorithm_from_string(const std::string& name);

/// Game source: a JSON file path, "hardness1", "hardness2", or a generator
/// string "random:seed=1,S=3,A=2,B=2,H=3[,turn_based=1]".
Game resolve_game(const std::string& source);
/// Policy source: a JSON file path, "uniform", or "hardness" (1-step games only).
ExplorationPolicy resolve_policy(const std::string& source, const Game& game);

struct ExperimentConfig {
  std::string game = "random:seed=7,S=3,A=2,B=2,H=3";
  std::string rho = "uniform";
  std::vector<Algorithm> algorithms{Algorithm::kHoeffding, Algorithm::kBernstein};
  std::vector<std::int64_t> n_grid{1000, 10000, 100000};
  std::vector<std::uint64_t> seeds{0};
  double delta = 0.05;
  double c = 1.0;
  double eps_ne = kLearnerEpsNe;
  std::string out;  // CSV path; empty = no file
  int workers = 1;
  double time_limit_seconds = 300.0;
};

/// Throws ConfigError on an invalid configuration.
void validate_config(const ExperimentConfig& cfg);
/// Keys missing from the document keep the defaults of `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
Json to_json(const ExperimentConfig& cfg);

struct SweepRow {
  Algorithm algorithm = Algorithm::kHoeffding;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  double gap = 0.0;
  double v_low = 0.0;  // V_low_1(s1)
  double v_up = 0.0;   // V_up_1(s1)
  double c_star = 0.0;
  double d_m = 0.0;
  double runtime_seconds = 0.0;  // not part of the CSV; see write_sweep_csv
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (algorithm, n, seed)

  bool all_ok() const;
  /// (n, median gap over seeds) for one algorithm; failed rows are skipped.
  std::vector<std::pair<double, double>> median_gaps(Algorithm alg) const;
};

/// Output of one learner on one dataset, with its exact duality gap.
struct LearnerRun {
  StrategyPair policy;
  double gap = 0.0;
  double v_low = 0.0;
  double v_up = 0.0;
};

LearnerRun run_learner(Algorithm alg, const Game& game, const OfflineDataset& ds, double delta,
                       double c, double eps_ne, std::uint64_t seed, double time_limit_seconds = 0);

/// Runs every (algorithm, n, seed) of the config. Rows already present in an
/// existing output CSV are kept and not recomputed. The CSV is byte-identical
/// for identical configs; wall-clock timings go to "<out>.timing.csv".
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(const std::string& path, const SweepResult& result);
SweepResult read_sweep_csv(const std::string& path);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int dropped = 0;  // points with gap <= 0
};

/// Least squares of log(gap) on log(n). Throws Error("insufficient points")
/// when fewer than 3 points have positive gap.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct HardnessLearnerResult {
  Algorithm algorithm = Algorithm::kHoeffding;
  double gap1 = 0.0;
  double gap2 = 0.0;
  double sum() const { return gap1 + gap2; }
  double max() const { return std::max(gap1, gap2); }
  bool holds() const { return sum() >= 0.5 - 1e-6 && max() >= 0.25 - 1e-6; }
};

struct HardnessReport {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<HardnessLearnerResult> learners;
  /// Empirical models from game-1 and game-2 sampling with the same seed match bit for bit.
  bool models_identical = false;
  bool holds() const;
};

HardnessReport reproduce_hardness(std::int64_t n, std::uint64_t seed, double delta,
                                  double c = 1.0, double eps_ne = kLearnerEpsNe);

Json to_json(const HardnessReport& report);

/// coverage_report against the equilibrium from nash_vi.
CoverageReport diagnose_coverage(const Game& game, const ExplorationPolicy& rho,
                                 double eps_ne = kExactEpsNe);

}  // namespace ozsg
