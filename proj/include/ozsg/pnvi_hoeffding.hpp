#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "ozsg/exact_eval.hpp"
#include "ozsg/game_model.hpp"
#include "ozsg/matrix_ne.hpp"
#include "ozsg/offline_data.hpp"

namespace ozsg {

struct PnviConfig {
  double delta = 0.05;
  double eps_ne = kLearnerEpsNe;
  std::uint64_t seed = 0;  // data-split seed
  /// Learner aborts with TimeLimitExceeded once this instant has passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct StageDiagnostics {
  std::int64_t min_count = 0;
  std::int64_t max_count = 0;
  std::int64_t total_count = 0;
  double bonus_max = 0.0;
  double bonus_mean = 0.0;
};

struct PnviDiagnostics {
  double delta = 0.0;
  double iota = 0.0;
  std::vector<StageDiagnostics> stages;
};

/// Output of pessimistic Nash value iteration.
///
/// `low` holds Q_low / V_low (max player's pessimistic tables) and `up` holds
/// Q_up / V_up (min player's). mu_low is the max player's equilibrium
/// strategy of Q_low, nu_up the min player's equilibrium strategy of Q_up.
struct PnviOutput {
  GameDims dims;
  Strategy mu_low;
  MinStrategy nu_up;
  ValueTables low;
  ValueTables up;
  std::vector<double> bonus;  // [h][s][a][b]
  PnviDiagnostics diagnostics;

  StrategyPair policy() const { return {mu_low, nu_up}; }
};

/// log(H S A B / delta).
double log_term(const GameDims& dims, double delta);

/// b_h(s, a, b) = 4 H sqrt(iota / max(n_h(s, a, b), 1)).
std::vector<double> hoeffding_bonus(std::span<const std::int64_t> counts, int H, double iota);

/// Pessimistic Nash value iteration with Hoeffding bonuses on all episodes.
PnviOutput run_pnvi_hoeffding(const OfflineDataset& ds, const PnviConfig& cfg);
/// Same, restricted to a subset of the episodes.
PnviOutput run_pnvi_hoeffding(const OfflineDataset& ds, const EpisodeSet& episodes,
                              const PnviConfig& cfg);

namespace detail {
void check_deadline(const PnviConfig& cfg);
}  // namespace detail

}  // namespace ozsg
