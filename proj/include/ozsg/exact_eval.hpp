#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ozsg/game_model.hpp"
#include "ozsg/matrix_ne.hpp"

namespace ozsg {

/// Per-timestep state values V[h][s] for h in 0..H (V[H] = 0) and, when
/// present, state-action values Q[h][s][a][b] for h in 0..H-1.
struct ValueTables {
  GameDims dims;
  std::vector<double> V;
  std::vector<double> Q;

  ValueTables() = default;
  explicit ValueTables(const GameDims& d, bool with_q = true);

  double v(int h, int s) const { return V[static_cast<std::size_t>(h) * dims.S + s]; }
  double& v(int h, int s) { return V[static_cast<std::size_t>(h) * dims.S + s]; }
  double q(int h, int s, int a, int b) const { return Q[dims.cell(h, s, a, b)]; }
  double& q(int h, int s, int a, int b) { return Q[dims.cell(h, s, a, b)]; }

  /// Row-major A x B view of Q_h(s, ., .).
  MatrixRef stage_matrix(int h, int s) const {
    return {std::span<const double>(Q.data() + dims.cell(h, s, 0, 0), dims.cells_per_stage() / dims.S),
            dims.A, dims.B};
  }
};

/// d_h(s, a, b): probability of visiting (s, a, b) at step h.
struct Occupancy {
  GameDims dims;
  std::vector<double> d;

  double at(int h, int s, int a, int b) const { return d[dims.cell(h, s, a, b)]; }
  double state_mass(int h, int s) const;
  double stage_mass(int h) const;
};

struct NashSolution {
  StrategyPair pi;
  ValueTables values;
};

/// Backward induction Q*_h = r_h + P_h V*_{h+1} with a matrix-game solve per
/// state. Turn-based games use pure max-min stages.
NashSolution nash_vi(const Game& game, double eps_ne = kExactEpsNe);

struct MaxBestResponse {
  ValueTables values;  // V^{*,nu}, Q = r + P V^{*,nu}_{h+1}
  Strategy br;
};

struct MinBestResponse {
  ValueTables values;  // V^{mu,*}
  MinStrategy br;      // conditioned on the max action in turn-based games
};

/// Best response of the max player against a fixed min strategy.
MaxBestResponse best_response_max(const Game& game, const MinStrategy& nu);
/// Best response of the min player against a fixed max strategy. In
/// turn-based games the reply observes the max player's action.
MinBestResponse best_response_min(const Game& game, const Strategy& mu);

/// Dispatches on fixed.player; returns the responder's values and strategy.
struct BestResponse {
  ValueTables values;
  std::variant<Strategy, TurnBasedMinStrategy> br;
};
BestResponse best_response_value(const Game& game, const Strategy& fixed);

/// V_1^{*,nu}(s1) - V_1^{mu,*}(s1).
double duality_gap(const Game& game, const StrategyPair& pi);

Occupancy occupancy(const Game& game, const ExplorationPolicy& rho);
Occupancy occupancy(const Game& game, const StrategyPair& pi);

/// Deterministic deviation attaining a maximal unilateral occupancy.
struct Deviation {
  double occupancy = 0.0;
  std::variant<Strategy, TurnBasedMinStrategy> strategy;
};

/// max over min-player strategies nu of d_h^{mu_star, nu}(s, a, b).
Deviation max_unilateral_occupancy_min_deviates(const Game& game, const Strategy& mu_star,
                                                int h, int s, int a, int b);
/// max over max-player strategies mu of d_h^{mu, nu_star}(s, a, b).
Deviation max_unilateral_occupancy_max_deviates(const Game& game, const MinStrategy& nu_star,
                                                int h, int s, int a, int b);

double max_unilateral_occupancy(const Game& game, const Strategy& mu_star, int h, int s, int a,
                                int b);

/// Occupancy threshold below which a cell counts as uncovered.
inline constexpr double kCoverageThreshold = 1e-12;

struct CoverageWitness {
  Player deviator = Player::kMin;
  int h = 0;
  int s = 0;
  int a = 0;
  int b = 0;
  double deviation_occupancy = 0.0;
  double rho_occupancy = 0.0;
  std::variant<Strategy, TurnBasedMinStrategy> deviation;
};

struct CoverageReport {
  double c_star = 1.0;  // +inf when some deviation reaches an uncovered cell
  double d_m = 0.0;
  bool assumption1_holds = false;  // the NE's own occupancy is covered
  bool assumption2_holds = false;  // every unilateral deviation is covered
  bool assumption3_holds = false;  // every cell is covered
  std::optional<CoverageWitness> witness;
  std::string note;
};

/// Coverage diagnostics of rho relative to the supplied equilibrium pi_star.
CoverageReport coverage_report(const Game& game, const ExplorationPolicy& rho,
                               const StrategyPair& pi_star);

}  // namespace ozsg
