#pragma once

#include <span>
#include <vector>

#include "ozsg/pnvi_hoeffding.hpp"

namespace ozsg {

/// Var_P(V) = sum P V^2 - (sum P V)^2, clamped at 0.
double variance_under(std::span<const double> p_row, std::span<const double> v);

/// c * (sqrt(Var_{P_hat}(V) iota / max(n, 1)) + H iota / max(n, 1)) for one cell.
double bernstein_bonus(std::int64_t count, std::span<const double> p_row,
                       std::span<const double> v, double c, double iota, int H);

/// Bonus tables for every cell of stages 0..H-1. `v_next` holds H+1 rows of
/// S values; stage h uses row h+1.
std::vector<double> bernstein_bonus(const EmpiricalModel& model, std::span<const double> v_next,
                                    double c, double iota);

struct BernsteinConfig {
  PnviConfig base;
  double c = 1.0;
};

struct BernsteinBonuses {
  std::vector<double> low0;  // reference part, from D_0
  std::vector<double> up0;
  std::vector<double> low1;  // advantage part, from D_{h,1}
  std::vector<double> up1;
};

struct BernsteinOutput {
  PnviOutput result;     // bonus field left empty; see `bonuses`
  PnviOutput reference;  // Hoeffding run on D_ref
  BernsteinBonuses bonuses;
  double c = 1.0;

  StrategyPair policy() const { return result.policy(); }
};

/// Pessimistic Nash value iteration with reference-advantage decomposition
/// and Bernstein bonuses.
///
/// The lower table is truncated from below by the reference lower table and
/// the upper table from above by the reference upper table, so both move
/// monotonically away from the reference estimate. After truncation the
/// tables are clipped into [0, H - h].
BernsteinOutput run_pnvi_bernstein(const OfflineDataset& ds, const BernsteinConfig& cfg);

}  // namespace ozsg
