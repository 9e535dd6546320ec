#include "ozsg/pnvi_bernstein.hpp"

#include <algorithm>
#include <cmath>

#include "ozsg/error.hpp"
#include "ozsg/rng.hpp"
#include "stage_util.hpp"

namespace ozsg {

double variance_under(std::span<const double> p_row, std::span<const double> v) {
  if (p_row.size() != v.size()) throw Error("variance_under: dimension mismatch");
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mean += p_row[i] * v[i];
    second += p_row[i] * v[i] * v[i];
  }
  return std::max(second - mean * mean, 0.0);
}

double bernstein_bonus(std::int64_t count, std::span<const double> p_row,
                       std::span<const double> v, double c, double iota, int H) {
  if (!(c > 0.0)) throw Error("bernstein constant c must be positive");
  const double n = static_cast<double>(std::max<std::int64_t>(count, 1));
  return c * (std::sqrt(variance_under(p_row, v) * iota / n) + H * iota / n);
}

std::vector<double> bernstein_bonus(const EmpiricalModel& model, std::span<const double> v_next,
                                    double c, double iota) {
  const GameDims& d = model.dims;
  if (v_next.size() != static_cast<std::size_t>(d.H + 1) * d.S) {
    throw Error("bernstein_bonus: value table has wrong size");
  }
  std::vector<double> bonus(d.num_cells());
  for (int h = 0; h < d.H; ++h) {
    const auto v = v_next.subspan(static_cast<std::size_t>(h + 1) * d.S, d.S);
    for (std::size_t i = 0; i < d.cells_per_stage(); ++i) {
      const std::size_t c_idx = d.cell(h, 0, 0, 0) + i;
      bonus[c_idx] = bernstein_bonus(model.counts[c_idx], model.transition(c_idx), v, c, iota, d.H);
    }
  }
  return bonus;
}

BernsteinOutput run_pnvi_bernstein(const OfflineDataset& ds, const BernsteinConfig& cfg) {
  const GameDims& d = ds.dims;
  const BernsteinSplit split = split_bernstein(ds, cfg.base.seed);
  const double iota = log_term(d, cfg.base.delta);
  if (!(cfg.c > 0.0)) throw Error("bernstein constant c must be positive");

  PnviConfig ref_cfg = cfg.base;
  ref_cfg.seed = derive_seed(cfg.base.seed, 1);

  BernsteinOutput out;
  out.c = cfg.c;
  out.reference = run_pnvi_hoeffding(ds, split.reference, ref_cfg);
  const PnviOutput& ref = out.reference;

  const EmpiricalModel base = empirical_model(ds, split.base);
  std::vector<EmpiricalModel> stage_models;
  stage_models.reserve(d.H);
  for (int h = 0; h < d.H; ++h) stage_models.push_back(empirical_model(ds, split.stage[h]));

  out.bonuses.low0 = bernstein_bonus(base, ref.low.V, cfg.c, iota);
  out.bonuses.up0 = bernstein_bonus(base, ref.up.V, cfg.c, iota);
  out.bonuses.low1.assign(d.num_cells(), 0.0);
  out.bonuses.up1.assign(d.num_cells(), 0.0);

  PnviOutput& res = out.result;
  res.dims = d;
  res.low = ValueTables(d);
  res.up = ValueTables(d);
  res.diagnostics.delta = cfg.base.delta;
  res.diagnostics.iota = iota;
  res.diagnostics.stages.resize(d.H);

  StageWriter low_writer(d);
  StageWriter up_writer(d);
  std::vector<double> adv_low(d.S);
  std::vector<double> adv_up(d.S);

  for (int h = d.H - 1; h >= 0; --h) {
    detail::check_deadline(cfg.base);
    const EmpiricalModel& m1 = stage_models[h];
    for (int y = 0; y < d.S; ++y) {
      adv_low[y] = res.low.v(h + 1, y) - ref.low.v(h + 1, y);
      adv_up[y] = res.up.v(h + 1, y) - ref.up.v(h + 1, y);
    }
    const double cap = static_cast<double>(d.H - h);
    StageDiagnostics& diag = res.diagnostics.stages[h];
    diag.min_count = m1.counts[d.cell(h, 0, 0, 0)];

    for (std::size_t i = 0; i < d.cells_per_stage(); ++i) {
      const std::size_t c = d.cell(h, 0, 0, 0) + i;
      const auto p0 = base.transition(c);
      const auto p1 = m1.transition(c);
      const double b1_low = bernstein_bonus(m1.counts[c], p1, adv_low, cfg.c, iota, d.H);
      const double b1_up = bernstein_bonus(m1.counts[c], p1, adv_up, cfg.c, iota, d.H);
      out.bonuses.low1[c] = b1_low;
      out.bonuses.up1[c] = b1_up;

      double ref_low = 0.0;
      double ref_up = 0.0;
      double step_low = 0.0;
      double step_up = 0.0;
      for (int y = 0; y < d.S; ++y) {
        ref_low += p0[y] * ref.low.v(h + 1, y);
        ref_up += p0[y] * ref.up.v(h + 1, y);
        step_low += p1[y] * adv_low[y];
        step_up += p1[y] * adv_up[y];
      }
      const double r0 = base.r_hat[c];
      const double raw_low = r0 + ref_low - out.bonuses.low0[c] + step_low - b1_low;
      const double raw_up = r0 + ref_up + out.bonuses.up0[c] + step_up + b1_up;
      res.low.Q[c] = std::max(ref.low.Q[c], std::min(raw_low, cap));
      res.up.Q[c] = std::min(ref.up.Q[c], std::max(raw_up, 0.0));

      diag.min_count = std::min(diag.min_count, m1.counts[c]);
      diag.max_count = std::max(diag.max_count, m1.counts[c]);
      diag.total_count += m1.counts[c];
      const double total_bonus = out.bonuses.low0[c] + b1_low;
      diag.bonus_max = std::max(diag.bonus_max, total_bonus);
      diag.bonus_mean += total_bonus / static_cast<double>(d.cells_per_stage());
    }

    for (int s = 0; s < d.S; ++s) {
      const StageEquilibrium low_eq = solve_stage_at(res.low.stage_matrix(h, s), d.turn_based,
                                                     cfg.base.eps_ne, "pnvi_bernstein lower", h, s);
      low_writer.write(h, s, low_eq);
      res.low.v(h, s) = low_eq.value;

      const StageEquilibrium up_eq = solve_stage_at(res.up.stage_matrix(h, s), d.turn_based,
                                                    cfg.base.eps_ne, "pnvi_bernstein upper", h, s);
      up_writer.write(h, s, up_eq);
      res.up.v(h, s) = up_eq.value;
    }
  }

  res.mu_low = std::move(low_writer.mu);
  res.nu_up = up_writer.take_min_strategy();
  return out;
}

}  // namespace ozsg
