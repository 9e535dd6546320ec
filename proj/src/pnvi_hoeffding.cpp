#include "ozsg/pnvi_hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ozsg/error.hpp"
#include "stage_util.hpp"

namespace ozsg {

namespace detail {

void check_deadline(const PnviConfig& cfg) {
  if (cfg.deadline && std::chrono::steady_clock::now() > *cfg.deadline) {
    throw TimeLimitExceeded("learner run exceeded its wall-clock limit");
  }
}

}  // namespace detail

double log_term(const GameDims& dims, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0, 1)");
  return std::log(static_cast<double>(dims.H) * dims.S * dims.A * dims.B / delta);
}

std::vector<double> hoeffding_bonus(std::span<const std::int64_t> counts, int H, double iota) {
  if (!(iota > 0.0)) throw Error("iota must be positive");
  std::vector<double> bonus(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double n = static_cast<double>(std::max<std::int64_t>(counts[c], 1));
    bonus[c] = 4.0 * H * std::sqrt(iota / n);
  }
  return bonus;
}

PnviOutput run_pnvi_hoeffding(const OfflineDataset& ds, const EpisodeSet& episodes,
                              const PnviConfig& cfg) {
  const GameDims& d = ds.dims;
  const std::vector<EpisodeSet> parts = split_hoeffding(episodes, d.H, cfg.seed);
  const double iota = log_term(d, cfg.delta);

  PnviOutput out;
  out.dims = d;
  out.low = ValueTables(d);
  out.up = ValueTables(d);
  out.bonus.assign(d.num_cells(), 0.0);
  out.diagnostics.delta = cfg.delta;
  out.diagnostics.iota = iota;
  out.diagnostics.stages.resize(d.H);

  // Stage h only ever reads its own part, so each part model is used for one h.
  std::vector<EmpiricalModel> models;
  models.reserve(d.H);
  for (int h = 0; h < d.H; ++h) models.push_back(empirical_model(ds, parts[h]));

  StageWriter low_writer(d);
  StageWriter up_writer(d);
  const std::size_t per_stage = d.cells_per_stage();

  for (int h = d.H - 1; h >= 0; --h) {
    detail::check_deadline(cfg);
    const EmpiricalModel& m = models[h];
    const std::size_t first = d.cell(h, 0, 0, 0);
    const std::vector<double> bonus = hoeffding_bonus(
        std::span<const std::int64_t>(m.counts.data() + first, per_stage), d.H, iota);

    StageDiagnostics& diag = out.diagnostics.stages[h];
    diag.min_count = std::numeric_limits<std::int64_t>::max();
    const double cap = static_cast<double>(d.H - h);

    for (std::size_t i = 0; i < per_stage; ++i) {
      const std::size_t c = first + i;
      const auto p = m.transition(c);
      double next_low = 0.0;
      double next_up = 0.0;
      for (int y = 0; y < d.S; ++y) {
        next_low += p[y] * out.low.v(h + 1, y);
        next_up += p[y] * out.up.v(h + 1, y);
      }
      out.bonus[c] = bonus[i];
      out.low.Q[c] = std::max(m.r_hat[c] + next_low - bonus[i], 0.0);
      out.up.Q[c] = std::min(m.r_hat[c] + next_up + bonus[i], cap);
      if (!(out.up.Q[c] >= 0.0)) throw Error("pnvi_hoeffding: negative upper Q estimate");

      diag.min_count = std::min(diag.min_count, m.counts[c]);
      diag.max_count = std::max(diag.max_count, m.counts[c]);
      diag.total_count += m.counts[c];
      diag.bonus_max = std::max(diag.bonus_max, bonus[i]);
      diag.bonus_mean += bonus[i] / static_cast<double>(per_stage);
    }

    for (int s = 0; s < d.S; ++s) {
      const StageEquilibrium low_eq = solve_stage_at(out.low.stage_matrix(h, s), d.turn_based,
                                                     cfg.eps_ne, "pnvi_hoeffding lower", h, s);
      low_writer.write(h, s, low_eq);
      out.low.v(h, s) = low_eq.value;

      const StageEquilibrium up_eq = solve_stage_at(out.up.stage_matrix(h, s), d.turn_based,
                                                    cfg.eps_ne, "pnvi_hoeffding upper", h, s);
      up_writer.write(h, s, up_eq);
      out.up.v(h, s) = up_eq.value;
    }
  }

  out.mu_low = std::move(low_writer.mu);
  out.nu_up = up_writer.take_min_strategy();
  return out;
}

PnviOutput run_pnvi_hoeffding(const OfflineDataset& ds, const PnviConfig& cfg) {
  EpisodeSet all(ds.num_episodes());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return run_pnvi_hoeffding(ds, all, cfg);
}

}  // namespace ozsg
