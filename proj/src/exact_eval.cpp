#include "ozsg/exact_eval.hpp"

#include <cmath>
#include <limits>

#include "stage_util.hpp"

namespace ozsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Q_h(s, a, b) = r_h(s, a, b) + <P_h(.|s, a, b), V_{h+1}>
void backup_stage(const Game& game, ValueTables& vt, int h) {
  const GameDims& d = game.dims;
  for (int s = 0; s < d.S; ++s) {
    for (int a = 0; a < d.A; ++a) {
      for (int b = 0; b < d.B; ++b) {
        const auto row = game.transition(h, s, a, b);
        double next = 0.0;
        for (int y = 0; y < d.S; ++y) next += row[y] * vt.v(h + 1, y);
        vt.q(h, s, a, b) = game.reward(h, s, a, b) + next;
      }
    }
  }
}

// Maximal probability of reaching `target` at step `target_h` from s1 when one
// player's strategy is fixed and the other picks actions deterministically.
struct ReachPlan {
  double reach = 0.0;
  // choice[(k * S + x) * width + i]: deviator's action at step k < target_h,
  // state x; width is A for conditioned turn-based min replies, else 1.
  std::vector<int> choice;
  int width = 1;
};

double continuation(const Game& game, int k, int x, int a, int b, std::span<const double> w_next) {
  const auto row = game.transition(k, x, a, b);
  double acc = 0.0;
  for (std::size_t y = 0; y < row.size(); ++y) acc += row[y] * w_next[y];
  return acc;
}

ReachPlan reach_with_min_deviating(const Game& game, const Strategy& mu, int target_h,
                                   int target) {
  const GameDims& d = game.dims;
  const bool conditioned = d.turn_based;
  ReachPlan plan;
  plan.width = conditioned ? d.A : 1;
  plan.choice.assign(static_cast<std::size_t>(d.H) * d.S * plan.width, 0);

  std::vector<double> w(d.S, 0.0);
  std::vector<double> w_prev(d.S, 0.0);
  w[target] = 1.0;
  for (int k = target_h - 1; k >= 0; --k) {
    for (int x = 0; x < d.S; ++x) {
      const auto mu_row = mu.at(k, x);
      const std::size_t base = (static_cast<std::size_t>(k) * d.S + x) * plan.width;
      if (conditioned) {
        double total = 0.0;
        for (int a = 0; a < d.A; ++a) {
          int best_b = 0;
          double best = -kInf;
          for (int b = 0; b < d.B; ++b) {
            const double v = continuation(game, k, x, a, b, w);
            if (v > best) {
              best = v;
              best_b = b;
            }
          }
          plan.choice[base + a] = best_b;
          total += mu_row[a] * best;
        }
        w_prev[x] = total;
      } else {
        int best_b = 0;
        double best = -kInf;
        for (int b = 0; b < d.B; ++b) {
          double v = 0.0;
          for (int a = 0; a < d.A; ++a) {
            if (mu_row[a] != 0.0) v += mu_row[a] * continuation(game, k, x, a, b, w);
          }
          if (v > best) {
            best = v;
            best_b = b;
          }
        }
        plan.choice[base] = best_b;
        w_prev[x] = best;
      }
    }
    std::swap(w, w_prev);
  }
  plan.reach = w[d.s1];
  return plan;
}

ReachPlan reach_with_max_deviating(const Game& game, const MinStrategy& nu, int target_h,
                                   int target) {
  const GameDims& d = game.dims;
  ReachPlan plan;
  plan.choice.assign(static_cast<std::size_t>(d.H) * d.S, 0);

  std::vector<double> w(d.S, 0.0);
  std::vector<double> w_prev(d.S, 0.0);
  w[target] = 1.0;
  for (int k = target_h - 1; k >= 0; --k) {
    for (int x = 0; x < d.S; ++x) {
      int best_a = 0;
      double best = -kInf;
      for (int a = 0; a < d.A; ++a) {
        double v = 0.0;
        for (int b = 0; b < d.B; ++b) {
          const double p = min_prob(nu, k, x, a, b);
          if (p != 0.0) v += p * continuation(game, k, x, a, b, w);
        }
        if (v > best) {
          best = v;
          best_a = a;
        }
      }
      plan.choice[static_cast<std::size_t>(k) * d.S + x] = best_a;
      w_prev[x] = best;
    }
    std::swap(w, w_prev);
  }
  plan.reach = w[d.s1];
  return plan;
}

std::variant<Strategy, TurnBasedMinStrategy> min_deviation_strategy(const GameDims& d,
                                                                    const ReachPlan& plan,
                                                                    int h, int s, int b) {
  if (d.turn_based) {
    TurnBasedMinStrategy st(d.H, d.S, d.A, d.B);
    for (int k = 0; k < d.H; ++k) {
      for (int x = 0; x < d.S; ++x) {
        for (int a = 0; a < d.A; ++a) {
          int action = 0;
          if (k < h) {
            action = plan.choice[(static_cast<std::size_t>(k) * d.S + x) * d.A + a];
          } else if (k == h && x == s) {
            action = b;
          }
          st.at(k, x, a)[action] = 1.0;
        }
      }
    }
    return st;
  }
  std::vector<int> actions(static_cast<std::size_t>(d.H) * d.S, 0);
  for (int k = 0; k < h; ++k) {
    for (int x = 0; x < d.S; ++x) {
      actions[static_cast<std::size_t>(k) * d.S + x] = plan.choice[static_cast<std::size_t>(k) * d.S + x];
    }
  }
  actions[static_cast<std::size_t>(h) * d.S + s] = b;
  return Strategy::deterministic(Player::kMin, d.H, d.S, d.B, actions);
}

Strategy max_deviation_strategy(const GameDims& d, const ReachPlan& plan, int h, int s, int a) {
  std::vector<int> actions(static_cast<std::size_t>(d.H) * d.S, 0);
  for (int k = 0; k < h; ++k) {
    for (int x = 0; x < d.S; ++x) {
      actions[static_cast<std::size_t>(k) * d.S + x] = plan.choice[static_cast<std::size_t>(k) * d.S + x];
    }
  }
  actions[static_cast<std::size_t>(h) * d.S + s] = a;
  return Strategy::deterministic(Player::kMax, d.H, d.S, d.A, actions);
}

void check_cell(const GameDims& d, int h, int s, int a, int b) {
  if (h < 0 || h >= d.H || s < 0 || s >= d.S || a < 0 || a >= d.A || b < 0 || b >= d.B) {
    throw Error("cell index out of range");
  }
}

double coverage_ratio(double num, double den) {
  if (num <= kCoverageThreshold) return 0.0;
  if (den <= kCoverageThreshold) return kInf;
  return num / den;
}

}  // namespace

ValueTables::ValueTables(const GameDims& d, bool with_q)
    : dims(d), V(static_cast<std::size_t>(d.H + 1) * d.S, 0.0) {
  if (with_q) Q.assign(d.num_cells(), 0.0);
}

double Occupancy::state_mass(int h, int s) const {
  double total = 0.0;
  for (int a = 0; a < dims.A; ++a) {
    for (int b = 0; b < dims.B; ++b) total += at(h, s, a, b);
  }
  return total;
}

double Occupancy::stage_mass(int h) const {
  double total = 0.0;
  for (int s = 0; s < dims.S; ++s) total += state_mass(h, s);
  return total;
}

NashSolution nash_vi(const Game& game, double eps_ne) {
  const GameDims& d = game.dims;
  NashSolution out{StrategyPair{Strategy(Player::kMax, d.H, d.S, d.A), MinStrategy{}},
                   ValueTables(d)};
  StageWriter writer(d);
  for (int h = d.H - 1; h >= 0; --h) {
    backup_stage(game, out.values, h);
    for (int s = 0; s < d.S; ++s) {
      const StageEquilibrium eq =
          solve_stage_at(out.values.stage_matrix(h, s), d.turn_based, eps_ne, "nash_vi", h, s);
      writer.write(h, s, eq);
      out.values.v(h, s) = eq.value;
    }
  }
  out.pi.mu = std::move(writer.mu);
  out.pi.nu = writer.take_min_strategy();
  return out;
}

MaxBestResponse best_response_max(const Game& game, const MinStrategy& nu) {
  const GameDims& d = game.dims;
  check_strategy(d, nu);
  MaxBestResponse out{ValueTables(d), Strategy(Player::kMax, d.H, d.S, d.A)};
  for (int h = d.H - 1; h >= 0; --h) {
    backup_stage(game, out.values, h);
    for (int s = 0; s < d.S; ++s) {
      int best_a = 0;
      double best = -kInf;
      for (int a = 0; a < d.A; ++a) {
        double v = 0.0;
        for (int b = 0; b < d.B; ++b) v += min_prob(nu, h, s, a, b) * out.values.q(h, s, a, b);
        if (v > best) {
          best = v;
          best_a = a;
        }
      }
      out.values.v(h, s) = best;
      out.br.at(h, s)[best_a] = 1.0;
    }
  }
  return out;
}

MinBestResponse best_response_min(const Game& game, const Strategy& mu) {
  const GameDims& d = game.dims;
  check_strategy(d, mu);
  if (mu.player != Player::kMax) throw Error("expected a max-player strategy");
  ValueTables values(d);
  Strategy plain(Player::kMin, d.H, d.S, d.B);
  TurnBasedMinStrategy conditioned;
  if (d.turn_based) conditioned = TurnBasedMinStrategy(d.H, d.S, d.A, d.B);

  for (int h = d.H - 1; h >= 0; --h) {
    backup_stage(game, values, h);
    for (int s = 0; s < d.S; ++s) {
      const auto mu_row = mu.at(h, s);
      if (d.turn_based) {
        double total = 0.0;
        for (int a = 0; a < d.A; ++a) {
          int best_b = 0;
          for (int b = 1; b < d.B; ++b) {
            if (values.q(h, s, a, b) < values.q(h, s, a, best_b)) best_b = b;
          }
          conditioned.at(h, s, a)[best_b] = 1.0;
          total += mu_row[a] * values.q(h, s, a, best_b);
        }
        values.v(h, s) = total;
      } else {
        int best_b = 0;
        double best = kInf;
        for (int b = 0; b < d.B; ++b) {
          double v = 0.0;
          for (int a = 0; a < d.A; ++a) v += mu_row[a] * values.q(h, s, a, b);
          if (v < best) {
            best = v;
            best_b = b;
          }
        }
        values.v(h, s) = best;
        plain.at(h, s)[best_b] = 1.0;
      }
    }
  }
  if (d.turn_based) return {std::move(values), std::move(conditioned)};
  return {std::move(values), std::move(plain)};
}

BestResponse best_response_value(const Game& game, const Strategy& fixed) {
  if (fixed.player == Player::kMin) {
    MaxBestResponse br = best_response_max(game, MinStrategy{fixed});
    return {std::move(br.values), std::move(br.br)};
  }
  MinBestResponse br = best_response_min(game, fixed);
  return {std::move(br.values), std::move(br.br)};
}

double duality_gap(const Game& game, const StrategyPair& pi) {
  const int s1 = game.dims.s1;
  const double upper = best_response_max(game, pi.nu).values.v(0, s1);
  const double lower = best_response_min(game, pi.mu).values.v(0, s1);
  return upper - lower;
}

Occupancy occupancy(const Game& game, const ExplorationPolicy& rho) {
  const GameDims& d = game.dims;
  check_policy(d, rho);
  Occupancy occ{d, std::vector<double>(d.num_cells(), 0.0)};
  std::vector<double> state(d.S, 0.0);
  std::vector<double> next(d.S, 0.0);
  state[d.s1] = 1.0;
  for (int h = 0; h < d.H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < d.S; ++s) {
      if (state[s] == 0.0) continue;
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          const double mass = state[s] * rho.prob(h, s, a, b);
          occ.d[d.cell(h, s, a, b)] = mass;
          if (mass == 0.0) continue;
          const auto row = game.transition(h, s, a, b);
          for (int y = 0; y < d.S; ++y) next[y] += mass * row[y];
        }
      }
    }
    std::swap(state, next);
  }
  return occ;
}

Occupancy occupancy(const Game& game, const StrategyPair& pi) {
  return occupancy(game, ExplorationPolicy::from_pair(game.dims, pi));
}

Deviation max_unilateral_occupancy_min_deviates(const Game& game, const Strategy& mu_star,
                                                int h, int s, int a, int b) {
  const GameDims& d = game.dims;
  check_strategy(d, mu_star);
  check_cell(d, h, s, a, b);
  const ReachPlan plan = reach_with_min_deviating(game, mu_star, h, s);
  return {plan.reach * mu_star.at(h, s)[a], min_deviation_strategy(d, plan, h, s, b)};
}

Deviation max_unilateral_occupancy_max_deviates(const Game& game, const MinStrategy& nu_star,
                                                int h, int s, int a, int b) {
  const GameDims& d = game.dims;
  check_strategy(d, nu_star);
  check_cell(d, h, s, a, b);
  const ReachPlan plan = reach_with_max_deviating(game, nu_star, h, s);
  return {plan.reach * min_prob(nu_star, h, s, a, b), max_deviation_strategy(d, plan, h, s, a)};
}

double max_unilateral_occupancy(const Game& game, const Strategy& mu_star, int h, int s, int a,
                                int b) {
  return max_unilateral_occupancy_min_deviates(game, mu_star, h, s, a, b).occupancy;
}

CoverageReport coverage_report(const Game& game, const ExplorationPolicy& rho,
                               const StrategyPair& pi_star) {
  const GameDims& d = game.dims;
  const Occupancy data = occupancy(game, rho);
  const Occupancy star = occupancy(game, pi_star);

  CoverageReport report;
  report.note =
      "c_star is computed for the supplied equilibrium only; other equilibria may give a "
      "smaller value";
  report.d_m = kInf;
  report.assumption1_holds = true;
  for (std::size_t c = 0; c < d.num_cells(); ++c) {
    report.d_m = std::min(report.d_m, data.d[c]);
    if (star.d[c] > kCoverageThreshold && data.d[c] <= kCoverageThreshold) {
      report.assumption1_holds = false;
    }
  }
  report.assumption3_holds = report.d_m > kCoverageThreshold;

  double c_star = 0.0;
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      const ReachPlan min_plan = reach_with_min_deviating(game, pi_star.mu, h, s);
      const ReachPlan max_plan = reach_with_max_deviating(game, pi_star.nu, h, s);
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          const double den = data.at(h, s, a, b);
          const double min_dev = min_plan.reach * pi_star.mu.at(h, s)[a];
          const double max_dev = max_plan.reach * min_prob(pi_star.nu, h, s, a, b);
          const double r_min = coverage_ratio(min_dev, den);
          const double r_max = coverage_ratio(max_dev, den);
          c_star = std::max({c_star, r_min, r_max});
          if (!report.witness && (std::isinf(r_min) || std::isinf(r_max))) {
            CoverageWitness w;
            w.h = h;
            w.s = s;
            w.a = a;
            w.b = b;
            w.rho_occupancy = den;
            if (std::isinf(r_min)) {
              w.deviator = Player::kMin;
              w.deviation_occupancy = min_dev;
              w.deviation = min_deviation_strategy(d, min_plan, h, s, b);
            } else {
              w.deviator = Player::kMax;
              w.deviation_occupancy = max_dev;
              w.deviation = max_deviation_strategy(d, max_plan, h, s, a);
            }
            report.witness = std::move(w);
          }
        }
      }
    }
  }
  report.c_star = c_star;
  report.assumption2_holds = std::isfinite(c_star);
  return report;
}

}  // namespace ozsg
