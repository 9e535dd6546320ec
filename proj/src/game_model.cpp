#include "ozsg/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ozsg/error.hpp"
#include "ozsg/rng.hpp"

namespace ozsg {

namespace {

bool is_distribution(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= kProbTolerance;
}

std::string cell_name(const char* table, int h, int s, int a, int b) {
  std::ostringstream os;
  os << table << "[h=" << h << "][s=" << s << "][a=" << a << "][b=" << b << "]";
  return os.str();
}

void check_dims(const GameDims& d) {
  if (d.S <= 0 || d.A <= 0 || d.B <= 0 || d.H <= 0) throw Error("invalid dimension");
}

}  // namespace

std::string to_string(Player p) { return p == Player::kMax ? "max" : "min"; }

Game::Game(const GameDims& d) : dims(d) {
  check_dims(d);
  rewards.assign(d.num_cells(), 0.0);
  transitions.assign(d.num_cells() * d.S, 1.0 / d.S);
}

Strategy::Strategy(Player p, int horizon, int states, int actions)
    : player(p), H(horizon), S(states), num_actions(actions),
      probs(static_cast<std::size_t>(horizon) * states * actions, 0.0) {}

Strategy Strategy::uniform(Player p, int horizon, int states, int actions) {
  Strategy st(p, horizon, states, actions);
  std::fill(st.probs.begin(), st.probs.end(), 1.0 / actions);
  return st;
}

Strategy Strategy::deterministic(Player p, int horizon, int states, int num_actions,
                                 std::span<const int> actions) {
  if (actions.size() != static_cast<std::size_t>(horizon) * states) {
    throw Error("deterministic strategy: action table has wrong size");
  }
  Strategy st(p, horizon, states, num_actions);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      st.at(h, s)[actions[static_cast<std::size_t>(h) * states + s]] = 1.0;
    }
  }
  return st;
}

TurnBasedMinStrategy::TurnBasedMinStrategy(int horizon, int states, int max_actions,
                                           int min_actions)
    : H(horizon), S(states), A(max_actions), B(min_actions),
      probs(static_cast<std::size_t>(horizon) * states * max_actions * min_actions, 0.0) {}

double min_prob(const MinStrategy& nu, int h, int s, int a, int b) {
  if (const auto* plain = std::get_if<Strategy>(&nu)) return plain->at(h, s)[b];
  return std::get<TurnBasedMinStrategy>(nu).at(h, s, a)[b];
}

bool is_deterministic(const Strategy& st, double tol) {
  for (int h = 0; h < st.H; ++h) {
    for (int s = 0; s < st.S; ++s) {
      int ones = 0;
      for (double p : st.at(h, s)) {
        if (std::abs(p - 1.0) <= tol) {
          ++ones;
        } else if (std::abs(p) > tol) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

bool is_deterministic(const MinStrategy& st, double tol) {
  if (const auto* plain = std::get_if<Strategy>(&st)) return is_deterministic(*plain, tol);
  const auto& tb = std::get<TurnBasedMinStrategy>(st);
  for (std::size_t row = 0; row * tb.B < tb.probs.size(); ++row) {
    int ones = 0;
    for (int b = 0; b < tb.B; ++b) {
      const double p = tb.probs[row * tb.B + b];
      if (std::abs(p - 1.0) <= tol) {
        ++ones;
      } else if (std::abs(p) > tol) {
        return false;
      }
    }
    if (ones != 1) return false;
  }
  return true;
}

ExplorationPolicy::ExplorationPolicy(int horizon, int states, int max_actions,
                                     int min_actions)
    : H(horizon), S(states), A(max_actions), B(min_actions),
      probs(static_cast<std::size_t>(horizon) * states * max_actions * min_actions, 0.0) {}

ExplorationPolicy ExplorationPolicy::uniform(const GameDims& dims) {
  ExplorationPolicy rho(dims.H, dims.S, dims.A, dims.B);
  std::fill(rho.probs.begin(), rho.probs.end(), 1.0 / (dims.A * dims.B));
  return rho;
}

ExplorationPolicy ExplorationPolicy::from_pair(const GameDims& dims, const StrategyPair& pi) {
  check_strategy(dims, pi.mu);
  check_strategy(dims, pi.nu);
  ExplorationPolicy rho(dims.H, dims.S, dims.A, dims.B);
  for (int h = 0; h < dims.H; ++h) {
    for (int s = 0; s < dims.S; ++s) {
      auto joint = rho.at(h, s);
      const auto mu = pi.mu.at(h, s);
      for (int a = 0; a < dims.A; ++a) {
        for (int b = 0; b < dims.B; ++b) {
          joint[static_cast<std::size_t>(a) * dims.B + b] = mu[a] * min_prob(pi.nu, h, s, a, b);
        }
      }
    }
  }
  return rho;
}

ValidationReport validate_game(const Game& game) {
  ValidationReport report;
  const GameDims& d = game.dims;
  if (d.S <= 0 || d.A <= 0 || d.B <= 0 || d.H <= 0) {
    report.push_back({"dims", "invalid dimension"});
    return report;
  }
  if (game.rewards.size() != d.num_cells()) {
    report.push_back({"r", "reward table has wrong size"});
  }
  if (game.transitions.size() != d.num_cells() * d.S) {
    report.push_back({"P", "transition table has wrong size"});
  }
  if (!report.empty()) return report;
  if (d.s1 < 0 || d.s1 >= d.S) report.push_back({"s1", "initial state out of range"});

  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          const double r = game.reward(h, s, a, b);
          if (!(r >= 0.0 && r <= 1.0)) {
            report.push_back({cell_name("r", h, s, a, b), "reward out of [0,1]"});
          }
          const auto row = game.transition(h, s, a, b);
          bool negative = false;
          double total = 0.0;
          for (double p : row) {
            if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
            total += p;
          }
          if (negative) {
            report.push_back({cell_name("P", h, s, a, b), "transition entry negative or non-finite"});
          } else if (std::abs(total - 1.0) > kProbTolerance) {
            report.push_back({cell_name("P", h, s, a, b), "transition row does not sum to 1"});
          }
        }
      }
    }
  }
  return report;
}

void check_strategy(const GameDims& dims, const Strategy& st) {
  const int expected_actions = st.player == Player::kMax ? dims.A : dims.B;
  if (st.H != dims.H || st.S != dims.S || st.num_actions != expected_actions ||
      st.probs.size() != static_cast<std::size_t>(st.H) * st.S * st.num_actions) {
    throw Error("strategy dimensions do not match the game");
  }
  for (int h = 0; h < st.H; ++h) {
    for (int s = 0; s < st.S; ++s) {
      if (!is_distribution(st.at(h, s))) {
        throw Error("invalid distribution in " + to_string(st.player) + " strategy at h=" +
                    std::to_string(h) + " s=" + std::to_string(s));
      }
    }
  }
}

void check_strategy(const GameDims& dims, const MinStrategy& st) {
  if (const auto* plain = std::get_if<Strategy>(&st)) {
    if (plain->player != Player::kMin) throw Error("expected a min-player strategy");
    check_strategy(dims, *plain);
    return;
  }
  const auto& tb = std::get<TurnBasedMinStrategy>(st);
  if (tb.H != dims.H || tb.S != dims.S || tb.A != dims.A || tb.B != dims.B ||
      tb.probs.size() != dims.num_cells()) {
    throw Error("strategy dimensions do not match the game");
  }
  for (int h = 0; h < tb.H; ++h) {
    for (int s = 0; s < tb.S; ++s) {
      for (int a = 0; a < tb.A; ++a) {
        if (!is_distribution(tb.at(h, s, a))) {
          throw Error("invalid distribution in turn-based min strategy at h=" +
                      std::to_string(h) + " s=" + std::to_string(s) + " a=" + std::to_string(a));
        }
      }
    }
  }
}

void check_policy(const GameDims& dims, const ExplorationPolicy& rho) {
  if (rho.H != dims.H || rho.S != dims.S || rho.A != dims.A || rho.B != dims.B ||
      rho.probs.size() != dims.num_cells()) {
    throw Error("exploration policy dimensions do not match the game");
  }
  for (int h = 0; h < rho.H; ++h) {
    for (int s = 0; s < rho.S; ++s) {
      if (!is_distribution(rho.at(h, s))) {
        throw Error("invalid distribution in exploration policy at h=" + std::to_string(h) +
                    " s=" + std::to_string(s));
      }
    }
  }
}

HardnessPair make_hardness_pair() {
  const GameDims dims{.S = 1, .A = 2, .B = 2, .H = 1, .s1 = 0, .turn_based = false};
  Game g1(dims);
  g1.reward(0, 0, 0, 0) = 0.25;
  g1.reward(0, 0, 0, 1) = 0.5;
  g1.reward(0, 0, 1, 0) = 0.0;
  g1.reward(0, 0, 1, 1) = 0.75;
  Game g2 = g1;
  g2.reward(0, 0, 1, 0) = 1.0;

  ExplorationPolicy rho(1, 1, 2, 2);
  auto joint = rho.at(0, 0);
  joint[0 * 2 + 0] = 1.0 / 3.0;
  joint[0 * 2 + 1] = 1.0 / 3.0;
  joint[1 * 2 + 1] = 1.0 / 3.0;
  return {std::move(g1), std::move(g2), std::move(rho)};
}

Game random_game(std::uint64_t seed, int S, int A, int B, int H, bool turn_based) {
  if (S <= 0 || A <= 0 || B <= 0 || H <= 0) throw Error("invalid dimension");
  Game game(GameDims{.S = S, .A = A, .B = B, .H = H, .s1 = 0, .turn_based = turn_based});
  Rng rng(seed);
  for (double& r : game.rewards) r = rng.uniform();
  for (std::size_t c = 0; c < game.dims.num_cells(); ++c) {
    std::span<double> row(game.transitions.data() + c * S, static_cast<std::size_t>(S));
    double total = 0.0;
    for (double& p : row) {
      p = 1.0 - rng.uniform();  // (0, 1]
      total += p;
    }
    for (double& p : row) p /= total;
  }
  return game;
}

TurnBasedMode compile_turn_based(const Game& game) {
  if (!game.dims.turn_based) throw Error("not a turn-based game");
  return TurnBasedMode{game.dims};
}

}  // namespace ozsg
