#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ozsg {

/// Absolute tolerance for "sums to one" checks.
inline constexpr double kProbTolerance = 1e-12;

/// Sizes and flags of a tabular two-player zero-sum Markov game.
///
/// Timesteps are 0-based: h in {0, ..., H-1}, with V_H = 0 implied.
struct GameDims {
  int S = 1;  // states
  int A = 1;  // max-player actions
  int B = 1;  // min-player actions
  int H = 1;  // horizon
  int s1 = 0;  // fixed initial state
  bool turn_based = false;

  std::size_t cells_per_stage() const {
    return static_cast<std::size_t>(S) * A * B;
  }
  std::size_t num_cells() const { return H * cells_per_stage(); }
  /// Flat index of (h, s, a, b) in any per-cell table.
  std::size_t cell(int h, int s, int a, int b) const {
    return ((static_cast<std::size_t>(h) * S + s) * A + a) * B + b;
  }
  bool operator==(const GameDims&) const = default;
};

/// Finite-horizon zero-sum Markov game with deterministic rewards in [0, 1].
///
/// A Game may hold invalid data (validate_game reports it); the algorithms
/// assume a valid game.
struct Game {
  GameDims dims;
  std::vector<double> rewards;      // [h][s][a][b]
  std::vector<double> transitions;  // [h][s][a][b][s']

  Game() = default;
  /// Zero rewards and uniform transitions.
  explicit Game(const GameDims& d);

  double reward(int h, int s, int a, int b) const { return rewards[dims.cell(h, s, a, b)]; }
  double& reward(int h, int s, int a, int b) { return rewards[dims.cell(h, s, a, b)]; }

  std::span<const double> transition(int h, int s, int a, int b) const {
    return {transitions.data() + dims.cell(h, s, a, b) * dims.S,
            static_cast<std::size_t>(dims.S)};
  }
  std::span<double> transition(int h, int s, int a, int b) {
    return {transitions.data() + dims.cell(h, s, a, b) * dims.S,
            static_cast<std::size_t>(dims.S)};
  }
};

enum class Player { kMax, kMin };

std::string to_string(Player p);

/// Markov strategy of one player: dist[h][s] is a distribution over that
/// player's actions.
struct Strategy {
  Player player = Player::kMax;
  int H = 0;
  int S = 0;
  int num_actions = 0;
  std::vector<double> probs;

  Strategy() = default;
  Strategy(Player p, int horizon, int states, int actions);

  static Strategy uniform(Player p, int horizon, int states, int actions);
  /// Point masses; actions[h * S + s] is the action played at (h, s).
  static Strategy deterministic(Player p, int horizon, int states, int num_actions,
                                std::span<const int> actions);

  std::span<const double> at(int h, int s) const {
    return {probs.data() + (static_cast<std::size_t>(h) * S + s) * num_actions,
            static_cast<std::size_t>(num_actions)};
  }
  std::span<double> at(int h, int s) {
    return {probs.data() + (static_cast<std::size_t>(h) * S + s) * num_actions,
            static_cast<std::size_t>(num_actions)};
  }
};

/// Min-player strategy in a turn-based game: the min player sees the max
/// player's action, so dist[h][s][a] is a distribution over B.
struct TurnBasedMinStrategy {
  int H = 0;
  int S = 0;
  int A = 0;
  int B = 0;
  std::vector<double> probs;

  TurnBasedMinStrategy() = default;
  TurnBasedMinStrategy(int horizon, int states, int max_actions, int min_actions);

  std::span<const double> at(int h, int s, int a) const {
    return {probs.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * B,
            static_cast<std::size_t>(B)};
  }
  std::span<double> at(int h, int s, int a) {
    return {probs.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * B,
            static_cast<std::size_t>(B)};
  }
};

/// Min-player strategy: either unconditioned or conditioned on the max action.
using MinStrategy = std::variant<Strategy, TurnBasedMinStrategy>;

/// Probability that the min player picks b at (h, s) after the max player picked a.
double min_prob(const MinStrategy& nu, int h, int s, int a, int b);

/// True when every per-state distribution is a point mass.
bool is_deterministic(const Strategy& st, double tol = kProbTolerance);
bool is_deterministic(const MinStrategy& st, double tol = kProbTolerance);

struct StrategyPair {
  Strategy mu;     // max player
  MinStrategy nu;  // min player
};

/// Markov joint-action behaviour policy: dist[h][s] is a distribution over A x B
/// laid out as a * B + b.
struct ExplorationPolicy {
  int H = 0;
  int S = 0;
  int A = 0;
  int B = 0;
  std::vector<double> probs;

  ExplorationPolicy() = default;
  ExplorationPolicy(int horizon, int states, int max_actions, int min_actions);

  /// Uniform over all A*B joint actions in every (h, s).
  static ExplorationPolicy uniform(const GameDims& dims);
  /// Product policy mu(a|s) * nu(b|s,a).
  static ExplorationPolicy from_pair(const GameDims& dims, const StrategyPair& pi);

  std::span<const double> at(int h, int s) const {
    return {probs.data() + (static_cast<std::size_t>(h) * S + s) * A * B,
            static_cast<std::size_t>(A) * B};
  }
  std::span<double> at(int h, int s) {
    return {probs.data() + (static_cast<std::size_t>(h) * S + s) * A * B,
            static_cast<std::size_t>(A) * B};
  }
  double prob(int h, int s, int a, int b) const { return at(h, s)[static_cast<std::size_t>(a) * B + b]; }
};

struct Violation {
  std::string location;    // e.g. "P[h=0][s=1][a=0][b=1]"
  std::string constraint;  // e.g. "transition row does not sum to 1"
};

using ValidationReport = std::vector<Violation>;

/// Checks every Game invariant; an empty report means the game is valid.
ValidationReport validate_game(const Game& game);

/// Throws Error if st is not a probability-vector table matching the game.
void check_strategy(const GameDims& dims, const Strategy& st);
void check_strategy(const GameDims& dims, const MinStrategy& st);
void check_policy(const GameDims& dims, const ExplorationPolicy& rho);

struct HardnessPair {
  Game game1;
  Game game2;
  ExplorationPolicy rho;
};

/// The two one-step 2x2 bandit games that agree everywhere except at
/// (a2, b1), plus the behaviour policy that never plays (a2, b1).
HardnessPair make_hardness_pair();

/// Rewards uniform in [0, 1); each transition row a normalized vector of
/// positive uniforms. Deterministic in seed.
Game random_game(std::uint64_t seed, int S, int A, int B, int H, bool turn_based = false);

/// Confirms the game is solved with pure max-min equilibria and that the min
/// player's outputs are conditioned on the max action.
struct TurnBasedMode {
  GameDims dims;
};

TurnBasedMode compile_turn_based(const Game& game);

}  // namespace ozsg
