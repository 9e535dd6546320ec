#pragma once

#include <span>
#include <vector>

#include "ozsg/error.hpp"

namespace ozsg {

/// Default exploitability tolerance for exact evaluation.
inline constexpr double kExactEpsNe = 1e-8;
/// Default exploitability tolerance inside the learners.
inline constexpr double kLearnerEpsNe = 1e-6;

/// Read-only row-major view of a rows x cols payoff matrix (row player maximizes).
struct MatrixRef {
  std::span<const double> values;
  int rows = 0;
  int cols = 0;

  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i) * cols + j];
  }
};

struct MatrixGameSolution {
  std::vector<double> mu;  // row (max) player
  std::vector<double> nu;  // column (min) player
  double value = 0.0;
  double exploitability = 0.0;
};

/// Raised when the solver cannot certify the requested tolerance. Carries the
/// best solution found and its exploitability.
class MatrixSolveError : public Error {
 public:
  MatrixSolveError(const std::string& what, MatrixGameSolution best)
      : Error(what), best_(std::move(best)) {}
  const MatrixGameSolution& best() const { return best_; }

 private:
  MatrixGameSolution best_;
};

/// Solves max_mu min_nu mu^T Q nu with a dense simplex method.
///
/// Payoffs are shifted to be strictly positive and the column player's LP
/// max 1'y s.t. Qy <= 1, y >= 0 is solved with Bland's rule; the row
/// player's strategy is read from the dual. The returned pair is checked
/// against eps_ne before being returned. Among multiple equilibria, the one
/// reached by Bland's lowest-index pivoting is returned.
MatrixGameSolution solve_matrix_game(MatrixRef q, double eps_ne = kExactEpsNe);

/// max_a (Q nu)_a - min_b (mu^T Q)_b.
double exploitability(MatrixRef q, std::span<const double> mu, std::span<const double> nu);

struct PureMaxMin {
  int a_star = 0;
  std::vector<int> b_reply;  // b_reply[a] = argmin_b Q(a, b)
  double value = 0.0;
};

/// Pure max-min for turn-based stages; lowest index wins every tie.
PureMaxMin solve_maxmin_pure(MatrixRef q);

/// Equilibrium of one stage matrix in either solve mode.
///
/// In simultaneous mode nu has B entries. In turn-based mode mu is a point
/// mass and nu holds A rows of B entries, row a being the reply to a.
struct StageEquilibrium {
  std::vector<double> mu;
  std::vector<double> nu;
  double value = 0.0;  // E_{a~mu, b~nu} Q(a, b)
};

StageEquilibrium solve_stage(MatrixRef q, bool turn_based, double eps_ne);

}  // namespace ozsg
