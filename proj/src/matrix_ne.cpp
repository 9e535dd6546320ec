#include "ozsg/matrix_ne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ozsg {

namespace {

constexpr double kPivotTol = 1e-12;

void check_finite(MatrixRef q) {
  if (q.rows <= 0 || q.cols <= 0 ||
      q.values.size() != static_cast<std::size_t>(q.rows) * q.cols) {
    throw Error("invalid payoff: bad matrix shape");
  }
  for (double x : q.values) {
    if (!std::isfinite(x)) throw Error("invalid payoff: non-finite entry");
  }
}

void normalize(std::vector<double>& p) {
  for (double& x : p) x = std::max(x, 0.0);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 0.0);
    p.front() = 1.0;
    return;
  }
  for (double& x : p) x /= total;
}

// Dense tableau for max 1'y s.t. Q'y <= 1, y >= 0 with slack basis.
class Tableau {
 public:
  Tableau(MatrixRef q, double shift)
      : m_(q.rows), n_(q.cols), width_(n_ + m_ + 1),
        t_(static_cast<std::size_t>(m_ + 1) * width_, 0.0), basis_(m_) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) at(i, j) = q(i, j) + shift;
      at(i, n_ + i) = 1.0;
      at(i, width_ - 1) = 1.0;
      basis_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) at(m_, j) = -1.0;
  }

  // Returns false when the pivot budget runs out.
  bool solve(int max_pivots) {
    for (int it = 0; it < max_pivots; ++it) {
      int enter = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (at(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double coef = at(i, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = at(i, width_ - 1) / coef;
        const bool better = ratio < best_ratio - kPivotTol;
        const bool tie = !better && ratio <= best_ratio + kPivotTol;
        if (better || (tie && leave >= 0 && basis_[i] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      // Bounded: Q' > 0 and the rhs is 1, so a leaving row always exists.
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return false;
  }

  std::vector<double> primal() const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = at(i, width_ - 1);
    }
    return y;
  }

  std::vector<double> dual() const {
    std::vector<double> x(m_);
    for (int i = 0; i < m_; ++i) x[i] = at(m_, n_ + i);
    return x;
  }

  double objective() const { return at(m_, width_ - 1); }

 private:
  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }

  void pivot(int row, int col) {
    const double inv = 1.0 / at(row, col);
    for (int j = 0; j < width_; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = at(i, col);
      if (factor == 0.0) continue;
      for (int j = 0; j < width_; ++j) at(i, j) -= factor * at(row, j);
      at(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  int m_;
  int n_;
  int width_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

double row_best(MatrixRef q, std::span<const double> nu) {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < q.rows; ++a) {
    double v = 0.0;
    for (int b = 0; b < q.cols; ++b) v += q(a, b) * nu[b];
    best = std::max(best, v);
  }
  return best;
}

double col_best(MatrixRef q, std::span<const double> mu) {
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < q.cols; ++b) {
    double v = 0.0;
    for (int a = 0; a < q.rows; ++a) v += mu[a] * q(a, b);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

double exploitability(MatrixRef q, std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != static_cast<std::size_t>(q.rows) ||
      nu.size() != static_cast<std::size_t>(q.cols) ||
      q.values.size() != static_cast<std::size_t>(q.rows) * q.cols) {
    throw Error("exploitability: dimension mismatch");
  }
  return row_best(q, nu) - col_best(q, mu);
}

MatrixGameSolution solve_matrix_game(MatrixRef q, double eps_ne) {
  check_finite(q);
  if (!(eps_ne > 0.0)) throw Error("eps_ne must be positive");

  const double lo = *std::min_element(q.values.begin(), q.values.end());
  const double shift = 1.0 - lo;  // shifted payoffs lie in [1, 1 + range]

  Tableau tableau(q, shift);
  const bool converged = tableau.solve(64 * (q.rows + q.cols) + 64);

  MatrixGameSolution sol;
  sol.nu = tableau.primal();
  sol.mu = tableau.dual();
  const double total = tableau.objective();
  normalize(sol.nu);
  normalize(sol.mu);

  const double lower = col_best(q, sol.mu);
  const double upper = row_best(q, sol.nu);
  sol.exploitability = upper - lower;
  const double lp_value = total > 0.0 ? 1.0 / total - shift : lower;
  sol.value = std::clamp(lp_value, lower, std::max(lower, upper));

  if (!converged) {
    throw MatrixSolveError("matrix game solver exceeded its pivot budget", std::move(sol));
  }
  if (sol.exploitability > eps_ne) {
    throw MatrixSolveError("matrix game solution exploitability " +
                               std::to_string(sol.exploitability) + " exceeds eps_ne",
                           std::move(sol));
  }
  return sol;
}

PureMaxMin solve_maxmin_pure(MatrixRef q) {
  check_finite(q);
  PureMaxMin out;
  out.b_reply.assign(q.rows, 0);
  out.value = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < q.rows; ++a) {
    int reply = 0;
    for (int b = 1; b < q.cols; ++b) {
      if (q(a, b) < q(a, reply)) reply = b;
    }
    out.b_reply[a] = reply;
    if (q(a, reply) > out.value) {
      out.value = q(a, reply);
      out.a_star = a;
    }
  }
  return out;
}

StageEquilibrium solve_stage(MatrixRef q, bool turn_based, double eps_ne) {
  StageEquilibrium eq;
  if (turn_based) {
    const PureMaxMin pure = solve_maxmin_pure(q);
    eq.mu.assign(q.rows, 0.0);
    eq.mu[pure.a_star] = 1.0;
    eq.nu.assign(static_cast<std::size_t>(q.rows) * q.cols, 0.0);
    for (int a = 0; a < q.rows; ++a) {
      eq.nu[static_cast<std::size_t>(a) * q.cols + pure.b_reply[a]] = 1.0;
    }
    eq.value = pure.value;
    return eq;
  }
  MatrixGameSolution sol = solve_matrix_game(q, eps_ne);
  eq.mu = std::move(sol.mu);
  eq.nu = std::move(sol.nu);
  double v = 0.0;
  for (int a = 0; a < q.rows; ++a) {
    for (int b = 0; b < q.cols; ++b) v += eq.mu[a] * q(a, b) * eq.nu[b];
  }
  eq.value = v;
  return eq;
}

}  // namespace ozsg
