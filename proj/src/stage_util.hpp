#pragma once

// Internal helpers shared by the exact solver and the learners.

#include <algorithm>
#include <string>

#include "ozsg/game_model.hpp"
#include "ozsg/matrix_ne.hpp"

namespace ozsg {

inline StageEquilibrium solve_stage_at(MatrixRef q, bool turn_based, double eps_ne,
                                       const char* where, int h, int s) {
  try {
    return solve_stage(q, turn_based, eps_ne);
  } catch (const MatrixSolveError& e) {
    throw MatrixSolveError(std::string(where) + " at h=" + std::to_string(h) +
                               " s=" + std::to_string(s) + ": " + e.what(),
                           e.best());
  }
}

/// Collects per-state stage equilibria into full strategies.
class StageWriter {
 public:
  explicit StageWriter(const GameDims& d)
      : mu(Player::kMax, d.H, d.S, d.A), dims_(d) {
    if (d.turn_based) {
      conditioned_ = TurnBasedMinStrategy(d.H, d.S, d.A, d.B);
    } else {
      plain_ = Strategy(Player::kMin, d.H, d.S, d.B);
    }
  }

  void write(int h, int s, const StageEquilibrium& eq) {
    std::copy(eq.mu.begin(), eq.mu.end(), mu.at(h, s).begin());
    if (dims_.turn_based) {
      for (int a = 0; a < dims_.A; ++a) {
        std::copy_n(eq.nu.begin() + static_cast<std::ptrdiff_t>(a) * dims_.B, dims_.B,
                    conditioned_.at(h, s, a).begin());
      }
    } else {
      std::copy(eq.nu.begin(), eq.nu.end(), plain_.at(h, s).begin());
    }
  }

  MinStrategy take_min_strategy() {
    if (dims_.turn_based) return std::move(conditioned_);
    return std::move(plain_);
  }

  Strategy mu;

 private:
  GameDims dims_;
  Strategy plain_;
  TurnBasedMinStrategy conditioned_;
};

}  // namespace ozsg
