#pragma once

// Brute-force reference implementations used by the tests. Nothing here calls
// into the solver code paths it is compared against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "ozsg/game_model.hpp"

namespace oracle {

using ozsg::Game;

// max over p in [0,1] of min_b [p Q(0,b) + (1-p) Q(1,b)] for a 2 x B matrix,
// by grid search refined around the best point.
inline double matrix_value_2row(const std::vector<double>& q, int B) {
  auto f = [&](double p) {
    double m = std::numeric_limits<double>::infinity();
    for (int b = 0; b < B; ++b) m = std::min(m, p * q[b] + (1 - p) * q[B + b]);
    return m;
  };
  double lo = 0.0, hi = 1.0, best = 0.0;
  for (int round = 0; round < 12; ++round) {
    const int steps = 200;
    double arg = lo;
    best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
      const double p = lo + (hi - lo) * i / steps;
      const double v = f(p);
      if (v > best) best = v, arg = p;
    }
    const double w = (hi - lo) / steps;
    lo = std::max(0.0, arg - 2 * w);
    hi = std::min(1.0, arg + 2 * w);
  }
  return best;
}

// Backward induction with the grid matrix oracle at every stage (A must be 2).
inline double nash_value(const Game& g) {
  const auto& d = g.dims;
  std::vector<double> next(d.S, 0.0), cur(d.S);
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      std::vector<double> q(d.A * d.B);
      for (int a = 0; a < d.A; ++a)
        for (int b = 0; b < d.B; ++b) {
          double x = g.reward(h, s, a, b);
          auto p = g.transition(h, s, a, b);
          for (int t = 0; t < d.S; ++t) x += p[t] * next[t];
          q[a * d.B + b] = x;
        }
      cur[s] = matrix_value_2row(q, d.B);
    }
    next = cur;
  }
  return next[d.s1];
}

// Probability that the max player picks a at (h,s), and that the min player
// picks b at (h,s) after the max player picked a.
using MaxPolicy = std::function<double(int h, int s, int a)>;
using MinPolicy = std::function<double(int h, int s, int a, int b)>;

// Forward state-distribution evaluation of the expected return from s1.
inline double evaluate(const Game& g, const MaxPolicy& mu, const MinPolicy& nu) {
  const auto& d = g.dims;
  std::vector<double> dist(d.S, 0.0);
  dist[d.s1] = 1.0;
  double ret = 0.0;
  for (int h = 0; h < d.H; ++h) {
    std::vector<double> nxt(d.S, 0.0);
    for (int s = 0; s < d.S; ++s) {
      if (dist[s] == 0.0) continue;
      for (int a = 0; a < d.A; ++a)
        for (int b = 0; b < d.B; ++b) {
          const double w = dist[s] * mu(h, s, a) * nu(h, s, a, b);
          if (w == 0.0) continue;
          ret += w * g.reward(h, s, a, b);
          auto p = g.transition(h, s, a, b);
          for (int t = 0; t < d.S; ++t) nxt[t] += w * p[t];
        }
    }
    dist = nxt;
  }
  return ret;
}

// Per-(h) joint occupancy d_h(s,a,b), computed forward.
inline std::vector<double> occupancy(const Game& g, const MaxPolicy& mu, const MinPolicy& nu) {
  const auto& d = g.dims;
  std::vector<double> occ(d.num_cells(), 0.0);
  std::vector<double> dist(d.S, 0.0);
  dist[d.s1] = 1.0;
  for (int h = 0; h < d.H; ++h) {
    std::vector<double> nxt(d.S, 0.0);
    for (int s = 0; s < d.S; ++s)
      for (int a = 0; a < d.A; ++a)
        for (int b = 0; b < d.B; ++b) {
          const double w = dist[s] * mu(h, s, a) * nu(h, s, a, b);
          occ[d.cell(h, s, a, b)] = w;
          auto p = g.transition(h, s, a, b);
          for (int t = 0; t < d.S; ++t) nxt[t] += w * p[t];
        }
    dist = nxt;
  }
  return occ;
}

// Enumerates every deterministic Markov policy with `slots` decision points
// and `choices` options each, calling f with the choice vector.
inline void for_each_deterministic(int slots, int choices,
                                   const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> c(slots, 0);
  while (true) {
    f(c);
    int i = 0;
    while (i < slots && ++c[i] == choices) c[i++] = 0;
    if (i == slots) return;
  }
}

// max over deterministic max-player policies against nu.
inline double max_br_value(const Game& g, const MinPolicy& nu) {
  const auto& d = g.dims;
  double best = -std::numeric_limits<double>::infinity();
  for_each_deterministic(d.H * d.S, d.A, [&](const std::vector<int>& c) {
    auto mu = [&](int h, int s, int a) { return c[h * d.S + s] == a ? 1.0 : 0.0; };
    best = std::max(best, evaluate(g, mu, nu));
  });
  return best;
}

// min over deterministic min-player policies against mu. In turn-based games
// the min player's choice may depend on the max action.
inline double min_br_value(const Game& g, const MaxPolicy& mu) {
  const auto& d = g.dims;
  double best = std::numeric_limits<double>::infinity();
  if (d.turn_based) {
    for_each_deterministic(d.H * d.S * d.A, d.B, [&](const std::vector<int>& c) {
      auto nu = [&](int h, int s, int a, int b) {
        return c[(h * d.S + s) * d.A + a] == b ? 1.0 : 0.0;
      };
      best = std::min(best, evaluate(g, mu, nu));
    });
  } else {
    for_each_deterministic(d.H * d.S, d.B, [&](const std::vector<int>& c) {
      auto nu = [&](int h, int s, int, int b) { return c[h * d.S + s] == b ? 1.0 : 0.0; };
      best = std::min(best, evaluate(g, mu, nu));
    });
  }
  return best;
}

inline MaxPolicy as_max(const ozsg::Strategy& mu) {
  return [&mu](int h, int s, int a) { return mu.at(h, s)[a]; };
}

inline MinPolicy as_min(const ozsg::MinStrategy& nu) {
  return [&nu](int h, int s, int a, int b) { return ozsg::min_prob(nu, h, s, a, b); };
}

// Exact exploration-policy occupancy by forward enumeration.
inline std::vector<double> rho_occupancy(const Game& g, const ozsg::ExplorationPolicy& rho) {
  return occupancy(g, [](int, int, int) { return 1.0; },
                   [&rho](int h, int s, int a, int b) { return rho.prob(h, s, a, b); });
}

// Monte-Carlo estimate of the exploration policy's occupancy.
inline std::vector<double> mc_occupancy(const Game& g, const ozsg::ExplorationPolicy& rho,
                                        int episodes, std::uint64_t seed) {
  const auto& d = g.dims;
  std::vector<double> occ(d.num_cells(), 0.0);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](std::span<const double> p) {
    double x = u(gen), acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (x < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  };
  for (int k = 0; k < episodes; ++k) {
    int s = d.s1;
    for (int h = 0; h < d.H; ++h) {
      const int j = draw(rho.at(h, s));
      const int a = j / d.B, b = j % d.B;
      occ[d.cell(h, s, a, b)] += 1.0;
      s = draw(g.transition(h, s, a, b));
    }
  }
  for (double& x : occ) x /= episodes;
  return occ;
}

}  // namespace oracle
