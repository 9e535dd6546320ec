// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ozsg/exact_eval.hpp"
#include "ozsg/harness.hpp"
#include "ozsg/matrix_ne.hpp"
#include "ozsg/offline_data.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"
#include "oracles.hpp"

using namespace ozsg;

namespace {

const char* const kFixedGame = "random:seed=7,S=3,A=2,B=2,H=3";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t m = x.size() / 2;
  return x.size() % 2 ? x[m] : 0.5 * (x[m - 1] + x[m]);
}

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Runs f(i) for i in [0, count) on a small thread pool.
void parallel_for(int count, const std::function<void(int)>& f) {
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers(); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

Outcome exact_solver_oracle() {
  double worst_value = 0.0, worst_gap = -1.0;
  bool ok = true;
  for (int k = 0; k < 25; ++k) {
    const int S = 1 + k % 3, H = 1 + (k / 3) % 2;
    const Game g = random_game(1000 + k, S, 2, 2, H);
    const NashSolution ne = nash_vi(g, kExactEpsNe);
    const double err = std::abs(ne.values.v(0, g.dims.s1) - oracle::nash_value(g));
    const double gap = duality_gap(g, ne.pi);
    worst_value = std::max(worst_value, err);
    worst_gap = std::max(worst_gap, gap);
    ok = ok && err <= 1e-3 && gap <= 2 * H * kExactEpsNe;
  }
  return {ok, "max |V - oracle| = " + fmt("%.3g", worst_value) + ", max gap = " +
                  fmt("%.3g", worst_gap)};
}

Outcome matrix_ne() {
  const std::vector<double> rps{0.5, 0.0, 1.0, 1.0, 0.5, 0.0, 0.0, 1.0, 0.5};
  const MatrixGameSolution sol = solve_matrix_game({rps, 3, 3});
  bool ok = std::abs(sol.value - 0.5) <= 1e-9 && sol.exploitability <= 1e-8;
  for (int i = 0; i < 3; ++i) {
    ok = ok && std::abs(sol.mu[i] - 1.0 / 3) <= 1e-8 && std::abs(sol.nu[i] - 1.0 / 3) <= 1e-8;
  }
  const Game g1 = make_hardness_pair().game1;
  const NashSolution ne = nash_vi(g1);
  const double v = ne.values.v(0, 0);
  const bool pure = ne.pi.mu.at(0, 0)[0] == 1.0 && min_prob(ne.pi.nu, 0, 0, 0, 0) == 1.0;
  ok = ok && std::abs(v - 0.25) <= 1e-9 && pure;
  return {ok, "rps value = " + fmt("%.12g", sol.value) + ", exploitability = " +
                  fmt("%.3g", sol.exploitability) + ", bandit value = " + fmt("%.12g", v) +
                  (pure ? " at (a1,b1)" : " not at (a1,b1)")};
}

Outcome sandwich() {
  const double tol = 1e-12;
  int bad_h = 0, bad_b = 0;
  for (int k = 0; k < 50; ++k) {
    std::mt19937_64 gen(500 + k);
    const int S = 1 + gen() % 3, A = 1 + gen() % 3, B = 1 + gen() % 3, H = 1 + gen() % 3;
    const Game g = random_game(600 + k, S, A, B, H, k % 5 == 0);
    const std::size_t n = 3 * H + gen() % 2000;
    const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), n, k);

    PnviConfig cfg;
    cfg.seed = k;
    const PnviOutput hf = run_pnvi_hoeffding(ds, cfg);
    for (std::size_t i = 0; i < hf.low.Q.size(); ++i) bad_h += hf.low.Q[i] > hf.up.Q[i] + tol;
    for (std::size_t i = 0; i < hf.low.V.size(); ++i) bad_h += hf.low.V[i] > hf.up.V[i] + tol;

    const BernsteinOutput bs = run_pnvi_bernstein(ds, BernsteinConfig{cfg, 1.0});
    for (std::size_t i = 0; i < bs.result.low.Q.size(); ++i) {
      bad_b += bs.result.low.Q[i] < bs.reference.low.Q[i] - tol;
      bad_b += bs.result.up.Q[i] > bs.reference.up.Q[i] + tol;
    }
  }
  return {bad_h == 0 && bad_b == 0, "violations: hoeffding " + std::to_string(bad_h) +
                                        ", bernstein " + std::to_string(bad_b)};
}

Outcome pessimism() {
  const Game g = resolve_game(kFixedGame);
  const ExplorationPolicy rho = ExplorationPolicy::uniform(g.dims);
  const int seeds = 200;
  std::vector<int> held_h(seeds), held_b(seeds);
  parallel_for(seeds, [&](int seed) {
    const OfflineDataset ds = sample_dataset(g, rho, 10000, seed);
    PnviConfig cfg;
    cfg.seed = seed;
    auto holds = [&](const PnviOutput& out) {
      const double v_mu = best_response_min(g, out.mu_low).values.v(0, g.dims.s1);
      const double v_nu = best_response_max(g, out.nu_up).values.v(0, g.dims.s1);
      return out.low.v(0, g.dims.s1) <= v_mu + 1e-9 && out.up.v(0, g.dims.s1) >= v_nu - 1e-9;
    };
    held_h[seed] = holds(run_pnvi_hoeffding(ds, cfg));
    held_b[seed] = holds(run_pnvi_bernstein(ds, BernsteinConfig{cfg, 1.0}).result);
  });
  const double fh = std::count(held_h.begin(), held_h.end(), 1) / double(seeds);
  const double fb = std::count(held_b.begin(), held_b.end(), 1) / double(seeds);
  return {fh >= 0.9 && fb >= 0.9,
          "event frequency: hoeffding " + fmt("%.3f", fh) + ", bernstein " + fmt("%.3f", fb)};
}

Outcome rate() {
  ExperimentConfig cfg;
  cfg.game = kFixedGame;
  cfg.n_grid = {1000, 10000, 100000, 1000000};
  cfg.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) cfg.seeds.push_back(s);
  cfg.workers = workers();
  const SweepResult res = run_sweep(cfg);
  bool ok = res.all_ok();
  std::string detail;
  for (Algorithm alg : {Algorithm::kHoeffding, Algorithm::kBernstein}) {
    const auto pts = res.median_gaps(alg);
    std::string medians;
    for (const auto& [n, gap] : pts) medians += (medians.empty() ? "" : " ") + fmt("%.3g", gap);
    try {
      const LogLogFit f = fit_loglog_slope(pts);
      ok = ok && f.slope >= -0.70 && f.slope <= -0.30;
      detail += to_string(alg) + " slope " + fmt("%.3f", f.slope) + " (medians " + medians + "); ";
    } catch (const Error& e) {
      ok = false;
      detail += to_string(alg) + ": " + e.what() + " (medians " + medians + "); ";
    }
  }
  return {ok, detail};
}

Outcome hardness() {
  const HardnessReport rep = reproduce_hardness(1000000, 0, 0.05);
  std::string detail;
  for (const auto& r : rep.learners) {
    detail += to_string(r.algorithm) + " sum " + fmt("%.6f", r.sum()) + " max " +
              fmt("%.6f", r.max()) + "; ";
  }
  detail += rep.models_identical ? "models identical" : "models differ";
  return {rep.holds(), detail};
}

Outcome coverage() {
  const HardnessPair hp = make_hardness_pair();
  const CoverageReport hard = diagnose_coverage(hp.game1, hp.rho);
  const bool witness_ok = hard.witness && hard.witness->deviator == Player::kMax &&
                          hard.witness->a == 1 && hard.witness->b == 0;
  const bool hard_ok = !hard.assumption2_holds && std::isinf(hard.c_star) && witness_ok;

  const CoverageReport uni = diagnose_coverage(hp.game1, ExplorationPolicy::uniform(hp.game1.dims));
  const bool uni_ok = uni.assumption3_holds && uni.c_star <= 1.0 / uni.d_m + 1e-6;
  return {hard_ok && uni_ok,
          std::string("hardness: assumption2 ") + (hard.assumption2_holds ? "true" : "false") +
              ", C* " + fmt("%g", hard.c_star) +
              (witness_ok ? ", witness (a2,b1)" : ", bad witness") + "; uniform: C* " +
              fmt("%.6g", uni.c_star) + ", 1/d_m " + fmt("%.6g", 1.0 / uni.d_m)};
}

Outcome turn_based() {
  const int games = 10, seeds = 10;
  std::vector<Game> gs;
  bool pure = true;
  for (int k = 0; k < games; ++k) {
    gs.push_back(random_game(900 + k, 3, 2, 2, 3, true));
    const NashSolution ne = nash_vi(gs.back());
    pure = pure && is_deterministic(ne.pi.mu) && is_deterministic(ne.pi.nu);
  }
  // run index ((alg * 2 + n index) * seeds + seed) * games + game
  std::vector<double> run_gap(2 * 2 * seeds * games, 0.0);
  std::vector<int> pure_runs(run_gap.size(), 1);
  const std::int64_t ns[2] = {1000, 100000};
  parallel_for(2 * seeds * games, [&](int job) {
    const int k = job % games, seed = (job / games) % seeds, ni = job / (games * seeds);
    const Game& g = gs[k];
    const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), ns[ni], seed);
    for (int alg = 0; alg < 2; ++alg) {
      const LearnerRun run = run_learner(alg == 0 ? Algorithm::kHoeffding : Algorithm::kBernstein,
                                         g, ds, 0.05, 1.0, kLearnerEpsNe, seed);
      const std::size_t idx = ((alg * 2 + ni) * seeds + seed) * games + k;
      pure_runs[idx] = is_deterministic(run.policy.mu) && is_deterministic(run.policy.nu);
      run_gap[idx] = run.gap;
    }
  });
  // gaps[(alg * 2 + n index) * seeds + seed] = mean gap over the games
  std::vector<double> gaps(2 * 2 * seeds, 0.0);
  for (std::size_t i = 0; i < run_gap.size(); ++i) gaps[i / games] += run_gap[i] / games;
  bool ok = pure && std::all_of(pure_runs.begin(), pure_runs.end(), [](int x) { return x == 1; });
  std::string detail = pure ? "NE pure" : "NE not pure";
  for (int alg = 0; alg < 2; ++alg) {
    std::vector<double> lo(gaps.begin() + (alg * 2) * seeds, gaps.begin() + (alg * 2 + 1) * seeds);
    std::vector<double> hi(gaps.begin() + (alg * 2 + 1) * seeds,
                           gaps.begin() + (alg * 2 + 2) * seeds);
    const double m3 = median(lo), m5 = median(hi);
    ok = ok && m5 < m3;
    detail += std::string("; ") + (alg == 0 ? "hoeffding" : "bernstein") + " median gap " +
              fmt("%.4g", m3) + " -> " + fmt("%.4g", m5);
  }
  return {ok, detail};
}

Outcome occupancy_duality() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_mass = 0.0, min_gap = 1e9;
  for (int k = 0; k < 100; ++k) {
    const int S = 1 + gen() % 4, A = 1 + gen() % 3, B = 1 + gen() % 3, H = 1 + gen() % 4;
    const bool tb = k % 4 == 0;
    const Game g = random_game(2000 + k, S, A, B, H, tb);
    Strategy mu(Player::kMax, H, S, A);
    auto fill = [&](std::span<double> row) {
      double tot = 0;
      for (double& x : row) tot += (x = u(gen) < 0.3 ? 0.0 : u(gen));
      if (tot == 0) row[0] = tot = 1;
      for (double& x : row) x /= tot;
    };
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) fill(mu.at(h, s));
    MinStrategy nu;
    if (tb) {
      TurnBasedMinStrategy t(H, S, A, B);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < A; ++a) fill(t.at(h, s, a));
      nu = t;
    } else {
      Strategy t(Player::kMin, H, S, B);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) fill(t.at(h, s));
      nu = t;
    }
    const StrategyPair pi{mu, nu};
    const Occupancy occ = occupancy(g, pi);
    for (int h = 0; h < H; ++h) worst_mass = std::max(worst_mass, std::abs(occ.stage_mass(h) - 1));
    min_gap = std::min(min_gap, duality_gap(g, pi));
  }
  return {worst_mass <= 1e-9 && min_gap >= -1e-9,
          "max |stage mass - 1| = " + fmt("%.3g", worst_mass) + ", min gap = " +
              fmt("%.3g", min_gap)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "exact solver matches brute-force oracle", 60, exact_solver_oracle},
      {2, "matrix NE on rock-paper-scissors and bandit game 1", 1, matrix_ne},
      {3, "deterministic sandwich invariants", 120, sandwich},
      {4, "high-probability pessimism", 600, pessimism},
      {5, "gap rate slope in [-0.70, -0.30]", 1800, rate},
      {6, "hardness reproduction", 120, hardness},
      {7, "coverage diagnostics", 1, coverage},
      {8, "turn-based pure strategies and improving gap", 600, turn_based},
      {9, "occupancy mass and weak duality", 60, occupancy_duality},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s  %s | %s | %.2fs (budget %.0fs)\n", c.id, pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
