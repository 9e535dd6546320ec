#include <doctest.h>

#include <chrono>
#include <cmath>

#include "ozsg/exact_eval.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"
#include "oracles.hpp"

using namespace ozsg;

namespace {

Game constant_game(double r) {
  Game g(GameDims{1, 1, 1, 1});
  g.reward(0, 0, 0, 0) = r;
  return g;
}

}  // namespace

TEST_CASE("hoeffding bonus and log term") {
  const GameDims d{3, 2, 2, 3};
  CHECK(log_term(d, 0.05) == doctest::Approx(std::log(3.0 * 3 * 2 * 2 / 0.05)));
  const std::int64_t counts[] = {0, 1, 100};
  const auto b = hoeffding_bonus(counts, 3, 2.0);
  CHECK(b[0] == doctest::Approx(12.0 * std::sqrt(2.0)));
  CHECK(b[1] == b[0]);
  CHECK(b[2] == doctest::Approx(12.0 * std::sqrt(0.02)));
  CHECK_THROWS_AS(log_term(d, 1.0), Error);
}

TEST_CASE("hoeffding on a one-cell game has the closed form") {
  const Game g = constant_game(0.9);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 10000, 1);
  const PnviOutput out = run_pnvi_hoeffding(ds, PnviConfig{});
  const double b = 4.0 * std::sqrt(std::log(1 / 0.05) / 10000);
  CHECK(out.low.v(0, 0) == doctest::Approx(0.9 - b).epsilon(1e-14));
  CHECK(out.up.v(0, 0) == doctest::Approx(0.9 + b).epsilon(1e-14));
  CHECK(out.bonus[0] == doctest::Approx(b));
}

TEST_CASE("hoeffding one-step value equals the oracle value of the penalised matrix") {
  for (int k = 0; k < 10; ++k) {
    const Game g = random_game(40 + k, 1, 2, 3, 1);
    const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 20000, k);
    const PnviOutput out = run_pnvi_hoeffding(ds, PnviConfig{});
    const EmpiricalModel m = empirical_model(ds);
    const double iota = std::log(6 / 0.05);
    std::vector<double> low(6), up(6);
    for (int c = 0; c < 6; ++c) {
      const double b = 4.0 * std::sqrt(iota / std::max<double>(m.counts[c], 1));
      low[c] = std::max(m.r_hat[c] - b, 0.0);
      up[c] = std::min(m.r_hat[c] + b, 1.0);
    }
    CHECK(out.low.v(0, 0) == doctest::Approx(oracle::matrix_value_2row(low, 3)).epsilon(1e-6));
    CHECK(out.up.v(0, 0) == doctest::Approx(oracle::matrix_value_2row(up, 3)).epsilon(1e-6));
  }
}

TEST_CASE("unvisited cells get the widest interval") {
  const HardnessPair hp = make_hardness_pair();
  const OfflineDataset ds = sample_dataset(hp.game1, hp.rho, 1000, 2);
  const PnviOutput out = run_pnvi_hoeffding(ds, PnviConfig{});
  CHECK(out.low.q(0, 0, 1, 0) == 0.0);
  CHECK(out.up.q(0, 0, 1, 0) == 1.0);
}

TEST_CASE("learners are deterministic functions of (data, seed)") {
  const Game g = random_game(3, 2, 2, 2, 2);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 3000, 4);
  PnviConfig cfg;
  cfg.seed = 5;
  CHECK(run_pnvi_hoeffding(ds, cfg).low.Q == run_pnvi_hoeffding(ds, cfg).low.Q);
  const BernsteinConfig bc{cfg, 0.5};
  CHECK(run_pnvi_bernstein(ds, bc).result.up.Q == run_pnvi_bernstein(ds, bc).result.up.Q);
}

TEST_CASE("pessimistic bounds bracket the NE value and the gap shrinks with data") {
  const Game g = random_game(12, 2, 2, 2, 2);
  const double v_star = nash_vi(g).values.v(0, 0);
  const ExplorationPolicy rho = ExplorationPolicy::uniform(g.dims);
  double prev_h = 1e9, prev_b = 1e9;
  for (std::size_t n : {2000, 200000}) {
    const OfflineDataset ds = sample_dataset(g, rho, n, 1);
    const PnviOutput h = run_pnvi_hoeffding(ds, PnviConfig{});
    const BernsteinOutput b = run_pnvi_bernstein(ds, BernsteinConfig{});
    CHECK(h.low.v(0, 0) <= v_star);
    CHECK(h.up.v(0, 0) >= v_star);
    CHECK(b.result.low.v(0, 0) <= v_star);
    CHECK(b.result.up.v(0, 0) >= v_star);
    const double gh = duality_gap(g, h.policy()), gb = duality_gap(g, b.policy());
    CHECK(gh < prev_h);
    CHECK(gb < prev_b);
    prev_h = gh;
    prev_b = gb;
  }
  CHECK(prev_b < 0.05);
}

TEST_CASE("bernstein bonus pieces") {
  const double p[] = {0.5, 0.5};
  const double v[] = {0.0, 2.0};
  CHECK(variance_under(p, v) == doctest::Approx(1.0));
  CHECK(bernstein_bonus(4, p, v, 2.0, 1.0, 3) == doctest::Approx(2.0 * (std::sqrt(0.25) + 0.75)));
  CHECK(bernstein_bonus(0, p, v, 1.0, 1.0, 3) == bernstein_bonus(1, p, v, 1.0, 1.0, 3));
  CHECK_THROWS_AS(bernstein_bonus(1, p, v, 0.0, 1.0, 3), Error);
}

TEST_CASE("bernstein on a one-cell game has the closed form") {
  const Game g = constant_game(0.7);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 3000, 1);
  const BernsteinOutput out = run_pnvi_bernstein(ds, BernsteinConfig{PnviConfig{}, 1.0});
  const double iota = std::log(1 / 0.05);
  // Zero variance: each bonus is c * H * iota / n over 1000 episodes.
  const double b = iota / 1000;
  CHECK(out.bonuses.low0[0] == doctest::Approx(b));
  CHECK(out.bonuses.low1[0] == doctest::Approx(b));
  CHECK(out.result.low.v(0, 0) == doctest::Approx(0.7 - 2 * b).epsilon(1e-14));
  CHECK(out.result.up.v(0, 0) == doctest::Approx(0.7 + 2 * b).epsilon(1e-14));
  CHECK(out.result.low.v(0, 0) >= out.reference.low.v(0, 0));
}

TEST_CASE("turn-based learners output point masses") {
  const Game g = random_game(8, 3, 2, 3, 3, true);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 5000, 2);
  const PnviOutput h = run_pnvi_hoeffding(ds, PnviConfig{});
  const BernsteinOutput b = run_pnvi_bernstein(ds, BernsteinConfig{});
  CHECK(is_deterministic(h.mu_low));
  CHECK(is_deterministic(h.nu_up));
  CHECK(std::holds_alternative<TurnBasedMinStrategy>(h.nu_up));
  CHECK(is_deterministic(b.result.mu_low));
  CHECK(is_deterministic(b.result.nu_up));
}

TEST_CASE("an expired deadline aborts the run") {
  const Game g = random_game(3, 2, 2, 2, 2);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 100, 4);
  PnviConfig cfg;
  cfg.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK_THROWS_AS(run_pnvi_hoeffding(ds, cfg), TimeLimitExceeded);
  CHECK_THROWS_AS(run_pnvi_bernstein(ds, BernsteinConfig{cfg, 1.0}), TimeLimitExceeded);
}
