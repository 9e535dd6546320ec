// ozsg: command-line front end for offline zero-sum Markov game experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ozsg/error.hpp"
#include "ozsg/exact_eval.hpp"
#include "ozsg/harness.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"
#include "ozsg/serialize.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("OFFLINE_ZSG_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ozsg::ConfigError("OFFLINE_ZSG_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void emit(const std::string& out, const ozsg::Json& j) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    ozsg::write_json_file(out, j);
  }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

int main(int argc, char** argv) {
  using namespace ozsg;

  CLI::App app{"Offline Nash equilibrium learning in tabular zero-sum Markov games"};
  app.require_subcommand(1);

  std::string game_src;
  std::string rho_src = "uniform";
  std::string out;
  std::string data_path;
  std::string policy_path;
  std::string in_path;
  std::string config_path;
  std::string alg_name = "hoeffding";
  std::vector<std::int64_t> n_values;
  std::vector<std::uint64_t> seed_values;
  double delta = 0.05;
  double c = 1.0;
  std::optional<double> eps_ne;
  int workers = 1;
  double time_limit = 300.0;

  auto* solve = app.add_subcommand("solve-exact", "Nash value iteration on a known game");
  solve->add_option("--game", game_src, "Game file or source")->required();
  solve->add_option("--eps-ne", eps_ne, "Per-stage exploitability tolerance");
  solve->add_option("--out", out, "Output JSON (default stdout)");

  auto* sample = app.add_subcommand("sample", "Sample an offline dataset as CSV");
  sample->add_option("--game", game_src)->required();
  sample->add_option("--rho", rho_src, "Exploration policy file, 'uniform' or 'hardness'");
  sample->add_option("--n", n_values, "Number of episodes")->required()->expected(1);
  sample->add_option("--seed", seed_values)->expected(1);
  sample->add_option("--out", out, "Output CSV (default stdout)");

  auto* learn = app.add_subcommand("learn", "Run a pessimistic learner");
  learn->add_option("--alg", alg_name)->check(CLI::IsMember({"hoeffding", "bernstein"}));
  learn->add_option("--game", game_src)->required();
  learn->add_option("--data", data_path, "Dataset CSV; otherwise sampled from --rho/--n");
  learn->add_option("--rho", rho_src);
  learn->add_option("--n", n_values)->expected(1);
  learn->add_option("--seed", seed_values)->expected(1);
  learn->add_option("--delta", delta);
  learn->add_option("--c", c, "Bernstein bonus constant");
  learn->add_option("--eps-ne", eps_ne);
  learn->add_option("--out", out);

  auto* eval = app.add_subcommand("eval-gap", "Exact duality gap of a strategy pair");
  eval->add_option("--game", game_src)->required();
  eval->add_option("--policy", policy_path, "Strategy pair JSON {mu, nu}")->required();

  auto* coverage = app.add_subcommand("coverage", "Coverage diagnostics of an exploration policy");
  coverage->add_option("--game", game_src)->required();
  coverage->add_option("--rho", rho_src);
  coverage->add_option("--eps-ne", eps_ne);
  coverage->add_option("--out", out);

  auto* sweep = app.add_subcommand("sweep", "Gap sweep over n, seeds and algorithms");
  sweep->add_option("--config", config_path, "Experiment config JSON");
  sweep->add_option("--game", game_src);
  sweep->add_option("--rho", rho_src);
  sweep->add_option("--alg", alg_name)->check(CLI::IsMember({"hoeffding", "bernstein", "both"}));
  sweep->add_option("--n", n_values, "n grid");
  sweep->add_option("--seed", seed_values, "Seeds");
  sweep->add_option("--delta", delta);
  sweep->add_option("--c", c);
  sweep->add_option("--eps-ne", eps_ne);
  sweep->add_option("--out", out, "Output CSV");
  sweep->add_option("--workers", workers);
  sweep->add_option("--time-limit", time_limit, "Per-run wall-clock limit in seconds");

  auto* hardness = app.add_subcommand("hardness", "Evaluate learners on both hardness games");
  hardness->add_option("--n", n_values)->expected(1);
  hardness->add_option("--seed", seed_values)->expected(1);
  hardness->add_option("--delta", delta);
  hardness->add_option("--c", c);
  hardness->add_option("--eps-ne", eps_ne);
  hardness->add_option("--out", out);

  auto* fit = app.add_subcommand("fit-rate", "Log-log slope of median gap against n");
  fit->add_option("--in", in_path, "Sweep CSV")->required();
  fit->add_option("--alg", alg_name)->check(CLI::IsMember({"hoeffding", "bernstein"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const std::uint64_t seed = seed_values.empty() ? default_seed() : seed_values.front();

    if (*solve) {
      const Game game = resolve_game(game_src);
      const NashSolution ne = nash_vi(game, eps_ne.value_or(kExactEpsNe));
      std::cerr << "V*_1(s1) = " << format_double(ne.values.v(0, game.dims.s1)) << '\n';
      emit(out, Json{{"value", ne.values.v(0, game.dims.s1)},
                     {"policy", to_json(ne.pi)},
                     {"values", to_json(ne.values)}});
      return 0;
    }

    if (*sample) {
      const Game game = resolve_game(game_src);
      const ExplorationPolicy rho = resolve_policy(rho_src, game);
      if (n_values.front() <= 0) throw ConfigError("--n must be positive");
      const OfflineDataset ds = sample_dataset(game, rho, static_cast<std::size_t>(n_values.front()),
                                               seed, {game_src, rho_src, seed});
      if (out.empty() || out == "-") {
        write_dataset_csv(std::cout, ds);
      } else {
        write_dataset_csv(out, ds);
      }
      return 0;
    }

    if (*learn) {
      const Game game = resolve_game(game_src);
      OfflineDataset ds;
      if (!data_path.empty()) {
        ds = read_dataset_csv(data_path, game.dims);
      } else {
        if (n_values.empty()) throw ConfigError("learn needs --data or --n");
        if (n_values.front() <= 0) throw ConfigError("--n must be positive");
        ds = sample_dataset(game, resolve_policy(rho_src, game),
                            static_cast<std::size_t>(n_values.front()), seed,
                            {game_src, rho_src, seed});
      }
      PnviConfig base;
      base.delta = delta;
      base.eps_ne = eps_ne.value_or(kLearnerEpsNe);
      base.seed = seed;
      Json result;
      StrategyPair pi;
      if (algorithm_from_string(alg_name) == Algorithm::kHoeffding) {
        const PnviOutput res = run_pnvi_hoeffding(ds, base);
        result = to_json(res);
        pi = res.policy();
      } else {
        const BernsteinOutput res = run_pnvi_bernstein(ds, BernsteinConfig{base, c});
        result = to_json(res);
        pi = res.policy();
      }
      const double gap = duality_gap(game, pi);
      result["gap"] = gap;
      result["policy"] = to_json(pi);
      std::cerr << alg_name << ": gap = " << format_double(gap) << '\n';
      emit(out, result);
      return 0;
    }

    if (*eval) {
      const Game game = resolve_game(game_src);
      const StrategyPair pi = strategy_pair_from_json(read_json_file(policy_path));
      std::cout << format_double(duality_gap(game, pi)) << '\n';
      return 0;
    }

    if (*coverage) {
      const Game game = resolve_game(game_src);
      const ExplorationPolicy rho = resolve_policy(rho_src, game);
      const CoverageReport report = diagnose_coverage(game, rho, eps_ne.value_or(kExactEpsNe));
      std::cout << "assumption 1 (single strategy): " << yes_no(report.assumption1_holds) << '\n'
                << "assumption 2 (unilateral):      " << yes_no(report.assumption2_holds) << '\n'
                << "assumption 3 (uniform):         " << yes_no(report.assumption3_holds) << '\n'
                << "C* = " << format_double(report.c_star) << '\n'
                << "d_m = " << format_double(report.d_m) << '\n';
      if (report.witness) {
        const CoverageWitness& w = *report.witness;
        std::cout << "witness: " << to_string(w.deviator) << " player deviates; uncovered cell h="
                  << w.h << " s=" << w.s << " a=" << w.a << " b=" << w.b
                  << " reached with probability " << format_double(w.deviation_occupancy) << '\n';
      }
      if (!out.empty()) write_json_file(out, to_json(report));
      return 0;
    }

    if (*sweep) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
      if (sweep->count("--game")) cfg.game = game_src;
      if (sweep->count("--rho")) cfg.rho = rho_src;
      if (sweep->count("--alg")) {
        cfg.algorithms = alg_name == "both"
                             ? std::vector<Algorithm>{Algorithm::kHoeffding, Algorithm::kBernstein}
                             : std::vector<Algorithm>{algorithm_from_string(alg_name)};
      }
      if (!n_values.empty()) cfg.n_grid = n_values;
      if (!seed_values.empty()) {
        cfg.seeds = seed_values;
      } else if (config_path.empty() || !read_json_file(config_path).contains("seeds")) {
        cfg.seeds = {default_seed()};
      }
      if (sweep->count("--delta")) cfg.delta = delta;
      if (sweep->count("--c")) cfg.c = c;
      if (eps_ne) cfg.eps_ne = *eps_ne;
      if (sweep->count("--out")) cfg.out = out;
      if (sweep->count("--workers")) cfg.workers = workers;
      if (sweep->count("--time-limit")) cfg.time_limit_seconds = time_limit;

      const SweepResult result = run_sweep(cfg);
      std::size_t failed = 0;
      for (const SweepRow& row : result.rows) failed += row.ok ? 0 : 1;
      std::cerr << result.rows.size() << " rows, " << failed << " failed\n";
      if (cfg.out.empty()) {
        for (const SweepRow& row : result.rows) {
          std::cout << to_string(row.algorithm) << ',' << row.n << ',' << row.seed << ','
                    << (row.ok ? "ok" : "failed") << ',' << format_double(row.gap) << '\n';
        }
      }
      return failed == 0 ? 0 : kExitFailure;
    }

    if (*hardness) {
      const std::int64_t n = n_values.empty() ? 1000000 : n_values.front();
      const HardnessReport report =
          reproduce_hardness(n, seed, delta, c, eps_ne.value_or(kLearnerEpsNe));
      for (const HardnessLearnerResult& r : report.learners) {
        std::cout << to_string(r.algorithm) << ": gap1=" << format_double(r.gap1)
                  << " gap2=" << format_double(r.gap2) << " sum=" << format_double(r.sum())
                  << " max=" << format_double(r.max()) << '\n';
      }
      std::cout << "empirical models identical: " << yes_no(report.models_identical) << '\n';
      if (!out.empty()) write_json_file(out, to_json(report));
      return report.holds() ? 0 : kExitFailure;
    }

    if (*fit) {
      const SweepResult result = read_sweep_csv(in_path);
      const LogLogFit f = fit_loglog_slope(result.median_gaps(algorithm_from_string(alg_name)));
      std::cout << "slope=" << format_double(f.slope) << " intercept=" << format_double(f.intercept)
                << " r2=" << format_double(f.r2) << " dropped=" << f.dropped << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
