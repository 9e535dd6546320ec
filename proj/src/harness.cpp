#include "ozsg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "ozsg/error.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"
#include "ozsg/rng.hpp"

namespace ozsg {

namespace {

constexpr const char* kSweepHeader = "algorithm,n,seed,status,gap,v_low,v_up,c_star,d_m";

using RowKey = std::tuple<int, std::int64_t, std::uint64_t>;

RowKey key_of(const SweepRow& row) {
  return {static_cast<int>(row.algorithm), row.n, row.seed};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

std::string to_string(Algorithm alg) {
  return alg == Algorithm::kHoeffding ? "hoeffding" : "bernstein";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "hoeffding") return Algorithm::kHoeffding;
  if (name == "bernstein") return Algorithm::kBernstein;
  throw ConfigError("unknown algorithm '" + name + "'");
}

Game resolve_game(const std::string& source) {
  if (source == "hardness1") return make_hardness_pair().game1;
  if (source == "hardness2") return make_hardness_pair().game2;
  if (source.rfind("random:", 0) == 0) {
    std::map<std::string, long long> kv{{"seed", 0}, {"S", 3}, {"A", 2},
                                        {"B", 2},    {"H", 3}, {"turn_based", 0}};
    for (const std::string& item : split(source.substr(7), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("bad generator string '" + source + "'");
      const std::string key = item.substr(0, eq);
      if (!kv.contains(key)) throw ConfigError("unknown generator key '" + key + "'");
      try {
        kv[key] = std::stoll(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad generator value in '" + item + "'");
      }
    }
    try {
      return random_game(static_cast<std::uint64_t>(kv["seed"]), static_cast<int>(kv["S"]),
                         static_cast<int>(kv["A"]), static_cast<int>(kv["B"]),
                         static_cast<int>(kv["H"]), kv["turn_based"] != 0);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  Game game = game_from_json(read_json_file(source));
  const ValidationReport report = validate_game(game);
  if (!report.empty()) {
    throw ConfigError(source + ": " + report.front().location + ": " + report.front().constraint);
  }
  return game;
}

ExplorationPolicy resolve_policy(const std::string& source, const Game& game) {
  if (source == "uniform") return ExplorationPolicy::uniform(game.dims);
  if (source == "hardness") {
    const GameDims& d = game.dims;
    if (d.S != 1 || d.H != 1 || d.A != 2 || d.B != 2) {
      throw ConfigError("the 'hardness' policy needs a one-step 2x2 game");
    }
    return make_hardness_pair().rho;
  }
  ExplorationPolicy rho = policy_from_json(read_json_file(source));
  try {
    check_policy(game.dims, rho);
  } catch (const Error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return rho;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw ConfigError("no algorithm selected");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid is empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= 0) throw ConfigError("n_grid entries must be positive");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw ConfigError("n_grid must be strictly increasing");
    }
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds is empty");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(cfg.c > 0.0)) throw ConfigError("c must be positive");
  if (!(cfg.eps_ne > 0.0)) throw ConfigError("eps_ne must be positive");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (!(cfg.time_limit_seconds > 0.0)) throw ConfigError("time limit must be positive");
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (j.contains("game")) cfg.game = j.at("game").get<std::string>();
    if (j.contains("rho")) cfg.rho = j.at("rho").get<std::string>();
    if (j.contains("algorithm")) {
      const Json& alg = j.at("algorithm");
      cfg.algorithms.clear();
      if (alg.is_string() && alg.get<std::string>() == "both") {
        cfg.algorithms = {Algorithm::kHoeffding, Algorithm::kBernstein};
      } else if (alg.is_string()) {
        cfg.algorithms.push_back(algorithm_from_string(alg.get<std::string>()));
      } else {
        for (const Json& a : alg) cfg.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
      }
    }
    if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
    if (j.contains("eps_ne")) cfg.eps_ne = j.at("eps_ne").get<double>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("time_limit")) cfg.time_limit_seconds = j.at("time_limit").get<double>();
    if (j.contains("rng") && j.at("rng").get<std::string>() != kRngName) {
      throw ConfigError("unsupported rng '" + j.at("rng").get<std::string>() + "'; only " +
                        kRngName + " is available");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  Json algs = Json::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(to_string(a));
  return Json{{"game", cfg.game},     {"rho", cfg.rho},       {"algorithm", algs},
              {"n_grid", cfg.n_grid}, {"seeds", cfg.seeds},   {"delta", cfg.delta},
              {"c", cfg.c},           {"eps_ne", cfg.eps_ne}, {"out", cfg.out},
              {"workers", cfg.workers}, {"time_limit", cfg.time_limit_seconds},
              {"rng", kRngName}};
}

bool SweepResult::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
}

std::vector<std::pair<double, double>> SweepResult::median_gaps(Algorithm alg) const {
  std::map<std::int64_t, std::vector<double>> by_n;
  for (const SweepRow& row : rows) {
    if (row.algorithm == alg && row.ok) by_n[row.n].push_back(row.gap);
  }
  std::vector<std::pair<double, double>> points;
  for (auto& [n, gaps] : by_n) points.emplace_back(static_cast<double>(n), median(gaps));
  return points;
}

LearnerRun run_learner(Algorithm alg, const Game& game, const OfflineDataset& ds, double delta,
                       double c, double eps_ne, std::uint64_t seed, double time_limit_seconds) {
  PnviConfig base;
  base.delta = delta;
  base.eps_ne = eps_ne;
  base.seed = seed;
  if (time_limit_seconds > 0.0) {
    base.deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(time_limit_seconds));
  }
  LearnerRun run;
  const int s1 = game.dims.s1;
  if (alg == Algorithm::kHoeffding) {
    const PnviOutput out = run_pnvi_hoeffding(ds, base);
    run.policy = out.policy();
    run.v_low = out.low.v(0, s1);
    run.v_up = out.up.v(0, s1);
  } else {
    const BernsteinOutput out = run_pnvi_bernstein(ds, BernsteinConfig{base, c});
    run.policy = out.policy();
    run.v_low = out.result.low.v(0, s1);
    run.v_up = out.result.up.v(0, s1);
  }
  run.gap = duality_gap(game, run.policy);
  return run;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << kSweepHeader << '\n';
  for (const SweepRow& row : result.rows) {
    out << to_string(row.algorithm) << ',' << row.n << ',' << row.seed << ','
        << (row.ok ? std::string("ok") : "failed:" + sanitize(row.error)) << ','
        << format_double(row.gap) << ',' << format_double(row.v_low) << ','
        << format_double(row.v_up) << ',' << format_double(row.c_star) << ','
        << format_double(row.d_m) << '\n';
  }
}

SweepResult read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ConfigError(path + ":1: unexpected sweep CSV header");
  }
  SweepResult result;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 9) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 9 columns");
    }
    SweepRow row;
    try {
      row.algorithm = algorithm_from_string(cells[0]);
      row.n = std::stoll(cells[1]);
      row.seed = std::stoull(cells[2]);
      row.ok = cells[3] == "ok";
      if (!row.ok) row.error = cells[3].rfind("failed:", 0) == 0 ? cells[3].substr(7) : cells[3];
      row.gap = std::strtod(cells[4].c_str(), nullptr);
      row.v_low = std::strtod(cells[5].c_str(), nullptr);
      row.v_up = std::strtod(cells[6].c_str(), nullptr);
      row.c_star = std::strtod(cells[7].c_str(), nullptr);
      row.d_m = std::strtod(cells[8].c_str(), nullptr);
      row.runtime_seconds = std::numeric_limits<double>::quiet_NaN();
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Game game = resolve_game(cfg.game);
  const ExplorationPolicy rho = resolve_policy(cfg.rho, game);
  const CoverageReport coverage = diagnose_coverage(game, rho);

  std::map<RowKey, SweepRow> done;
  if (!cfg.out.empty() && std::filesystem::exists(cfg.out)) {
    for (SweepRow& row : read_sweep_csv(cfg.out).rows) done.emplace(key_of(row), std::move(row));
  }

  struct Task {
    std::int64_t n;
    std::uint64_t seed;
    std::vector<Algorithm> algorithms;
    std::vector<SweepRow> rows;
  };
  std::vector<Task> tasks;
  SweepResult result;
  for (std::int64_t n : cfg.n_grid) {
    for (std::uint64_t seed : cfg.seeds) {
      Task task{n, seed, {}, {}};
      for (Algorithm alg : cfg.algorithms) {
        const auto it = done.find(RowKey{static_cast<int>(alg), n, seed});
        if (it != done.end()) {
          result.rows.push_back(it->second);
        } else {
          task.algorithms.push_back(alg);
        }
      }
      if (!task.algorithms.empty()) tasks.push_back(std::move(task));
    }
  }

  auto execute = [&](Task& task) {
    OfflineDataset ds;
    std::string sample_error;
    try {
      ds = sample_dataset(game, rho, static_cast<std::size_t>(task.n), task.seed,
                          Provenance{cfg.game, cfg.rho, task.seed});
    } catch (const std::exception& e) {
      sample_error = e.what();
    }
    for (Algorithm alg : task.algorithms) {
      SweepRow row;
      row.algorithm = alg;
      row.n = task.n;
      row.seed = task.seed;
      row.c_star = coverage.c_star;
      row.d_m = coverage.d_m;
      const auto start = std::chrono::steady_clock::now();
      if (!sample_error.empty()) {
        row.ok = false;
        row.error = sample_error;
      } else {
        try {
          const LearnerRun run = run_learner(alg, game, ds, cfg.delta, cfg.c, cfg.eps_ne,
                                             task.seed, cfg.time_limit_seconds);
          row.gap = run.gap;
          row.v_low = run.v_low;
          row.v_up = run.v_up;
        } catch (const std::exception& e) {
          row.ok = false;
          row.error = e.what();
        }
      }
      if (!row.ok) {
        row.gap = row.v_low = row.v_up = std::numeric_limits<double>::quiet_NaN();
      }
      row.runtime_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      task.rows.push_back(std::move(row));
    }
  };

  const int workers = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (workers <= 1) {
    for (Task& task : tasks) execute(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) execute(tasks[i]);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (Task& task : tasks) {
    for (SweepRow& row : task.rows) result.rows.push_back(std::move(row));
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& x, const SweepRow& y) { return key_of(x) < key_of(y); });

  if (!cfg.out.empty()) {
    write_sweep_csv(cfg.out, result);
    std::ofstream timing(cfg.out + ".timing.csv");
    timing << "algorithm,n,seed,runtime_seconds\n";
    for (const SweepRow& row : result.rows) {
      timing << to_string(row.algorithm) << ',' << row.n << ',' << row.seed << ','
             << format_double(row.runtime_seconds) << '\n';
    }
  }
  return result;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> xs;
  std::vector<double> ys;
  LogLogFit fit;
  for (const auto& [n, gap] : points) {
    if (!(n > 0.0)) throw Error("fit_loglog_slope: n must be positive");
    if (!(gap > 0.0)) {
      ++fit.dropped;
      continue;
    }
    xs.push_back(std::log(n));
    ys.push_back(std::log(gap));
  }
  if (xs.size() < 3) throw Error("insufficient points");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error("insufficient points");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

bool HardnessReport::holds() const {
  return models_identical && !learners.empty() &&
         std::all_of(learners.begin(), learners.end(),
                     [](const HardnessLearnerResult& r) { return r.holds(); });
}

HardnessReport reproduce_hardness(std::int64_t n, std::uint64_t seed, double delta, double c,
                                  double eps_ne) {
  if (n < 3) throw Error("reproduce_hardness: n must be at least 3");
  const HardnessPair pair = make_hardness_pair();
  const OfflineDataset ds1 = sample_dataset(pair.game1, pair.rho, static_cast<std::size_t>(n),
                                            seed, {"hardness1", "hardness", seed});
  const OfflineDataset ds2 = sample_dataset(pair.game2, pair.rho, static_cast<std::size_t>(n),
                                            seed, {"hardness2", "hardness", seed});

  HardnessReport report;
  report.n = n;
  report.seed = seed;
  report.models_identical = empirical_model(ds1) == empirical_model(ds2);
  for (Algorithm alg : {Algorithm::kHoeffding, Algorithm::kBernstein}) {
    const LearnerRun run = run_learner(alg, pair.game1, ds1, delta, c, eps_ne, seed);
    report.learners.push_back({alg, run.gap, duality_gap(pair.game2, run.policy)});
  }
  return report;
}

Json to_json(const HardnessReport& report) {
  Json learners = Json::array();
  for (const HardnessLearnerResult& r : report.learners) {
    learners.push_back(Json{{"algorithm", to_string(r.algorithm)},
                            {"gap1", r.gap1},
                            {"gap2", r.gap2},
                            {"sum", r.sum()},
                            {"max", r.max()},
                            {"holds", r.holds()}});
  }
  return Json{{"n", report.n},
              {"seed", report.seed},
              {"models_identical", report.models_identical},
              {"learners", learners},
              {"holds", report.holds()}};
}

CoverageReport diagnose_coverage(const Game& game, const ExplorationPolicy& rho, double eps_ne) {
  const NashSolution ne = nash_vi(game, eps_ne);
  return coverage_report(game, rho, ne.pi);
}

}  // namespace ozsg
