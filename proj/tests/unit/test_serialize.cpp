#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ozsg/exact_eval.hpp"
#include "ozsg/serialize.hpp"

using namespace ozsg;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ozsg_test_" + name);
}

}  // namespace

TEST_CASE("game JSON round trip is bit exact") {
  const Game g = random_game(17, 3, 2, 3, 2, true);
  const Game back = game_from_json(Json::parse(to_json(g).dump()));
  CHECK(back.dims == g.dims);
  CHECK(back.rewards == g.rewards);
  CHECK(back.transitions == g.transitions);
}

TEST_CASE("strategy pair round trip, both min-strategy forms") {
  const Game g = random_game(2, 2, 2, 2, 2);
  const StrategyPair pi = nash_vi(g).pi;
  const StrategyPair back = strategy_pair_from_json(Json::parse(to_json(pi).dump()));
  CHECK(back.mu.probs == pi.mu.probs);
  CHECK(std::get<Strategy>(back.nu).probs == std::get<Strategy>(pi.nu).probs);

  const Game tb = random_game(2, 2, 2, 2, 2, true);
  const StrategyPair pt = nash_vi(tb).pi;
  const Json j = to_json(pt);
  CHECK(j["nu"]["conditioned"] == true);
  const StrategyPair bt = strategy_pair_from_json(j);
  CHECK(std::get<TurnBasedMinStrategy>(bt.nu).probs == std::get<TurnBasedMinStrategy>(pt.nu).probs);
}

TEST_CASE("malformed documents are config errors") {
  Json j = to_json(random_game(1, 1, 2, 2, 1));
  j.erase("r");
  CHECK_THROWS_AS(game_from_json(j), ConfigError);
  Json s = to_json(Strategy::uniform(Player::kMax, 1, 1, 2));
  s["player"] = "both";
  CHECK_THROWS_AS(strategy_from_json(s), ConfigError);
}

TEST_CASE("JSON file parse errors name the line") {
  const auto path = temp_file("bad.json");
  std::ofstream(path) << "{\n  \"a\": 1,\n  oops\n}\n";
  try {
    read_json_file(path.string());
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("coverage report serializes an infinite C* as a string") {
  const HardnessPair hp = make_hardness_pair();
  const Json j = to_json(coverage_report(hp.game1, hp.rho, nash_vi(hp.game1).pi));
  CHECK(j["c_star"] == "inf");
  CHECK(j["assumption2_holds"] == false);
  CHECK(j.contains("witness"));
}

TEST_CASE("dataset CSV round trip") {
  const Game g = random_game(5, 3, 2, 2, 3);
  const OfflineDataset ds = sample_dataset(g, ExplorationPolicy::uniform(g.dims), 200, 3);
  std::stringstream ss;
  write_dataset_csv(ss, ds);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "episode,h,s,a,b,r,s_next");
  ss.seekg(0);
  const OfflineDataset back = read_dataset_csv(ss, g.dims);
  CHECK(back.steps == ds.steps);
}

TEST_CASE("dataset CSV errors report the line") {
  const GameDims d{2, 2, 2, 2};
  auto err = [&](const std::string& text) {
    std::stringstream ss(text);
    try {
      read_dataset_csv(ss, d);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string h = "episode,h,s,a,b,r,s_next\n";
  CHECK(err("bad\n").find("line 1") != std::string::npos);
  CHECK(err(h + "0,0,0,0,0,0.5\n").find("line 2") != std::string::npos);
  CHECK(err(h + "0,0,0,0,0,0.5,1\n0,1,0,0,0,0.5,1\n").find("line 3") != std::string::npos);
  CHECK(err(h + "0,0,0,0,7,0.5,1\n").find("line 2") != std::string::npos);
  CHECK(err(h + "0,0,1,0,0,0.5,1\n").find("line 2") != std::string::npos);
  CHECK(err(h + "0,0,0,0,0,0.5,1\n").find("truncated") != std::string::npos);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3, 1e-300, 123456.789}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}
