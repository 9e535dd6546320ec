#include "ozsg/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ozsg/error.hpp"

namespace ozsg {

namespace {

Json nested(std::span<const double> flat, std::initializer_list<int> shape) {
  std::vector<int> dims(shape);
  std::size_t offset = 0;
  auto build = [&](auto&& self, std::size_t depth) -> Json {
    Json arr = Json::array();
    for (int i = 0; i < dims[depth]; ++i) {
      if (depth + 1 == dims.size()) {
        arr.push_back(flat[offset++]);
      } else {
        arr.push_back(self(self, depth + 1));
      }
    }
    return arr;
  };
  return build(build, 0);
}

std::vector<double> flatten(const Json& j, std::initializer_list<int> shape, const char* field) {
  std::vector<int> dims(shape);
  std::vector<double> flat;
  auto walk = [&](auto&& self, const Json& node, std::size_t depth) -> void {
    if (!node.is_array() || node.size() != static_cast<std::size_t>(dims[depth])) {
      throw ConfigError(std::string("field '") + field + "' has the wrong shape");
    }
    for (const Json& child : node) {
      if (depth + 1 == dims.size()) {
        if (!child.is_number()) throw ConfigError(std::string("field '") + field + "' must be numeric");
        flat.push_back(child.get<double>());
      } else {
        self(self, child, depth + 1);
      }
    }
  };
  walk(walk, j, 0);
  return flat;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

Json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

Json any_strategy_json(const std::variant<Strategy, TurnBasedMinStrategy>& st) {
  return std::visit([](const auto& s) { return to_json(s); }, st);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json to_json(const Game& game) {
  const GameDims& d = game.dims;
  return Json{{"S", d.S},
              {"A", d.A},
              {"B", d.B},
              {"H", d.H},
              {"s1", d.s1},
              {"turn_based", d.turn_based},
              {"r", nested(game.rewards, {d.H, d.S, d.A, d.B})},
              {"P", nested(game.transitions, {d.H, d.S, d.A, d.B, d.S})}};
}

Game game_from_json(const Json& j) {
  GameDims d;
  d.S = field<int>(j, "S");
  d.A = field<int>(j, "A");
  d.B = field<int>(j, "B");
  d.H = field<int>(j, "H");
  d.s1 = j.contains("s1") ? field<int>(j, "s1") : 0;
  d.turn_based = j.contains("turn_based") ? field<bool>(j, "turn_based") : false;
  if (d.S <= 0 || d.A <= 0 || d.B <= 0 || d.H <= 0) throw ConfigError("invalid dimension");
  Game game;
  game.dims = d;
  game.rewards = flatten(field<Json>(j, "r"), {d.H, d.S, d.A, d.B}, "r");
  game.transitions = flatten(field<Json>(j, "P"), {d.H, d.S, d.A, d.B, d.S}, "P");
  return game;
}

Json to_json(const Strategy& st) {
  return Json{{"player", to_string(st.player)},
              {"H", st.H},
              {"S", st.S},
              {"num_actions", st.num_actions},
              {"dist", nested(st.probs, {st.H, st.S, st.num_actions})}};
}

Json to_json(const TurnBasedMinStrategy& st) {
  return Json{{"player", "min"},
              {"conditioned", true},
              {"H", st.H},
              {"S", st.S},
              {"A", st.A},
              {"B", st.B},
              {"dist", nested(st.probs, {st.H, st.S, st.A, st.B})}};
}

Json to_json(const MinStrategy& st) { return any_strategy_json(st); }

Strategy strategy_from_json(const Json& j) {
  const std::string player = field<std::string>(j, "player");
  if (player != "max" && player != "min") throw ConfigError("player must be 'max' or 'min'");
  if (j.value("conditioned", false)) throw ConfigError("expected an unconditioned strategy");
  Strategy st(player == "max" ? Player::kMax : Player::kMin, field<int>(j, "H"),
              field<int>(j, "S"), field<int>(j, "num_actions"));
  st.probs = flatten(field<Json>(j, "dist"), {st.H, st.S, st.num_actions}, "dist");
  return st;
}

MinStrategy min_strategy_from_json(const Json& j) {
  if (j.value("conditioned", false)) {
    TurnBasedMinStrategy st(field<int>(j, "H"), field<int>(j, "S"), field<int>(j, "A"),
                            field<int>(j, "B"));
    st.probs = flatten(field<Json>(j, "dist"), {st.H, st.S, st.A, st.B}, "dist");
    return st;
  }
  Strategy st = strategy_from_json(j);
  if (st.player != Player::kMin) throw ConfigError("expected a min-player strategy");
  return st;
}

Json to_json(const StrategyPair& pi) { return Json{{"mu", to_json(pi.mu)}, {"nu", to_json(pi.nu)}}; }

StrategyPair strategy_pair_from_json(const Json& j) {
  StrategyPair pi{strategy_from_json(field<Json>(j, "mu")),
                  min_strategy_from_json(field<Json>(j, "nu"))};
  if (pi.mu.player != Player::kMax) throw ConfigError("'mu' must be a max-player strategy");
  return pi;
}

Json to_json(const ExplorationPolicy& rho) {
  return Json{{"H", rho.H},
              {"S", rho.S},
              {"A", rho.A},
              {"B", rho.B},
              {"dist", nested(rho.probs, {rho.H, rho.S, rho.A, rho.B})}};
}

ExplorationPolicy policy_from_json(const Json& j) {
  ExplorationPolicy rho(field<int>(j, "H"), field<int>(j, "S"), field<int>(j, "A"),
                        field<int>(j, "B"));
  rho.probs = flatten(field<Json>(j, "dist"), {rho.H, rho.S, rho.A, rho.B}, "dist");
  return rho;
}

Json to_json(const ValueTables& vt) {
  const GameDims& d = vt.dims;
  Json j{{"H", d.H}, {"S", d.S}, {"V", nested(vt.V, {d.H + 1, d.S})}};
  if (!vt.Q.empty()) {
    j["A"] = d.A;
    j["B"] = d.B;
    j["Q"] = nested(vt.Q, {d.H, d.S, d.A, d.B});
  }
  return j;
}

Json to_json(const CoverageReport& report) {
  Json j{{"c_star", finite_or_string(report.c_star)},
         {"d_m", report.d_m},
         {"assumption1_holds", report.assumption1_holds},
         {"assumption2_holds", report.assumption2_holds},
         {"assumption3_holds", report.assumption3_holds},
         {"note", report.note}};
  if (report.witness) {
    const CoverageWitness& w = *report.witness;
    j["witness"] = Json{{"deviator", to_string(w.deviator)},
                        {"h", w.h},
                        {"s", w.s},
                        {"a", w.a},
                        {"b", w.b},
                        {"deviation_occupancy", w.deviation_occupancy},
                        {"rho_occupancy", w.rho_occupancy},
                        {"deviation", any_strategy_json(w.deviation)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const PnviOutput& out) {
  const GameDims& d = out.dims;
  Json stages = Json::array();
  for (const StageDiagnostics& s : out.diagnostics.stages) {
    stages.push_back(Json{{"min_count", s.min_count},
                          {"max_count", s.max_count},
                          {"total_count", s.total_count},
                          {"bonus_max", s.bonus_max},
                          {"bonus_mean", s.bonus_mean}});
  }
  Json j{{"mu_low", to_json(out.mu_low)},
         {"nu_up", to_json(out.nu_up)},
         {"low", to_json(out.low)},
         {"up", to_json(out.up)},
         {"diagnostics",
          Json{{"delta", out.diagnostics.delta}, {"iota", out.diagnostics.iota}, {"stages", stages}}}};
  if (!out.bonus.empty()) j["bonus"] = nested(out.bonus, {d.H, d.S, d.A, d.B});
  return j;
}

Json to_json(const BernsteinOutput& out) {
  const GameDims& d = out.result.dims;
  Json j = to_json(out.result);
  j["c"] = out.c;
  j["reference"] = to_json(out.reference);
  j["bonuses"] = Json{{"low0", nested(out.bonuses.low0, {d.H, d.S, d.A, d.B})},
                      {"up0", nested(out.bonuses.up0, {d.H, d.S, d.A, d.B})},
                      {"low1", nested(out.bonuses.low1, {d.H, d.S, d.A, d.B})},
                      {"up1", nested(out.bonuses.up1, {d.H, d.S, d.A, d.B})}};
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ConfigError(path + ":" + std::to_string(line) + ": JSON parse error");
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_dataset_csv(std::ostream& os, const OfflineDataset& ds) {
  os << "episode,h,s,a,b,r,s_next\n";
  for (std::size_t k = 0; k < ds.num_episodes(); ++k) {
    const auto ep = ds.episode(k);
    for (int h = 0; h < ds.dims.H; ++h) {
      const Transition& t = ep[h];
      os << k << ',' << h << ',' << t.s << ',' << t.a << ',' << t.b << ',' << format_double(t.r)
         << ',' << t.s_next << '\n';
    }
  }
}

void write_dataset_csv(const std::string& path, const OfflineDataset& ds) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_dataset_csv(out, ds);
}

OfflineDataset read_dataset_csv(std::istream& is, const GameDims& dims) {
  OfflineDataset ds;
  ds.dims = dims;
  std::string line;
  long line_no = 1;
  if (!std::getline(is, line) || line != "episode,h,s,a,b,r,s_next") {
    throw ConfigError("line 1: expected header 'episode,h,s,a,b,r,s_next'");
  }
  auto fail = [&](const std::string& what) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) fail("expected 7 columns");
    long long episode = 0;
    int h = 0;
    Transition t;
    try {
      episode = std::stoll(cells[0]);
      h = std::stoi(cells[1]);
      t.s = std::stoi(cells[2]);
      t.a = std::stoi(cells[3]);
      t.b = std::stoi(cells[4]);
      t.r = std::stod(cells[5]);
      t.s_next = std::stoi(cells[6]);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    const std::size_t expected_row = ds.steps.size();
    if (static_cast<std::size_t>(episode) != expected_row / dims.H ||
        h != static_cast<int>(expected_row % dims.H)) {
      fail("rows must be sorted by (episode, h) with no gaps");
    }
    if (t.s < 0 || t.s >= dims.S || t.s_next < 0 || t.s_next >= dims.S || t.a < 0 ||
        t.a >= dims.A || t.b < 0 || t.b >= dims.B) {
      fail("index out of range");
    }
    if (h == 0 && t.s != dims.s1) fail("episode does not start at s1");
    if (h > 0 && ds.steps.back().s_next != t.s) fail("episode does not chain");
    ds.steps.push_back(t);
  }
  if (ds.steps.size() % dims.H != 0) throw ConfigError("last episode is truncated");
  return ds;
}

OfflineDataset read_dataset_csv(const std::string& path, const GameDims& dims) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_dataset_csv(in, dims);
}

}  // namespace ozsg
