#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ozsg/exact_eval.hpp"
#include "ozsg/game_model.hpp"
#include "ozsg/offline_data.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"

namespace ozsg {

using Json = nlohmann::json;

// Structured-text (JSON) documents. Doubles are written as shortest
// round-trip decimal literals, so finite values survive bit-exactly.

Json to_json(const Game& game);
Game game_from_json(const Json& j);

Json to_json(const Strategy& st);
Json to_json(const TurnBasedMinStrategy& st);
Json to_json(const MinStrategy& st);
Strategy strategy_from_json(const Json& j);
MinStrategy min_strategy_from_json(const Json& j);

Json to_json(const StrategyPair& pi);
StrategyPair strategy_pair_from_json(const Json& j);

Json to_json(const ExplorationPolicy& rho);
ExplorationPolicy policy_from_json(const Json& j);

Json to_json(const ValueTables& vt);
Json to_json(const CoverageReport& report);
Json to_json(const PnviOutput& out);
Json to_json(const BernsteinOutput& out);

/// Parses a JSON file; parse errors report the line number.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Dataset CSV: header `episode,h,s,a,b,r,s_next`, rows sorted by (episode, h),
// rewards with 17 significant digits.

void write_dataset_csv(std::ostream& os, const OfflineDataset& ds);
void write_dataset_csv(const std::string& path, const OfflineDataset& ds);
/// `dims` supplies S, A, B, H and s1, which the CSV does not carry.
OfflineDataset read_dataset_csv(std::istream& is, const GameDims& dims);
OfflineDataset read_dataset_csv(const std::string& path, const GameDims& dims);

/// printf("%.17g").
std::string format_double(double x);

}  // namespace ozsg
