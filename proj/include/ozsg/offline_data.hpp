#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ozsg/game_model.hpp"

namespace ozsg {

/// One (s, a, b, r, s') record at some timestep.
struct Transition {
  std::int32_t s = 0;
  std::int32_t a = 0;
  std::int32_t b = 0;
  std::int32_t s_next = 0;
  double r = 0.0;

  bool operator==(const Transition&) const = default;
};

struct Provenance {
  std::string game_id;
  std::string rho_id;
  std::uint64_t seed = 0;
};

/// n full episodes of length H, stored episode-major.
struct OfflineDataset {
  GameDims dims;
  std::vector<Transition> steps;  // steps[k * H + h]
  Provenance provenance;

  std::size_t num_episodes() const { return dims.H > 0 ? steps.size() / dims.H : 0; }
  std::span<const Transition> episode(std::size_t k) const {
    return {steps.data() + k * dims.H, static_cast<std::size_t>(dims.H)};
  }
};

/// Indices of retained episodes.
using EpisodeSet = std::vector<std::size_t>;

/// Samples n i.i.d. episodes. Episode k draws from its own substream
/// derive_seed(seed, k), so the result does not depend on sampling order.
OfflineDataset sample_dataset(const Game& game, const ExplorationPolicy& rho, std::size_t n,
                              std::uint64_t seed, Provenance provenance = {});

/// Fisher-Yates permutation of 0..n-1 driven by Rng(seed).
EpisodeSet shuffled_episodes(std::size_t n, std::uint64_t seed);

/// H parts of floor(n/H) episodes each; part h feeds timestep-h statistics.
std::vector<EpisodeSet> split_hoeffding(const OfflineDataset& ds, std::uint64_t seed);
/// Same split applied to a subset of the episodes.
std::vector<EpisodeSet> split_hoeffding(const EpisodeSet& episodes, int H, std::uint64_t seed);

struct BernsteinSplit {
  EpisodeSet reference;           // floor(n/3)
  EpisodeSet base;                // floor(n/3)
  std::vector<EpisodeSet> stage;  // H parts of floor(n/(3H))
};

BernsteinSplit split_bernstein(const OfflineDataset& ds, std::uint64_t seed);

/// Visit counts, empirical rewards and empirical transitions.
///
/// Unvisited cells have r_hat = 0 and a uniform P_hat row.
struct EmpiricalModel {
  GameDims dims;
  std::vector<std::int64_t> counts;  // [h][s][a][b]
  std::vector<double> r_hat;         // [h][s][a][b]
  std::vector<double> p_hat;         // [h][s][a][b][s']

  std::int64_t count(int h, int s, int a, int b) const { return counts[dims.cell(h, s, a, b)]; }
  double reward(int h, int s, int a, int b) const { return r_hat[dims.cell(h, s, a, b)]; }
  std::span<const double> transition(int h, int s, int a, int b) const {
    return {p_hat.data() + dims.cell(h, s, a, b) * dims.S, static_cast<std::size_t>(dims.S)};
  }
  std::span<const double> transition(std::size_t cell) const {
    return {p_hat.data() + cell * dims.S, static_cast<std::size_t>(dims.S)};
  }

  bool operator==(const EmpiricalModel&) const = default;
};

EmpiricalModel empirical_model(const OfflineDataset& ds, const EpisodeSet& episodes);
/// Model built from every episode.
EmpiricalModel empirical_model(const OfflineDataset& ds);

}  // namespace ozsg
