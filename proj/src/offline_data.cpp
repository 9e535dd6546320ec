#include "ozsg/offline_data.hpp"

#include <numeric>

#include "ozsg/error.hpp"
#include "ozsg/rng.hpp"

namespace ozsg {

OfflineDataset sample_dataset(const Game& game, const ExplorationPolicy& rho, std::size_t n,
                              std::uint64_t seed, Provenance provenance) {
  if (n == 0) throw Error("sample_dataset: n must be positive");
  const GameDims& d = game.dims;
  check_policy(d, rho);

  OfflineDataset ds;
  ds.dims = d;
  provenance.seed = seed;
  ds.provenance = std::move(provenance);
  ds.steps.resize(n * d.H);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, k));
    int s = d.s1;
    for (int h = 0; h < d.H; ++h) {
      const std::size_t joint = rng.categorical(rho.at(h, s));
      const int a = static_cast<int>(joint / d.B);
      const int b = static_cast<int>(joint % d.B);
      const int s_next = static_cast<int>(rng.categorical(game.transition(h, s, a, b)));
      ds.steps[k * d.H + h] = Transition{s, a, b, s_next, game.reward(h, s, a, b)};
      s = s_next;
    }
  }
  return ds;
}

EpisodeSet shuffled_episodes(std::size_t n, std::uint64_t seed) {
  EpisodeSet idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<EpisodeSet> split_hoeffding(const EpisodeSet& episodes, int H, std::uint64_t seed) {
  if (H <= 0) throw Error("invalid dimension");
  const std::size_t n = episodes.size();
  if (n < static_cast<std::size_t>(H)) throw Error("insufficient data for split");
  const EpisodeSet order = shuffled_episodes(n, seed);
  const std::size_t part = n / H;
  std::vector<EpisodeSet> parts(H);
  for (int h = 0; h < H; ++h) {
    parts[h].reserve(part);
    for (std::size_t i = 0; i < part; ++i) parts[h].push_back(episodes[order[h * part + i]]);
  }
  return parts;
}

std::vector<EpisodeSet> split_hoeffding(const OfflineDataset& ds, std::uint64_t seed) {
  EpisodeSet all(ds.num_episodes());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return split_hoeffding(all, ds.dims.H, seed);
}

BernsteinSplit split_bernstein(const OfflineDataset& ds, std::uint64_t seed) {
  const std::size_t n = ds.num_episodes();
  const int H = ds.dims.H;
  if (n < 3 * static_cast<std::size_t>(H)) throw Error("insufficient data for split");
  const EpisodeSet order = shuffled_episodes(n, seed);
  const std::size_t third = n / 3;
  const std::size_t stage = n / (3 * static_cast<std::size_t>(H));

  BernsteinSplit split;
  auto it = order.begin();
  split.reference.assign(it, it + third);
  it += third;
  split.base.assign(it, it + third);
  it += third;
  split.stage.resize(H);
  for (int h = 0; h < H; ++h) {
    split.stage[h].assign(it, it + stage);
    it += stage;
  }
  return split;
}

EmpiricalModel empirical_model(const OfflineDataset& ds, const EpisodeSet& episodes) {
  const GameDims& d = ds.dims;
  EmpiricalModel m;
  m.dims = d;
  m.counts.assign(d.num_cells(), 0);
  m.r_hat.assign(d.num_cells(), 0.0);
  m.p_hat.assign(d.num_cells() * d.S, 0.0);

  // Rewards are deterministic, so r_hat is the reward seen at the cell.
  for (std::size_t k : episodes) {
    if (k >= ds.num_episodes()) throw Error("episode index out of range");
    const auto ep = ds.episode(k);
    for (int h = 0; h < d.H; ++h) {
      const Transition& t = ep[h];
      const std::size_t c = d.cell(h, t.s, t.a, t.b);
      ++m.counts[c];
      m.r_hat[c] = t.r;
      m.p_hat[c * d.S + t.s_next] += 1.0;
    }
  }
  for (std::size_t c = 0; c < d.num_cells(); ++c) {
    std::span<double> row(m.p_hat.data() + c * d.S, static_cast<std::size_t>(d.S));
    if (m.counts[c] == 0) {
      std::fill(row.begin(), row.end(), 1.0 / d.S);
      continue;
    }
    const double total = static_cast<double>(m.counts[c]);
    for (double& p : row) p /= total;
  }
  return m;
}

EmpiricalModel empirical_model(const OfflineDataset& ds) {
  EpisodeSet all(ds.num_episodes());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return empirical_model(ds, all);
}

}  // namespace ozsg
