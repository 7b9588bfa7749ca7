#include <algorithm>

#include "mapx/errors.hpp"
#include "mapx/rng.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

namespace {

// Rejection attempts with independent fair coins per free edge before
// switching to the growth proposal. Enough for grids up to about 5x5.
constexpr int kRejectionTries = 20000;
constexpr int kGrowthTries = 20000;

bool accept(Rng& rng, bool density_pref, const GridSpec& grid, const EdgeSet& edges) {
  if (!density_pref) return true;
  return rng.bernoulli(density_weight(density(grid, edges)));
}

std::optional<EdgeSet> rejection_draw(const GridSpec& grid, const EdgeConstraints& constraints,
                                      bool density_pref, Rng& rng) {
  EdgeSet edges(constraints.size(), false);
  for (int attempt = 0; attempt < kRejectionTries; ++attempt) {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      switch (constraints[i]) {
        case EdgeState::Present: edges[i] = true; break;
        case EdgeState::Absent: edges[i] = false; break;
        case EdgeState::Unknown: edges[i] = rng.bernoulli(0.5); break;
      }
    }
    if (!ldps_connected(grid, edges)) continue;
    if (accept(rng, density_pref, grid, edges)) return edges;
  }
  return std::nullopt;
}

// Grows a single corridor cluster from a seed intersection, deciding each
// frontier edge once. Always connected, but not uniform over valid maps.
std::optional<EdgeSet> growth_draw(const GridSpec& grid, const EdgeConstraints& constraints,
                                   bool density_pref, Rng& rng) {
  std::optional<Intersection> anchor;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i] == EdgeState::Present) {
      anchor = grid.edge(static_cast<int>(i)).from;
      break;
    }
  }
  for (int attempt = 0; attempt < kGrowthTries; ++attempt) {
    EdgeSet edges(constraints.size(), false);
    std::vector<bool> decided(constraints.size(), false);
    std::vector<bool> in_cluster(static_cast<std::size_t>(grid.intersection_count()), false);
    std::vector<int> frontier;
    auto add_vertex = [&](Intersection p) {
      in_cluster[static_cast<std::size_t>(grid.index(p))] = true;
      for (Direction d : kDirections) {
        auto id = grid.edge_id(p, d);
        if (id && !decided[static_cast<std::size_t>(*id)]) {
          decided[static_cast<std::size_t>(*id)] = true;
          frontier.push_back(*id);
        }
      }
    };
    const Intersection start =
        anchor ? *anchor
               : grid.at(static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.intersection_count()))));
    add_vertex(start);
    while (!frontier.empty()) {
      const std::size_t pick = rng.below(frontier.size());
      const int id = frontier[pick];
      frontier[pick] = frontier.back();
      frontier.pop_back();
      bool take = false;
      switch (constraints[static_cast<std::size_t>(id)]) {
        case EdgeState::Present: take = true; break;
        case EdgeState::Absent: take = false; break;
        case EdgeState::Unknown: take = rng.bernoulli(0.5); break;
      }
      if (!take) continue;
      edges[static_cast<std::size_t>(id)] = true;
      const Edge e = grid.edge(id);
      for (Intersection p : {e.from, e.to()}) {
        if (!in_cluster[static_cast<std::size_t>(grid.index(p))]) add_vertex(p);
      }
    }
    bool satisfied = true;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (constraints[i] == EdgeState::Present && !edges[i]) satisfied = false;
    }
    if (!satisfied) continue;
    if (accept(rng, density_pref, grid, edges)) return edges;
  }
  return std::nullopt;
}

}  // namespace

MapHypothesis sample_map(const GridSpec& grid, std::uint64_t seed, bool density_pref) {
  return sample_map(
      grid, seed, density_pref,
      EdgeConstraints(static_cast<std::size_t>(grid.edge_count()), EdgeState::Unknown));
}

MapHypothesis sample_map(const GridSpec& grid, std::uint64_t seed, bool density_pref,
                         const EdgeConstraints& constraints) {
  if (static_cast<int>(constraints.size()) != grid.edge_count()) {
    throw InvalidArgument("constraint size does not match grid");
  }
  Rng rng(seed);
  if (auto edges = rejection_draw(grid, constraints, density_pref, rng)) {
    return MapHypothesis(grid, std::move(*edges));
  }
  if (auto edges = growth_draw(grid, constraints, density_pref, rng)) {
    return MapHypothesis(grid, std::move(*edges));
  }
  throw NoConsistentMap("no connected map satisfies the edge constraints");
}

}  // namespace mapx
