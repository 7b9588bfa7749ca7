#include "mapx/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mapx/errors.hpp"

namespace mapx {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

AbstractionLevel::AbstractionLevel(GridSpec base, int level)
    : base_(base),
      regions_(ceil_div(base.nx(), 1 << level), ceil_div(base.ny(), 1 << level)),
      level_(level) {
  if (level < 0 || level > 7) throw InvalidArgument("abstraction level out of range");
}

Region AbstractionLevel::region(Intersection r) const {
  if (!regions_.contains(r)) throw InvalidArgument("region outside level");
  const int b = block();
  return Region{r.x * b, r.y * b, std::min(base_.nx(), (r.x + 1) * b),
                std::min(base_.ny(), (r.y + 1) * b)};
}

Intersection AbstractionLevel::region_of(Intersection p) const {
  if (!base_.contains(p)) throw InvalidArgument("intersection outside grid");
  return {p.x >> level_, p.y >> level_};
}

std::vector<int> AbstractionLevel::boundary_edges(Intersection a, Intersection b) const {
  const Region ra = region(a);
  std::vector<int> out;
  for (int y = ra.y0; y < ra.y1; ++y) {
    for (int x = ra.x0; x < ra.x1; ++x) {
      for (Direction d : kDirections) {
        auto n = base_.neighbor({x, y}, d);
        if (n && region_of(*n) == b) out.push_back(*base_.edge_id({x, y}, d));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AbstractionLevel> build_hierarchy(const GridSpec& grid) {
  std::vector<AbstractionLevel> levels;
  levels.emplace_back(grid, 0);
  while (levels.back().regions().intersection_count() > 1) {
    levels.emplace_back(grid, levels.back().level() + 1);
  }
  return levels;
}

AbstractMap abstract(const AbstractionLevel& level, const EdgeSet& base_edges) {
  const GridSpec& base = level.base();
  const GridSpec& regions = level.regions();
  AbstractMap m;
  m.level = level.level();
  m.edges.assign(static_cast<std::size_t>(regions.edge_count()), false);
  m.ldp_counts.assign(static_cast<std::size_t>(regions.intersection_count()), 0);
  for (int id = 0; id < base.edge_count(); ++id) {
    if (!base_edges[static_cast<std::size_t>(id)]) continue;
    const Edge e = base.edge(id);
    const Intersection ra = level.region_of(e.from);
    const Intersection rb = level.region_of(e.to());
    if (ra != rb) m.edges[static_cast<std::size_t>(*regions.edge_between(ra, rb))] = true;
  }
  for (int i = 0; i < base.intersection_count(); ++i) {
    const Intersection p = base.at(i);
    if (directions_at(base, base_edges, p) != 0) {
      ++m.ldp_counts[static_cast<std::size_t>(regions.index(level.region_of(p)))];
    }
  }
  return m;
}

bool abstract_edge_exists(const AbstractionLevel& level, Intersection a, Intersection b,
                          const EdgeSet& base_edges) {
  if (!level.regions().contains(a) || !level.regions().contains(b) ||
      !level.regions().edge_between(a, b)) {
    throw NotAdjacent("regions are not adjacent at this level");
  }
  for (int id : level.boundary_edges(a, b)) {
    if (base_edges[static_cast<std::size_t>(id)]) return true;
  }
  return false;
}

std::optional<double> abstract_cost(const AbstractionLevel& level, const AbstractMap& map,
                                    const TaskSpec& task, std::optional<double> intra_estimate) {
  const GridSpec& regions = level.regions();
  auto estimate = [&](Intersection r) {
    return intra_estimate ? *intra_estimate : static_cast<double>(level.region(r).side());
  };
  const Intersection ra = level.region_of(task.origin);
  const Intersection rb = level.region_of(task.destination);
  if (ra == rb) return estimate(ra);

  // Dijkstra over regions; entering region r costs 1 + estimate(r).
  const int n = regions.intersection_count();
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::set<std::pair<double, int>> open;
  dist[static_cast<std::size_t>(regions.index(ra))] = 0.0;
  open.insert({0.0, regions.index(ra)});
  while (!open.empty()) {
    auto [d, u] = *open.begin();
    open.erase(open.begin());
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    const Intersection ru = regions.at(u);
    for (Direction dir : kDirections) {
      auto id = regions.edge_id(ru, dir);
      if (!id || !map.edges[static_cast<std::size_t>(*id)]) continue;
      const Intersection rv = *regions.neighbor(ru, dir);
      const int v = regions.index(rv);
      const double nd = d + 1.0 + estimate(rv);
      if (nd < dist[static_cast<std::size_t>(v)]) {
        open.erase({dist[static_cast<std::size_t>(v)], v});
        dist[static_cast<std::size_t>(v)] = nd;
        open.insert({nd, v});
      }
    }
  }
  const double d = dist[static_cast<std::size_t>(regions.index(rb))];
  if (std::isinf(d)) return std::nullopt;
  return d;
}

EdgeConstraints abstract_constraints(const AbstractionLevel& level, const EdgeConstraints& base) {
  const GridSpec& regions = level.regions();
  EdgeConstraints out(static_cast<std::size_t>(regions.edge_count()), EdgeState::Unknown);
  for (int id = 0; id < regions.edge_count(); ++id) {
    const Edge e = regions.edge(id);
    bool any_present = false;
    bool all_absent = true;
    for (int b : level.boundary_edges(e.from, e.to())) {
      const EdgeState s = base[static_cast<std::size_t>(b)];
      any_present = any_present || s == EdgeState::Present;
      all_absent = all_absent && s == EdgeState::Absent;
    }
    if (any_present) out[static_cast<std::size_t>(id)] = EdgeState::Present;
    else if (all_absent) out[static_cast<std::size_t>(id)] = EdgeState::Absent;
  }
  return out;
}

bool consistent(const AbstractMap& map, const EdgeConstraints& constraints) {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i] == EdgeState::Present && !map.edges[i]) return false;
    if (constraints[i] == EdgeState::Absent && map.edges[i]) return false;
  }
  return true;
}

AbstractBelief abstract_belief(const AbstractionLevel& level, const BeliefState& belief) {
  AbstractBelief out;
  out.level = level.level();
  const auto& maps = belief.hypotheses().maps;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    AbstractMap a = abstract(level, maps[i]);
    auto it = std::find(out.maps.begin(), out.maps.end(), a);
    if (it == out.maps.end()) {
      out.maps.push_back(std::move(a));
      out.probs.push_back(belief.probs()[i]);
    } else {
      out.probs[static_cast<std::size_t>(it - out.maps.begin())] += belief.probs()[i];
    }
  }
  out.probs.push_back(belief.nota());
  return out;
}

ConsistentCount consistent_count(const AbstractionLevel& level, const BeliefState& belief) {
  const GridSpec& grid = belief.grid();
  const auto constraints = evidence_constraints(grid, belief.evidence());
  const int free = free_edge_count(constraints);
  const std::uint64_t budget = belief.config().enumeration_budget;
  if (free < 63 && (std::uint64_t{1} << free) <= budget) {
    const auto maps = enumerate_maps(grid, constraints, budget);
    if (level.level() == 0) return {static_cast<double>(maps.size()), true};
    std::set<std::vector<bool>> seen;
    for (const auto& m : maps) seen.insert(abstract(level, m).edges);
    return {static_cast<double>(seen.size()), true};
  }
  if (level.level() == 0) {
    double product = 1.0;
    for (int i = 0; i < grid.intersection_count(); ++i) {
      const Intersection p = grid.at(i);
      int compatible = 0;
      for (JunctionType t : valid_junction_types(grid, p)) {
        bool ok = true;
        for (Direction d : kDirections) {
          auto id = grid.edge_id(p, d);
          if (!id) continue;
          const EdgeState s = constraints[static_cast<std::size_t>(*id)];
          if ((s == EdgeState::Present && !contains(t.directions, d)) ||
              (s == EdgeState::Absent && contains(t.directions, d))) {
            ok = false;
          }
        }
        compatible += ok ? 1 : 0;
      }
      product *= compatible;
    }
    return {product, false};
  }
  const auto abstract_known = abstract_constraints(level, constraints);
  return {std::pow(2.0, free_edge_count(abstract_known)), false};
}

bool should_descend(const std::vector<AbstractionLevel>& levels, int index,
                    const BeliefState& belief, double threshold) {
  if (index <= 0 || index >= static_cast<int>(levels.size())) {
    throw InvalidArgument("no finer level below this one");
  }
  if (std::isinf(threshold) && threshold > 0) return true;
  return consistent_count(levels[static_cast<std::size_t>(index - 1)], belief).count <= threshold;
}

}  // namespace mapx
