#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "mapx/belief.hpp"
#include "mapx/decision.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// Rectangle of base intersections [x0, x1) × [y0, y1).
struct Region {
  int x0 = 0, y0 = 0, x1 = 1, y1 = 1;

  int side() const { return std::max(x1 - x0, y1 - y0); }
  bool contains(Intersection p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
};

// Level l groups the base grid into 2^l × 2^l blocks (smaller blocks at the
// high-index borders). Regions form a grid of their own; abstract edges are
// that grid's edges and share its edge ids.
class AbstractionLevel {
 public:
  AbstractionLevel(GridSpec base, int level);

  int level() const { return level_; }
  int block() const { return 1 << level_; }
  const GridSpec& base() const { return base_; }
  const GridSpec& regions() const { return regions_; }

  Region region(Intersection r) const;
  Intersection region_of(Intersection base_point) const;
  // Base edges whose endpoints lie in the two regions.
  std::vector<int> boundary_edges(Intersection a, Intersection b) const;

 private:
  GridSpec base_;
  GridSpec regions_;
  int level_ = 0;
};

// Levels from the base grid (level 0) up to a single region.
std::vector<AbstractionLevel> build_hierarchy(const GridSpec& grid);

struct AbstractMap {
  int level = 0;
  EdgeSet edges;                 // by region-grid edge id
  std::vector<int> ldp_counts;   // LDPs inside each region, by region index

  friend bool operator==(const AbstractMap&, const AbstractMap&) = default;
};

AbstractMap abstract(const AbstractionLevel& level, const EdgeSet& base_edges);
inline AbstractMap abstract(const AbstractionLevel& level, const MapHypothesis& m) {
  return abstract(level, m.edges());
}

// True iff some base corridor crosses between the adjacent regions a and b.
// Throws NotAdjacent.
bool abstract_edge_exists(const AbstractionLevel& level, Intersection a, Intersection b,
                          const EdgeSet& base_edges);

// Abstract edges count 1 each; every region entered (or the single region of a
// same-region task) adds its intra-region estimate, by default its side
// length. nullopt when unreachable at this level.
std::optional<double> abstract_cost(const AbstractionLevel& level, const AbstractMap& map,
                                    const TaskSpec& task,
                                    std::optional<double> intra_estimate = std::nullopt);

// Abstract-edge knowledge implied by base edge constraints: present when a
// crossing corridor is known present, absent when every crossing corridor is
// known absent.
EdgeConstraints abstract_constraints(const AbstractionLevel& level,
                                     const EdgeConstraints& base);

bool consistent(const AbstractMap& map, const EdgeConstraints& constraints);

// Hypotheses over abstract maps: the distinct abstractions of the belief's
// maps with aggregated mass, plus the NOTA state (last).
struct AbstractBelief {
  int level = 0;
  std::vector<AbstractMap> maps;
  std::vector<double> probs;
};

AbstractBelief abstract_belief(const AbstractionLevel& level, const BeliefState& belief);

struct ConsistentCount {
  double count = 0.0;
  bool exact = false;
};

// Number of level-l abstract maps consistent with the noiseless reading of the
// evidence. Exact by enumeration when the free base edges fit the budget,
// otherwise an upper bound (product of per-intersection type counts at the
// base level, 2^(undetermined abstract edges) above it).
ConsistentCount consistent_count(const AbstractionLevel& level, const BeliefState& belief);

inline constexpr double kDefaultDescendThreshold = 64.0;

// True iff the count of hypotheses one level down is at most the threshold.
// `levels[index]` must have a finer level below it.
bool should_descend(const std::vector<AbstractionLevel>& levels, int index,
                    const BeliefState& belief, double threshold = kDefaultDescendThreshold);

}  // namespace mapx
