#pragma once

#include <vector>

#include "mapx/belief.hpp"
#include "mapx/sensing.hpp"

namespace mapx {

// Expected drop in entropy (nats) of the junction-type marginal at loc from
// firing detector d once more.
double expected_entropy_reduction(const BeliefState& belief, Intersection loc, Detector d);

// The detector not yet fired at loc (and not in `excluded`) with the largest
// expected entropy reduction; near-ties (1e-12) go to the lower index. Only
// noisy readings count as fired. Throws AllDetectorsUsed.
Detector select_detector(const BeliefState& belief, Intersection loc,
                         const std::vector<Detector>& excluded = {});

}  // namespace mapx
