#include "mapx/detector_selection.hpp"

#include <algorithm>
#include <cmath>

#include "mapx/errors.hpp"

namespace mapx {

namespace {

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

double expected_entropy_reduction(const BeliefState& belief, Intersection loc, Detector d) {
  const auto prior = junction_marginal(belief, loc);
  const NoiseModel& noise = belief.config().noise;
  double expected_after = 0.0;
  for (bool result : {false, true}) {
    std::vector<double> post(prior.size(), 0.0);
    double pr = 0.0;
    for (std::size_t mask = 0; mask < prior.size(); ++mask) {
      if (prior[mask] == 0.0) continue;
      const bool present = feature_present(JunctionType{static_cast<DirectionSet>(mask)}, d);
      post[mask] = prior[mask] * noise.likelihood(result, present);
      pr += post[mask];
    }
    if (pr <= 0.0) continue;
    for (double& v : post) v /= pr;
    expected_after += pr * entropy(post);
  }
  return std::max(0.0, entropy(prior) - expected_after);
}

Detector select_detector(const BeliefState& belief, Intersection loc,
                         const std::vector<Detector>& excluded) {
  if (!belief.grid().contains(loc)) throw InvalidArgument("location outside grid");
  std::vector<bool> used(kDetectorCount, false);
  for (const auto& r : belief.evidence()) {
    if (r.location == loc && !r.certain) used[static_cast<std::size_t>(r.detector.index())] = true;
  }
  for (Detector d : excluded) used[static_cast<std::size_t>(d.index())] = true;

  int best = -1;
  double best_gain = 0.0;
  for (int i = 0; i < kDetectorCount; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    const double gain = expected_entropy_reduction(belief, loc, Detector::from_index(i));
    if (best < 0 || gain > best_gain + 1e-12) {
      best = i;
      best_gain = gain;
    }
  }
  if (best < 0) throw AllDetectorsUsed("every detector has fired at this location");
  return Detector::from_index(best);
}

}  // namespace mapx
