#include "mapx/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mapx/errors.hpp"
#include "mapx/rng.hpp"

namespace mapx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double map_reading_log_likelihood(const MapHypothesis& m, const SensorReading& r,
                                  const NoiseModel& noise) {
  return safe_log(reading_likelihood(r, noise, feature_present(m.junction(r.location), r.detector)));
}

std::map<int, std::vector<SensorReading>> by_location(const GridSpec& grid,
                                                      const std::vector<SensorReading>& readings) {
  std::map<int, std::vector<SensorReading>> out;
  for (const auto& r : readings) out[grid.index(r.location)].push_back(r);
  return out;
}

std::vector<double> normalise_logs(const std::vector<double>& logs) {
  double top = kNegInf;
  for (double l : logs) top = std::max(top, l);
  if (top == kNegInf) throw DegenerateEvidence("every hypothesis has likelihood zero");
  std::vector<double> p(logs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    p[i] = logs[i] == kNegInf ? 0.0 : std::exp(logs[i] - top);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

HypothesisSet sample_distinct(const GridSpec& grid, int k, std::uint64_t seed,
                              const EdgeConstraints& constraints) {
  HypothesisSet set;
  set.capacity = k;
  const int max_attempts = 200 * k + 1000;
  for (int attempt = 0; attempt < max_attempts && set.size() < k; ++attempt) {
    MapHypothesis m = sample_map(grid, derive_seed(seed, static_cast<std::uint64_t>(attempt)),
                                 true, constraints);
    if (!set.index_of(m)) set.maps.push_back(std::move(m));
  }
  return set;
}

}  // namespace

std::optional<int> HypothesisSet::index_of(const MapHypothesis& m) const {
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i] == m) return static_cast<int>(i);
  }
  return std::nullopt;
}

BeliefState::BeliefState(GridSpec grid, HypothesisSet hypotheses, BeliefConfig config)
    : grid_(grid), hypotheses_(std::move(hypotheses)), config_(config) {
  config_.noise.validate();
  for (const auto& m : hypotheses_.maps) {
    if (!(m.grid() == grid_)) throw InvalidArgument("hypothesis grid mismatch");
  }
  if (hypotheses_.capacity == 0) hypotheses_.capacity = hypotheses_.size();
  map_log_likelihood_.assign(hypotheses_.maps.size(), 0.0);
  probs_.assign(hypotheses_.maps.size() + 1, 1.0 / static_cast<double>(hypotheses_.maps.size() + 1));
}

int BeliefState::map_estimate() const {
  int best = 0;
  for (int i = 1; i < map_count(); ++i) {
    if (probs_[static_cast<std::size_t>(i)] > probs_[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

void BeliefState::recompute() {
  if (config_.structure == NetworkStructure::Multiply && !evidence_.empty()) {
    BeliefNetworkOptions options;
    options.structure = NetworkStructure::Multiply;
    options.include_unobserved_features = false;
    const auto bn = build_network(grid_, hypotheses_.maps, config_.noise, evidence_, options);
    try {
      probs_ = hypothesis_posterior(bn);
    } catch (const ZeroProbabilityEvidence&) {
      throw DegenerateEvidence("every hypothesis has likelihood zero");
    }
    return;
  }
  std::vector<double> logs = map_log_likelihood_;
  double nota = 0.0;
  for (const auto& [index, readings] : by_location(grid_, evidence_)) {
    nota += safe_log(nota_location_likelihood(grid_, grid_.at(index), readings, config_.noise));
  }
  logs.push_back(nota);
  probs_ = normalise_logs(logs);
}

BeliefState make_belief(const GridSpec& grid, HypothesisSet hypotheses, const BeliefConfig& config) {
  return BeliefState(grid, std::move(hypotheses), config);
}

BeliefState init_belief(const GridSpec& grid, int k, std::uint64_t seed, const BeliefConfig& config) {
  if (k < 1) throw InvalidArgument("hypothesis count must be at least 1");
  const int e = grid.edge_count();
  if (e < 63 && (std::uint64_t{1} << e) <= config.enumeration_budget) {
    auto all = enumerate_maps(grid, config.enumeration_budget);
    if (static_cast<int>(all.size()) <= k) {
      HypothesisSet set{std::move(all), true, 0, k};
      return BeliefState(grid, std::move(set), config);
    }
  }
  auto set = sample_distinct(
      grid, k, seed, EdgeConstraints(static_cast<std::size_t>(e), EdgeState::Unknown));
  return BeliefState(grid, std::move(set), config);
}

BeliefState update(const BeliefState& belief, const SensorReading& reading) {
  if (!belief.grid_.contains(reading.location)) throw InvalidArgument("reading outside grid");
  BeliefState next = belief;
  next.evidence_.push_back(reading);
  for (std::size_t i = 0; i < next.hypotheses_.maps.size(); ++i) {
    next.map_log_likelihood_[i] +=
        map_reading_log_likelihood(next.hypotheses_.maps[i], reading, next.config_.noise);
  }
  next.recompute();
  return next;
}

BeliefState with_evidence(const BeliefState& belief, std::vector<SensorReading> evidence) {
  BeliefState next = belief;
  next.evidence_ = std::move(evidence);
  for (std::size_t i = 0; i < next.hypotheses_.maps.size(); ++i) {
    double l = 0.0;
    for (const auto& r : next.evidence_) {
      if (!next.grid_.contains(r.location)) throw InvalidArgument("reading outside grid");
      l += map_reading_log_likelihood(next.hypotheses_.maps[i], r, next.config_.noise);
    }
    next.map_log_likelihood_[i] = l;
  }
  if (next.evidence_.empty()) {
    std::fill(next.probs_.begin(), next.probs_.end(), 1.0 / static_cast<double>(next.probs_.size()));
  } else {
    next.recompute();
  }
  return next;
}

bool nota_triggered(const BeliefState& belief) {
  const auto& p = belief.probs();
  const double nota = p.back();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i] >= nota) return false;
  }
  return true;
}

BeliefState regenerate(const BeliefState& belief, std::uint64_t seed) {
  const GridSpec& grid = belief.grid();
  const auto& evidence = belief.evidence();
  const auto& config = belief.config();
  const int k = std::max(1, belief.hypotheses().capacity);

  if (config.noise.false_negative == 0.0 && config.noise.false_positive == 0.0) {
    for (const auto& [index, readings] : by_location(grid, evidence)) {
      if (consistent_types(grid, grid.at(index), readings).empty()) {
        throw NoConsistentMap("noiseless evidence is contradictory");
      }
    }
  }
  const EdgeConstraints constraints = evidence_constraints(grid, evidence);
  const int free = free_edge_count(constraints);

  HypothesisSet set;
  bool decided = false;
  if (free < 63 && (std::uint64_t{1} << free) <= config.enumeration_budget) {
    auto consistent = enumerate_maps(grid, constraints, config.enumeration_budget);
    if (consistent.empty()) throw NoConsistentMap("no connected map matches the pinned junctions");
    if (static_cast<int>(consistent.size()) <= k) {
      set = HypothesisSet{std::move(consistent), true, 0, k};
      decided = true;
    }
  }
  if (!decided) set = sample_distinct(grid, k, seed, constraints);
  set.generation = belief.hypotheses().generation + 1;
  set.capacity = k;
  return with_evidence(BeliefState(grid, std::move(set), config), evidence);
}

double nota_location_likelihood(const GridSpec& grid, Intersection p,
                                const std::vector<SensorReading>& readings,
                                const NoiseModel& noise) {
  const auto types = valid_junction_types(grid, p);
  double total = 0.0;
  for (JunctionType t : types) {
    const FeatureTable f = geometry_features(t);
    double l = 1.0;
    for (const auto& r : readings) {
      if (r.location != p) continue;
      l *= reading_likelihood(r, noise, f[static_cast<std::size_t>(r.detector.index())]);
    }
    total += l;
  }
  return total / static_cast<double>(types.size());
}

std::optional<JunctionType> pinned_junction(const GridSpec& grid, Intersection p,
                                            const std::vector<SensorReading>& readings) {
  bool any = false;
  for (const auto& r : readings) any = any || r.location == p;
  if (!any) return std::nullopt;
  const auto types = consistent_types(grid, p, readings);
  if (types.size() == 1) return types.front();
  return std::nullopt;
}

EdgeConstraints evidence_constraints(const GridSpec& grid,
                                     const std::vector<SensorReading>& readings) {
  const auto n = static_cast<std::size_t>(grid.edge_count());
  std::vector<bool> says_present(n, false);
  std::vector<bool> says_absent(n, false);
  auto claim = [&](Intersection p, Direction d, bool present) {
    if (auto id = grid.edge_id(p, d)) {
      (present ? says_present : says_absent)[static_cast<std::size_t>(*id)] = true;
    }
  };
  for (const auto& [index, local] : by_location(grid, readings)) {
    const Intersection p = grid.at(index);
    if (auto pinned = pinned_junction(grid, p, local)) {
      for (Direction d : kDirections) claim(p, d, contains(pinned->directions, d));
    }
    for (const auto& r : local) {
      if (r.certain && r.detector.feature == Feature::Opening && r.detector.wedge.cardinal()) {
        claim(p, r.detector.wedge.direction(), r.result);
      }
    }
  }
  EdgeConstraints out(n, EdgeState::Unknown);
  for (std::size_t i = 0; i < n; ++i) {
    if (says_present[i] && !says_absent[i]) out[i] = EdgeState::Present;
    if (says_absent[i] && !says_present[i]) out[i] = EdgeState::Absent;
  }
  return out;
}

std::vector<double> junction_marginal(const BeliefState& belief, Intersection p) {
  std::vector<double> out(16, 0.0);
  const auto& maps = belief.hypotheses().maps;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    out[maps[i].directions(p)] += belief.probs()[i];
  }
  const auto types = valid_junction_types(belief.grid(), p);
  std::vector<double> local(types.size(), 1.0);
  double total = 0.0;
  for (std::size_t t = 0; t < types.size(); ++t) {
    const FeatureTable f = geometry_features(types[t]);
    for (const auto& r : belief.evidence()) {
      if (r.location != p) continue;
      local[t] *= reading_likelihood(r, belief.config().noise,
                                     f[static_cast<std::size_t>(r.detector.index())]);
    }
    total += local[t];
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    const double share = total > 0.0 ? local[t] / total : 1.0 / static_cast<double>(types.size());
    out[types[t].directions] += belief.nota() * share;
  }
  return out;
}

}  // namespace mapx
