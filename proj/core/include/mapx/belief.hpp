#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mapx/belief_network.hpp"
#include "mapx/sensing.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// Bounded set of candidate maps. `exhaustive` means the set is every map
// consistent with the evidence that was used to build it.
struct HypothesisSet {
  std::vector<MapHypothesis> maps;
  bool exhaustive = false;
  int generation = 0;
  // Requested set size K; regeneration aims for this many maps.
  int capacity = 0;

  int size() const { return static_cast<int>(maps.size()); }
  std::optional<int> index_of(const MapHypothesis& m) const;
};

struct BeliefConfig {
  NoiseModel noise;
  NetworkStructure structure = NetworkStructure::Singly;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

// Bel(H) over K maps plus the NOTA state (last entry). Immutable value: the
// operations below return new states.
class BeliefState {
 public:
  BeliefState(GridSpec grid, HypothesisSet hypotheses, BeliefConfig config);

  const GridSpec& grid() const { return grid_; }
  const HypothesisSet& hypotheses() const { return hypotheses_; }
  const BeliefConfig& config() const { return config_; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<SensorReading>& evidence() const { return evidence_; }

  int map_count() const { return hypotheses_.size(); }
  double nota() const { return probs_.back(); }
  // Index of the most probable map (NOTA excluded, lowest index on ties).
  int map_estimate() const;

 private:
  friend BeliefState update(const BeliefState&, const SensorReading&);
  friend BeliefState with_evidence(const BeliefState&, std::vector<SensorReading>);

  void recompute();

  GridSpec grid_;
  HypothesisSet hypotheses_;
  BeliefConfig config_;
  std::vector<double> probs_;
  std::vector<SensorReading> evidence_;
  std::vector<double> map_log_likelihood_;
};

// Uniform prior over K distinct density-preferring maps and NOTA. When the
// whole map universe fits the enumeration budget and has at most K members,
// the set is that universe and is flagged exhaustive.
BeliefState init_belief(const GridSpec& grid, int k, std::uint64_t seed,
                        const BeliefConfig& config = {});

// Belief over an explicit hypothesis set with a uniform prior.
BeliefState make_belief(const GridSpec& grid, HypothesisSet hypotheses,
                        const BeliefConfig& config = {});

// Bayes update with one reading. Throws DegenerateEvidence when every state
// (NOTA included) has likelihood zero.
BeliefState update(const BeliefState& belief, const SensorReading& reading);

// Replaces the evidence log and recomputes the posterior from the uniform prior.
BeliefState with_evidence(const BeliefState& belief, std::vector<SensorReading> evidence);

// True iff NOTA is strictly more probable than every map.
bool nota_triggered(const BeliefState& belief);

// Fresh hypothesis set consistent with the junctions pinned by the evidence;
// exhaustive when the consistent maps number at most K. The evidence log is
// kept and re-applied to a uniform prior.
BeliefState regenerate(const BeliefState& belief, std::uint64_t seed);

// Pr(all readings at p | NOTA): junction type uniform over the valid types at
// p, independent of other intersections.
double nota_location_likelihood(const GridSpec& grid, Intersection p,
                                const std::vector<SensorReading>& readings,
                                const NoiseModel& noise);

// Junction type at p pinned by the evidence under a noiseless reading of it
// (exactly one valid type agrees with every reading at p).
std::optional<JunctionType> pinned_junction(const GridSpec& grid, Intersection p,
                                            const std::vector<SensorReading>& readings);

// Edge constraints implied by the evidence: edges of pinned junctions and
// corridors observed with certainty. Conflicting claims leave an edge free.
EdgeConstraints evidence_constraints(const GridSpec& grid,
                                     const std::vector<SensorReading>& readings);

// Distribution over the 16 direction masks at p under the belief; the NOTA
// share is spread by the local posterior of the uniform junction model.
std::vector<double> junction_marginal(const BeliefState& belief, Intersection p);

}  // namespace mapx
