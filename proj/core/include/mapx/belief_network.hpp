#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mapx/inference.hpp"
#include "mapx/sensing.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// Singly: every feature node has exactly one junction parent.
// Multiply: the cardinal opening feature on a shared corridor is a single
// node with both adjacent junctions as parents.
enum class NetworkStructure : std::uint8_t { Singly, Multiply };

std::string_view structure_name(NetworkStructure s);
std::optional<NetworkStructure> parse_structure(std::string_view name);

struct BeliefNetworkOptions {
  NetworkStructure structure = NetworkStructure::Singly;
  // Keep feature nodes that carry no reading. They are barren (do not change
  // any posterior) but define the coupling structure used for clique costs.
  bool include_unobserved_features = true;
  // Junctions whose type is instantiated directly (classified locations).
  std::vector<std::pair<Intersection, JunctionType>> observed_junctions;
};

// The hypothesis / junction / feature / sensor network over a grid.
struct BeliefNetwork {
  GridSpec grid;
  DiscreteNetwork network;
  Evidence evidence;
  int hypothesis_node = 0;                              // K maps + NOTA (last)
  std::vector<int> junction_nodes;                      // by intersection index
  std::vector<std::vector<JunctionType>> junction_domains;  // by intersection index
  std::vector<int> feature_nodes;                       // [index * 32 + detector], -1 if absent
  std::vector<int> sensor_nodes;                        // one per reading

  int feature_node(Intersection p, Detector d) const {
    return feature_nodes[static_cast<std::size_t>(grid.index(p) * kDetectorCount + d.index())];
  }
};

BeliefNetwork build_network(const GridSpec& grid, const std::vector<MapHypothesis>& maps,
                            const NoiseModel& noise, const std::vector<SensorReading>& readings,
                            const BeliefNetworkOptions& options = {});

// Pr(H | evidence) through the clique tree.
std::vector<double> hypothesis_posterior(const BeliefNetwork& bn);

}  // namespace mapx
