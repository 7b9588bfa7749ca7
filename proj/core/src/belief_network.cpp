#include "mapx/belief_network.hpp"

#include <algorithm>
#include <string>

#include "mapx/errors.hpp"

namespace mapx {

std::string_view structure_name(NetworkStructure s) {
  return s == NetworkStructure::Singly ? "singly" : "multiply";
}

std::optional<NetworkStructure> parse_structure(std::string_view name) {
  if (name == "singly") return NetworkStructure::Singly;
  if (name == "multiply") return NetworkStructure::Multiply;
  return std::nullopt;
}

namespace {

std::string junction_name(Intersection p) {
  return "J(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

std::string feature_label(Intersection p, Detector d) {
  return "X(" + std::string(feature_name(d.feature)) + "," + std::to_string(d.wedge.index) +
         "," + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

int domain_index(const std::vector<JunctionType>& domain, JunctionType j) {
  auto it = std::find(domain.begin(), domain.end(), j);
  if (it == domain.end()) throw InvalidArgument("junction type not valid at this intersection");
  return static_cast<int>(it - domain.begin());
}

}  // namespace

BeliefNetwork build_network(const GridSpec& grid, const std::vector<MapHypothesis>& maps,
                            const NoiseModel& noise, const std::vector<SensorReading>& readings,
                            const BeliefNetworkOptions& options) {
  BeliefNetwork bn;
  bn.grid = grid;
  const int k = static_cast<int>(maps.size());
  const int n = grid.intersection_count();

  bn.hypothesis_node = bn.network.add_node(
      "H", k + 1, {}, std::vector<double>(static_cast<std::size_t>(k + 1), 1.0 / (k + 1)));

  for (int i = 0; i < n; ++i) {
    const Intersection p = grid.at(i);
    auto domain = valid_junction_types(grid, p);
    const auto size = domain.size();
    std::vector<double> cpt;
    cpt.reserve(static_cast<std::size_t>(k + 1) * size);
    for (const auto& m : maps) {
      const int s = domain_index(domain, m.junction(p));
      for (std::size_t t = 0; t < size; ++t) cpt.push_back(static_cast<int>(t) == s ? 1.0 : 0.0);
    }
    for (std::size_t t = 0; t < size; ++t) cpt.push_back(1.0 / static_cast<double>(size));
    bn.junction_nodes.push_back(bn.network.add_node(junction_name(p), static_cast<int>(size),
                                                    {bn.hypothesis_node}, std::move(cpt)));
    bn.junction_domains.push_back(std::move(domain));
  }

  std::vector<bool> needed(static_cast<std::size_t>(n * kDetectorCount),
                           options.include_unobserved_features);
  for (const auto& r : readings) {
    if (!grid.contains(r.location)) throw InvalidArgument("reading outside grid");
    needed[static_cast<std::size_t>(grid.index(r.location) * kDetectorCount + r.detector.index())] = true;
  }
  bn.feature_nodes.assign(static_cast<std::size_t>(n * kDetectorCount), -1);
  const bool multiply = options.structure == NetworkStructure::Multiply;

  for (int i = 0; i < n; ++i) {
    const Intersection p = grid.at(i);
    for (int di = 0; di < kDetectorCount; ++di) {
      const Detector d = Detector::from_index(di);
      const auto slot = static_cast<std::size_t>(i * kDetectorCount + di);
      if (bn.feature_nodes[slot] >= 0) continue;
      const int j_here = bn.junction_nodes[static_cast<std::size_t>(i)];
      const auto& dom_here = bn.junction_domains[static_cast<std::size_t>(i)];

      std::optional<Intersection> other;
      if (multiply && d.feature == Feature::Opening && d.wedge.cardinal()) {
        other = grid.neighbor(p, d.wedge.direction());
      }
      if (other) {
        const Detector mirror{Feature::Opening, wedge_toward(opposite(d.wedge.direction()))};
        const auto other_slot =
            static_cast<std::size_t>(grid.index(*other) * kDetectorCount + mirror.index());
        if (!needed[slot] && !needed[other_slot]) continue;
        const int oi = grid.index(*other);
        const int j_other = bn.junction_nodes[static_cast<std::size_t>(oi)];
        const auto& dom_other = bn.junction_domains[static_cast<std::size_t>(oi)];
        // Corridor present only when both ends agree.
        std::vector<double> cpt;
        for (JunctionType a : dom_here) {
          for (JunctionType b : dom_other) {
            const bool open = contains(a.directions, d.wedge.direction()) &&
                              contains(b.directions, opposite(d.wedge.direction()));
            cpt.push_back(open ? 0.0 : 1.0);
            cpt.push_back(open ? 1.0 : 0.0);
          }
        }
        const int id = bn.network.add_node(feature_label(p, d), 2, {j_here, j_other}, std::move(cpt));
        bn.feature_nodes[slot] = id;
        bn.feature_nodes[other_slot] = id;
        continue;
      }
      if (!needed[slot]) continue;
      std::vector<double> cpt;
      for (JunctionType a : dom_here) {
        const bool present = feature_present(a, d);
        cpt.push_back(present ? 0.0 : 1.0);
        cpt.push_back(present ? 1.0 : 0.0);
      }
      bn.feature_nodes[slot] = bn.network.add_node(feature_label(p, d), 2, {j_here}, std::move(cpt));
    }
  }

  for (std::size_t r = 0; r < readings.size(); ++r) {
    const auto& reading = readings[r];
    const int x = bn.feature_node(reading.location, reading.detector);
    std::vector<double> cpt;
    for (bool present : {false, true}) {
      cpt.push_back(reading_likelihood(SensorReading{reading.location, reading.detector, false,
                                                     reading.step, reading.certain},
                                       noise, present));
      cpt.push_back(reading_likelihood(SensorReading{reading.location, reading.detector, true,
                                                     reading.step, reading.certain},
                                       noise, present));
    }
    const int s = bn.network.add_node("S#" + std::to_string(r), 2, {x}, std::move(cpt));
    bn.sensor_nodes.push_back(s);
    bn.evidence[s] = reading.result ? 1 : 0;
  }

  for (const auto& [p, type] : options.observed_junctions) {
    const int i = grid.index(p);
    bn.evidence[bn.junction_nodes[static_cast<std::size_t>(i)]] =
        domain_index(bn.junction_domains[static_cast<std::size_t>(i)], type);
  }
  return bn;
}

std::vector<double> hypothesis_posterior(const BeliefNetwork& bn) {
  return marginal(propagate(bn.network, bn.evidence), bn.hypothesis_node);
}

}  // namespace mapx
