#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mapx {

// One variable of a discrete Bayesian network. The CPT is laid out row-major
// over (parents..., self) with the node's own state varying fastest.
struct NetworkNode {
  std::string name;
  int cardinality = 2;
  std::vector<int> parents;
  std::vector<double> cpt;
};

// Directed acyclic network. Parents must already exist when a node is added,
// so the insertion order is a topological order.
class DiscreteNetwork {
 public:
  int add_node(std::string name, int cardinality, std::vector<int> parents,
               std::vector<double> cpt);

  int size() const { return static_cast<int>(nodes_.size()); }
  const NetworkNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::vector<int> cardinalities() const;
  std::optional<int> find(std::string_view name) const;

 private:
  std::vector<NetworkNode> nodes_;
};

// Observed node -> observed state.
using Evidence = std::map<int, int>;

// Table over a sorted set of variables, row-major with the last variable
// varying fastest.
struct Factor {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> values;

  static Factor ones(std::vector<int> vars, std::vector<int> cards);
  std::size_t size() const { return values.size(); }
  double sum() const;
};

Factor cpt_factor(const DiscreteNetwork& net, int node);
Factor restrict_factor(const Factor& f, const Evidence& evidence);
Factor marginalize(const Factor& f, const std::vector<int>& keep);
// big *= small, where small's scope is a subset of big's.
void multiply_into(Factor& big, const Factor& small);

// Undirected graph whose vertices carry global node ids (labels).
class UndirectedGraph {
 public:
  explicit UndirectedGraph(std::vector<int> labels);

  int vertex_count() const { return static_cast<int>(labels_.size()); }
  int label(int v) const { return labels_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& labels() const { return labels_; }
  std::optional<int> vertex_of(int label) const;

  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;
  const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int edge_count() const;
  // Edges as label pairs (smaller label first), sorted.
  std::vector<std::pair<int, int>> labelled_edges() const;

  bool has_cycle() const;
  // True when the cycle restricted to vertices in `subset` (labels) exists.
  bool has_cycle_within(const std::vector<int>& subset) const;

 private:
  std::vector<int> labels_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::uint8_t> matrix_;
};

// Marries parents and drops directions. The second form also removes observed
// nodes, giving the interaction graph of the evidence-sliced factors.
UndirectedGraph moralize(const DiscreteNetwork& net);
UndirectedGraph moralize(const DiscreteNetwork& net, const Evidence& observed);

struct Triangulation {
  UndirectedGraph chordal;
  std::vector<std::vector<int>> cliques;  // maximal, labels ascending
  std::vector<int> elimination_order;     // labels
};

// Min-fill elimination. Ties go to the smallest state-space product of the
// vertex and its current neighbours, then to the smallest label.
// `cardinalities` is indexed by label.
Triangulation triangulate(const UndirectedGraph& graph, std::span<const int> cardinalities);

bool is_chordal(const UndirectedGraph& graph);

// Max over cliques of the product of member cardinalities (saturating).
std::uint64_t largest_clique_cost(const std::vector<std::vector<int>>& cliques,
                                  std::span<const int> cardinalities);

// Calibrated clique tree produced by propagate().
struct CliqueTree {
  std::vector<std::vector<int>> cliques;
  std::vector<int> parent;       // -1 for roots
  std::vector<Factor> potentials;  // normalised clique marginals
  std::vector<Factor> separators;  // separator with parent (empty for roots)
  std::vector<int> cardinalities;
  Evidence evidence;
  double log_evidence = 0.0;  // log Pr(evidence)

  std::uint64_t largest_clique_cost() const;
  // L-infinity disagreement between each clique and its parent on their
  // separator.
  double max_separator_discrepancy() const;
};

// Builds the clique tree over the unobserved nodes, enters evidence by table
// slicing and runs a collect and a distribute pass. Throws
// ZeroProbabilityEvidence when the evidence is impossible.
CliqueTree propagate(const DiscreteNetwork& net, const Evidence& evidence);

std::vector<double> marginal(const CliqueTree& tree, int node);

}  // namespace mapx
