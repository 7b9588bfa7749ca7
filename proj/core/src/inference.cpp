#include "mapx/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "mapx/errors.hpp"

namespace mapx {

namespace {

std::size_t product(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

// Row-major strides, last position fastest.
std::vector<std::size_t> strides_of(const std::vector<int>& cards) {
  std::vector<std::size_t> s(cards.size(), 1);
  for (std::size_t k = cards.size(); k-- > 1;) {
    s[k - 1] = s[k] * static_cast<std::size_t>(cards[k]);
  }
  return s;
}

// Visits every assignment of `cards` in row-major order together with the
// matching offset into a second table whose strides (per position of
// `cards`) are `sub_strides`.
template <class Fn>
void for_each_aligned(const std::vector<int>& cards, const std::vector<std::size_t>& sub_strides,
                      Fn&& fn) {
  const std::size_t total = product(cards);
  const std::size_t n = cards.size();
  std::vector<int> counter(n, 0);
  std::size_t sub = 0;
  for (std::size_t i = 0; i < total; ++i) {
    fn(i, sub);
    for (std::size_t k = n; k-- > 0;) {
      if (++counter[k] < cards[k]) {
        sub += sub_strides[k];
        break;
      }
      sub -= static_cast<std::size_t>(cards[k] - 1) * sub_strides[k];
      counter[k] = 0;
    }
  }
}

// Strides of `small` expressed per position of `big` (0 where absent).
std::vector<std::size_t> aligned_strides(const Factor& big, const Factor& small) {
  const auto small_strides = strides_of(small.cards);
  std::vector<std::size_t> out(big.vars.size(), 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < big.vars.size() && j < small.vars.size(); ++i) {
    if (big.vars[i] == small.vars[j]) {
      out[i] = small_strides[j];
      ++j;
    }
  }
  if (j != small.vars.size()) throw InvalidArgument("factor scope is not a subset");
  return out;
}

double max_value(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteNetwork

int DiscreteNetwork::add_node(std::string name, int cardinality, std::vector<int> parents,
                              std::vector<double> cpt) {
  if (cardinality < 1) throw InvalidArgument("node cardinality must be positive");
  std::size_t rows = 1;
  for (int p : parents) {
    if (p < 0 || p >= size()) throw InvalidArgument("parent must be added before child");
    rows *= static_cast<std::size_t>(node(p).cardinality);
  }
  if (cpt.size() != rows * static_cast<std::size_t>(cardinality)) {
    throw InvalidArgument("CPT size mismatch for node " + name);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (int s = 0; s < cardinality; ++s) {
      const double v = cpt[r * static_cast<std::size_t>(cardinality) + static_cast<std::size_t>(s)];
      if (v < 0.0) throw InvalidArgument("negative CPT entry in node " + name);
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidArgument("CPT row does not sum to 1 in node " + name);
    }
  }
  nodes_.push_back(NetworkNode{std::move(name), cardinality, std::move(parents), std::move(cpt)});
  return size() - 1;
}

std::vector<int> DiscreteNetwork::cardinalities() const {
  std::vector<int> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.cardinality);
  return out;
}

std::optional<int> DiscreteNetwork::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (node(i).name == name) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Factors

Factor Factor::ones(std::vector<int> vars, std::vector<int> cards) {
  Factor f{std::move(vars), std::move(cards), {}};
  f.values.assign(product(f.cards), 1.0);
  return f;
}

double Factor::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Factor cpt_factor(const DiscreteNetwork& net, int id) {
  const NetworkNode& n = net.node(id);
  std::vector<int> table_vars = n.parents;
  table_vars.push_back(id);
  std::vector<int> table_cards;
  for (int v : table_vars) table_cards.push_back(net.node(v).cardinality);
  const auto table_strides = strides_of(table_cards);

  std::vector<std::size_t> order(table_vars.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return table_vars[a] < table_vars[b]; });
  Factor f;
  std::vector<std::size_t> sub;
  for (std::size_t k : order) {
    if (!f.vars.empty() && f.vars.back() == table_vars[k]) {
      throw InvalidArgument("duplicate parent in node " + n.name);
    }
    f.vars.push_back(table_vars[k]);
    f.cards.push_back(table_cards[k]);
    sub.push_back(table_strides[k]);
  }
  f.values.resize(product(f.cards));
  for_each_aligned(f.cards, sub, [&](std::size_t i, std::size_t j) { f.values[i] = n.cpt[j]; });
  return f;
}

Factor restrict_factor(const Factor& f, const Evidence& evidence) {
  const auto strides = strides_of(f.cards);
  Factor out;
  std::vector<std::size_t> sub;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    auto it = evidence.find(f.vars[k]);
    if (it != evidence.end()) {
      if (it->second < 0 || it->second >= f.cards[k]) {
        throw InvalidArgument("evidence state out of range");
      }
      offset += static_cast<std::size_t>(it->second) * strides[k];
    } else {
      out.vars.push_back(f.vars[k]);
      out.cards.push_back(f.cards[k]);
      sub.push_back(strides[k]);
    }
  }
  out.values.resize(product(out.cards));
  for_each_aligned(out.cards, sub,
                   [&](std::size_t i, std::size_t j) { out.values[i] = f.values[offset + j]; });
  return out;
}

Factor marginalize(const Factor& f, const std::vector<int>& keep) {
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (std::binary_search(keep.begin(), keep.end(), f.vars[k])) {
      out.vars.push_back(f.vars[k]);
      out.cards.push_back(f.cards[k]);
    }
  }
  out.values.assign(product(out.cards), 0.0);
  const auto sub = aligned_strides(f, out);
  for_each_aligned(f.cards, sub,
                   [&](std::size_t i, std::size_t j) { out.values[j] += f.values[i]; });
  return out;
}

void multiply_into(Factor& big, const Factor& small) {
  const auto sub = aligned_strides(big, small);
  for_each_aligned(big.cards, sub,
                   [&](std::size_t i, std::size_t j) { big.values[i] *= small.values[j]; });
}

// ---------------------------------------------------------------------------
// Graphs

UndirectedGraph::UndirectedGraph(std::vector<int> labels)
    : labels_(std::move(labels)),
      adjacency_(labels_.size()),
      matrix_(labels_.size() * labels_.size(), 0) {}

std::optional<int> UndirectedGraph::vertex_of(int label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it != labels_.end() && *it == label && std::is_sorted(labels_.begin(), labels_.end())) {
    return static_cast<int>(it - labels_.begin());
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

void UndirectedGraph::add_edge(int a, int b) {
  if (a == b || has_edge(a, b)) return;
  const std::size_t n = labels_.size();
  matrix_[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = 1;
  matrix_[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)] = 1;
  adjacency_[static_cast<std::size_t>(a)].push_back(b);
  adjacency_[static_cast<std::size_t>(b)].push_back(a);
}

bool UndirectedGraph::has_edge(int a, int b) const {
  return matrix_[static_cast<std::size_t>(a) * labels_.size() + static_cast<std::size_t>(b)] != 0;
}

int UndirectedGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& a : adjacency_) total += a.size();
  return static_cast<int>(total / 2);
}

std::vector<std::pair<int, int>> UndirectedGraph::labelled_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < vertex_count(); ++v) {
    for (int w : neighbors(v)) {
      if (label(v) < label(w)) out.emplace_back(label(v), label(w));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool UndirectedGraph::has_cycle_within(const std::vector<int>& subset) const {
  std::vector<bool> in(labels_.size(), false);
  for (int l : subset) {
    if (auto v = vertex_of(l)) in[static_cast<std::size_t>(*v)] = true;
  }
  std::vector<int> parent(labels_.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
    return v;
  };
  for (int v = 0; v < vertex_count(); ++v) {
    if (!in[static_cast<std::size_t>(v)]) continue;
    for (int w : neighbors(v)) {
      if (w < v || !in[static_cast<std::size_t>(w)]) continue;
      const int a = find(v);
      const int b = find(w);
      if (a == b) return true;
      parent[static_cast<std::size_t>(a)] = b;
    }
  }
  return false;
}

bool UndirectedGraph::has_cycle() const { return has_cycle_within(labels_); }

UndirectedGraph moralize(const DiscreteNetwork& net) { return moralize(net, Evidence{}); }

UndirectedGraph moralize(const DiscreteNetwork& net, const Evidence& observed) {
  std::vector<int> labels;
  std::vector<int> vertex(static_cast<std::size_t>(net.size()), -1);
  for (int i = 0; i < net.size(); ++i) {
    if (observed.count(i)) continue;
    vertex[static_cast<std::size_t>(i)] = static_cast<int>(labels.size());
    labels.push_back(i);
  }
  UndirectedGraph g(std::move(labels));
  for (int i = 0; i < net.size(); ++i) {
    std::vector<int> family;
    for (int p : net.node(i).parents) {
      if (vertex[static_cast<std::size_t>(p)] >= 0) family.push_back(vertex[static_cast<std::size_t>(p)]);
    }
    if (vertex[static_cast<std::size_t>(i)] >= 0) family.push_back(vertex[static_cast<std::size_t>(i)]);
    for (std::size_t a = 0; a < family.size(); ++a) {
      for (std::size_t b = a + 1; b < family.size(); ++b) g.add_edge(family[a], family[b]);
    }
  }
  return g;
}

Triangulation triangulate(const UndirectedGraph& graph, std::span<const int> cardinalities) {
  const int n = graph.vertex_count();
  UndirectedGraph chordal = graph;
  // Working adjacency over live vertices.
  std::vector<std::vector<int>> live(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) live[static_cast<std::size_t>(v)] = graph.neighbors(v);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  std::vector<bool> dirty(static_cast<std::size_t>(n), true);
  std::vector<long> fill(static_cast<std::size_t>(n), 0);
  std::vector<double> weight(static_cast<std::size_t>(n), 0.0);

  auto card = [&](int v) {
    return static_cast<double>(cardinalities[static_cast<std::size_t>(graph.label(v))]);
  };
  auto refresh = [&](int v) {
    const auto& nb = live[static_cast<std::size_t>(v)];
    long f = 0;
    double w = card(v);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      w *= card(nb[a]);
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!chordal.has_edge(nb[a], nb[b])) ++f;
      }
    }
    fill[static_cast<std::size_t>(v)] = f;
    weight[static_cast<std::size_t>(v)] = w;
    dirty[static_cast<std::size_t>(v)] = false;
  };

  Triangulation out{chordal, {}, {}};
  std::vector<std::vector<int>> candidates;
  std::vector<std::vector<int>> containing(static_cast<std::size_t>(n));  // vertex -> candidate ids
  std::vector<bool> maximal;

  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      if (dirty[static_cast<std::size_t>(v)]) refresh(v);
      if (best < 0) {
        best = v;
        continue;
      }
      const auto bv = static_cast<std::size_t>(best);
      const auto vv = static_cast<std::size_t>(v);
      if (fill[vv] != fill[bv]) {
        if (fill[vv] < fill[bv]) best = v;
      } else if (weight[vv] != weight[bv]) {
        if (weight[vv] < weight[bv]) best = v;
      } else if (graph.label(v) < graph.label(best)) {
        best = v;
      }
    }
    const auto nb = live[static_cast<std::size_t>(best)];
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!chordal.has_edge(nb[a], nb[b])) {
          chordal.add_edge(nb[a], nb[b]);
          live[static_cast<std::size_t>(nb[a])].push_back(nb[b]);
          live[static_cast<std::size_t>(nb[b])].push_back(nb[a]);
        }
      }
    }
    for (int w : nb) {
      auto& lw = live[static_cast<std::size_t>(w)];
      lw.erase(std::remove(lw.begin(), lw.end(), best), lw.end());
      dirty[static_cast<std::size_t>(w)] = true;
      for (int u : lw) dirty[static_cast<std::size_t>(u)] = true;
    }
    alive[static_cast<std::size_t>(best)] = false;
    out.elimination_order.push_back(graph.label(best));

    std::vector<int> cand = nb;
    cand.push_back(best);
    std::sort(cand.begin(), cand.end());
    // Only earlier candidates can contain this one, and they must contain `best`.
    bool is_max = true;
    for (int c : containing[static_cast<std::size_t>(best)]) {
      const auto& other = candidates[static_cast<std::size_t>(c)];
      if (std::includes(other.begin(), other.end(), cand.begin(), cand.end())) {
        is_max = false;
        break;
      }
    }
    const int id = static_cast<int>(candidates.size());
    for (int v : cand) containing[static_cast<std::size_t>(v)].push_back(id);
    candidates.push_back(cand);
    maximal.push_back(is_max);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!maximal[i]) continue;
    std::vector<int> labels;
    for (int v : candidates[i]) labels.push_back(graph.label(v));
    std::sort(labels.begin(), labels.end());
    out.cliques.push_back(std::move(labels));
  }
  out.chordal = std::move(chordal);
  return out;
}

bool is_chordal(const UndirectedGraph& g) {
  // Maximum cardinality search; the reverse visit order must be a perfect
  // elimination ordering.
  const int n = g.vertex_count();
  std::vector<int> weight(static_cast<std::size_t>(n), 0);
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (position[static_cast<std::size_t>(v)] >= 0) continue;
      if (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]) best = v;
    }
    position[static_cast<std::size_t>(best)] = i;
    order.push_back(best);
    for (int w : g.neighbors(best)) {
      if (position[static_cast<std::size_t>(w)] < 0) ++weight[static_cast<std::size_t>(w)];
    }
  }
  // For each v, its earlier-visited neighbours must form a clique; checking
  // against the latest of them suffices.
  for (int v : order) {
    int latest = -1;
    for (int w : g.neighbors(v)) {
      if (position[static_cast<std::size_t>(w)] < position[static_cast<std::size_t>(v)] &&
          (latest < 0 || position[static_cast<std::size_t>(w)] > position[static_cast<std::size_t>(latest)])) {
        latest = w;
      }
    }
    if (latest < 0) continue;
    for (int w : g.neighbors(v)) {
      if (w == latest) continue;
      if (position[static_cast<std::size_t>(w)] < position[static_cast<std::size_t>(v)] &&
          !g.has_edge(w, latest)) {
        return false;
      }
    }
  }
  return true;
}

std::uint64_t largest_clique_cost(const std::vector<std::vector<int>>& cliques,
                                  std::span<const int> cardinalities) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t best = 0;
  for (const auto& c : cliques) {
    std::uint64_t cost = 1;
    for (int v : c) {
      const auto k = static_cast<std::uint64_t>(cardinalities[static_cast<std::size_t>(v)]);
      cost = (k != 0 && cost > kMax / k) ? kMax : cost * k;
    }
    best = std::max(best, cost);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Propagation

std::uint64_t CliqueTree::largest_clique_cost() const {
  return mapx::largest_clique_cost(cliques, cardinalities);
}

double CliqueTree::max_separator_discrepancy() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const int p = parent[c];
    if (p < 0) continue;
    const auto& sep = separators[c].vars;
    Factor a = marginalize(potentials[c], sep);
    Factor b = marginalize(potentials[static_cast<std::size_t>(p)], sep);
    const double sa = a.sum();
    const double sb = b.sum();
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a.values[i] / sa - b.values[i] / sb));
    }
  }
  return worst;
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

CliqueTree propagate(const DiscreteNetwork& net, const Evidence& evidence) {
  CliqueTree tree;
  tree.cardinalities = net.cardinalities();
  tree.evidence = evidence;
  for (const auto& [node, state] : evidence) {
    if (node < 0 || node >= net.size()) throw InvalidArgument("evidence on unknown node");
    if (state < 0 || state >= net.node(node).cardinality) {
      throw InvalidArgument("evidence state out of range");
    }
  }

  double log_scale = 0.0;
  std::vector<Factor> factors;
  for (int i = 0; i < net.size(); ++i) {
    Factor f = restrict_factor(cpt_factor(net, i), evidence);
    if (f.vars.empty()) {
      if (f.values[0] <= 0.0) throw ZeroProbabilityEvidence("evidence has probability zero");
      log_scale += std::log(f.values[0]);
      continue;
    }
    factors.push_back(std::move(f));
  }

  const UndirectedGraph graph = moralize(net, evidence);
  Triangulation tri = triangulate(graph, tree.cardinalities);
  tree.cliques = std::move(tri.cliques);
  const std::size_t nc = tree.cliques.size();

  // Maximum-weight spanning tree on separator size (Kruskal), then join any
  // remaining components through empty separators.
  std::vector<std::vector<int>> by_var(static_cast<std::size_t>(net.size()));
  for (std::size_t c = 0; c < nc; ++c) {
    for (int v : tree.cliques[c]) by_var[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
  }
  std::vector<std::tuple<int, int, int>> pairs;  // (-|sep|, i, j)
  {
    std::vector<std::pair<int, int>> seen;
    for (const auto& list : by_var) {
      for (std::size_t a = 0; a < list.size(); ++a) {
        for (std::size_t b = a + 1; b < list.size(); ++b) seen.emplace_back(list[a], list[b]);
      }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto [i, j] : seen) {
      const auto sep = intersect(tree.cliques[static_cast<std::size_t>(i)],
                                 tree.cliques[static_cast<std::size_t>(j)]);
      pairs.emplace_back(-static_cast<int>(sep.size()), i, j);
    }
    std::sort(pairs.begin(), pairs.end());
  }
  std::vector<int> uf(nc);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int v) {
    while (uf[static_cast<std::size_t>(v)] != v) {
      uf[static_cast<std::size_t>(v)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(v)])];
      v = uf[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<std::vector<int>> adj(nc);
  for (auto [w, i, j] : pairs) {
    const int a = find(i);
    const int b = find(j);
    if (a == b) continue;
    uf[static_cast<std::size_t>(a)] = b;
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  for (std::size_t c = 1; c < nc; ++c) {
    const int a = find(0);
    const int b = find(static_cast<int>(c));
    if (a == b) continue;
    uf[static_cast<std::size_t>(b)] = a;
    adj[0].push_back(static_cast<int>(c));
    adj[c].push_back(0);
  }

  // Root at clique 0; BFS order gives parents before children.
  tree.parent.assign(nc, -1);
  std::vector<int> order;
  if (nc > 0) {
    std::vector<bool> visited(nc, false);
    std::deque<int> queue{0};
    visited[0] = true;
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      order.push_back(c);
      auto next = adj[static_cast<std::size_t>(c)];
      std::sort(next.begin(), next.end());
      for (int d : next) {
        if (visited[static_cast<std::size_t>(d)]) continue;
        visited[static_cast<std::size_t>(d)] = true;
        tree.parent[static_cast<std::size_t>(d)] = c;
        queue.push_back(d);
      }
    }
  }

  tree.potentials.reserve(nc);
  for (const auto& c : tree.cliques) {
    std::vector<int> cards;
    for (int v : c) cards.push_back(tree.cardinalities[static_cast<std::size_t>(v)]);
    tree.potentials.push_back(Factor::ones(c, std::move(cards)));
  }
  for (const auto& f : factors) {
    // Smallest-index clique covering the factor's scope.
    int home = -1;
    for (int c : by_var[static_cast<std::size_t>(f.vars.front())]) {
      const auto& cl = tree.cliques[static_cast<std::size_t>(c)];
      if (std::includes(cl.begin(), cl.end(), f.vars.begin(), f.vars.end())) {
        home = c;
        break;
      }
    }
    if (home < 0) throw Error("internal: factor scope not covered by any clique");
    multiply_into(tree.potentials[static_cast<std::size_t>(home)], f);
  }

  tree.separators.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const int p = tree.parent[c];
    if (p < 0) continue;
    const auto sep = intersect(tree.cliques[c], tree.cliques[static_cast<std::size_t>(p)]);
    std::vector<int> cards;
    for (int v : sep) cards.push_back(tree.cardinalities[static_cast<std::size_t>(v)]);
    tree.separators[c] = Factor::ones(sep, std::move(cards));
  }

  auto rescale = [&](std::vector<double>& values) {
    const double m = max_value(values);
    if (m <= 0.0) throw ZeroProbabilityEvidence("evidence has probability zero");
    scale(values, 1.0 / m);
    return std::log(m);
  };

  // Collect towards the root.
  for (std::size_t k = order.size(); k-- > 1;) {
    const auto c = static_cast<std::size_t>(order[k]);
    const auto p = static_cast<std::size_t>(tree.parent[c]);
    log_scale += rescale(tree.potentials[c].values);
    Factor msg = marginalize(tree.potentials[c], tree.separators[c].vars);
    multiply_into(tree.potentials[p], msg);
    tree.separators[c] = std::move(msg);
  }
  if (nc > 0) {
    log_scale += rescale(tree.potentials[0].values);
    const double z = tree.potentials[0].sum();
    tree.log_evidence = log_scale + std::log(z);
  } else {
    tree.log_evidence = log_scale;
  }

  // Distribute from the root.
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto c = static_cast<std::size_t>(order[k]);
    const auto p = static_cast<std::size_t>(tree.parent[c]);
    Factor fresh = marginalize(tree.potentials[p], tree.separators[c].vars);
    rescale(fresh.values);
    Factor ratio = fresh;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      const double old = tree.separators[c].values[i];
      ratio.values[i] = old > 0.0 ? fresh.values[i] / old : 0.0;
    }
    multiply_into(tree.potentials[c], ratio);
    rescale(tree.potentials[c].values);
    tree.separators[c] = std::move(fresh);
  }

  for (auto& f : tree.potentials) scale(f.values, 1.0 / f.sum());
  for (std::size_t c = 0; c < nc; ++c) {
    if (tree.parent[c] >= 0) scale(tree.separators[c].values, 1.0 / tree.separators[c].sum());
  }
  return tree;
}

std::vector<double> marginal(const CliqueTree& tree, int node) {
  if (node < 0 || static_cast<std::size_t>(node) >= tree.cardinalities.size()) {
    throw InvalidArgument("unknown node");
  }
  const int card = tree.cardinalities[static_cast<std::size_t>(node)];
  if (auto it = tree.evidence.find(node); it != tree.evidence.end()) {
    std::vector<double> point(static_cast<std::size_t>(card), 0.0);
    point[static_cast<std::size_t>(it->second)] = 1.0;
    return point;
  }
  std::size_t best = tree.cliques.size();
  for (std::size_t c = 0; c < tree.cliques.size(); ++c) {
    const auto& cl = tree.cliques[c];
    if (!std::binary_search(cl.begin(), cl.end(), node)) continue;
    if (best == tree.cliques.size() || tree.potentials[c].size() < tree.potentials[best].size()) {
      best = c;
    }
  }
  if (best == tree.cliques.size()) throw Error("internal: node not in any clique");
  Factor m = marginalize(tree.potentials[best], {node});
  const double s = m.sum();
  for (double& v : m.values) v /= s;
  return m.values;
}

}  // namespace mapx
