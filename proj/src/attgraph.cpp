#include "twsd/attgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <tuple>

#include "twsd/error.hpp"

namespace twsd {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return std::tie(a.distance, a.vertex) < std::tie(b.distance, b.vertex);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // FNV-1a over the 8 bytes of v.
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t bits(double d) {
  std::uint64_t out;
  static_assert(sizeof out == sizeof d);
  std::memcpy(&out, &d, sizeof out);
  return out;
}

// Nearest `count` entries of `candidates`, ordered by (distance, vertex).
std::vector<Neighbor> nearest(std::vector<Neighbor> candidates, std::size_t count) {
  count = std::min(count, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count), candidates.end(),
                    neighbor_less);
  candidates.resize(count);
  return candidates;
}

}  // namespace

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dimension mismatch in distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

void GraphConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (kappa < 1) throw InvalidArgument("kappa must be >= 1");
  if (!(fallback_factor >= 0.0)) throw InvalidArgument("fallback factor must be >= 0");
}

std::size_t ClassGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& adjacent : adjacency_) total += adjacent.size();
  return total / 2;
}

VertexId ClassGraph::add_vertex(std::vector<double> position, std::size_t instance, NeighborhoodRule rule) {
  if (!positions_.empty() && position.size() != positions_.front().size()) {
    throw InvalidArgument("vertex dimension mismatch");
  }
  positions_.push_back(std::move(position));
  instances_.push_back(instance);
  rules_.push_back(rule);
  adjacency_.emplace_back();
  ++revision_;
  return positions_.size() - 1;
}

bool ClassGraph::has_edge(VertexId u, VertexId v) const {
  const auto& adjacent = adjacency_.at(u);
  return std::any_of(adjacent.begin(), adjacent.end(), [v](const Neighbor& n) { return n.vertex == v; });
}

void ClassGraph::add_edge(VertexId u, VertexId v) {
  if (u == v || has_edge(u, v)) return;
  double d = euclidean(positions_.at(u), positions_.at(v));
  auto insert_sorted = [](std::vector<Neighbor>& list, Neighbor n) {
    list.insert(std::upper_bound(list.begin(), list.end(), n, neighbor_less), n);
  };
  insert_sorted(adjacency_[u], {v, d});
  insert_sorted(adjacency_[v], {u, d});
  ++revision_;
}

std::uint64_t ClassGraph::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = mix(h, static_cast<std::uint64_t>(class_id_));
  for (VertexId v = 0; v < size(); ++v) {
    for (double x : positions_[v]) h = mix(h, bits(x));
    h = mix(h, instances_[v]);
    for (const auto& n : adjacency_[v]) {
      h = mix(h, n.vertex);
      h = mix(h, bits(n.distance));
    }
  }
  return h;
}

void ClassGraph::write_edge_list(std::ostream& out) const {
  for (VertexId u = 0; u < size(); ++u) {
    for (const auto& n : adjacency_[u]) {
      if (u < n.vertex) out << class_id_ << '\t' << u << '\t' << n.vertex << '\t' << n.distance << '\n';
    }
  }
}

std::size_t component_count(const ClassGraph& graph) {
  DisjointSets sets(graph.size());
  std::size_t count = graph.size();
  for (VertexId u = 0; u < graph.size(); ++u) {
    for (const auto& n : graph.neighbors(u)) {
      if (sets.unite(u, n.vertex)) --count;
    }
  }
  return count;
}

std::vector<ClassGraph> build_training_graph(const Dataset& dataset, const GraphConfig& config) {
  config.validate();
  dataset.validate();

  std::map<SenseId, std::vector<std::size_t>> rows_by_class;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& label = dataset.instances[r].label;
    if (!label) throw InvalidArgument("training instance " + std::to_string(r) + " is unlabeled");
    rows_by_class[*label].push_back(r);
  }

  std::vector<ClassGraph> graphs;
  for (const auto& [class_id, rows] : rows_by_class) {
    if (rows.size() < 2) {
      throw ClassTooSmall("class " + std::to_string(class_id) + " has " + std::to_string(rows.size()) +
                          " training instance(s); need at least 2");
    }
    const std::size_t n = rows.size();
    std::vector<std::vector<double>> distance(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        distance[i][j] = distance[j][i] =
            euclidean(dataset.instances[rows[i]].features, dataset.instances[rows[j]].features);
      }
    }

    // Vertex order follows row order, so a smaller vertex id is a smaller row.
    std::vector<std::vector<VertexId>> chosen(n);
    std::vector<NeighborhoodRule> rules(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Neighbor> ball, others;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        others.push_back({j, distance[i][j]});
        if (distance[i][j] < config.epsilon) ball.push_back({j, distance[i][j]});
      }
      if (ball.size() > config.kappa) {
        rules[i] = NeighborhoodRule::epsilon_radius;
        for (const auto& nb : ball) chosen[i].push_back(nb.vertex);
      } else {
        rules[i] = NeighborhoodRule::nearest_neighbors;
        for (const auto& nb : nearest(std::move(others), config.kappa)) chosen[i].push_back(nb.vertex);
      }
    }

    ClassGraph graph(class_id);
    for (std::size_t i = 0; i < n; ++i) graph.add_vertex(dataset.instances[rows[i]].features, rows[i], rules[i]);
    for (std::size_t i = 0; i < n; ++i) {
      for (VertexId j : chosen[i]) graph.add_edge(i, j);
    }

    // Bridge leftover pieces with the globally shortest crossing edges.
    DisjointSets sets(n);
    std::size_t pieces = n;
    for (VertexId u = 0; u < n; ++u) {
      for (const auto& nb : graph.neighbors(u)) {
        if (sets.unite(u, nb.vertex)) --pieces;
      }
    }
    if (pieces > 1) {
      std::vector<std::tuple<double, VertexId, VertexId>> pairs;
      pairs.reserve(n * (n - 1) / 2);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (sets.find(i) != sets.find(j)) pairs.emplace_back(distance[i][j], i, j);
        }
      }
      std::sort(pairs.begin(), pairs.end());
      for (const auto& [d, i, j] : pairs) {
        if (pieces == 1) break;
        if (sets.unite(i, j)) {
          graph.add_edge(i, j);
          --pieces;
        }
      }
    }
    graphs.push_back(std::move(graph));
  }
  return graphs;
}

double median_same_class_distance(const Dataset& dataset) {
  std::map<SenseId, std::vector<std::size_t>> rows_by_class;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (dataset.instances[r].label) rows_by_class[*dataset.instances[r].label].push_back(r);
  }
  std::vector<double> distances;
  for (const auto& [c, rows] : rows_by_class) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        distances.push_back(euclidean(dataset.instances[rows[i]].features, dataset.instances[rows[j]].features));
      }
    }
  }
  if (distances.empty()) throw InvalidArgument("no same-class pairs to take a median over");
  auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  if (distances.size() % 2 == 1) return *mid;
  double upper = *mid;
  double lower = *std::max_element(distances.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<InsertionView> insert_test(std::span<const double> x, std::span<const ClassGraph> graphs,
                                       const GraphConfig& config) {
  config.validate();
  std::vector<InsertionView> views;
  views.reserve(graphs.size());
  for (const auto& graph : graphs) {
    InsertionView view{graph.class_id(), {}};
    std::vector<Neighbor> all;
    all.reserve(graph.size());
    for (VertexId v = 0; v < graph.size(); ++v) {
      double d = euclidean(x, graph.position(v));
      all.push_back({v, d});
      if (d < config.epsilon) view.links.push_back({v, d});
    }
    if (view.links.empty() && !all.empty()) {
      auto closest = nearest(all, config.kappa);
      if (closest.front().distance <= config.epsilon * config.fallback_factor) view.links = std::move(closest);
    }
    std::sort(view.links.begin(), view.links.end(), neighbor_less);
    views.push_back(std::move(view));
  }
  return views;
}

void commit_or_discard(std::span<const double> x, SenseId predicted, CommitMode mode,
                       std::vector<ClassGraph>& graphs, const GraphConfig& config) {
  if (mode == CommitMode::discard) return;
  auto it = std::find_if(graphs.begin(), graphs.end(), [predicted](const ClassGraph& g) { return g.class_id() == predicted; });
  if (it == graphs.end()) throw InvalidArgument("no component for class " + std::to_string(predicted));

  auto views = insert_test(x, std::span<const ClassGraph>(&*it, 1), config);
  std::vector<Neighbor> links = views.front().links;
  if (links.empty()) {
    std::vector<Neighbor> all;
    for (VertexId v = 0; v < it->size(); ++v) all.push_back({v, euclidean(x, it->position(v))});
    links = nearest(std::move(all), config.kappa);
  }
  VertexId added = it->add_vertex(std::vector<double>(x.begin(), x.end()));
  for (const auto& link : links) it->add_edge(added, link.vertex);
}

}  // namespace twsd
