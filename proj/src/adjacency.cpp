#include "twsd/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "twsd/error.hpp"

namespace twsd {

std::string occurrence_label(std::string_view word, std::size_t occurrence_index) {
  return std::string(word) + "#" + std::to_string(occurrence_index);
}

NodeId WordAdjacencyNetwork::intern(const std::string& label) {
  auto [it, inserted] = index_.try_emplace(label, labels_.size());
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<NodeId> WordAdjacencyNetwork::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void WordAdjacencyNetwork::increment(NodeId from, NodeId to, std::uint64_t by) {
  if (from >= labels_.size() || to >= labels_.size()) throw MissingNode("edge endpoint out of range");
  weights_[{from, to}] += by;
}

std::uint64_t WordAdjacencyNetwork::weight(NodeId from, NodeId to) const {
  auto it = weights_.find({from, to});
  return it == weights_.end() ? 0 : it->second;
}

std::uint64_t WordAdjacencyNetwork::total_weight() const {
  std::uint64_t total = 0;
  for (const auto& [edge, w] : weights_) total += w;
  return total;
}

void WordAdjacencyNetwork::bind_occurrence(const std::string& document_id, std::size_t position, NodeId node) {
  occurrences_[{document_id, position}] = node;
}

std::optional<NodeId> WordAdjacencyNetwork::occurrence_node(const std::string& document_id,
                                                            std::size_t position) const {
  auto it = occurrences_.find({document_id, position});
  if (it == occurrences_.end()) return std::nullopt;
  return it->second;
}

void WordAdjacencyNetwork::write_edge_list(std::ostream& out) const {
  for (const auto& [edge, w] : weights_) {
    out << labels_[edge.first] << '\t' << labels_[edge.second] << '\t' << w << '\n';
  }
}

WordAdjacencyNetwork build_network(std::span<const TokenStream> streams,
                                   std::span<const SenseAnnotation> annotations) {
  std::map<std::pair<std::string, std::size_t>, std::string> occurrence_labels;
  std::map<std::string, std::size_t> per_word;
  for (const auto& a : annotations) {
    auto key = std::make_pair(a.document_id, a.position);
    if (occurrence_labels.count(key)) continue;
    occurrence_labels[key] = occurrence_label(a.word, per_word[a.word]++);
  }

  WordAdjacencyNetwork network;
  // Occurrence nodes first, so their ids follow annotation order.
  for (const auto& a : annotations) {
    network.bind_occurrence(a.document_id, a.position,
                            network.intern(occurrence_labels.at({a.document_id, a.position})));
  }

  for (const auto& stream : streams) {
    std::optional<NodeId> previous;
    for (std::size_t pos = 0; pos < stream.lemmas.size(); ++pos) {
      auto bound = network.occurrence_node(stream.document_id, pos);
      NodeId node = bound ? *bound : network.intern(stream.lemmas[pos]);
      if (previous) network.increment(*previous, node);
      previous = node;
    }
  }
  return network;
}

UndirectedGraph undirected_projection(const WordAdjacencyNetwork& network) {
  UndirectedGraph graph(network.node_count());
  for (const auto& [edge, w] : network.weights()) {
    if (edge.first == edge.second) continue;
    graph[edge.first].push_back(edge.second);
    graph[edge.second].push_back(edge.first);
  }
  for (auto& adjacent : graph) {
    std::sort(adjacent.begin(), adjacent.end());
    adjacent.erase(std::unique(adjacent.begin(), adjacent.end()), adjacent.end());
  }
  return graph;
}

std::vector<double> NodeTopology::values() const {
  std::vector<double> out = hierarchical_degree;
  out.insert(out.end(), hierarchical_clustering.begin(), hierarchical_clustering.end());
  out.push_back(neighbor_degree_mean);
  out.push_back(neighbor_degree_stddev);
  out.push_back(average_shortest_path);
  out.push_back(betweenness);
  return out;
}

std::vector<std::string> NodeTopology::names(std::size_t levels) {
  std::vector<std::string> out;
  for (std::size_t h = 1; h <= levels; ++h) out.push_back("degree_" + std::to_string(h));
  for (std::size_t h = 1; h <= levels; ++h) out.push_back("clustering_" + std::to_string(h));
  out.insert(out.end(), {"neighbor_degree_mean", "neighbor_degree_std", "avg_shortest_path", "betweenness"});
  return out;
}

std::vector<double> betweenness_centrality(const UndirectedGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<double> centrality(n, 0.0);
  std::vector<std::vector<NodeId>> predecessors(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> distance(n);
  std::vector<NodeId> order;
  order.reserve(n);

  for (NodeId s = 0; s < n; ++s) {
    for (NodeId v = 0; v < n; ++v) predecessors[v].clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(distance.begin(), distance.end(), -1);
    order.clear();

    sigma[s] = 1.0;
    distance[s] = 0;
    std::queue<NodeId> queue;
    queue.push(s);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop();
      order.push_back(v);
      for (NodeId w : graph[v]) {
        if (distance[w] < 0) {
          distance[w] = distance[v] + 1;
          queue.push(w);
        }
        if (distance[w] == distance[v] + 1) {
          sigma[w] += sigma[v];
          predecessors[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (NodeId v : predecessors[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  // Every unordered pair was accumulated from both endpoints.
  for (double& c : centrality) c /= 2.0;
  return centrality;
}

TopologyAnalyzer::TopologyAnalyzer(const WordAdjacencyNetwork& network, std::size_t levels)
    : TopologyAnalyzer(undirected_projection(network), levels) {}

TopologyAnalyzer::TopologyAnalyzer(UndirectedGraph graph, std::size_t levels)
    : graph_(std::move(graph)), levels_(levels), betweenness_(betweenness_centrality(graph_)) {
  if (levels_ == 0) throw InvalidArgument("hierarchical levels must be >= 1");
}

NodeTopology TopologyAnalyzer::at(NodeId node) const {
  if (node >= graph_.size()) throw MissingNode("node " + std::to_string(node) + " not in network");

  std::vector<long> distance(graph_.size(), -1);
  std::vector<std::vector<NodeId>> rings(levels_ + 1);
  distance[node] = 0;
  std::queue<NodeId> queue;
  queue.push(node);
  double path_sum = 0.0;
  std::size_t reachable = 0;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop();
    if (v != node) {
      path_sum += static_cast<double>(distance[v]);
      ++reachable;
    }
    if (distance[v] >= 1 && static_cast<std::size_t>(distance[v]) <= levels_) rings[distance[v]].push_back(v);
    for (NodeId w : graph_[v]) {
      if (distance[w] < 0) {
        distance[w] = distance[v] + 1;
        queue.push(w);
      }
    }
  }

  NodeTopology topo;
  for (std::size_t h = 1; h <= levels_; ++h) {
    auto& ring = rings[h];
    std::sort(ring.begin(), ring.end());
    topo.hierarchical_degree.push_back(static_cast<double>(ring.size()));
    double density = 0.0;
    if (ring.size() >= 2) {
      std::size_t links = 0;
      for (NodeId v : ring) {
        for (NodeId w : graph_[v]) {
          if (w > v && std::binary_search(ring.begin(), ring.end(), w)) ++links;
        }
      }
      density = static_cast<double>(links) / (static_cast<double>(ring.size()) * (ring.size() - 1) / 2.0);
    }
    topo.hierarchical_clustering.push_back(density);
  }

  const auto& neighbors = graph_[node];
  if (!neighbors.empty()) {
    double sum = 0.0, sum_sq = 0.0;
    for (NodeId w : neighbors) {
      double d = static_cast<double>(graph_[w].size());
      sum += d;
      sum_sq += d * d;
    }
    double n = static_cast<double>(neighbors.size());
    topo.neighbor_degree_mean = sum / n;
    topo.neighbor_degree_stddev = std::sqrt(std::max(0.0, sum_sq / n - topo.neighbor_degree_mean * topo.neighbor_degree_mean));
  }
  topo.average_shortest_path = reachable ? path_sum / static_cast<double>(reachable) : 0.0;
  topo.betweenness = betweenness_[node];
  return topo;
}

NodeTopology node_topology(const WordAdjacencyNetwork& network, NodeId node, std::size_t levels) {
  if (node >= network.node_count()) throw MissingNode("node " + std::to_string(node) + " not in network");
  return TopologyAnalyzer(network, levels).at(node);
}

}  // namespace twsd
