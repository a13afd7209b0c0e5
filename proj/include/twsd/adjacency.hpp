#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twsd/corpus.hpp"

namespace twsd {

using NodeId = std::size_t;

// Label of the distinct node given to one annotated ambiguous occurrence.
std::string occurrence_label(std::string_view word, std::size_t occurrence_index);

/// Directed, weighted word-adjacency network. w(i, j) counts how often
/// lemma i immediately precedes lemma j; annotated occurrences of an
/// ambiguous word each get their own node.
class WordAdjacencyNetwork {
 public:
  using Edge = std::pair<NodeId, NodeId>;

  NodeId intern(const std::string& label);
  std::optional<NodeId> find(std::string_view label) const;
  void increment(NodeId from, NodeId to, std::uint64_t by = 1);

  std::size_t node_count() const { return labels_.size(); }
  const std::string& label(NodeId node) const { return labels_.at(node); }
  std::uint64_t weight(NodeId from, NodeId to) const;
  std::uint64_t total_weight() const;
  // Ordered by (from, to).
  const std::map<Edge, std::uint64_t>& weights() const { return weights_; }

  void bind_occurrence(const std::string& document_id, std::size_t position, NodeId node);
  std::optional<NodeId> occurrence_node(const std::string& document_id, std::size_t position) const;

  // `from<TAB>to<TAB>weight` per edge, labels as node names.
  void write_edge_list(std::ostream& out) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::map<Edge, std::uint64_t> weights_;
  std::map<std::pair<std::string, std::size_t>, NodeId> occurrences_;
};

// Occurrences are numbered per word in annotation order.
WordAdjacencyNetwork build_network(std::span<const TokenStream> streams,
                                   std::span<const SenseAnnotation> annotations);

// Simple undirected graph: sorted adjacency lists, no loops, no multi-edges.
using UndirectedGraph = std::vector<std::vector<NodeId>>;

UndirectedGraph undirected_projection(const WordAdjacencyNetwork& network);

struct NodeTopology {
  // Index h-1 holds the value for hierarchical level h.
  std::vector<double> hierarchical_degree;
  std::vector<double> hierarchical_clustering;
  double neighbor_degree_mean = 0.0;
  double neighbor_degree_stddev = 0.0;
  double average_shortest_path = 0.0;
  double betweenness = 0.0;

  // Flattened in the order above.
  std::vector<double> values() const;
  static std::vector<std::string> names(std::size_t levels);
};

// Unnormalized betweenness of every node, each unordered pair counted once.
std::vector<double> betweenness_centrality(const UndirectedGraph& graph);

// Caches the undirected projection and betweenness so that per-node
// queries only cost one BFS.
class TopologyAnalyzer {
 public:
  explicit TopologyAnalyzer(const WordAdjacencyNetwork& network, std::size_t levels = 2);
  explicit TopologyAnalyzer(UndirectedGraph graph, std::size_t levels = 2);

  NodeTopology at(NodeId node) const;
  std::size_t levels() const { return levels_; }
  const UndirectedGraph& graph() const { return graph_; }

 private:
  UndirectedGraph graph_;
  std::size_t levels_;
  std::vector<double> betweenness_;
};

NodeTopology node_topology(const WordAdjacencyNetwork& network, NodeId node, std::size_t levels = 2);

}  // namespace twsd
