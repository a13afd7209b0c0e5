#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "twsd/features.hpp"

namespace twsd {

using VertexId = std::size_t;

double euclidean(std::span<const double> a, std::span<const double> b);

struct GraphConfig {
  double epsilon = 0.0;          // radius of the epsilon rule
  std::size_t kappa = 3;         // neighbor count of the kNN rule
  double fallback_factor = 3.0;  // test insertion falls back to kNN within epsilon * factor

  void validate() const;
};

struct Neighbor {
  VertexId vertex;
  double distance;

  bool operator==(const Neighbor&) const = default;
};

enum class NeighborhoodRule { epsilon_radius, nearest_neighbors, incorporated };

/// One class's component in attribute space. Adjacency lists are kept
/// sorted by (distance, vertex id), which is the order the tourist walk
/// scans them in.
class ClassGraph {
 public:
  static constexpr std::size_t kNoInstance = std::numeric_limits<std::size_t>::max();

  explicit ClassGraph(SenseId class_id = 0) : class_id_(class_id) {}

  SenseId class_id() const { return class_id_; }
  std::size_t size() const { return positions_.size(); }
  std::size_t edge_count() const;

  VertexId add_vertex(std::vector<double> position, std::size_t instance = kNoInstance,
                      NeighborhoodRule rule = NeighborhoodRule::incorporated);
  // Idempotent; self loops are ignored.
  void add_edge(VertexId u, VertexId v);
  bool has_edge(VertexId u, VertexId v) const;

  std::span<const double> position(VertexId v) const { return positions_.at(v); }
  std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_.at(v); }
  // Row of the source dataset, or kNoInstance for incorporated test points.
  std::size_t instance(VertexId v) const { return instances_.at(v); }
  NeighborhoodRule rule(VertexId v) const { return rules_.at(v); }

  // Bumped on every mutation; cached walk statistics key on it.
  std::uint64_t revision() const { return revision_; }
  // Structural hash of positions and edges.
  std::uint64_t fingerprint() const;

  void write_edge_list(std::ostream& out) const;

 private:
  SenseId class_id_;
  std::vector<std::vector<double>> positions_;
  std::vector<std::size_t> instances_;
  std::vector<NeighborhoodRule> rules_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::uint64_t revision_ = 0;
};

std::size_t component_count(const ClassGraph& graph);

/// Builds one component per class. Vertex i links to its same-class
/// epsilon-ball when that ball holds more than kappa vertices, otherwise to
/// its kappa nearest same-class vertices (ties by lower row). Disconnected
/// pieces are then bridged by repeatedly adding the shortest edge between
/// two different pieces. Graphs come back ordered by class id.
std::vector<ClassGraph> build_training_graph(const Dataset& dataset, const GraphConfig& config);

// Median Euclidean distance over all same-class pairs.
double median_same_class_distance(const Dataset& dataset);

struct InsertionView {
  SenseId class_id;
  std::vector<Neighbor> links;

  bool empty() const { return links.empty(); }
};

/// Per class: vertices strictly within epsilon of x. An empty ball falls
/// back to the kappa nearest vertices if the nearest one is within
/// epsilon * fallback_factor; otherwise the view stays empty.
std::vector<InsertionView> insert_test(std::span<const double> x, std::span<const ClassGraph> graphs,
                                       const GraphConfig& config);

enum class CommitMode { discard, incorporate };

/// Incorporate adds x to the predicted class's component, linked per its
/// insertion view (or to the kappa nearest vertices when that view is
/// empty, which keeps the component connected). Discard leaves graphs as
/// they are.
void commit_or_discard(std::span<const double> x, SenseId predicted, CommitMode mode,
                       std::vector<ClassGraph>& graphs, const GraphConfig& config);

}  // namespace twsd
