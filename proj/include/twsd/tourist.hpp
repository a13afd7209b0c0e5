#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "twsd/attgraph.hpp"

namespace twsd {

struct WalkConfig {
  std::size_t mu = 1;
  std::size_t mu_critical = 10;

  void validate() const;
};

struct WalkResult {
  std::size_t transient = 0;
  std::size_t cycle = 0;  // 0 means the walk hit a dead end
  // Transient followed by one period of the cycle; for a dead end, every
  // vertex visited up to and including the one the walker got stuck on.
  std::vector<VertexId> trajectory;

  bool dead_end() const { return cycle == 0; }
};

/// Deterministic tourist walk with memory mu.
///
/// The walker moves to the nearest adjacent vertex that is not among the
/// last mu visited vertices (the current vertex included, ties by lower
/// id). With mu = 0 nothing is forbidden and the walker stays put, so
/// t = 0 and c = 1. The walk's state is the vertex plus its ordered memory
/// window; the first repeated state fixes the period c, and t is the length
/// of the aperiodic prefix of the vertex trajectory. If every neighbor is
/// forbidden the walk stops with t = steps taken and c = 0.
WalkResult walk(const ClassGraph& graph, VertexId start, std::size_t mu);

/// Mean transient and cycle lengths over walks from every vertex, for each
/// mu in [0, mu_critical]. Per-walk traces are kept so that a virtual
/// insertion only re-runs walks that touch the new vertex's links.
struct ComponentWalkStats {
  struct Trace {
    std::size_t transient = 0;
    std::size_t cycle = 0;
    std::vector<VertexId> visited;  // sorted, unique
  };

  std::size_t mu_critical = 0;
  std::uint64_t revision = 0;  // ClassGraph::revision() the stats describe
  std::vector<double> mean_transient;  // indexed by mu
  std::vector<double> mean_cycle;
  std::vector<std::vector<Trace>> traces;  // [mu][start vertex]
};

ComponentWalkStats component_stats(const ClassGraph& graph, std::size_t mu_critical);

// Fills unlinked classes with the high raw variation (twice the largest
// linked one, or 1 if that is 0) and divides by the total. With every class
// linked and all raw variations 0 the result is uniform.
std::vector<double> normalize_variation(std::span<const double> raw, std::span<const char> linked);

struct InsertionVariation {
  std::vector<SenseId> classes;
  std::vector<char> linked;  // per class: did the view share a link
  // Indexed [mu][class]; each row sums to 1.
  std::vector<std::vector<double>> delta_t;
  std::vector<std::vector<double>> delta_c;
  // Raw |<t'> - <t>| before filling and normalization.
  std::vector<std::vector<double>> raw_t;
  std::vector<std::vector<double>> raw_c;
};

/// Virtually inserts x into each linked component (only the view's links
/// are added), recomputes the walk averages and normalizes the variations
/// across classes. Throws AllViewsEmpty when no view has a link.
InsertionVariation insertion_variation(std::span<const double> x, std::span<const ClassGraph> graphs,
                                       std::span<const ComponentWalkStats> stats,
                                       std::span<const InsertionView> views, std::size_t mu_critical);

// Smallest mu from which both curves stay within tolerance of their last
// value.
std::size_t steady_state_onset(std::span<const double> mean_transient, std::span<const double> mean_cycle,
                               double tolerance = 1e-9);

}  // namespace twsd
