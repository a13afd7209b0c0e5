#include "twsd/tourist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "twsd/error.hpp"
#include "twsd/parallel.hpp"

namespace twsd {
namespace {

std::uint64_t window_hash(std::span<const VertexId> window) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ window.size();
  for (VertexId v : window) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// Walk core shared by walk() and the stats routines. `trajectory` is
// scratch space; `in_window` must be all zero on entry and is left so.
struct RawWalk {
  std::size_t transient;
  std::size_t cycle;
  std::size_t length;  // entries of trajectory that are meaningful
};

RawWalk run_walk(const ClassGraph& graph, VertexId start, std::size_t mu, std::vector<VertexId>& trajectory,
                 std::vector<std::uint32_t>& in_window) {
  trajectory.clear();
  trajectory.push_back(start);
  if (mu == 0) return {0, 1, 1};

  std::unordered_multimap<std::uint64_t, std::size_t> seen;
  auto window_of = [&](std::size_t s) {
    std::size_t begin = s + 1 >= mu ? s + 1 - mu : 0;
    return std::span<const VertexId>(trajectory.data() + begin, s + 1 - begin);
  };

  in_window[start] = 1;
  seen.emplace(window_hash(window_of(0)), 0);
  RawWalk result{0, 0, 0};
  for (std::size_t s = 0;; ++s) {
    VertexId current = trajectory[s];
    const VertexId* next = nullptr;
    for (const auto& nb : graph.neighbors(current)) {
      if (in_window[nb.vertex] == 0) {
        next = &nb.vertex;
        break;
      }
    }
    if (next == nullptr) {
      result = {s, 0, s + 1};
      break;
    }

    trajectory.push_back(*next);
    const std::size_t t = s + 1;
    ++in_window[*next];
    if (t >= mu) --in_window[trajectory[t - mu]];

    auto window = window_of(t);
    std::uint64_t h = window_hash(window);
    std::size_t repeat = t;
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      auto earlier = window_of(it->second);
      if (std::equal(window.begin(), window.end(), earlier.begin(), earlier.end())) {
        repeat = it->second;
        break;
      }
    }
    if (repeat != t) {
      std::size_t cycle = t - repeat;
      std::size_t transient = repeat;
      while (transient > 0 && trajectory[transient - 1] == trajectory[transient - 1 + cycle]) --transient;
      result = {transient, cycle, transient + cycle};
      break;
    }
    seen.emplace(h, t);
  }

  // Reset the membership counters for the next walk.
  const std::size_t last = trajectory.size() - 1;
  for (std::size_t k = last + 1 >= mu ? last + 1 - mu : 0; k <= last; ++k) in_window[trajectory[k]] = 0;
  return result;
}

std::vector<VertexId> sorted_unique(std::span<const VertexId> vertices) {
  std::vector<VertexId> out(vertices.begin(), vertices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool intersects(const std::vector<VertexId>& sorted, const std::vector<VertexId>& sorted_links) {
  auto a = sorted.begin();
  auto b = sorted_links.begin();
  while (a != sorted.end() && b != sorted_links.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

}  // namespace

void WalkConfig::validate() const {
  if (mu > mu_critical) throw InvalidArgument("mu must not exceed mu_critical");
}

WalkResult walk(const ClassGraph& graph, VertexId start, std::size_t mu) {
  if (start >= graph.size()) {
    throw VertexNotInComponent("vertex " + std::to_string(start) + " not in component of class " +
                               std::to_string(graph.class_id()));
  }
  std::vector<VertexId> trajectory;
  std::vector<std::uint32_t> in_window(graph.size(), 0);
  RawWalk raw = run_walk(graph, start, mu, trajectory, in_window);
  trajectory.resize(raw.length);
  return {raw.transient, raw.cycle, std::move(trajectory)};
}

ComponentWalkStats component_stats(const ClassGraph& graph, std::size_t mu_critical) {
  const std::size_t n = graph.size();
  if (n == 0) throw InvalidArgument("component_stats on an empty component");
  ComponentWalkStats stats;
  stats.mu_critical = mu_critical;
  stats.revision = graph.revision();
  stats.mean_transient.assign(mu_critical + 1, 0.0);
  stats.mean_cycle.assign(mu_critical + 1, 0.0);
  stats.traces.assign(mu_critical + 1, std::vector<ComponentWalkStats::Trace>(n));

  parallel_for(
      n,
      [&](std::size_t start) {
        std::vector<VertexId> trajectory;
        std::vector<std::uint32_t> in_window(n, 0);
        for (std::size_t mu = 0; mu <= mu_critical; ++mu) {
          RawWalk raw = run_walk(graph, start, mu, trajectory, in_window);
          auto& trace = stats.traces[mu][start];
          trace.transient = raw.transient;
          trace.cycle = raw.cycle;
          // Every vertex the walker stood on, including ones past the
          // detected period.
          trace.visited = sorted_unique(trajectory);
        }
      },
      16);

  for (std::size_t mu = 0; mu <= mu_critical; ++mu) {
    double t = 0.0, c = 0.0;
    for (const auto& trace : stats.traces[mu]) {
      t += static_cast<double>(trace.transient);
      c += static_cast<double>(trace.cycle);
    }
    stats.mean_transient[mu] = t / static_cast<double>(n);
    stats.mean_cycle[mu] = c / static_cast<double>(n);
  }
  return stats;
}

std::vector<double> normalize_variation(std::span<const double> raw, std::span<const char> linked) {
  if (raw.size() != linked.size()) throw InvalidArgument("raw variation and link flags differ in size");
  double largest = 0.0;
  bool any_linked = false;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (linked[j]) {
      any_linked = true;
      largest = std::max(largest, raw[j]);
    }
  }
  if (!any_linked) throw AllViewsEmpty("no class component shares a link with the test instance");
  const double high = largest > 0.0 ? 2.0 * largest : 1.0;

  std::vector<double> out(raw.size());
  double total = 0.0;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = linked[j] ? raw[j] : high;
    total += out[j];
  }
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
  } else {
    for (double& v : out) v /= total;
  }
  return out;
}

InsertionVariation insertion_variation(std::span<const double> x, std::span<const ClassGraph> graphs,
                                       std::span<const ComponentWalkStats> stats,
                                       std::span<const InsertionView> views, std::size_t mu_critical) {
  const std::size_t classes = graphs.size();
  if (stats.size() != classes || views.size() != classes) {
    throw InvalidArgument("graphs, stats and views must line up per class");
  }

  InsertionVariation out;
  out.raw_t.assign(mu_critical + 1, std::vector<double>(classes, 0.0));
  out.raw_c.assign(mu_critical + 1, std::vector<double>(classes, 0.0));
  for (std::size_t j = 0; j < classes; ++j) {
    const auto& graph = graphs[j];
    const auto& base = stats[j];
    if (views[j].class_id != graph.class_id()) throw InvalidArgument("view does not match component");
    if (base.revision != graph.revision() || base.mu_critical < mu_critical) {
      throw InvalidArgument("walk statistics are stale for class " + std::to_string(graph.class_id()));
    }
    out.classes.push_back(graph.class_id());
    out.linked.push_back(views[j].empty() ? 0 : 1);
    if (views[j].empty()) continue;

    ClassGraph augmented = graph;
    VertexId added = augmented.add_vertex(std::vector<double>(x.begin(), x.end()));
    std::vector<VertexId> links;
    for (const auto& link : views[j].links) {
      augmented.add_edge(added, link.vertex);
      links.push_back(link.vertex);
    }
    std::sort(links.begin(), links.end());

    const std::size_t n = augmented.size();
    std::vector<VertexId> trajectory;
    std::vector<std::uint32_t> in_window(n, 0);
    for (std::size_t mu = 0; mu <= mu_critical; ++mu) {
      double t_sum = 0.0, c_sum = 0.0;
      for (VertexId start = 0; start < graph.size(); ++start) {
        const auto& trace = base.traces[mu][start];
        if (!intersects(trace.visited, links)) {
          // The walk never stood next to the new vertex, so it is unchanged.
          t_sum += static_cast<double>(trace.transient);
          c_sum += static_cast<double>(trace.cycle);
          continue;
        }
        RawWalk raw = run_walk(augmented, start, mu, trajectory, in_window);
        t_sum += static_cast<double>(raw.transient);
        c_sum += static_cast<double>(raw.cycle);
      }
      RawWalk raw = run_walk(augmented, added, mu, trajectory, in_window);
      t_sum += static_cast<double>(raw.transient);
      c_sum += static_cast<double>(raw.cycle);

      out.raw_t[mu][j] = std::abs(t_sum / static_cast<double>(n) - base.mean_transient[mu]);
      out.raw_c[mu][j] = std::abs(c_sum / static_cast<double>(n) - base.mean_cycle[mu]);
    }
  }

  if (std::none_of(out.linked.begin(), out.linked.end(), [](char l) { return l != 0; })) {
    throw AllViewsEmpty("no class component shares a link with the test instance");
  }
  for (std::size_t mu = 0; mu <= mu_critical; ++mu) {
    out.delta_t.push_back(normalize_variation(out.raw_t[mu], out.linked));
    out.delta_c.push_back(normalize_variation(out.raw_c[mu], out.linked));
  }
  return out;
}

std::size_t steady_state_onset(std::span<const double> mean_transient, std::span<const double> mean_cycle,
                               double tolerance) {
  if (mean_transient.size() != mean_cycle.size()) throw InvalidArgument("curves differ in length");
  if (mean_transient.empty()) return 0;
  const double t_final = mean_transient.back();
  const double c_final = mean_cycle.back();
  auto settled = [&](std::size_t mu) {
    return std::abs(mean_transient[mu] - t_final) <= tolerance * std::max(1.0, std::abs(t_final)) &&
           std::abs(mean_cycle[mu] - c_final) <= tolerance * std::max(1.0, std::abs(c_final));
  };
  std::size_t onset = mean_transient.size() - 1;
  while (onset > 0 && settled(onset - 1)) --onset;
  return onset;
}

}  // namespace twsd
