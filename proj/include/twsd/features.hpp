#pragma once

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "twsd/adjacency.hpp"
#include "twsd/corpus.hpp"

namespace twsd {

struct InstanceId {
  std::string document_id;
  std::size_t position = 0;

  auto operator<=>(const InstanceId&) const = default;
};

struct Instance {
  InstanceId id;
  std::vector<double> features;
  std::optional<SenseId> label;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  std::size_t dimension() const { return feature_names.size(); }

  std::map<SenseId, std::size_t> class_counts() const;
  // p^(j): fraction of labeled instances in class j.
  std::map<SenseId, double> class_proportions() const;
  std::vector<SenseId> classes() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset select_columns(std::span<const std::size_t> columns) const;

  // Throws InvalidArgument when a row's width differs from feature_names.
  void validate() const;
};

// Columns with at least one non-zero value.
std::vector<std::size_t> nonzero_columns(const Dataset& dataset);

// ceil(w/2) content words before the occurrence and floor(w/2) after. When
// one side hits a document boundary the other side extends, so the window
// always holds the min(w, available) nearest content words.
struct ContextWindow {
  std::size_t before = 0;
  std::size_t after = 0;
};
ContextWindow context_window(std::size_t window, std::size_t position, std::size_t stream_length);

// Bag-of-neighbors counts. The vocabulary is every lemma seen in any window,
// sorted; the occurrence itself is not counted.
Dataset semantic_features(std::span<const TokenStream> streams, std::span<const SenseAnnotation> annotations,
                          std::size_t window);

// The NodeTopology measurements of each annotated occurrence's own node.
Dataset topological_features(const WordAdjacencyNetwork& network, std::span<const SenseAnnotation> annotations,
                             std::size_t levels = 2);

// Z-scoring with population standard deviation. Constant columns map to 0.
class Standardizer {
 public:
  static Standardizer fit(const Dataset& dataset);

  void apply_in_place(Dataset& dataset) const;
  std::vector<double> apply(std::span<const double> features) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;  // 0 marks a constant column
};

Dataset standardize(Dataset dataset);

// Header: feature names then `label`. Unlabeled rows leave label empty.
void write_csv(std::ostream& out, const Dataset& dataset);
Dataset read_csv(std::istream& in);

}  // namespace twsd
