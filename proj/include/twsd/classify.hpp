#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twsd/attgraph.hpp"
#include "twsd/features.hpp"
#include "twsd/tourist.hpp"

namespace twsd {

/// Per-class scores in [0, 1] summing to 1, over a fixed sorted class list.
class Membership {
 public:
  Membership() = default;
  Membership(std::vector<SenseId> classes, std::vector<double> scores);

  static Membership uniform(std::vector<SenseId> classes);
  // Scales non-negative weights to sum 1 (uniform if they are all 0).
  static Membership from_weights(std::vector<SenseId> classes, std::vector<double> weights);

  const std::vector<SenseId>& classes() const { return classes_; }
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return classes_.size(); }
  double operator[](std::size_t index) const { return scores_[index]; }
  double of(SenseId class_id) const;
  double sum() const;

  // Highest score; ties go to the smallest class id.
  SenseId argmax() const;

  bool operator==(const Membership&) const = default;

 private:
  std::vector<SenseId> classes_;
  std::vector<double> scores_;
};

class LowLevelClassifier {
 public:
  virtual ~LowLevelClassifier() = default;

  virtual void fit(const Dataset& train) = 0;
  virtual Membership predict(std::span<const double> x) const = 0;
  virtual std::string name() const = 0;
  // Human-readable model dump; empty by default.
  virtual void dump(std::ostream& /*out*/) const {}
};

// Vote fractions among the k Euclidean-nearest training instances; distance
// ties go to the lower training row.
class KnnClassifier : public LowLevelClassifier {
 public:
  explicit KnnClassifier(std::size_t k = 1);

  void fit(const Dataset& train) override;
  Membership predict(std::span<const double> x) const override;
  std::string name() const override { return "knn"; }

 private:
  std::size_t k_;
  std::vector<SenseId> classes_;
  std::vector<std::vector<double>> points_;
  std::vector<std::size_t> labels_;  // index into classes_
};

/// Naive Bayes with per-class, per-feature Gaussian Parzen densities.
/// Bandwidths follow Silverman's rule, 1.06 * sigma * n^(-1/5), floored at
/// kMinBandwidth. Scores are the normalized posteriors
/// P(s) * prod_f p(x_f | s), computed in log space.
class NaiveBayesClassifier : public LowLevelClassifier {
 public:
  static constexpr double kMinBandwidth = 1e-6;

  void fit(const Dataset& train) override;
  Membership predict(std::span<const double> x) const override;
  std::string name() const override { return "bayes"; }
  // CSV: class,feature,bandwidth
  void dump(std::ostream& out) const override;

  // Unnormalized log posterior per class.
  std::vector<double> log_scores(std::span<const double> x) const;
  double bandwidth(std::size_t class_index, std::size_t feature) const;
  const std::vector<SenseId>& classes() const { return classes_; }

 private:
  std::vector<SenseId> classes_;
  std::vector<double> log_priors_;
  std::vector<std::string> feature_names_;
  // [class][feature] -> training values and bandwidth.
  std::vector<std::vector<std::vector<double>>> samples_;
  std::vector<std::vector<double>> bandwidths_;
};

// Shannon entropy (bits) of the label distribution.
double entropy(std::span<const std::size_t> class_counts);

/// Binary decision tree grown with information gain over midpoint
/// thresholds; a row goes right when feature >= threshold. No pruning.
class DecisionTree : public LowLevelClassifier {
 public:
  struct Node {
    // Internal node when `left` and `right` are set.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::optional<std::size_t> left;   // feature < threshold
    std::optional<std::size_t> right;  // feature >= threshold
    std::vector<double> proportions;   // leaf class proportions
    std::size_t samples = 0;
    double gain = 0.0;

    bool is_leaf() const { return !left; }
  };

  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
  };

  explicit DecisionTree(std::size_t min_size = 2) : min_size_(min_size) {}

  void fit(const Dataset& train) override;
  Membership predict(std::span<const double> x) const override;
  std::string name() const override { return "c45"; }
  // Indented IF/ELSE listing of the tree.
  void dump(std::ostream& out) const override;

  // Hand-assembled trees (node 0 is the root).
  static DecisionTree from_nodes(std::vector<SenseId> classes, std::vector<Node> nodes);

  // Information gain of splitting `rows` at feature >= threshold.
  static double information_gain(const Dataset& data, std::span<const std::size_t> rows, std::size_t feature,
                                 double threshold);
  // Best midpoint split by gain (ties: lower feature, then lower
  // threshold), or nullopt when every feature is constant over `rows`.
  static std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::size_t grow(const Dataset& data, std::vector<std::size_t> rows);

  std::size_t min_size_;
  std::vector<SenseId> classes_;
  std::vector<std::string> feature_names_;
  std::vector<Node> nodes_;
};

// Predicts the training majority (ties: smallest id) with membership 1.
class MajorityClassifier : public LowLevelClassifier {
 public:
  void fit(const Dataset& train) override;
  Membership predict(std::span<const double> x) const override;
  std::string name() const override { return "majority"; }

 private:
  std::vector<SenseId> classes_;
  SenseId majority_ = 0;
};

enum class LowLevelKind { knn, bayes, c45, majority };

LowLevelKind parse_low_level(std::string_view name);
std::string_view to_string(LowLevelKind kind);
std::unique_ptr<LowLevelClassifier> make_low_level(LowLevelKind kind, std::size_t knn_k = 1);

struct HighLevelConfig {
  double alpha_t = 0.5;
  double alpha_c = 0.5;
  std::size_t mu_critical = 10;

  void validate() const;
};

/// H^(j) from the normalized variations: T = dt * p, C = dc * p, then
/// sum over mu of alpha_t (1 - T) + alpha_c (1 - C), normalized over classes.
Membership high_level_membership(const InsertionVariation& variation, std::span<const double> proportions,
                                 const HighLevelConfig& config);

/// Tourist-walk pattern-conformity classifier over attribute-space class
/// components.
class HighLevelClassifier {
 public:
  void fit(const Dataset& train, const GraphConfig& graph_config, const HighLevelConfig& config);

  // nullopt when no component shares a link with x.
  std::optional<Membership> predict(std::span<const double> x) const;
  std::optional<InsertionVariation> variation(std::span<const double> x) const;

  // Discard leaves the model untouched; incorporate adds x to the predicted
  // class's component and refreshes that class's walk statistics.
  void commit(std::span<const double> x, SenseId predicted, CommitMode mode);

  const std::vector<ClassGraph>& graphs() const { return graphs_; }
  const std::vector<ComponentWalkStats>& stats() const { return stats_; }
  const std::vector<double>& proportions() const { return proportions_; }
  const GraphConfig& graph_config() const { return graph_config_; }

 private:
  GraphConfig graph_config_;
  HighLevelConfig config_;
  std::vector<ClassGraph> graphs_;
  std::vector<ComponentWalkStats> stats_;
  std::vector<double> proportions_;  // p^(j), aligned with graphs_
  std::vector<std::size_t> counts_;
};

struct HybridResult {
  Membership membership;
  SenseId label = 0;
  bool high_level_used = false;
};

/// M = (1 - lambda) L + lambda H, label = argmax M. Without H (abstention)
/// M is L.
HybridResult hybrid_predict(double lambda, const Membership& low, const std::optional<Membership>& high);

}  // namespace twsd
