#include "twsd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "twsd/error.hpp"

namespace twsd {
namespace {

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

std::size_t class_index(const std::vector<SenseId>& classes, SenseId id) {
  auto it = std::lower_bound(classes.begin(), classes.end(), id);
  if (it == classes.end() || *it != id) throw InvalidArgument("unknown class " + std::to_string(id));
  return static_cast<std::size_t>(it - classes.begin());
}

void require_labeled(const Dataset& train) {
  train.validate();
  if (train.size() == 0) throw InvalidArgument("empty training set");
  for (const auto& inst : train.instances) {
    if (!inst.label) throw InvalidArgument("training set contains unlabeled instances");
  }
}

}  // namespace

// ---------------------------------------------------------------- Membership

Membership::Membership(std::vector<SenseId> classes, std::vector<double> scores)
    : classes_(std::move(classes)), scores_(std::move(scores)) {
  if (classes_.size() != scores_.size()) throw InvalidArgument("membership classes and scores differ in size");
}

Membership Membership::uniform(std::vector<SenseId> classes) {
  std::vector<double> scores(classes.size(), classes.empty() ? 0.0 : 1.0 / static_cast<double>(classes.size()));
  return Membership(std::move(classes), std::move(scores));
}

Membership Membership::from_weights(std::vector<SenseId> classes, std::vector<double> weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return uniform(std::move(classes));
  for (double& w : weights) w /= total;
  return Membership(std::move(classes), std::move(weights));
}

double Membership::of(SenseId class_id) const {
  auto it = std::find(classes_.begin(), classes_.end(), class_id);
  return it == classes_.end() ? 0.0 : scores_[static_cast<std::size_t>(it - classes_.begin())];
}

double Membership::sum() const { return std::accumulate(scores_.begin(), scores_.end(), 0.0); }

SenseId Membership::argmax() const {
  if (classes_.empty()) throw InvalidArgument("argmax of an empty membership");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores_.size(); ++j) {
    if (scores_[j] > scores_[best] || (scores_[j] == scores_[best] && classes_[j] < classes_[best])) best = j;
  }
  return classes_[best];
}

// ---------------------------------------------------------------------- kNN

KnnClassifier::KnnClassifier(std::size_t k) : k_(k) {
  if (k_ == 0) throw InvalidArgument("k must be >= 1");
}

void KnnClassifier::fit(const Dataset& train) {
  require_labeled(train);
  classes_ = train.classes();
  points_.clear();
  labels_.clear();
  for (const auto& inst : train.instances) {
    points_.push_back(inst.features);
    labels_.push_back(class_index(classes_, *inst.label));
  }
}

Membership KnnClassifier::predict(std::span<const double> x) const {
  if (points_.empty()) throw InvalidArgument("knn classifier is not fitted");
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) ranked.emplace_back(euclidean(x, points_[i]), i);
  const std::size_t k = std::min(k_, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());

  std::vector<double> votes(classes_.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) votes[labels_[ranked[i].second]] += 1.0;
  for (double& v : votes) v /= static_cast<double>(k);
  return Membership(classes_, std::move(votes));
}

// -------------------------------------------------------------- Naive Bayes

void NaiveBayesClassifier::fit(const Dataset& train) {
  require_labeled(train);
  classes_ = train.classes();
  feature_names_ = train.feature_names;
  const std::size_t d = train.dimension();
  const std::size_t k = classes_.size();

  std::vector<std::vector<std::size_t>> rows(k);
  for (std::size_t r = 0; r < train.size(); ++r) rows[class_index(classes_, *train.instances[r].label)].push_back(r);

  log_priors_.assign(k, 0.0);
  samples_.assign(k, std::vector<std::vector<double>>(d));
  bandwidths_.assign(k, std::vector<double>(d, kMinBandwidth));
  for (std::size_t c = 0; c < k; ++c) {
    const double n = static_cast<double>(rows[c].size());
    log_priors_[c] = std::log(n / static_cast<double>(train.size()));
    for (std::size_t f = 0; f < d; ++f) {
      auto& values = samples_[c][f];
      values.reserve(rows[c].size());
      for (std::size_t r : rows[c]) values.push_back(train.instances[r].features[f]);
      std::sort(values.begin(), values.end());
      double sigma = 0.0;
      if (values.size() >= 2) {
        double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        sigma = std::sqrt(ss / (n - 1.0));
      }
      bandwidths_[c][f] = std::max(kMinBandwidth, 1.06 * sigma * std::pow(n, -0.2));
    }
  }
}

std::vector<double> NaiveBayesClassifier::log_scores(std::span<const double> x) const {
  if (classes_.empty()) throw InvalidArgument("bayes classifier is not fitted");
  if (x.size() != feature_names_.size()) throw InvalidArgument("feature width does not match model");
  const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  std::vector<double> scores(classes_.size());
  std::vector<double> terms;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    double score = log_priors_[c];
    for (std::size_t f = 0; f < x.size(); ++f) {
      const auto& values = samples_[c][f];
      const double h = bandwidths_[c][f];
      // Equal training values share one kernel term weighted by multiplicity.
      terms.clear();
      for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        double z = (x[f] - values[i]) / h;
        terms.push_back(-0.5 * z * z + std::log(static_cast<double>(j - i)));
        i = j;
      }
      score += log_sum_exp(terms) - std::log(static_cast<double>(values.size()) * h) - log_sqrt_2pi;
    }
    scores[c] = score;
  }
  return scores;
}

Membership NaiveBayesClassifier::predict(std::span<const double> x) const {
  auto scores = log_scores(x);
  const double total = log_sum_exp(scores);
  for (double& s : scores) s = std::exp(s - total);
  return Membership::from_weights(classes_, std::move(scores));
}

double NaiveBayesClassifier::bandwidth(std::size_t class_index, std::size_t feature) const {
  return bandwidths_.at(class_index).at(feature);
}

void NaiveBayesClassifier::dump(std::ostream& out) const {
  out << "class,feature,bandwidth\n";
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    for (std::size_t f = 0; f < feature_names_.size(); ++f) {
      out << classes_[c] << ',' << feature_names_[f] << ',' << std::setprecision(10) << bandwidths_[c][f] << '\n';
    }
  }
}

// ------------------------------------------------------------ Decision tree

double entropy(std::span<const std::size_t> class_counts) {
  double total = 0.0;
  for (auto n : class_counts) total += static_cast<double>(n);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (auto n : class_counts) {
    if (n == 0) continue;
    double p = static_cast<double>(n) / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

std::vector<std::size_t> count_labels(const Dataset& data, std::span<const std::size_t> rows,
                                      const std::vector<SenseId>& classes) {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (std::size_t r : rows) ++counts[class_index(classes, *data.instances[r].label)];
  return counts;
}

double split_gain(double parent_entropy, std::span<const std::size_t> left, std::span<const std::size_t> right,
                  double n_left, double n_right) {
  const double n = n_left + n_right;
  double gain = parent_entropy - (n_left / n) * entropy(left) - (n_right / n) * entropy(right);
  return std::clamp(gain, 0.0, parent_entropy);
}

}  // namespace

double DecisionTree::information_gain(const Dataset& data, std::span<const std::size_t> rows, std::size_t feature,
                                      double threshold) {
  auto classes = data.classes();
  std::vector<std::size_t> left(classes.size(), 0), right(classes.size(), 0);
  double n_left = 0.0, n_right = 0.0;
  for (std::size_t r : rows) {
    std::size_t c = class_index(classes, *data.instances[r].label);
    if (data.instances[r].features[feature] >= threshold) {
      ++right[c];
      n_right += 1.0;
    } else {
      ++left[c];
      n_left += 1.0;
    }
  }
  auto parent = count_labels(data, rows, classes);
  if (n_left == 0.0 || n_right == 0.0) return 0.0;
  return split_gain(entropy(parent), left, right, n_left, n_right);
}

std::optional<DecisionTree::Split> DecisionTree::best_split(const Dataset& data, std::span<const std::size_t> rows) {
  auto classes = data.classes();
  auto parent = count_labels(data, rows, classes);
  const double parent_entropy = entropy(parent);
  const double n = static_cast<double>(rows.size());

  std::optional<Split> best;
  std::vector<std::pair<double, std::size_t>> column(rows.size());
  std::vector<std::size_t> left(classes.size()), right(classes.size());
  for (std::size_t f = 0; f < data.dimension(); ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      column[i] = {data.instances[rows[i]].features[f], class_index(classes, *data.instances[rows[i]].label)};
    }
    std::sort(column.begin(), column.end());
    std::fill(left.begin(), left.end(), 0);
    right = parent;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      ++left[column[i].second];
      --right[column[i].second];
      const double a = column[i].first, b = column[i + 1].first;
      if (a == b) continue;
      double threshold = a + (b - a) / 2.0;
      if (!(threshold > a)) threshold = b;
      const double n_left = static_cast<double>(i + 1);
      double gain = split_gain(parent_entropy, left, right, n_left, n - n_left);
      if (!best || gain > best->gain) best = Split{f, threshold, gain};
    }
  }
  return best;
}

void DecisionTree::fit(const Dataset& train) {
  require_labeled(train);
  classes_ = train.classes();
  feature_names_ = train.feature_names;
  nodes_.clear();
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  grow(train, std::move(rows));
}

std::size_t DecisionTree::grow(const Dataset& data, std::vector<std::size_t> rows) {
  const std::size_t index = nodes_.size();
  nodes_.emplace_back();
  auto counts = count_labels(data, rows, classes_);
  {
    Node& node = nodes_[index];
    node.samples = rows.size();
    node.proportions.resize(classes_.size());
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      node.proportions[c] = static_cast<double>(counts[c]) / static_cast<double>(rows.size());
    }
  }
  const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; }) <= 1;
  if (pure || rows.size() < min_size_) return index;

  auto split = best_split(data, rows);
  if (!split) return index;

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (data.instances[r].features[split->feature] >= split->threshold ? right : left).push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();
  std::size_t l = grow(data, std::move(left));
  std::size_t r = grow(data, std::move(right));
  Node& node = nodes_[index];
  node.feature = split->feature;
  node.threshold = split->threshold;
  node.gain = split->gain;
  node.left = l;
  node.right = r;
  return index;
}

Membership DecisionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw InvalidArgument("decision tree is not fitted");
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const Node& node = nodes_[at];
    if (node.feature >= x.size()) throw InvalidArgument("feature width does not match tree");
    at = x[node.feature] >= node.threshold ? *node.right : *node.left;
  }
  return Membership(classes_, nodes_[at].proportions);
}

DecisionTree DecisionTree::from_nodes(std::vector<SenseId> classes, std::vector<Node> nodes) {
  if (nodes.empty()) throw InvalidArgument("a tree needs a root");
  for (const auto& node : nodes) {
    if (node.is_leaf() && node.proportions.size() != classes.size()) {
      throw InvalidArgument("leaf proportions must cover every class");
    }
    if (!node.is_leaf() && (!node.right || *node.left >= nodes.size() || *node.right >= nodes.size())) {
      throw InvalidArgument("internal node with a dangling child");
    }
  }
  DecisionTree tree;
  tree.classes_ = std::move(classes);
  tree.nodes_ = std::move(nodes);
  return tree;
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[at].is_leaf()) {
      stack.emplace_back(*nodes_[at].left, d + 1);
      stack.emplace_back(*nodes_[at].right, d + 1);
    }
  }
  return deepest;
}

void DecisionTree::dump(std::ostream& out) const {
  auto feature_name = [&](std::size_t f) {
    return f < feature_names_.size() ? feature_names_[f] : "f" + std::to_string(f);
  };
  auto print = [&](auto&& self, std::size_t at, std::size_t depth) -> void {
    const Node& node = nodes_[at];
    const std::string pad(depth * 2, ' ');
    if (node.is_leaf()) {
      out << pad << "sense " << Membership(classes_, node.proportions).argmax() << " (n=" << node.samples << ")\n";
      return;
    }
    out << pad << "IF " << feature_name(node.feature) << " >= " << node.threshold << "\n";
    self(self, *node.right, depth + 1);
    out << pad << "ELSE\n";
    self(self, *node.left, depth + 1);
  };
  if (!nodes_.empty()) print(print, 0, 0);
}

// ----------------------------------------------------------------- Majority

void MajorityClassifier::fit(const Dataset& train) {
  require_labeled(train);
  classes_ = train.classes();
  std::size_t best = 0;
  for (const auto& [c, n] : train.class_counts()) {
    if (n > best) {
      best = n;
      majority_ = c;
    }
  }
}

Membership MajorityClassifier::predict(std::span<const double>) const {
  std::vector<double> scores(classes_.size(), 0.0);
  scores[class_index(classes_, majority_)] = 1.0;
  return Membership(classes_, std::move(scores));
}

LowLevelKind parse_low_level(std::string_view name) {
  if (name == "knn") return LowLevelKind::knn;
  if (name == "bayes") return LowLevelKind::bayes;
  if (name == "c45") return LowLevelKind::c45;
  if (name == "majority") return LowLevelKind::majority;
  throw InvalidArgument("unknown low-level classifier '" + std::string(name) + "'");
}

std::string_view to_string(LowLevelKind kind) {
  switch (kind) {
    case LowLevelKind::knn: return "knn";
    case LowLevelKind::bayes: return "bayes";
    case LowLevelKind::c45: return "c45";
    case LowLevelKind::majority: return "majority";
  }
  return "unknown";
}

std::unique_ptr<LowLevelClassifier> make_low_level(LowLevelKind kind, std::size_t knn_k) {
  switch (kind) {
    case LowLevelKind::knn: return std::make_unique<KnnClassifier>(knn_k);
    case LowLevelKind::bayes: return std::make_unique<NaiveBayesClassifier>();
    case LowLevelKind::c45: return std::make_unique<DecisionTree>();
    case LowLevelKind::majority: return std::make_unique<MajorityClassifier>();
  }
  throw InvalidArgument("unknown low-level classifier");
}

// --------------------------------------------------------------- High level

void HighLevelConfig::validate() const {
  if (alpha_t < 0.0 || alpha_t > 1.0 || alpha_c < 0.0 || alpha_c > 1.0) {
    throw InvalidArgument("alpha_t and alpha_c must lie in [0, 1]");
  }
  if (std::abs(alpha_t + alpha_c - 1.0) > 1e-12) throw InvalidArgument("alpha_t + alpha_c must equal 1");
}

Membership high_level_membership(const InsertionVariation& variation, std::span<const double> proportions,
                                 const HighLevelConfig& config) {
  const std::size_t k = variation.classes.size();
  if (proportions.size() != k) throw InvalidArgument("one proportion per class required");
  if (variation.delta_t.size() < config.mu_critical + 1 || variation.delta_c.size() < config.mu_critical + 1) {
    throw InvalidArgument("variations do not cover mu_critical");
  }
  std::vector<double> weights(k, 0.0);
  for (std::size_t mu = 0; mu <= config.mu_critical; ++mu) {
    for (std::size_t j = 0; j < k; ++j) {
      double transient = variation.delta_t[mu][j] * proportions[j];
      double cycle = variation.delta_c[mu][j] * proportions[j];
      weights[j] += config.alpha_t * (1.0 - transient) + config.alpha_c * (1.0 - cycle);
    }
  }
  return Membership::from_weights(variation.classes, std::move(weights));
}

void HighLevelClassifier::fit(const Dataset& train, const GraphConfig& graph_config, const HighLevelConfig& config) {
  config.validate();
  graph_config_ = graph_config;
  config_ = config;
  graphs_ = build_training_graph(train, graph_config);
  stats_.clear();
  for (const auto& graph : graphs_) stats_.push_back(component_stats(graph, config.mu_critical));
  auto counts = train.class_counts();
  counts_.clear();
  for (const auto& graph : graphs_) counts_.push_back(counts.at(graph.class_id()));
  proportions_.clear();
  for (auto n : counts_) proportions_.push_back(static_cast<double>(n) / static_cast<double>(train.size()));
}

std::optional<InsertionVariation> HighLevelClassifier::variation(std::span<const double> x) const {
  auto views = insert_test(x, graphs_, graph_config_);
  if (std::all_of(views.begin(), views.end(), [](const InsertionView& v) { return v.empty(); })) return std::nullopt;
  return insertion_variation(x, graphs_, stats_, views, config_.mu_critical);
}

std::optional<Membership> HighLevelClassifier::predict(std::span<const double> x) const {
  auto v = variation(x);
  if (!v) return std::nullopt;
  return high_level_membership(*v, proportions_, config_);
}

void HighLevelClassifier::commit(std::span<const double> x, SenseId predicted, CommitMode mode) {
  if (mode == CommitMode::discard) return;
  commit_or_discard(x, predicted, mode, graphs_, graph_config_);
  std::size_t total = 0;
  for (std::size_t j = 0; j < graphs_.size(); ++j) {
    if (graphs_[j].class_id() == predicted) {
      ++counts_[j];
      stats_[j] = component_stats(graphs_[j], config_.mu_critical);
    }
    total += counts_[j];
  }
  for (std::size_t j = 0; j < graphs_.size(); ++j) {
    proportions_[j] = static_cast<double>(counts_[j]) / static_cast<double>(total);
  }
}

HybridResult hybrid_predict(double lambda, const Membership& low, const std::optional<Membership>& high) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  if (!high) return {low, low.argmax(), false};
  if (high->classes() != low.classes()) throw InvalidArgument("low- and high-level memberships cover different classes");
  std::vector<double> scores(low.size());
  for (std::size_t j = 0; j < low.size(); ++j) scores[j] = (1.0 - lambda) * low[j] + lambda * (*high)[j];
  Membership combined(low.classes(), std::move(scores));
  SenseId label = combined.argmax();
  return {std::move(combined), label, true};
}

}  // namespace twsd
