#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "twsd/classify.hpp"
#include "twsd/features.hpp"

namespace twsd {

// ------------------------------------------------------------ fold planning

struct FoldPlan {
  std::vector<std::vector<std::size_t>> test_folds;  // row indices, each sorted
  std::uint64_t seed = 0;

  std::size_t fold_count() const { return test_folds.size(); }
  std::vector<std::size_t> train_rows(std::size_t fold, std::size_t dataset_size) const;
};

/// Stratified folds: each class's rows are shuffled with `seed` and dealt
/// round-robin, continuing the deal across classes. When the smallest class
/// has fewer than `folds` rows the fold count drops to that size. Throws
/// InsufficientClassSize when some class has fewer than 3 rows (a training
/// fold would then hold a single instance of it).
FoldPlan make_fold_plan(const Dataset& dataset, std::size_t folds = 10, std::uint64_t seed = 1);

// --------------------------------------------------------- cross-validation

struct PipelineConfig {
  LowLevelKind low_level = LowLevelKind::knn;
  std::size_t knn_k = 1;
  double lambda = 0.0;
  // Graph radius; unset means the median same-class distance of the
  // standardized training fold.
  std::optional<double> epsilon;
  std::size_t kappa = 3;
  double fallback_factor = 3.0;
  HighLevelConfig high_level;
  bool standardize = true;
  // Drop feature columns that are all zero in the training fold, so the
  // semantic vocabulary comes from training windows only.
  bool restrict_vocabulary = true;
};

struct InstanceOutcome {
  std::size_t row = 0;
  SenseId truth = 0;
  std::vector<Membership> low;  // one per requested low-level kind
  std::optional<Membership> high;
};

/// Per-instance low- and high-level memberships gathered over every fold,
/// so that any lambda can be scored without refitting.
struct CrossValidationOutcomes {
  std::vector<LowLevelKind> kinds;
  std::vector<InstanceOutcome> instances;  // ordered by row

  std::size_t abstentions() const;
  std::size_t correct(std::size_t kind_index, double lambda) const;
  double accuracy(std::size_t kind_index, double lambda) const;
};

// Standardization, vocabulary and graphs are fitted on each training fold
// only. Test instances are discarded after prediction.
CrossValidationOutcomes collect_outcomes(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                                         std::span<const LowLevelKind> kinds, bool with_high_level = true);

struct CrossValidationResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t abstentions = 0;  // instances where H was undefined
};

CrossValidationResult cross_validate(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan);

// ------------------------------------------------------------------ p-value

/// Chance of a random classifier that guesses with the class priors scoring
/// at least round(accuracy * n) hits: the upper tail of Binomial(n, q) with
/// q = sum_j p_j^2.
double p_value(double accuracy, std::size_t n, const std::map<SenseId, std::size_t>& class_counts);

// Same question answered by simulation against the actual labels.
double p_value_monte_carlo(double accuracy, std::span<const SenseId> truths, std::size_t trials,
                           std::uint64_t seed);

// ------------------------------------------------------------------- sweeps

struct SweepRow {
  double lambda = 0.0;
  double accuracy = 0.0;
  double p_value = 1.0;
};

struct ExperimentReport {
  std::string word;
  std::string paradigm;
  std::string algorithm;
  std::vector<SweepRow> rows;
  double best_lambda = 0.0;  // highest accuracy, ties to the smaller lambda
  double best_accuracy = 0.0;
  std::size_t abstentions = 0;

  const SweepRow& at(double lambda) const;
};

// 0.00, 0.05, ..., 1.00
std::vector<double> default_lambda_grid();

// One report per low-level kind, all sharing the fold plan and the
// high-level memberships.
std::vector<ExperimentReport> lambda_sweep(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                                           std::span<const LowLevelKind> kinds, std::span<const double> grid,
                                           const std::string& word = "", const std::string& paradigm = "");

ExperimentReport lambda_sweep(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                              std::span<const double> grid, const std::string& word = "",
                              const std::string& paradigm = "");

// Columns word,paradigm,algorithm,lambda,accuracy,p_value.
void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports);

// -------------------------------------------------------------- walk curves

struct WalkCurve {
  SenseId class_id = 0;
  std::vector<double> mean_transient;  // indexed by mu
  std::vector<double> mean_cycle;
  std::size_t steady_state_mu = 0;
};

std::vector<WalkCurve> walk_curves(const Dataset& dataset, const GraphConfig& config, std::size_t mu_max);

// Columns class,mu,mean_transient,mean_cycle,steady_state_mu.
void write_walk_curves_csv(std::ostream& out, std::span<const WalkCurve> curves);

// -------------------------------------------------------------------- toy

struct ToyData {
  Dataset training;
  std::vector<double> probe;
  SenseId structured_class = 1;
  SenseId unstructured_class = 2;
};

/// A 14-point pyramid (rows of 5, 4, 3, 2 on a triangular lattice) next to
/// a dense 20-point scatter, plus a probe that continues the pyramid's
/// base into the scatter.
ToyData toy_dataset(std::uint64_t seed = 28218);

// CSV as write_csv, with the probe as the single unlabeled row.
void write_toy_csv(std::ostream& out, const ToyData& toy);
ToyData read_toy_csv(std::istream& in);

struct ToyConfig {
  GraphConfig graph{0.02, 3, 3.0};
  std::size_t knn_k = 1;
  HighLevelConfig high_level;
  std::vector<double> grid = default_lambda_grid();
};

struct ToyReport {
  Membership low;
  std::optional<Membership> high;
  std::vector<std::pair<double, SenseId>> predictions;  // per grid lambda
  std::optional<double> flip_lambda;  // first lambda giving the structured class
  bool monotone_after_flip = false;

  SenseId label_at(double lambda) const;
};

ToyReport toy_experiment(const ToyData& toy, const ToyConfig& config = {});

// --------------------------------------------------------- synthetic data

struct SyntheticCorpusConfig {
  std::string word = "bear";
  std::size_t occurrences_per_sense = 120;
  std::size_t documents = 6;
  std::size_t context = 3;  // sense-specific content words on each side
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> documents;  // (id, raw text)
  std::vector<SenseAnnotation> annotations;
  SenseInventory inventory;
};

/// Two senses of one word. Sense 1 contexts draw from a small, frequent
/// vocabulary; sense 2 from a larger, rarer one; filler between
/// occurrences is shared. Text is rendered with stopwords and punctuation,
/// so it round-trips through the preprocessing pipeline.
SyntheticCorpus generate_two_sense_corpus(const SyntheticCorpusConfig& config);

void write_annotations(std::ostream& out, std::span<const SenseAnnotation> annotations);

/// Two classes in the plane: class 1 is a jitter-free square lattice, class
/// 2 a uniform scatter over the same extent.
Dataset two_regularity_dataset(std::size_t side = 6, std::uint64_t seed = 11);

}  // namespace twsd
