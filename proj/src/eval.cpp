#include "twsd/eval.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "twsd/error.hpp"
#include "twsd/parallel.hpp"

namespace twsd {
namespace {

// Platform-stable draws: mt19937_64 output is fully specified, unlike the
// standard distributions.
std::size_t draw_index(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void stable_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[draw_index(rng, i)]);
}

}  // namespace

// ------------------------------------------------------------ fold planning

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold, std::size_t dataset_size) const {
  const auto& test = test_folds.at(fold);
  std::vector<std::size_t> rows;
  rows.reserve(dataset_size - test.size());
  for (std::size_t r = 0; r < dataset_size; ++r) {
    if (!std::binary_search(test.begin(), test.end(), r)) rows.push_back(r);
  }
  return rows;
}

FoldPlan make_fold_plan(const Dataset& dataset, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("need at least 2 folds");
  std::map<SenseId, std::vector<std::size_t>> rows_by_class;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& label = dataset.instances[r].label;
    if (!label) throw InvalidArgument("cross-validation needs labeled instances (row " + std::to_string(r) + ")");
    rows_by_class[*label].push_back(r);
  }
  if (rows_by_class.empty()) throw InvalidArgument("empty dataset");

  std::size_t smallest = dataset.size();
  for (const auto& [c, rows] : rows_by_class) smallest = std::min(smallest, rows.size());
  if (smallest < 3) {
    throw InsufficientClassSize("smallest class has " + std::to_string(smallest) +
                                " instance(s); cross-validation needs at least 3");
  }
  folds = std::min(folds, smallest);

  FoldPlan plan;
  plan.seed = seed;
  plan.test_folds.assign(folds, {});
  std::mt19937_64 rng(seed);
  std::size_t deal = 0;
  for (auto& [c, rows] : rows_by_class) {
    stable_shuffle(rows, rng);
    for (std::size_t r : rows) plan.test_folds[deal++ % folds].push_back(r);
  }
  for (auto& fold : plan.test_folds) std::sort(fold.begin(), fold.end());
  return plan;
}

// --------------------------------------------------------- cross-validation

std::size_t CrossValidationOutcomes::abstentions() const {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(), [](const InstanceOutcome& o) { return !o.high; }));
}

std::size_t CrossValidationOutcomes::correct(std::size_t kind_index, double lambda) const {
  std::size_t hits = 0;
  for (const auto& o : instances) {
    if (hybrid_predict(lambda, o.low.at(kind_index), o.high).label == o.truth) ++hits;
  }
  return hits;
}

double CrossValidationOutcomes::accuracy(std::size_t kind_index, double lambda) const {
  if (instances.empty()) return 0.0;
  return static_cast<double>(correct(kind_index, lambda)) / static_cast<double>(instances.size());
}

CrossValidationOutcomes collect_outcomes(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                                         std::span<const LowLevelKind> kinds, bool with_high_level) {
  dataset.validate();
  CrossValidationOutcomes out;
  out.kinds.assign(kinds.begin(), kinds.end());

  for (std::size_t fold = 0; fold < plan.fold_count(); ++fold) {
    const auto& test_rows = plan.test_folds[fold];
    auto train_rows = plan.train_rows(fold, dataset.size());
    Dataset train = dataset.subset(train_rows);
    Dataset test = dataset.subset(test_rows);

    if (config.restrict_vocabulary) {
      auto columns = nonzero_columns(train);
      train = train.select_columns(columns);
      test = test.select_columns(columns);
    }
    if (config.standardize) {
      auto scaler = Standardizer::fit(train);
      scaler.apply_in_place(train);
      scaler.apply_in_place(test);
    }

    std::vector<std::unique_ptr<LowLevelClassifier>> low;
    for (auto kind : kinds) {
      low.push_back(make_low_level(kind, config.knn_k));
      low.back()->fit(train);
    }

    HighLevelClassifier high;
    if (with_high_level) {
      GraphConfig graph{config.epsilon ? *config.epsilon : median_same_class_distance(train), config.kappa,
                        config.fallback_factor};
      high.fit(train, graph, config.high_level);
    }

    std::vector<InstanceOutcome> fold_outcomes(test.size());
    parallel_for(test.size(), [&](std::size_t i) {
      const auto& x = test.instances[i].features;
      auto& o = fold_outcomes[i];
      o.row = test_rows[i];
      o.truth = *test.instances[i].label;
      for (const auto& model : low) o.low.push_back(model->predict(x));
      if (with_high_level) o.high = high.predict(x);
    });
    for (auto& o : fold_outcomes) out.instances.push_back(std::move(o));
  }
  std::sort(out.instances.begin(), out.instances.end(),
            [](const InstanceOutcome& a, const InstanceOutcome& b) { return a.row < b.row; });
  return out;
}

CrossValidationResult cross_validate(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan) {
  const LowLevelKind kinds[] = {config.low_level};
  auto outcomes = collect_outcomes(dataset, config, plan, kinds, config.lambda > 0.0);
  CrossValidationResult result;
  result.total = outcomes.instances.size();
  result.correct = outcomes.correct(0, config.lambda);
  result.accuracy = outcomes.accuracy(0, config.lambda);
  result.abstentions = config.lambda > 0.0 ? outcomes.abstentions() : 0;
  return result;
}

// ------------------------------------------------------------------ p-value

double p_value(double accuracy, std::size_t n, const std::map<SenseId, std::size_t>& class_counts) {
  if (n == 0) throw InvalidArgument("p-value needs at least one trial");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InvalidArgument("accuracy must lie in [0, 1]");
  double total = 0.0;
  for (const auto& [c, count] : class_counts) total += static_cast<double>(count);
  if (total == 0.0) throw InvalidArgument("class counts are empty");
  double q = 0.0;
  for (const auto& [c, count] : class_counts) {
    double p = static_cast<double>(count) / total;
    q += p * p;
  }
  const auto hits = static_cast<std::size_t>(std::llround(accuracy * static_cast<double>(n)));
  if (hits == 0) return 1.0;
  if (q >= 1.0) return 1.0;
  // P(X >= k) for X ~ Binomial(n, q) is the regularized incomplete beta I_q(k, n - k + 1).
  return boost::math::ibeta(static_cast<double>(hits), static_cast<double>(n - hits + 1), q);
}

double p_value_monte_carlo(double accuracy, std::span<const SenseId> truths, std::size_t trials,
                           std::uint64_t seed) {
  if (truths.empty() || trials == 0) throw InvalidArgument("Monte Carlo p-value needs labels and trials");
  std::map<SenseId, double> priors;
  for (SenseId t : truths) priors[t] += 1.0;
  std::vector<SenseId> classes;
  std::vector<double> cumulative;
  double running = 0.0;
  for (auto& [c, n] : priors) {
    running += n / static_cast<double>(truths.size());
    classes.push_back(c);
    cumulative.push_back(running);
  }
  cumulative.back() = 1.0;

  const auto target = static_cast<std::size_t>(std::llround(accuracy * static_cast<double>(truths.size())));
  std::mt19937_64 rng(seed);
  std::size_t at_least = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::size_t hits = 0;
    for (SenseId truth : truths) {
      double u = draw_unit(rng);
      auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (classes[std::min(k, classes.size() - 1)] == truth) ++hits;
    }
    if (hits >= target) ++at_least;
  }
  return static_cast<double>(at_least) / static_cast<double>(trials);
}

// ------------------------------------------------------------------- sweeps

const SweepRow& ExperimentReport::at(double lambda) const {
  for (const auto& row : rows) {
    if (std::abs(row.lambda - lambda) < 1e-12) return row;
  }
  throw InvalidArgument("lambda not in sweep grid");
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::vector<ExperimentReport> lambda_sweep(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                                           std::span<const LowLevelKind> kinds, std::span<const double> grid,
                                           const std::string& word, const std::string& paradigm) {
  if (grid.empty()) throw InvalidArgument("empty lambda grid");
  auto outcomes = collect_outcomes(dataset, config, plan, kinds, true);
  const auto counts = dataset.class_counts();
  const std::size_t n = outcomes.instances.size();

  std::vector<ExperimentReport> reports;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    ExperimentReport report;
    report.word = word;
    report.paradigm = paradigm;
    report.algorithm = std::string(to_string(kinds[k]));
    report.abstentions = outcomes.abstentions();
    for (double lambda : grid) {
      double acc = outcomes.accuracy(k, lambda);
      report.rows.push_back({lambda, acc, p_value(acc, n, counts)});
    }
    const SweepRow* best = &report.rows.front();
    for (const auto& row : report.rows) {
      if (row.accuracy > best->accuracy || (row.accuracy == best->accuracy && row.lambda < best->lambda)) best = &row;
    }
    report.best_lambda = best->lambda;
    report.best_accuracy = best->accuracy;
    reports.push_back(std::move(report));
  }
  return reports;
}

ExperimentReport lambda_sweep(const Dataset& dataset, const PipelineConfig& config, const FoldPlan& plan,
                              std::span<const double> grid, const std::string& word, const std::string& paradigm) {
  const LowLevelKind kinds[] = {config.low_level};
  return lambda_sweep(dataset, config, plan, kinds, grid, word, paradigm).front();
}

void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  out << "word,paradigm,algorithm,lambda,accuracy,p_value\n";
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      out << report.word << ',' << report.paradigm << ',' << report.algorithm << ',' << std::fixed
          << std::setprecision(2) << row.lambda << ',' << std::setprecision(6) << row.accuracy << ','
          << std::defaultfloat << std::setprecision(6) << row.p_value << '\n';
    }
  }
}

// -------------------------------------------------------------- walk curves

std::vector<WalkCurve> walk_curves(const Dataset& dataset, const GraphConfig& config, std::size_t mu_max) {
  std::vector<WalkCurve> curves;
  for (const auto& graph : build_training_graph(dataset, config)) {
    auto stats = component_stats(graph, mu_max);
    WalkCurve curve{graph.class_id(), stats.mean_transient, stats.mean_cycle, 0};
    curve.steady_state_mu = steady_state_onset(curve.mean_transient, curve.mean_cycle);
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_walk_curves_csv(std::ostream& out, std::span<const WalkCurve> curves) {
  out << "class,mu,mean_transient,mean_cycle,steady_state_mu\n";
  out << std::setprecision(10);
  for (const auto& curve : curves) {
    for (std::size_t mu = 0; mu < curve.mean_transient.size(); ++mu) {
      out << curve.class_id << ',' << mu << ',' << curve.mean_transient[mu] << ',' << curve.mean_cycle[mu] << ','
          << curve.steady_state_mu << '\n';
    }
  }
}

// -------------------------------------------------------------------- toy

ToyData toy_dataset(std::uint64_t seed) {
  constexpr double spacing = 0.015;
  const double rise = spacing * std::sqrt(3.0) / 2.0;
  constexpr double x0 = 0.40, y0 = 0.40;

  ToyData toy;
  toy.training.feature_names = {"x", "y"};
  std::size_t row = 0;
  for (int level = 0; level < 4; ++level) {
    for (int i = 0; i < 5 - level; ++i) {
      toy.training.instances.push_back(
          {{"toy", row++}, {x0 + (i + 0.5 * level) * spacing, y0 + level * rise}, toy.structured_class});
    }
  }

  // The probe sits just past the pyramid's base corner, inside the scatter.
  toy.probe = {x0 + 4 * spacing + 0.83 * spacing * std::cos(-0.41), y0 + 0.83 * spacing * std::sin(-0.41)};
  const double cx = x0 + 5.0 * spacing, cy = y0 - 1.12 * spacing, radius = 0.0155;
  std::mt19937_64 rng(seed);
  while (row < 34) {
    double dx = (2.0 * draw_unit(rng) - 1.0) * radius;
    double dy = (2.0 * draw_unit(rng) - 1.0) * radius;
    if (dx * dx + dy * dy > radius * radius) continue;
    toy.training.instances.push_back({{"toy", row++}, {cx + dx, cy + dy}, toy.unstructured_class});
  }
  return toy;
}

void write_toy_csv(std::ostream& out, const ToyData& toy) {
  Dataset all = toy.training;
  all.instances.push_back({{"probe", 0}, toy.probe, std::nullopt});
  write_csv(out, all);
}

ToyData read_toy_csv(std::istream& in) {
  Dataset all = read_csv(in);
  ToyData toy;
  toy.training.feature_names = all.feature_names;
  bool have_probe = false;
  for (auto& inst : all.instances) {
    if (inst.label) {
      toy.training.instances.push_back(std::move(inst));
    } else if (!have_probe) {
      toy.probe = inst.features;
      have_probe = true;
    } else {
      throw InvalidArgument("toy data must contain exactly one unlabeled probe row");
    }
  }
  if (!have_probe) throw InvalidArgument("toy data has no unlabeled probe row");
  auto classes = toy.training.classes();
  if (classes.size() != 2) throw InvalidArgument("toy data must have two classes");
  auto counts = toy.training.class_counts();
  // The structured class is the smaller one.
  toy.structured_class = counts[classes[0]] <= counts[classes[1]] ? classes[0] : classes[1];
  toy.unstructured_class = toy.structured_class == classes[0] ? classes[1] : classes[0];
  return toy;
}

SenseId ToyReport::label_at(double lambda) const {
  for (const auto& [l, label] : predictions) {
    if (std::abs(l - lambda) < 1e-12) return label;
  }
  throw InvalidArgument("lambda not in toy grid");
}

ToyReport toy_experiment(const ToyData& toy, const ToyConfig& config) {
  KnnClassifier low(config.knn_k);
  low.fit(toy.training);
  HighLevelClassifier high;
  high.fit(toy.training, config.graph, config.high_level);

  ToyReport report{low.predict(toy.probe), high.predict(toy.probe), {}, std::nullopt, false};
  for (double lambda : config.grid) {
    SenseId label = hybrid_predict(lambda, report.low, report.high).label;
    report.predictions.emplace_back(lambda, label);
    if (!report.flip_lambda && label == toy.structured_class) report.flip_lambda = lambda;
  }
  if (report.flip_lambda) {
    report.monotone_after_flip = std::all_of(report.predictions.begin(), report.predictions.end(), [&](const auto& p) {
      return p.first < *report.flip_lambda || p.second == toy.structured_class;
    });
  }
  return report;
}

}  // namespace twsd
