// twsd: command-line front end for the tourist-walk hybrid WSD pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twsd/adjacency.hpp"
#include "twsd/corpus.hpp"
#include "twsd/error.hpp"
#include "twsd/eval.hpp"
#include "twsd/features.hpp"

namespace fs = std::filesystem;
using namespace twsd;

namespace {

struct Resources {
  std::string stopwords = std::string(TWSD_DATA_DIR) + "/stopwords.txt";
  std::string lemmas = std::string(TWSD_DATA_DIR) + "/lemmas.txt";
  std::string senses = std::string(TWSD_DATA_DIR) + "/senses.tsv";
};

void add_resource_options(CLI::App* cmd, Resources& res, bool with_senses) {
  cmd->add_option("--stopwords", res.stopwords, "Stopword list")->capture_default_str();
  cmd->add_option("--lemmas", res.lemmas, "Lemma dictionary")->capture_default_str();
  if (with_senses) cmd->add_option("--senses", res.senses, "Sense inventory (word<TAB>count)")->capture_default_str();
}

std::vector<Document> read_corpus(const std::string& dir, const Resources& res) {
  return load_corpus(dir, StopwordList::load(res.stopwords), Lemmatizer::load(res.lemmas));
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write(out);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResource("cannot open dataset " + path);
  return read_csv(in);
}

struct GraphOptions {
  std::optional<double> epsilon;
  std::size_t kappa = 3;
  double fallback_factor = 3.0;
};

void add_graph_options(CLI::App* cmd, GraphOptions& g) {
  cmd->add_option("--epsilon", g.epsilon, "Graph radius (default: median same-class distance)");
  cmd->add_option("--kappa", g.kappa, "Nearest neighbours for sparse classes")->capture_default_str();
  cmd->add_option("--fallback-factor", g.fallback_factor, "Test link fallback reach, in units of epsilon")
      ->capture_default_str();
}

struct EvalOptions {
  std::string data;
  std::vector<std::string> low_level{"knn"};
  std::size_t knn_k = 1;
  double lambda = 0.0;
  double alpha_t = 0.5;
  std::optional<double> alpha_c;
  std::size_t mu_c = 10;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  bool no_standardize = false;
  bool keep_vocabulary = false;
  GraphOptions graph;
};

void add_eval_options(CLI::App* cmd, EvalOptions& o) {
  cmd->add_option("--data", o.data, "Feature CSV with a label column")->required()->check(CLI::ExistingFile);
  cmd->add_option("--k", o.knn_k, "Neighbours for the kNN low level")->capture_default_str();
  cmd->add_option("--alpha-t", o.alpha_t, "Weight of the transient term")->capture_default_str();
  cmd->add_option("--alpha-c", o.alpha_c, "Weight of the cycle term (default 1 - alpha-t)");
  cmd->add_option("--mu-c", o.mu_c, "Largest memory length")->capture_default_str();
  cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Fold shuffling seed")->capture_default_str();
  cmd->add_flag("--no-standardize", o.no_standardize, "Skip per-fold z-scoring");
  cmd->add_flag("--keep-vocabulary", o.keep_vocabulary, "Keep columns that are all zero in the training fold");
  add_graph_options(cmd, o.graph);
}

PipelineConfig pipeline_config(const EvalOptions& o) {
  PipelineConfig config;
  config.low_level = parse_low_level(o.low_level.front());
  config.knn_k = o.knn_k;
  config.lambda = o.lambda;
  config.epsilon = o.graph.epsilon;
  config.kappa = o.graph.kappa;
  config.fallback_factor = o.graph.fallback_factor;
  config.high_level.alpha_t = o.alpha_t;
  config.high_level.alpha_c = o.alpha_c ? *o.alpha_c : 1.0 - o.alpha_t;
  config.high_level.mu_critical = o.mu_c;
  config.high_level.validate();
  config.standardize = !o.no_standardize;
  config.restrict_vocabulary = !o.keep_vocabulary;
  return config;
}

// ------------------------------------------------------------- subcommands

void run_preprocess(const std::string& in, const std::string& out, const Resources& res) {
  auto docs = read_corpus(in, res);
  emit(out, [&](std::ostream& os) {
    os << "document\tposition\tsurface\tlemma\n";
    for (const auto& doc : docs) {
      for (const auto& tok : doc.tokens) {
        if (!tok.is_content) continue;
        os << doc.id << '\t' << *tok.position << '\t' << tok.surface << '\t' << tok.lemma << '\n';
      }
    }
  });
}

struct AnnotatedCorpus {
  std::vector<Document> documents;
  std::vector<TokenStream> streams;
  std::vector<SenseAnnotation> annotations;
};

AnnotatedCorpus read_annotated(const std::string& in, const std::string& annotations, const Resources& res) {
  AnnotatedCorpus c;
  c.documents = read_corpus(in, res);
  c.annotations = load_annotations(annotations, c.documents, SenseInventory::load(res.senses));
  c.streams = content_streams(c.documents);
  return c;
}

void run_build_net(const std::string& in, const std::string& annotations, const std::string& out,
                   const Resources& res) {
  auto c = read_annotated(in, annotations, res);
  auto network = build_network(c.streams, c.annotations);
  emit(out, [&](std::ostream& os) { network.write_edge_list(os); });
}

void run_extract(const std::string& in, const std::string& annotations, const std::string& paradigm,
                 std::size_t window, std::size_t levels, const std::string& out, const Resources& res) {
  auto c = read_annotated(in, annotations, res);
  Dataset data;
  if (paradigm == "semantic") {
    data = semantic_features(c.streams, c.annotations, window);
  } else {
    data = topological_features(build_network(c.streams, c.annotations), c.annotations, levels);
  }
  emit(out, [&](std::ostream& os) { write_csv(os, data); });
}

void run_evaluate(const EvalOptions& o, const std::string& pvalue_method, std::size_t trials,
                  const std::string& dump) {
  Dataset data = read_dataset(o.data);
  PipelineConfig config = pipeline_config(o);
  FoldPlan plan = make_fold_plan(data, o.folds, o.seed);
  auto result = cross_validate(data, config, plan);

  double p = 0.0;
  if (pvalue_method == "monte-carlo") {
    std::vector<SenseId> truths;
    for (const auto& inst : data.instances) truths.push_back(*inst.label);
    p = p_value_monte_carlo(result.accuracy, truths, trials, o.seed);
  } else {
    p = p_value(result.accuracy, result.total, data.class_counts());
  }

  std::cout << "low_level " << to_string(config.low_level) << "\nlambda " << config.lambda << "\nfolds "
            << plan.fold_count() << "\naccuracy " << std::setprecision(6) << result.accuracy << "\ncorrect "
            << result.correct << '/' << result.total << "\nabstentions " << result.abstentions << "\np_value "
            << p << '\n';

  if (!dump.empty()) {
    Dataset full = config.standardize ? standardize(data) : data;
    auto model = make_low_level(config.low_level, config.knn_k);
    model->fit(full);
    emit(dump, [&](std::ostream& os) { model->dump(os); });
  }
}

void run_sweep(const EvalOptions& o, const std::string& word, const std::string& paradigm, const std::string& out) {
  Dataset data = read_dataset(o.data);
  PipelineConfig config = pipeline_config(o);
  std::vector<LowLevelKind> kinds;
  for (const auto& name : o.low_level) kinds.push_back(parse_low_level(name));
  FoldPlan plan = make_fold_plan(data, o.folds, o.seed);
  auto grid = default_lambda_grid();
  auto reports = lambda_sweep(data, config, plan, kinds, grid, word, paradigm);
  emit(out, [&](std::ostream& os) { write_report_csv(os, reports); });
  for (const auto& r : reports) {
    std::cerr << r.algorithm << ": best lambda " << r.best_lambda << ", accuracy " << r.best_accuracy
              << " (lambda 0: " << r.rows.front().accuracy << ")\n";
  }
}

void run_walk_curves(const std::string& path, const GraphOptions& g, std::size_t mu_max, bool no_standardize,
                     const std::string& out) {
  Dataset data = read_dataset(path);
  if (!no_standardize) data = standardize(std::move(data));
  GraphConfig config{g.epsilon ? *g.epsilon : median_same_class_distance(data), g.kappa, g.fallback_factor};
  auto curves = walk_curves(data, config, mu_max);
  emit(out, [&](std::ostream& os) { write_walk_curves_csv(os, curves); });
}

void run_toy(const std::string& path, const ToyConfig& config) {
  ToyData toy;
  if (path.empty()) {
    toy = toy_dataset();
  } else {
    std::ifstream in(path);
    if (!in) throw MissingResource("cannot open toy data " + path);
    toy = read_toy_csv(in);
  }
  auto report = toy_experiment(toy, config);
  std::cout << "structured_class " << toy.structured_class << "\nunstructured_class " << toy.unstructured_class
            << "\nlow_level";
  for (double s : report.low.scores()) std::cout << ' ' << s;
  std::cout << "\nhigh_level";
  if (report.high) {
    for (double s : report.high->scores()) std::cout << ' ' << s;
  } else {
    std::cout << " undefined";
  }
  std::cout << "\nlambda,label\n";
  for (const auto& [lambda, label] : report.predictions) {
    std::cout << std::fixed << std::setprecision(2) << lambda << ',' << label << '\n';
  }
  std::cout << std::defaultfloat << "flip_lambda ";
  if (report.flip_lambda) {
    std::cout << *report.flip_lambda;
  } else {
    std::cout << "none";
  }
  std::cout << "\nmonotone_after_flip " << (report.monotone_after_flip ? "yes" : "no") << '\n';
}

void run_synth(const std::string& out_dir, const SyntheticCorpusConfig& config, std::size_t side) {
  fs::create_directories(fs::path(out_dir) / "docs");
  auto corpus = generate_two_sense_corpus(config);
  for (const auto& [id, text] : corpus.documents) {
    std::ofstream(fs::path(out_dir) / "docs" / (id + ".txt")) << text << '\n';
  }
  std::ofstream(fs::path(out_dir) / "annotations.tsv") << [&] {
    std::ostringstream os;
    write_annotations(os, corpus.annotations);
    return os.str();
  }();
  std::ofstream senses(fs::path(out_dir) / "senses.tsv");
  for (const auto& [word, count] : corpus.inventory.entries()) senses << word << '\t' << count << '\n';
  std::ofstream regular(fs::path(out_dir) / "regularity.csv");
  write_csv(regular, two_regularity_dataset(side, config.seed));
  std::ofstream toy(fs::path(out_dir) / "toy.csv");
  write_toy_csv(toy, toy_dataset());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tourist-walk hybrid classification for word sense disambiguation"};
  app.set_config("--config", "", "Read option defaults from a key = value file");
  app.require_subcommand(1);
  Resources res;

  auto* pre = app.add_subcommand("preprocess", "Tokenize, drop stopwords and lemmatize a corpus directory");
  std::string in, out, annotations;
  pre->add_option("--in", in, "Directory of .txt documents")->required()->check(CLI::ExistingDirectory);
  pre->add_option("--out", out, "Output TSV (default stdout)");
  add_resource_options(pre, res, false);

  auto* net = app.add_subcommand("build-net", "Build the word adjacency network as an edge list");
  net->add_option("--in", in, "Directory of .txt documents")->required()->check(CLI::ExistingDirectory);
  net->add_option("--annotations", annotations, "Sense annotation TSV")->required()->check(CLI::ExistingFile);
  net->add_option("--out", out, "Output edge list (default stdout)");
  add_resource_options(net, res, true);

  auto* ext = app.add_subcommand("extract", "Extract semantic or topological features");
  std::string paradigm = "semantic";
  std::size_t window = 5, levels = 2;
  ext->add_option("--in", in, "Directory of .txt documents")->required()->check(CLI::ExistingDirectory);
  ext->add_option("--annotations", annotations, "Sense annotation TSV")->required()->check(CLI::ExistingFile);
  ext->add_option("--paradigm", paradigm, "semantic or topological")
      ->check(CLI::IsMember({"semantic", "topological"}))
      ->capture_default_str();
  ext->add_option("--window", window, "Semantic window size")->capture_default_str();
  ext->add_option("--levels", levels, "Hierarchical levels for topological features")->capture_default_str();
  ext->add_option("--out", out, "Output CSV (default stdout)");
  add_resource_options(ext, res, true);

  auto* eval = app.add_subcommand("evaluate", "Cross-validate one hybrid configuration");
  EvalOptions eval_opts;
  std::string pvalue_method = "binomial", dump;
  std::size_t trials = 10000;
  add_eval_options(eval, eval_opts);
  eval->add_option("--low-level", eval_opts.low_level, "knn, bayes, c45 or majority")
      ->expected(1)
      ->check(CLI::IsMember({"knn", "bayes", "c45", "majority"}))
      ->capture_default_str();
  eval->add_option("--lambda", eval_opts.lambda, "Compliance term")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval->add_option("--p-value", pvalue_method, "binomial or monte-carlo")
      ->check(CLI::IsMember({"binomial", "monte-carlo"}))
      ->capture_default_str();
  eval->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
  eval->add_option("--dump", dump, "Write the low-level model fitted on all data");

  auto* sweep = app.add_subcommand("sweep", "Sweep lambda over 0, 0.05, ..., 1");
  EvalOptions sweep_opts;
  sweep_opts.low_level = {"knn", "bayes", "c45"};
  std::string word, sweep_paradigm;
  add_eval_options(sweep, sweep_opts);
  sweep->add_option("--low-level", sweep_opts.low_level, "Low-level classifiers")
      ->check(CLI::IsMember({"knn", "bayes", "c45", "majority"}))
      ->capture_default_str();
  sweep->add_option("--word", word, "Word column of the report");
  sweep->add_option("--paradigm", sweep_paradigm, "Paradigm column of the report");
  sweep->add_option("--out", out, "Report CSV (default stdout)");

  auto* curves = app.add_subcommand("walk-curves", "Mean transient and cycle length per class versus mu");
  std::string data;
  GraphOptions curve_graph;
  std::size_t mu_max = 10;
  bool no_standardize = false;
  curves->add_option("--data", data, "Feature CSV")->required()->check(CLI::ExistingFile);
  curves->add_option("--mu-max", mu_max, "Largest memory length")->capture_default_str();
  curves->add_flag("--no-standardize", no_standardize, "Use raw feature values");
  curves->add_option("--out", out, "Output CSV (default stdout)");
  add_graph_options(curves, curve_graph);

  auto* toy = app.add_subcommand("toy", "Decision-boundary shift on the pyramid-versus-scatter toy set");
  ToyConfig toy_config;
  std::string toy_path = std::string(TWSD_DATA_DIR) + "/toy.csv";
  toy->add_option("--data", toy_path, "Toy CSV (empty string: regenerate)")->capture_default_str();
  toy->add_option("--epsilon", toy_config.graph.epsilon, "Graph radius")->capture_default_str();
  toy->add_option("--kappa", toy_config.graph.kappa, "Nearest neighbours")->capture_default_str();
  toy->add_option("--k", toy_config.knn_k, "Neighbours for the kNN low level")->capture_default_str();
  toy->add_option("--mu-c", toy_config.high_level.mu_critical, "Largest memory length")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write the synthetic two-sense corpus and toy datasets");
  SyntheticCorpusConfig synth_config;
  std::size_t side = 6;
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--word", synth_config.word, "Ambiguous word")->capture_default_str();
  synth->add_option("--occurrences", synth_config.occurrences_per_sense, "Occurrences per sense")
      ->capture_default_str();
  synth->add_option("--documents", synth_config.documents, "Documents")->capture_default_str();
  synth->add_option("--seed", synth_config.seed, "Generator seed")->capture_default_str();
  synth->add_option("--side", side, "Lattice side of the regularity dataset")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) run_preprocess(in, out, res);
    if (*net) run_build_net(in, annotations, out, res);
    if (*ext) run_extract(in, annotations, paradigm, window, levels, out, res);
    if (*eval) run_evaluate(eval_opts, pvalue_method, trials, dump);
    if (*sweep) run_sweep(sweep_opts, word, sweep_paradigm, out);
    if (*curves) run_walk_curves(data, curve_graph, mu_max, no_standardize, out);
    if (*toy) run_toy(toy_path, toy_config);
    if (*synth) run_synth(out, synth_config, side);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
