#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "synthetic_pipeline.hpp"
#include "twsd/features.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(TWSD_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string value_of(const std::string& out, const std::string& key) {
  std::istringstream lines(out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("synth, extract, evaluate and sweep") {
  auto dir = testkit::scratch_dir("cli");
  auto synth = run("synth --out " + dir.string() + " --occurrences 30 --documents 3 --side 4");
  REQUIRE(synth.status == 0);
  CHECK(fs::exists(dir / "annotations.tsv"));
  CHECK(fs::exists(dir / "regularity.csv"));
  CHECK(slurp(dir / "toy.csv") == slurp(std::string(TWSD_DATA_DIR) + "/toy.csv"));

  std::string corpus = " --in " + (dir / "docs").string() + " --annotations " + (dir / "annotations.tsv").string() +
                       " --senses " + (dir / "senses.tsv").string();
  auto pre = run("preprocess --in " + (dir / "docs").string() + " --out " + (dir / "tokens.tsv").string());
  CHECK(pre.status == 0);
  CHECK(slurp(dir / "tokens.tsv").rfind("document\tposition\tsurface\tlemma\n", 0) == 0);

  auto net = run("build-net" + corpus + " --out " + (dir / "net.tsv").string());
  CHECK(net.status == 0);
  CHECK(slurp(dir / "net.tsv").find("bear#0") != std::string::npos);

  auto sem = run("extract" + corpus + " --paradigm semantic --out " + (dir / "sem.csv").string());
  REQUIRE(sem.status == 0);
  auto topo = run("extract" + corpus + " --paradigm topological --out " + (dir / "topo.csv").string());
  REQUIRE(topo.status == 0);

  // The CLI's features match the library run on the same generated corpus.
  twsd::SyntheticCorpusConfig config;
  config.occurrences_per_sense = 30;
  config.documents = 3;
  auto expected = testkit::synthetic_features(config);
  std::ifstream sem_in(dir / "sem.csv");
  auto sem_data = twsd::read_csv(sem_in);
  CHECK(sem_data.feature_names == expected.semantic.feature_names);
  CHECK(sem_data.size() == expected.semantic.size());
  std::ifstream topo_in(dir / "topo.csv");
  CHECK(twsd::read_csv(topo_in).size() == 60);

  auto eval = run("evaluate --data " + (dir / "sem.csv").string() + " --lambda 0.3 --folds 5");
  REQUIRE(eval.status == 0);
  double acc = std::stod(value_of(eval.out, "accuracy"));
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK_FALSE(value_of(eval.out, "p_value").empty());
  CHECK(value_of(eval.out, "folds") == "5");
  auto wide = run("evaluate --data " + (dir / "sem.csv").string() + " --lambda 0.3 --folds 5 --keep-vocabulary");
  CHECK(wide.status == 0);

  auto mc = run("evaluate --data " + (dir / "sem.csv").string() +
                " --low-level bayes --p-value monte-carlo --trials 500 --folds 5 --dump " + (dir / "nb.csv").string());
  CHECK(mc.status == 0);
  CHECK(slurp(dir / "nb.csv").rfind("class,feature,bandwidth\n", 0) == 0);

  auto sweep = run("sweep --data " + (dir / "topo.csv").string() + " --folds 5 --word bear --paradigm topological --out " +
                   (dir / "report.csv").string());
  REQUIRE(sweep.status == 0);
  std::istringstream report(slurp(dir / "report.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(report, line);
  CHECK(line == "word,paradigm,algorithm,lambda,accuracy,p_value");
  while (std::getline(report, line)) ++rows;
  CHECK(rows == 63);

  auto curves = run("walk-curves --data " + (dir / "regularity.csv").string() + " --mu-max 6");
  CHECK(curves.status == 0);
  CHECK(curves.out.rfind("class,mu,mean_transient,mean_cycle,steady_state_mu\n", 0) == 0);
}

TEST_CASE("toy subcommand") {
  auto toy = run("toy");
  REQUIRE(toy.status == 0);
  CHECK(value_of(toy.out, "structured_class") == "1");
  CHECK(value_of(toy.out, "flip_lambda") == "0.8");
  CHECK(value_of(toy.out, "monotone_after_flip") == "yes");
  CHECK(toy.out.find("0.00,2\n") != std::string::npos);
  CHECK(toy.out.find("1.00,1\n") != std::string::npos);

  auto regenerated = run("toy --data ''");
  CHECK(regenerated.out == toy.out);
}

TEST_CASE("config file supplies option defaults") {
  auto dir = testkit::scratch_dir("cli-config");
  std::ofstream(dir / "run.ini") << "[toy]\nk = 25\n";
  auto r = run("--config " + (dir / "run.ini").string() + " toy");
  CHECK(r.status == 0);
  CHECK(value_of(r.out, "low_level") == value_of(run("toy --k 25").out, "low_level"));
  CHECK(value_of(r.out, "low_level") != value_of(run("toy").out, "low_level"));
}

TEST_CASE("errors exit nonzero") {
  CHECK(run("").status != 0);
  CHECK(run("frobnicate").status != 0);
  CHECK(run("evaluate --data /nonexistent.csv").status != 0);

  auto dir = testkit::scratch_dir("cli-errors");
  std::ofstream(dir / "bad.csv") << "x,y,label\n1,2,1\n1,oops,2\n";
  auto bad = run("evaluate --data " + (dir / "bad.csv").string());
  CHECK(bad.status == 1);
  CHECK(bad.out.find("error:") != std::string::npos);

  std::ofstream(dir / "tiny.csv") << "x,label\n0,1\n1,1\n2,2\n3,2\n4,2\n";
  auto tiny = run("evaluate --data " + (dir / "tiny.csv").string());
  CHECK(tiny.status == 1);

  CHECK(run("evaluate --data " + (dir / "tiny.csv").string() + " --lambda 2").status != 0);
  CHECK(run("extract --in " + dir.string() + " --annotations " + (dir / "bad.csv").string() +
            " --paradigm lexical")
            .status != 0);
}
