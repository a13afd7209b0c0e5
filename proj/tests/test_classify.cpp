#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "twsd/classify.hpp"
#include "twsd/error.hpp"

using namespace twsd;

namespace {

Dataset make(const std::vector<std::pair<std::vector<double>, SenseId>>& rows) {
  Dataset d;
  for (std::size_t f = 0; f < rows.front().first.size(); ++f) d.feature_names.push_back("f" + std::to_string(f + 1));
  std::size_t i = 0;
  for (const auto& [x, y] : rows) d.instances.push_back({{"r", i++}, x, y});
  return d;
}

Dataset random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim, std::size_t classes) {
  std::uniform_real_distribution<double> u(-1, 1);
  Dataset d;
  for (std::size_t f = 0; f < dim; ++f) d.feature_names.push_back("f" + std::to_string(f));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (auto& v : x) v = u(rng);
    d.instances.push_back({{"r", i}, x, static_cast<SenseId>(1 + rng() % classes)});
  }
  return d;
}

// Red (2) and blue (1) points around the origin: the 5 nearest hold four
// reds, the 13 nearest a blue majority, the 19 nearest still blue.
Dataset knn_rings() {
  std::vector<std::pair<std::vector<double>, SenseId>> rows;
  auto ring = [&](double r, std::vector<SenseId> labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      double a = 2 * M_PI * static_cast<double>(i) / static_cast<double>(labels.size()) + r;
      rows.push_back({{r * std::cos(a), r * std::sin(a)}, labels[i]});
    }
  };
  ring(1.0, {2, 2, 2, 2, 1});
  ring(2.0, {1, 1, 1, 1, 1, 1, 1, 2});
  ring(3.0, {1, 1, 1, 2, 2, 1});
  return make(rows);
}

}  // namespace

TEST_CASE("membership basics") {
  auto u = Membership::uniform({1, 2, 3, 4});
  CHECK(u.sum() == doctest::Approx(1.0));
  CHECK(u.argmax() == 1);
  auto w = Membership::from_weights({2, 5}, {1, 3});
  CHECK(w.of(5) == doctest::Approx(0.75));
  CHECK(w.argmax() == 5);
  auto z = Membership::from_weights({2, 5}, {0, 0});
  CHECK(z.of(2) == 0.5);
  Membership tie({3, 7}, {0.5, 0.5});
  CHECK(tie.argmax() == 3);
  CHECK(w.of(9) == 0.0);
}

TEST_CASE("knn memberships") {
  auto d = knn_rings();
  std::vector<double> origin{0, 0};

  KnnClassifier k5(5);
  k5.fit(d);
  auto m5 = k5.predict(origin);
  CHECK(m5.of(2) == doctest::Approx(0.8));
  CHECK(m5.of(1) == doctest::Approx(0.2));
  CHECK(m5.argmax() == 2);

  KnnClassifier k13(13);
  k13.fit(d);
  CHECK(k13.predict(origin).argmax() == 1);

  KnnClassifier k19(19);
  k19.fit(d);
  CHECK(k19.predict(origin).argmax() == 1);

  KnnClassifier k1;
  k1.fit(d);
  auto exact = k1.predict(d.instances[7].features);
  CHECK(exact.of(*d.instances[7].label) == 1.0);

  CHECK_THROWS_AS(KnnClassifier(0), InvalidArgument);
}

TEST_CASE("1-NN is perfect on its own duplicate-free training set") {
  std::mt19937_64 rng(4);
  auto d = random_points(rng, 200, 3, 3);
  KnnClassifier k1;
  k1.fit(d);
  std::size_t hits = 0;
  for (const auto& inst : d.instances) hits += k1.predict(inst.features).argmax() == *inst.label;
  CHECK(hits == d.size());
}

TEST_CASE("naive bayes") {
  auto d = make({{{-1.2}, 1}, {{-1.0}, 1}, {{-0.8}, 1}, {{0.8}, 2}, {{1.0}, 2}, {{1.2}, 2}});
  NaiveBayesClassifier nb;
  nb.fit(d);

  double sigma = std::sqrt(0.08 / 2.0);  // sample standard deviation
  CHECK(nb.bandwidth(0, 0) == doctest::Approx(1.06 * sigma * std::pow(3.0, -0.2)));

  auto mid = nb.predict(std::vector<double>{0.0});
  CHECK(mid.of(1) == doctest::Approx(0.5));
  CHECK(nb.predict(std::vector<double>{0.5}).argmax() == 2);
  CHECK(nb.predict(std::vector<double>{-0.3}).argmax() == 1);

  // Bisection for the decision boundary.
  double lo = -0.9, hi = 0.9;
  for (int i = 0; i < 60; ++i) {
    double m = 0.5 * (lo + hi);
    if (nb.predict(std::vector<double>{m}).of(2) > 0.5) {
      hi = m;
    } else {
      lo = m;
    }
  }
  CHECK(std::abs(0.5 * (lo + hi)) < 1e-3);

  SUBCASE("single points use the bandwidth floor") {
    auto pair = make({{{-1.0}, 1}, {{1.0}, 2}});
    NaiveBayesClassifier tiny;
    tiny.fit(pair);
    CHECK(tiny.bandwidth(0, 0) == NaiveBayesClassifier::kMinBandwidth);
    CHECK(tiny.predict(std::vector<double>{0.5}).argmax() == 2);
    auto p = tiny.predict(std::vector<double>{0.5});
    CHECK(std::isfinite(p.of(1)));
    CHECK(p.sum() == doctest::Approx(1.0));
  }

  SUBCASE("argmax ignores a common offset of log scores") {
    auto scores = nb.log_scores(std::vector<double>{0.3});
    auto m = nb.predict(std::vector<double>{0.3});
    CHECK((scores[1] > scores[0]) == (m.argmax() == 2));
  }

  std::ostringstream out;
  nb.dump(out);
  CHECK(out.str().rfind("class,feature,bandwidth\n", 0) == 0);
}

TEST_CASE("entropy and information gain") {
  std::vector<std::size_t> even{5, 5}, pure{4, 0}, three{1, 1, 2};
  CHECK(entropy(even) == doctest::Approx(1.0));
  CHECK(entropy(pure) == 0.0);
  CHECK(entropy(three) == doctest::Approx(1.5));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto d = random_points(rng, 30, 2, 3);
    std::vector<std::size_t> rows(d.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<std::size_t> counts(4, 0);
    for (const auto& inst : d.instances) ++counts[*inst.label];
    const double h = entropy(counts);
    for (std::size_t f = 0; f < 2; ++f) {
      for (const auto& inst : d.instances) {
        double g = DecisionTree::information_gain(d, rows, f, inst.features[f]);
        CHECK(g >= 0.0);
        CHECK(g <= h + 1e-12);
      }
    }
  }
}

TEST_CASE("decision tree") {
  SUBCASE("separable 1-D data") {
    auto d = make({{{0.1}, 1}, {{0.2}, 1}, {{0.3}, 1}, {{0.7}, 2}, {{0.8}, 2}, {{0.9}, 2}});
    DecisionTree tree;
    tree.fit(d);
    CHECK(tree.depth() == 1);
    CHECK(tree.nodes()[0].threshold == doctest::Approx(0.5));
    CHECK(tree.nodes()[0].gain == doctest::Approx(1.0));
    for (const auto& inst : d.instances) CHECK(tree.predict(inst.features).argmax() == *inst.label);
  }

  SUBCASE("xor needs two levels") {
    auto d = make({{{0, 0}, 1}, {{1, 1}, 1}, {{0, 1}, 2}, {{1, 0}, 2}});
    std::vector<std::size_t> rows{0, 1, 2, 3};
    auto split = DecisionTree::best_split(d, rows);
    REQUIRE(split);
    CHECK(split->gain == doctest::Approx(0.0));
    DecisionTree tree;
    tree.fit(d);
    CHECK(tree.depth() >= 2);
    for (const auto& inst : d.instances) CHECK(tree.predict(inst.features).argmax() == *inst.label);
  }

  SUBCASE("hand-built tree routes to s3") {
    using Node = DecisionTree::Node;
    std::vector<Node> nodes(5);
    nodes[0].feature = 0;  // f1 >= 0 ?
    nodes[0].threshold = 0.0;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].feature = 2;  // f3 >= 0.1 ?
    nodes[1].threshold = 0.1;
    nodes[1].left = 3;
    nodes[1].right = 4;
    nodes[2].proportions = {1, 0, 0};
    nodes[3].proportions = {0, 1, 0};
    nodes[4].proportions = {0, 0, 1};
    auto tree = DecisionTree::from_nodes({1, 2, 3}, nodes);
    CHECK(tree.predict(std::vector<double>{-0.23, 0.29, 0.38}).argmax() == 3);
    std::ostringstream out;
    tree.dump(out);
    CHECK(out.str().find("IF f0 >= 0") != std::string::npos);
  }

  SUBCASE("min size 1 fits any consistent training set") {
    std::mt19937_64 rng(12);
    auto d = random_points(rng, 80, 3, 4);
    DecisionTree tree(1);
    tree.fit(d);
    for (const auto& inst : d.instances) CHECK(tree.predict(inst.features).argmax() == *inst.label);
  }
}

TEST_CASE("majority classifier") {
  std::vector<std::pair<std::vector<double>, SenseId>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({{double(i)}, i < 7 ? 2u : 1u});
  auto d = make(rows);
  MajorityClassifier m;
  m.fit(d);
  std::size_t hits = 0;
  for (const auto& inst : d.instances) hits += m.predict(inst.features).argmax() == *inst.label;
  CHECK(hits == 7);
}

TEST_CASE("low-level factory") {
  for (auto kind : {LowLevelKind::knn, LowLevelKind::bayes, LowLevelKind::c45, LowLevelKind::majority}) {
    CHECK(parse_low_level(to_string(kind)) == kind);
    CHECK(make_low_level(kind)->name() == to_string(kind));
  }
  CHECK_THROWS_AS(parse_low_level("svm"), InvalidArgument);
}

TEST_CASE("high-level membership arithmetic") {
  InsertionVariation v;
  v.classes = {1, 2};
  v.linked = {1, 1};
  v.delta_t = {{0, 1}, {0, 1}};
  v.delta_c = {{0, 1}, {0, 1}};
  std::vector<double> p{0.5, 0.5};
  auto h = high_level_membership(v, p, {0.5, 0.5, 1});
  // Per mu: class 1 scores 1, class 2 scores 0.5.
  CHECK(h.of(1) == doctest::Approx(2.0 / 3.0));
  CHECK(h.of(2) == doctest::Approx(1.0 / 3.0));

  v.delta_t = {{0.5, 0.5}, {0.5, 0.5}};
  v.delta_c = v.delta_t;
  auto even = high_level_membership(v, p, {0.5, 0.5, 1});
  CHECK(even.of(1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(high_level_membership(v, p, {0.5, 0.5, 4}), InvalidArgument);
  CHECK_THROWS_AS(HighLevelConfig({0.7, 0.7, 1}).validate(), InvalidArgument);
}

TEST_CASE("hybrid combination") {
  Membership low({1, 2}, {0.2, 0.8});
  Membership high({1, 2}, {0.9, 0.1});
  auto m = hybrid_predict(0.5, low, high);
  CHECK(m.membership.of(1) == doctest::Approx(0.55));
  CHECK(m.membership.of(2) == doctest::Approx(0.45));
  CHECK(m.label == 1);

  auto zero = hybrid_predict(0.0, low, high);
  CHECK(zero.membership == low);
  CHECK(zero.label == 2);
  CHECK(hybrid_predict(1.0, low, high).label == 1);

  auto abstain = hybrid_predict(0.7, low, std::nullopt);
  CHECK(abstain.membership == low);
  CHECK_FALSE(abstain.high_level_used);

  Membership sure({1, 2}, {1.0, 0.0});
  for (double lambda : {0.0, 0.3, 1.0}) {
    auto s = hybrid_predict(lambda, sure, sure);
    CHECK(s.membership.of(1) == 1.0);
    CHECK(s.membership.of(2) == 0.0);
  }
  CHECK_THROWS_AS(hybrid_predict(1.5, low, high), InvalidArgument);
}

TEST_CASE("high-level classifier") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<std::vector<double>, SenseId>> rows;
  for (int i = 0; i < 16; ++i) rows.push_back({{u(rng), u(rng)}, 1});
  for (int i = 0; i < 16; ++i) rows.push_back({{u(rng) + 1.5, u(rng)}, 2});
  auto d = make(rows);
  HighLevelClassifier h;
  h.fit(d, {0.4, 3, 3.0}, {});
  CHECK(h.graphs().size() == 2);
  CHECK(h.proportions() == std::vector<double>{0.5, 0.5});

  auto inside = h.predict(std::vector<double>{0.5, 0.5});
  REQUIRE(inside);
  CHECK(inside->sum() == doctest::Approx(1.0));
  CHECK_FALSE(h.predict(std::vector<double>{40, 40}).has_value());

  auto before = h.graphs()[0].fingerprint();
  h.commit(std::vector<double>{0.5, 0.5}, 1, CommitMode::discard);
  CHECK(h.graphs()[0].fingerprint() == before);
  h.commit(std::vector<double>{0.5, 0.5}, 1, CommitMode::incorporate);
  CHECK(h.graphs()[0].size() == 17);
  CHECK(h.stats()[0].revision == h.graphs()[0].revision());
  CHECK(h.proportions()[0] == doctest::Approx(17.0 / 33.0));
  CHECK(h.predict(std::vector<double>{0.4, 0.6}).has_value());
}
