#include <doctest.h>

#include <sstream>

#include "twsd/corpus.hpp"
#include "twsd/error.hpp"

using namespace twsd;

namespace {

const std::string kData = TWSD_DATA_DIR;

const StopwordList& stopwords() {
  static const StopwordList list = StopwordList::load(kData + "/stopwords.txt");
  return list;
}

const Lemmatizer& lemmatizer() {
  static const Lemmatizer lem = Lemmatizer::load(kData + "/lemmas.txt");
  return lem;
}

std::vector<std::string> surfaces(const std::vector<Token>& tokens, bool content_only = false) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!content_only || t.is_content) out.push_back(t.surface);
  }
  return out;
}

const char* kPoem =
    "In the middle of the road there was a stone / there was a stone\n"
    "in the middle of the road there was a stone in the middle of the\n"
    "road there was a stone. Never should I forget this event / in the\n"
    "lifetime of my fatigued retinas / Never should I forget that in\n"
    "the middle of the road / there was a stone / there was a stone\n"
    "in the middle of the road / in the middle of the road there was\n"
    "a stone.\n";

const std::vector<std::string> kPoemLemmas = {
    "middle", "road",   "stone",    "stone",   "middle", "road",   "stone", "middle", "road",
    "stone",  "never",  "forget",   "event",   "lifetime", "fatigue", "retina", "never", "forget",
    "middle", "road",   "stone",    "stone",   "middle", "road",   "middle", "road",  "stone"};

}  // namespace

TEST_CASE("tokenize splits on punctuation and folds case") {
  CHECK(tokenize("").empty());
  auto line = tokenize("In the middle of the road there was a stone");
  CHECK(line.size() == 10);
  CHECK(line.front().surface == "in");
  CHECK(surfaces(tokenize("stone.")) == std::vector<std::string>{"stone"});
  CHECK(surfaces(tokenize("well-known")) == std::vector<std::string>{"well", "known"});
  CHECK(surfaces(tokenize("don't 'quoted'")) == std::vector<std::string>{"don't", "quoted"});
  CHECK(surfaces(tokenize("road—stone “bear”")) == std::vector<std::string>{"road", "stone", "bear"});
  CHECK(surfaces(tokenize("Café NOTE")) == std::vector<std::string>{"café", "note"});
  auto offsets = tokenize("a  bc");
  CHECK(offsets[1].offset == 3);
}

TEST_CASE("stopword removal") {
  auto first = remove_stopwords(tokenize("In the middle of the road there was a stone"), stopwords());
  CHECK(surfaces(first, true) == std::vector<std::string>{"middle", "road", "stone"});
  CHECK(first[2].position == 0u);
  CHECK(first[9].position == 2u);
  CHECK_FALSE(first[0].position.has_value());

  auto none = remove_stopwords(tokenize("of the a"), stopwords());
  CHECK(surfaces(none, true).empty());

  auto kept = remove_stopwords(tokenize("never forget event"), stopwords());
  CHECK(surfaces(kept, true) == std::vector<std::string>{"never", "forget", "event"});

  CHECK_THROWS_AS(StopwordList::load("/nonexistent/stopwords.txt"), MissingStopwordList);
}

TEST_CASE("lemmatizer") {
  const auto& lem = lemmatizer();
  CHECK(lem.lemma("fatigued") == "fatigue");
  CHECK(lem.lemma("retinas") == "retina");
  CHECK(lem.lemma("stone") == "stone");
  CHECK(lem.lemma("running") == "run");
  CHECK(lem.lemma("bears") == "bear");
  CHECK(lem.lemma("zorblat") == "zorblat");
  CHECK_THROWS_AS(Lemmatizer::load("/nonexistent/lemmas.txt"), MissingLemmaDictionary);

  SUBCASE("suffix rules without a dictionary") {
    Lemmatizer bare;
    CHECK(bare.lemma("ponies") == "pony");
    CHECK(bare.lemma("boxes") == "box");
    CHECK(bare.lemma("glass") == "glass");
    CHECK(bare.lemma("walked") == "walk");
    CHECK(bare.lemma("stopped") == "stop");
    CHECK(bare.lemma("jumping") == "jump");
  }

  SUBCASE("idempotent") {
    for (const char* w : {"fatigued", "retinas", "running", "ponies", "stopped", "carried", "bears", "notes",
                          "closing", "rings", "presented", "saves", "jammed", "rocks", "marches", "agreed"}) {
      auto once = lem.lemma(w);
      CHECK_MESSAGE(lem.lemma(once) == once, w);
    }
  }
}

TEST_CASE("poem goes through the full pipeline") {
  auto doc = process_document("poem", kPoem, stopwords(), lemmatizer());
  auto stream = doc.content_stream();
  CHECK(stream.document_id == "poem");
  CHECK(stream.lemmas.size() == 27);
  CHECK(stream.lemmas == kPoemLemmas);
  REQUIRE(doc.content_token(14) != nullptr);
  CHECK(doc.content_token(14)->surface == "fatigued");
  CHECK(doc.content_token(14)->lemma == "fatigue");
  CHECK(doc.content_token(27) == nullptr);
}

TEST_CASE("sense inventory") {
  auto inv = SenseInventory::standard();
  CHECK(inv.entries().size() == 10);
  CHECK(inv.sense_count("bear") == 3);
  CHECK(inv.sense_count("jam") == 2);
  CHECK_FALSE(inv.sense_count("stone").has_value());
  auto loaded = SenseInventory::load(kData + "/senses.tsv");
  CHECK(loaded.entries() == inv.entries());
}

TEST_CASE("annotation parsing") {
  auto inv = SenseInventory::standard();

  SUBCASE("plain row") {
    std::istringstream in("# comment\ndoc1\t42\tbear\t2\n");
    auto rows = parse_annotations(in, {}, inv);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == SenseAnnotation{"doc1", 42, "bear", 2});
  }
  SUBCASE("sense outside the inventory") {
    std::istringstream in("doc1\t3\tjam\t5\n");
    CHECK_THROWS_AS(parse_annotations(in, {}, inv), ParseError);
  }
  SUBCASE("empty input") {
    std::istringstream in("");
    CHECK(parse_annotations(in, {}, inv).empty());
  }
  SUBCASE("error carries the line number") {
    std::istringstream in("doc1\t1\tbear\t1\ndoc1\tx\tbear\t1\n");
    try {
      parse_annotations(in, {}, inv);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("positions are checked against documents") {
    std::vector<Document> docs{
        process_document("d", "The bears were close to the rock.", stopwords(), lemmatizer())};
    std::istringstream ok("d\t0\tbear\t1\nd\t1\tclose\t2\nd\t2\trock\t1\n");
    CHECK(parse_annotations(ok, docs, inv).size() == 3);
    std::istringstream wrong("d\t0\trock\t1\n");
    CHECK_THROWS_AS(parse_annotations(wrong, docs, inv), PositionMismatch);
    std::istringstream missing("e\t0\tbear\t1\n");
    CHECK_THROWS_AS(parse_annotations(missing, docs, inv), ParseError);
  }
}
