#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "twsd/error.hpp"
#include "twsd/eval.hpp"

namespace twsd {
namespace {

std::size_t draw_index(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Three consonant-vowel syllables, e.g. "kamoti". Ending in a vowel keeps
// the words clear of stopwords and of the lemmatizer's suffix rules.
std::vector<std::string> pseudo_words(std::size_t count, std::mt19937_64& rng, std::set<std::string>& taken) {
  static constexpr std::string_view consonants = "bdfgklmnprtvz";
  static constexpr std::string_view vowels = "aeiou";
  std::vector<std::string> words;
  while (words.size() < count) {
    std::string w;
    for (int s = 0; s < 3; ++s) {
      w += consonants[draw_index(rng, consonants.size())];
      w += vowels[draw_index(rng, vowels.size())];
    }
    if (taken.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

// Words that every shipped stopword list drops.
constexpr std::array<std::string_view, 7> kGlue = {"the", "of", "in", "was", "a", "that", "this"};

class Writer {
 public:
  explicit Writer(std::mt19937_64& rng) : rng_(rng) {}

  // Appends a content word, maybe preceded by a stopword; returns its
  // content position.
  std::size_t content(const std::string& word) {
    if (draw_unit(rng_) < 0.4) raw(std::string(kGlue[draw_index(rng_, kGlue.size())]));
    raw(word);
    return position_++;
  }

  void sentence_end() {
    text_ += ". ";
    at_start_ = true;
  }

  std::string take() { return std::move(text_); }

 private:
  void raw(const std::string& word) {
    if (!text_.empty() && !at_start_) text_ += ' ';
    at_start_ = false;
    text_ += word;
  }

  std::mt19937_64& rng_;
  std::string text_;
  std::size_t position_ = 0;
  bool at_start_ = true;
};

}  // namespace

SyntheticCorpus generate_two_sense_corpus(const SyntheticCorpusConfig& config) {
  if (config.word.empty()) throw InvalidArgument("synthetic corpus needs a target word");
  if (config.documents == 0 || config.occurrences_per_sense == 0) {
    throw InvalidArgument("synthetic corpus needs documents and occurrences");
  }
  std::mt19937_64 rng(config.seed);
  std::set<std::string> taken;
  const auto hubs = pseudo_words(8, rng, taken);
  const auto rare = pseudo_words(40, rng, taken);
  const auto filler = pseudo_words(150, rng, taken);

  std::vector<SenseId> senses;
  for (std::size_t i = 0; i < config.occurrences_per_sense; ++i) {
    senses.push_back(1);
    senses.push_back(2);
  }
  for (std::size_t i = senses.size(); i > 1; --i) std::swap(senses[i - 1], senses[draw_index(rng, i)]);

  SyntheticCorpus corpus;
  corpus.inventory.declare(config.word, 2);
  const std::string plural = config.word + "s";
  const std::size_t per_doc = (senses.size() + config.documents - 1) / config.documents;

  for (std::size_t d = 0; d < config.documents; ++d) {
    char id[16];
    std::snprintf(id, sizeof id, "doc%02zu", d + 1);
    Writer writer(rng);
    const std::size_t begin = d * per_doc;
    const std::size_t end = std::min(senses.size(), begin + per_doc);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& vocab = senses[i] == 1 ? hubs : rare;
      const std::size_t lead = 2 + draw_index(rng, 4);
      for (std::size_t f = 0; f < lead; ++f) writer.content(filler[draw_index(rng, filler.size())]);
      for (std::size_t c = 0; c < config.context; ++c) writer.content(vocab[draw_index(rng, vocab.size())]);
      std::size_t pos = writer.content(draw_unit(rng) < 0.5 ? config.word : plural);
      corpus.annotations.push_back({id, pos, config.word, senses[i]});
      for (std::size_t c = 0; c < config.context; ++c) writer.content(vocab[draw_index(rng, vocab.size())]);
      writer.sentence_end();
    }
    writer.content(filler[draw_index(rng, filler.size())]);
    writer.sentence_end();
    corpus.documents.emplace_back(id, writer.take());
  }
  return corpus;
}

void write_annotations(std::ostream& out, std::span<const SenseAnnotation> annotations) {
  out << "# document\tposition\tword\tsense\n";
  for (const auto& a : annotations) {
    out << a.document_id << '\t' << a.position << '\t' << a.word << '\t' << a.sense_id << '\n';
  }
}

Dataset two_regularity_dataset(std::size_t side, std::uint64_t seed) {
  if (side < 2) throw InvalidArgument("lattice side must be at least 2");
  Dataset data;
  data.feature_names = {"x", "y"};
  std::size_t row = 0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      data.instances.push_back({{"lattice", row++}, {static_cast<double>(i), static_cast<double>(j)}, 1});
    }
  }
  std::mt19937_64 rng(seed);
  const double extent = static_cast<double>(side - 1);
  for (std::size_t k = 0; k < side * side; ++k) {
    data.instances.push_back({{"scatter", row++}, {draw_unit(rng) * extent, draw_unit(rng) * extent}, 2});
  }
  return data;
}

}  // namespace twsd
