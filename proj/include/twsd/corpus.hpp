#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace twsd {

using SenseId = int;

struct Token {
  std::string surface;  // case-folded
  std::string lemma;
  std::size_t offset = 0;  // byte offset into the source text
  std::optional<std::size_t> position;  // content-word index, set for content tokens
  bool is_content = false;
};

// Splits UTF-8 text into word tokens. Punctuation separates words and is
// dropped, hyphens split compounds, apostrophes inside a word are kept.
// All tokens start out as content tokens with lemma == surface.
std::vector<Token> tokenize(std::string_view text);

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words);

  // Newline-delimited words; '#' starts a comment line. Throws
  // MissingStopwordList when the file cannot be opened.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Marks tokens found in the stopword list as non-content and numbers the
// surviving content tokens 0, 1, 2, ...
std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopwordList& stopwords);

/// Dictionary lemmatizer with suffix-stripping fallback.
///
/// Dictionary lines are either `form<TAB>lemma` or a bare `lemma` that only
/// declares a canonical form. Unknown words go through plural (-s/-es/-ies),
/// past (-ed) and progressive (-ing) rules; a candidate stem that is a known
/// lemma wins over the plain strip. Rules are applied until a fixed point,
/// so lemma(lemma(w)) == lemma(w).
class Lemmatizer {
 public:
  Lemmatizer() = default;

  // Throws MissingLemmaDictionary when the file cannot be opened.
  static Lemmatizer load(const std::filesystem::path& path);

  void add(std::string form, std::string lemma);
  void add_lemma(std::string lemma);

  std::string lemma(std::string_view word) const;
  std::size_t size() const { return forms_.size(); }

 private:
  bool known(const std::string& word) const;
  std::optional<std::string> strip_suffix(const std::string& word) const;

  std::unordered_map<std::string, std::string> forms_;
  std::unordered_set<std::string> lemmas_;
};

std::vector<Token> lemmatize(std::vector<Token> tokens, const Lemmatizer& lemmatizer);

// Content lemmas of one document, in text order.
struct TokenStream {
  std::string document_id;
  std::vector<std::string> lemmas;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;

  TokenStream content_stream() const;
  // Content token at the given content-word index, or nullptr.
  const Token* content_token(std::size_t position) const;
};

// tokenize -> remove_stopwords -> lemmatize.
Document process_document(std::string id, std::string raw_text, const StopwordList& stopwords,
                          const Lemmatizer& lemmatizer);

// Every regular file in `dir` is one document; the id is the file stem.
// Documents come back sorted by id.
std::vector<Document> load_corpus(const std::filesystem::path& dir, const StopwordList& stopwords,
                                  const Lemmatizer& lemmatizer);

std::vector<TokenStream> content_streams(std::span<const Document> documents);

struct SenseAnnotation {
  std::string document_id;
  std::size_t position = 0;
  std::string word;
  SenseId sense_id = 0;

  auto operator<=>(const SenseAnnotation&) const = default;
};

// Number of senses per ambiguous word; sense ids run 1..count.
class SenseInventory {
 public:
  SenseInventory() = default;
  explicit SenseInventory(std::map<std::string, int> senses) : senses_(std::move(senses)) {}

  // The ten ambiguous words used in the WSD experiments.
  static SenseInventory standard();
  // `word<TAB>count` lines, '#' comments allowed.
  static SenseInventory load(const std::filesystem::path& path);

  std::optional<int> sense_count(std::string_view word) const;
  void declare(std::string word, int count) { senses_[std::move(word)] = count; }
  const std::map<std::string, int>& entries() const { return senses_; }

 private:
  std::map<std::string, int> senses_;
};

// Parses `document_id<TAB>position<TAB>word<TAB>sense_id` rows. When
// `documents` is non-empty, each row is checked against the named document.
std::vector<SenseAnnotation> parse_annotations(std::istream& in, std::span<const Document> documents,
                                               const SenseInventory& inventory);
std::vector<SenseAnnotation> load_annotations(const std::filesystem::path& path,
                                              std::span<const Document> documents,
                                              const SenseInventory& inventory);

}  // namespace twsd
