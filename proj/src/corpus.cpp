#include "twsd/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "twsd/error.hpp"

namespace twsd {
namespace {

enum class CharClass { word, apostrophe, separator };

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed
};

CodePoint decode_utf8(std::string_view text, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  unsigned char lead = byte(i);
  if (lead < 0x80) return {lead, 1};
  std::size_t length = 0;
  char32_t value = 0;
  if ((lead & 0xE0) == 0xC0) {
    length = 2;
    value = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    length = 3;
    value = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    length = 4;
    value = lead & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + length > text.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < length; ++k) {
    unsigned char cont = byte(i + k);
    if ((cont & 0xC0) != 0x80) return {0xFFFD, 1};
    value = (value << 6) | (cont & 0x3F);
  }
  return {value, length};
}

CharClass classify(char32_t c) {
  if (c < 0x80) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      return CharClass::word;
    }
    return c == '\'' ? CharClass::apostrophe : CharClass::separator;
  }
  if (c == 0x2019) return CharClass::apostrophe;
  if (c == 0xFFFD) return CharClass::separator;
  // Latin-1 punctuation and symbols, general punctuation, CJK punctuation,
  // fullwidth ASCII punctuation.
  if ((c >= 0x80 && c <= 0xBF) || c == 0xD7 || c == 0xF7) return CharClass::separator;
  if (c >= 0x2000 && c <= 0x206F) return CharClass::separator;
  if (c >= 0x3000 && c <= 0x303F) return CharClass::separator;
  if (c >= 0xFF01 && c <= 0xFF0F) return CharClass::separator;
  return CharClass::word;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool is_consonant(char c) { return std::string_view("aeiouy").find(c) == std::string_view::npos; }

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string drop(const std::string& s, std::size_t n) { return s.substr(0, s.size() - n); }

// "runn" -> "run", but "fall" and "press" keep their double letter.
std::string undouble(const std::string& stem) {
  if (stem.size() >= 2) {
    char last = stem.back();
    if (last == stem[stem.size() - 2] && is_consonant(last) && last != 'l' && last != 's' &&
        last != 'z') {
      return drop(stem, 1);
    }
  }
  return stem;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  std::size_t start = 0;
  bool pending_apostrophe = false;

  auto flush = [&] {
    if (!current.empty()) {
      Token token;
      token.surface = ascii_lower(current);
      token.lemma = token.surface;
      token.offset = start;
      token.is_content = true;
      tokens.push_back(std::move(token));
    }
    current.clear();
    pending_apostrophe = false;
  };

  for (std::size_t i = 0; i < text.size();) {
    CodePoint cp = decode_utf8(text, i);
    switch (classify(cp.value)) {
      case CharClass::word:
        if (current.empty()) start = i;
        if (pending_apostrophe) current.push_back('\'');
        pending_apostrophe = false;
        current.append(text.substr(i, cp.length));
        break;
      case CharClass::apostrophe:
        if (!current.empty()) {
          if (pending_apostrophe) {
            flush();
          } else {
            pending_apostrophe = true;
          }
        }
        break;
      case CharClass::separator:
        flush();
        break;
    }
    i += cp.length;
  }
  flush();
  return tokens;
}

StopwordList::StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingStopwordList("cannot open stopword list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = ascii_lower(trim(line));
    if (word.empty() || word.front() == '#') continue;
    words.insert(std::move(word));
  }
  return StopwordList(std::move(words));
}

bool StopwordList::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopwordList& stopwords) {
  std::size_t next = 0;
  for (Token& token : tokens) {
    token.is_content = !stopwords.contains(token.surface);
    token.position = token.is_content ? std::optional<std::size_t>(next++) : std::nullopt;
  }
  return tokens;
}

Lemmatizer Lemmatizer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingLemmaDictionary("cannot open lemma dictionary: " + path.string());
  Lemmatizer lemmatizer;
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    auto fields = split_tabs(entry);
    if (fields.size() == 1) {
      lemmatizer.add_lemma(ascii_lower(trim(fields[0])));
    } else {
      lemmatizer.add(ascii_lower(trim(fields[0])), ascii_lower(trim(fields[1])));
    }
  }
  return lemmatizer;
}

void Lemmatizer::add(std::string form, std::string lemma) {
  lemmas_.insert(lemma);
  forms_[std::move(form)] = std::move(lemma);
}

void Lemmatizer::add_lemma(std::string lemma) { lemmas_.insert(std::move(lemma)); }

bool Lemmatizer::known(const std::string& word) const {
  return lemmas_.count(word) > 0 || forms_.count(word) > 0;
}

std::optional<std::string> Lemmatizer::strip_suffix(const std::string& w) const {
  // Candidates in preference order; the first known word wins, otherwise
  // the first candidate is taken.
  std::vector<std::string> candidates;
  if (ends_with(w, "ies") && w.size() > 4) {
    candidates = {drop(w, 3) + "y", drop(w, 1)};
  } else if (ends_with(w, "sses")) {
    candidates = {drop(w, 2)};
  } else if (ends_with(w, "xes") || ends_with(w, "zes") || ends_with(w, "ches") ||
             ends_with(w, "shes")) {
    candidates = {drop(w, 2), drop(w, 1)};
  } else if (ends_with(w, "s") && w.size() > 3 && !ends_with(w, "ss") && !ends_with(w, "us") &&
             !ends_with(w, "is") && !ends_with(w, "'s")) {
    candidates = {drop(w, 1)};
    if (ends_with(w, "es")) candidates.push_back(drop(w, 2));
  } else if (ends_with(w, "'s") && w.size() > 3) {
    candidates = {drop(w, 2)};
  } else if (ends_with(w, "ied") && w.size() > 4) {
    candidates = {drop(w, 3) + "y"};
  } else if (ends_with(w, "ed") && w.size() > 4) {
    std::string stem = drop(w, 2);
    candidates = {undouble(stem), drop(w, 1), stem};
  } else if (ends_with(w, "ing") && w.size() > 5) {
    std::string stem = drop(w, 3);
    candidates = {undouble(stem), stem + "e", stem};
  }
  if (candidates.empty()) return std::nullopt;
  for (const auto& candidate : candidates) {
    if (known(candidate)) return candidate;
  }
  return candidates.front();
}

std::string Lemmatizer::lemma(std::string_view word) const {
  std::string current = ascii_lower(word);
  // Each step strictly shortens the word or lands on a known lemma.
  while (true) {
    if (lemmas_.count(current)) return current;
    if (auto it = forms_.find(current); it != forms_.end()) return it->second;
    auto next = strip_suffix(current);
    if (!next || *next == current) return current;
    current = std::move(*next);
  }
}

std::vector<Token> lemmatize(std::vector<Token> tokens, const Lemmatizer& lemmatizer) {
  for (Token& token : tokens) token.lemma = lemmatizer.lemma(token.lemma);
  return tokens;
}

TokenStream Document::content_stream() const {
  TokenStream stream{id, {}};
  for (const Token& token : tokens) {
    if (token.is_content) stream.lemmas.push_back(token.lemma);
  }
  return stream;
}

const Token* Document::content_token(std::size_t position) const {
  // A content token's index in `tokens` is never smaller than its position.
  for (std::size_t i = position; i < tokens.size(); ++i) {
    if (tokens[i].position && *tokens[i].position >= position) {
      return *tokens[i].position == position ? &tokens[i] : nullptr;
    }
  }
  return nullptr;
}

Document process_document(std::string id, std::string raw_text, const StopwordList& stopwords,
                          const Lemmatizer& lemmatizer) {
  Document doc{std::move(id), std::move(raw_text), {}};
  doc.tokens = lemmatize(remove_stopwords(tokenize(doc.raw_text), stopwords), lemmatizer);
  return doc;
}

std::vector<Document> load_corpus(const std::filesystem::path& dir, const StopwordList& stopwords,
                                  const Lemmatizer& lemmatizer) {
  if (!std::filesystem::is_directory(dir)) throw InvalidArgument("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  docs.reserve(files.size());
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    docs.push_back(process_document(file.stem().string(), text.str(), stopwords, lemmatizer));
  }
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
  return docs;
}

std::vector<TokenStream> content_streams(std::span<const Document> documents) {
  std::vector<TokenStream> streams;
  streams.reserve(documents.size());
  for (const auto& doc : documents) streams.push_back(doc.content_stream());
  return streams;
}

SenseInventory SenseInventory::standard() {
  return SenseInventory({{"bear", 3},
                         {"jam", 2},
                         {"just", 3},
                         {"march", 2},
                         {"rock", 3},
                         {"ring", 2},
                         {"save", 2},
                         {"present", 2},
                         {"close", 2},
                         {"note", 2}});
}

SenseInventory SenseInventory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingResource("cannot open sense inventory: " + path.string());
  SenseInventory inventory;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    auto fields = split_tabs(entry);
    auto count = fields.size() == 2 ? parse_int<int>(trim(fields[1])) : std::nullopt;
    if (!count || *count < 1) throw ParseError(number, "expected word<TAB>sense_count");
    inventory.declare(ascii_lower(trim(fields[0])), *count);
  }
  return inventory;
}

std::optional<int> SenseInventory::sense_count(std::string_view word) const {
  auto it = senses_.find(std::string(word));
  if (it == senses_.end()) return std::nullopt;
  return it->second;
}

std::vector<SenseAnnotation> parse_annotations(std::istream& in, std::span<const Document> documents,
                                               const SenseInventory& inventory) {
  std::map<std::string_view, const Document*> by_id;
  for (const auto& doc : documents) by_id[doc.id] = &doc;

  std::vector<SenseAnnotation> annotations;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;

    auto fields = split_tabs(line);
    if (fields.size() != 4) throw ParseError(number, "expected 4 tab-separated columns");
    auto position = parse_int<std::size_t>(fields[1]);
    if (!position) throw ParseError(number, "bad position '" + fields[1] + "'");
    auto sense = parse_int<SenseId>(fields[3]);
    if (!sense) throw ParseError(number, "bad sense id '" + fields[3] + "'");

    SenseAnnotation annotation{fields[0], *position, ascii_lower(fields[2]), *sense};
    if (annotation.document_id.empty() || annotation.word.empty()) {
      throw ParseError(number, "empty document id or word");
    }
    auto count = inventory.sense_count(annotation.word);
    if (!count) throw ParseError(number, "'" + annotation.word + "' is not in the sense inventory");
    if (*sense < 1 || *sense > *count) {
      throw ParseError(number, "sense " + fields[3] + " out of range for '" + annotation.word +
                                   "' (" + std::to_string(*count) + " senses)");
    }

    if (!documents.empty()) {
      auto doc = by_id.find(annotation.document_id);
      if (doc == by_id.end()) throw ParseError(number, "unknown document '" + annotation.document_id + "'");
      const Token* token = doc->second->content_token(annotation.position);
      if (token == nullptr || token->lemma != annotation.word) {
        throw PositionMismatch("line " + std::to_string(number) + ": content word " +
                               std::to_string(annotation.position) + " of '" + annotation.document_id +
                               "' is '" + (token ? token->lemma : std::string("<none>")) +
                               "', expected '" + annotation.word + "'");
      }
    }
    annotations.push_back(std::move(annotation));
  }
  return annotations;
}

std::vector<SenseAnnotation> load_annotations(const std::filesystem::path& path,
                                              std::span<const Document> documents,
                                              const SenseInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw MissingResource("cannot open annotations: " + path.string());
  return parse_annotations(in, documents, inventory);
}

}  // namespace twsd
