#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "twsd/adjacency.hpp"
#include "twsd/corpus.hpp"
#include "twsd/eval.hpp"
#include "twsd/features.hpp"

namespace testkit {

struct SyntheticFeatures {
  twsd::Dataset semantic;
  twsd::Dataset topological;
  std::vector<twsd::SenseAnnotation> annotations;
};

// Generated corpus pushed through the same preprocessing and annotation
// checks as files on disk.
inline SyntheticFeatures synthetic_features(const twsd::SyntheticCorpusConfig& config, std::size_t window = 5) {
  using namespace twsd;
  auto corpus = generate_two_sense_corpus(config);
  auto stop = StopwordList::load(std::string(TWSD_DATA_DIR) + "/stopwords.txt");
  auto lem = Lemmatizer::load(std::string(TWSD_DATA_DIR) + "/lemmas.txt");
  std::vector<Document> docs;
  for (const auto& [id, text] : corpus.documents) docs.push_back(process_document(id, text, stop, lem));

  std::stringstream ann;
  write_annotations(ann, corpus.annotations);
  SyntheticFeatures out;
  out.annotations = parse_annotations(ann, docs, corpus.inventory);
  auto streams = content_streams(docs);
  out.semantic = semantic_features(streams, out.annotations, window);
  out.topological = topological_features(build_network(streams, out.annotations), out.annotations);
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("twsd-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testkit
