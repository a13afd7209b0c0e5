#include "twsd/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "twsd/error.hpp"

namespace twsd {

std::map<SenseId, std::size_t> Dataset::class_counts() const {
  std::map<SenseId, std::size_t> counts;
  for (const auto& inst : instances) {
    if (inst.label) ++counts[*inst.label];
  }
  return counts;
}

std::map<SenseId, double> Dataset::class_proportions() const {
  auto counts = class_counts();
  std::size_t total = 0;
  for (const auto& [c, n] : counts) total += n;
  std::map<SenseId, double> out;
  for (const auto& [c, n] : counts) out[c] = static_cast<double>(n) / static_cast<double>(total);
  return out;
}

std::vector<SenseId> Dataset::classes() const {
  std::vector<SenseId> out;
  for (const auto& [c, n] : class_counts()) out.push_back(c);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.instances.reserve(rows.size());
  for (std::size_t r : rows) out.instances.push_back(instances.at(r));
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> columns) const {
  Dataset out;
  for (std::size_t c : columns) out.feature_names.push_back(feature_names.at(c));
  out.instances.reserve(instances.size());
  for (const auto& inst : instances) {
    Instance copy{inst.id, {}, inst.label};
    copy.features.reserve(columns.size());
    for (std::size_t c : columns) copy.features.push_back(inst.features.at(c));
    out.instances.push_back(std::move(copy));
  }
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].features.size() != feature_names.size()) {
      throw InvalidArgument("instance " + std::to_string(i) + " has " +
                            std::to_string(instances[i].features.size()) + " features, expected " +
                            std::to_string(feature_names.size()));
    }
  }
}

std::vector<std::size_t> nonzero_columns(const Dataset& dataset) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < dataset.dimension(); ++c) {
    bool any = std::any_of(dataset.instances.begin(), dataset.instances.end(),
                           [c](const Instance& inst) { return inst.features[c] != 0.0; });
    if (any) out.push_back(c);
  }
  return out;
}

ContextWindow context_window(std::size_t window, std::size_t position, std::size_t stream_length) {
  const std::size_t available_before = position;
  const std::size_t available_after = stream_length > position ? stream_length - position - 1 : 0;
  ContextWindow w;
  w.before = std::min((window + 1) / 2, available_before);
  w.after = std::min(window / 2, available_after);
  std::size_t missing = window - w.before - w.after;
  // Spill unused slots onto the other side.
  std::size_t extra_after = std::min(missing, available_after - w.after);
  w.after += extra_after;
  missing -= extra_after;
  w.before += std::min(missing, available_before - w.before);
  return w;
}

Dataset semantic_features(std::span<const TokenStream> streams, std::span<const SenseAnnotation> annotations,
                          std::size_t window) {
  if (window == 0) throw InvalidArgument("window must be positive");
  std::map<std::string_view, const TokenStream*> by_id;
  for (const auto& s : streams) by_id[s.document_id] = &s;

  std::vector<std::map<std::string_view, double>> counts;
  counts.reserve(annotations.size());
  std::set<std::string_view> vocabulary;
  for (const auto& a : annotations) {
    auto it = by_id.find(a.document_id);
    if (it == by_id.end()) throw MissingNode("no token stream for document '" + a.document_id + "'");
    const auto& lemmas = it->second->lemmas;
    if (a.position >= lemmas.size()) {
      throw PositionMismatch("position " + std::to_string(a.position) + " beyond end of '" + a.document_id + "'");
    }
    ContextWindow w = context_window(window, a.position, lemmas.size());
    auto& row = counts.emplace_back();
    for (std::size_t p = a.position - w.before; p <= a.position + w.after; ++p) {
      if (p == a.position) continue;
      row[lemmas[p]] += 1.0;
      vocabulary.insert(lemmas[p]);
    }
  }

  Dataset out;
  std::map<std::string_view, std::size_t> column;
  for (auto word : vocabulary) {
    column[word] = out.feature_names.size();
    out.feature_names.emplace_back(word);
  }
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    Instance inst{{annotations[i].document_id, annotations[i].position},
                  std::vector<double>(out.feature_names.size(), 0.0),
                  annotations[i].sense_id};
    for (const auto& [word, n] : counts[i]) inst.features[column.at(word)] = n;
    out.instances.push_back(std::move(inst));
  }
  return out;
}

Dataset topological_features(const WordAdjacencyNetwork& network, std::span<const SenseAnnotation> annotations,
                             std::size_t levels) {
  TopologyAnalyzer analyzer(network, levels);
  Dataset out;
  out.feature_names = NodeTopology::names(levels);
  for (const auto& a : annotations) {
    auto node = network.occurrence_node(a.document_id, a.position);
    if (!node) {
      throw MissingNode("no network node for occurrence " + a.document_id + ":" + std::to_string(a.position));
    }
    out.instances.push_back({{a.document_id, a.position}, analyzer.at(*node).values(), a.sense_id});
  }
  return out;
}

Standardizer Standardizer::fit(const Dataset& dataset) {
  const std::size_t d = dataset.dimension();
  const double n = static_cast<double>(dataset.size());
  Standardizer s;
  s.means_.assign(d, 0.0);
  s.scales_.assign(d, 0.0);
  if (dataset.size() == 0) return s;
  for (const auto& inst : dataset.instances) {
    for (std::size_t c = 0; c < d; ++c) s.means_[c] += inst.features[c];
  }
  for (double& m : s.means_) m /= n;
  for (const auto& inst : dataset.instances) {
    for (std::size_t c = 0; c < d; ++c) {
      double dev = inst.features[c] - s.means_[c];
      s.scales_[c] += dev * dev;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    double sd = std::sqrt(s.scales_[c] / n);
    // Relative cutoff: rounding noise on a constant column is not spread.
    s.scales_[c] = sd > 1e-12 * std::max(1.0, std::abs(s.means_[c])) ? sd : 0.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> features) const {
  if (features.size() != means_.size()) throw InvalidArgument("feature width does not match standardizer");
  std::vector<double> out(features.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    out[c] = scales_[c] > 0.0 ? (features[c] - means_[c]) / scales_[c] : 0.0;
  }
  return out;
}

void Standardizer::apply_in_place(Dataset& dataset) const {
  for (auto& inst : dataset.instances) inst.features = apply(inst.features);
}

Dataset standardize(Dataset dataset) {
  Standardizer::fit(dataset).apply_in_place(dataset);
  return dataset;
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  for (const auto& name : dataset.feature_names) out << name << ',';
  out << "label\n";
  std::ostringstream cell;
  cell << std::setprecision(17);
  for (const auto& inst : dataset.instances) {
    for (double v : inst.features) {
      cell.str("");
      cell << v;
      out << cell.str() << ',';
    }
    if (inst.label) out << *inst.label;
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  Dataset out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line.empty()) return out;
  auto header = split_commas(line);
  if (header.back() != "label") throw ParseError(number, "last header column must be 'label'");
  out.feature_names.assign(header.begin(), header.end() - 1);

  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != header.size()) throw ParseError(number, "expected " + std::to_string(header.size()) + " columns");
    Instance inst;
    inst.id = {"row", out.instances.size()};
    inst.features.reserve(out.feature_names.size());
    for (std::size_t c = 0; c + 1 < fields.size(); ++c) {
      try {
        std::size_t used = 0;
        inst.features.push_back(std::stod(fields[c], &used));
        if (used != fields[c].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(number, "bad number '" + fields[c] + "'");
      }
    }
    if (!fields.back().empty()) {
      SenseId label{};
      const auto& f = fields.back();
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc{} || ptr != f.data() + f.size()) throw ParseError(number, "bad label '" + f + "'");
      inst.label = label;
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

}  // namespace twsd
