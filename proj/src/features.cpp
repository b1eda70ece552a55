#include "microtext/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <fmt/format.h>

#include "microtext/csv.hpp"
#include "microtext/error.hpp"

namespace microtext::features {
namespace {

int parse_int(std::string_view s, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(fmt::format("bad {} '{}'", what, s));
  }
  return value;
}

template <typename T>
T parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(fmt::format("{}:{}: bad number '{}'", path.string(), line, s));
  }
  return value;
}

// Sorts indices and turns runs into (index, count) pairs.
SparseVector counts_from_indices(std::vector<std::uint32_t>& hits) {
  std::sort(hits.begin(), hits.end());
  SparseVector v;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    v.indices.push_back(hits[i]);
    v.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  return v;
}

}  // namespace

NGramSpec NGramSpec::make(Level level, int lo, int hi) {
  if (lo < 1 || hi < lo) {
    throw InvalidArgument(fmt::format("invalid n-gram range ({},{}): need 1 <= lo <= hi", lo, hi));
  }
  return {level, lo, hi};
}

NGramSpec NGramSpec::parse(std::string_view flag) {
  const auto colon = flag.find(':');
  const auto comma = flag.find(',');
  if (colon == std::string_view::npos || comma == std::string_view::npos || comma < colon) {
    throw InvalidArgument(fmt::format("n-gram spec '{}' is not of the form level:lo,hi", flag));
  }
  const auto level_str = flag.substr(0, colon);
  Level level;
  if (level_str == "char") {
    level = Level::kChar;
  } else if (level_str == "word") {
    level = Level::kWord;
  } else {
    throw InvalidArgument(fmt::format("unknown n-gram level '{}'", level_str));
  }
  const int lo = parse_int(flag.substr(colon + 1, comma - colon - 1), "n-gram lower bound");
  const int hi = parse_int(flag.substr(comma + 1), "n-gram upper bound");
  return make(level, lo, hi);
}

std::string NGramSpec::flag() const {
  return fmt::format("{}:{},{}", level_name(level), lo, hi);
}

std::string NGramSpec::label() const {
  return fmt::format("{}({},{})", level_name(level), lo, hi);
}

std::string_view level_name(Level level) {
  return level == Level::kChar ? "char" : "word";
}

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start < text.size()) {
    auto space = text.find(' ', start);
    if (space == std::string_view::npos) space = text.size();
    if (space > start) tokens.push_back(text.substr(start, space - start));
    start = space + 1;
  }
  return tokens;
}

std::vector<std::string> extract_ngrams(std::string_view text, const NGramSpec& spec) {
  std::vector<std::string> out;
  for_each_ngram(text, spec, [&](std::string_view g) { out.emplace_back(g); });
  return out;
}

bool SparseVector::is_valid() const {
  if (indices.size() != values.size()) return false;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0 && indices[i] <= indices[i - 1]) return false;
    if (values[i] == 0.0 || !std::isfinite(values[i])) return false;
  }
  return true;
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) sum += values[i] * dense[indices[i]];
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return sum;
}

std::uint32_t hash_bucket(std::string_view term, int bits) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : term) {
    h ^= c;
    h *= 16777619u;
  }
  h *= 0x9E3779B1u;
  return h >> (32 - bits);
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
  if (hashed()) return hash_bucket(term, hash_bits_);
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "term,index,df\n";
  for (std::size_t i = 0; i < doc_freq_.size(); ++i) {
    out << csv::escape(hashed() ? std::string_view{} : std::string_view(terms_[i])) << ',' << i
        << ',' << doc_freq_[i] << '\n';
  }
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

Vocabulary Vocabulary::load_csv(const std::filesystem::path& path, const NGramSpec& spec,
                                std::size_t min_df, std::size_t n_docs, int hash_bits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  Vocabulary vocab;
  vocab.spec_ = spec;
  vocab.min_df_ = min_df;
  vocab.n_docs_ = n_docs;
  vocab.hash_bits_ = hash_bits;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("term,index,df", 0) == 0) continue;
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    if (fields.size() != 3) {
      throw InvalidArgument(fmt::format("{}:{}: expected term,index,df", path.string(), line_no));
    }
    const auto index = parse_number<std::size_t>(fields[1], path, line_no);
    if (index != vocab.doc_freq_.size()) {
      throw InvalidArgument(fmt::format("{}:{}: indices must be consecutive", path.string(), line_no));
    }
    vocab.doc_freq_.push_back(parse_number<std::uint64_t>(fields[2], path, line_no));
    if (hash_bits == 0) {
      if (!vocab.index_.emplace(fields[0], static_cast<std::uint32_t>(index)).second) {
        throw InvalidArgument(fmt::format("{}:{}: duplicate term", path.string(), line_no));
      }
      vocab.terms_.push_back(std::move(fields[0]));
    }
  }
  if (hash_bits > 0 && vocab.doc_freq_.size() != (std::size_t{1} << hash_bits)) {
    throw InvalidArgument(fmt::format("{}: expected {} hash buckets", path.string(),
                                      std::size_t{1} << hash_bits));
  }
  return vocab;
}

Vocabulary build_vocabulary(std::span<const std::string> corpus, const NGramSpec& spec,
                            std::size_t min_df, int hash_bits) {
  if (corpus.empty()) throw InvalidArgument("cannot build a vocabulary from an empty corpus");
  if (min_df == 0) throw InvalidArgument("min_df must be at least 1");
  if (hash_bits < 0 || hash_bits > 30) throw InvalidArgument("hash_bits must lie in [0, 30]");

  Vocabulary vocab;
  vocab.spec_ = spec;
  vocab.min_df_ = min_df;
  vocab.n_docs_ = corpus.size();
  vocab.hash_bits_ = hash_bits;

  if (hash_bits > 0) {
    vocab.doc_freq_.assign(std::size_t{1} << hash_bits, 0);
    std::vector<std::uint32_t> seen;
    for (const auto& doc : corpus) {
      seen.clear();
      for_each_ngram(doc, spec, [&](std::string_view g) { seen.push_back(hash_bucket(g, hash_bits)); });
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (auto b : seen) ++vocab.doc_freq_[b];
    }
    return vocab;
  }

  std::unordered_map<std::string, std::uint64_t> df;
  std::unordered_set<std::string_view> in_doc;
  for (const auto& doc : corpus) {
    in_doc.clear();
    // Word n-gram views point into a per-call buffer, so copy on first sight.
    for_each_ngram(doc, spec, [&](std::string_view g) {
      if (spec.level == Level::kChar) {
        in_doc.insert(g);
      } else if (in_doc.find(g) == in_doc.end()) {
        auto [it, inserted] = df.try_emplace(std::string(g), 0);
        ++it->second;
        in_doc.insert(it->first);
      }
    });
    if (spec.level == Level::kChar) {
      for (auto g : in_doc) ++df[std::string(g)];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(df.size());
  for (auto& [term, count] : df) {
    if (count >= min_df) kept.emplace_back(term, count);
  }
  std::sort(kept.begin(), kept.end());
  vocab.terms_.reserve(kept.size());
  vocab.doc_freq_.reserve(kept.size());
  vocab.index_.reserve(kept.size());
  for (auto& [term, count] : kept) {
    vocab.index_.emplace(term, static_cast<std::uint32_t>(vocab.terms_.size()));
    vocab.terms_.push_back(std::move(term));
    vocab.doc_freq_.push_back(count);
  }
  return vocab;
}

SparseVector vectorize_fc(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::uint32_t> hits;
  if (vocab.hashed()) {
    for_each_ngram(text, vocab.spec(),
                   [&](std::string_view g) { hits.push_back(hash_bucket(g, vocab.hash_bits())); });
  } else {
    for_each_ngram(text, vocab.spec(), [&](std::string_view g) {
      if (auto id = vocab.find(g)) hits.push_back(*id);
    });
  }
  return counts_from_indices(hits);
}

void IdfTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "index,idf\n";
  for (std::size_t i = 0; i < idf.size(); ++i) out << fmt::format("{},{:.17g}\n", i, idf[i]);
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

IdfTable IdfTable::load_csv(const std::filesystem::path& path, std::size_t n_docs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  IdfTable table;
  table.n_docs = n_docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("index,idf", 0) == 0) continue;
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    if (fields.size() != 2) {
      throw InvalidArgument(fmt::format("{}:{}: expected index,idf", path.string(), line_no));
    }
    if (parse_number<std::size_t>(fields[0], path, line_no) != table.idf.size()) {
      throw InvalidArgument(fmt::format("{}:{}: indices must be consecutive", path.string(), line_no));
    }
    table.idf.push_back(parse_number<double>(fields[1], path, line_no));
  }
  return table;
}

IdfTable fit_idf(std::span<const SparseVector> vectors, std::size_t n_features) {
  std::vector<std::uint64_t> df(n_features, 0);
  for (const auto& v : vectors) {
    for (auto idx : v.indices) {
      if (idx >= n_features) throw InvalidArgument("feature index out of range in fit_idf");
      ++df[idx];
    }
  }
  IdfTable table;
  table.n_docs = vectors.size();
  table.idf.resize(n_features);
  const double n = static_cast<double>(vectors.size());
  for (std::size_t t = 0; t < n_features; ++t) {
    table.idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }
  return table;
}

SparseVector apply_tfidf(const SparseVector& counts, const IdfTable& idf) {
  SparseVector v = counts;
  for (std::size_t i = 0; i < v.indices.size(); ++i) v.values[i] *= idf.idf.at(v.indices[i]);
  const double norm = std::sqrt(v.squared_norm());
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

SparseVector vectorize_tfidf(std::string_view text, const Vocabulary& vocab, const IdfTable& idf) {
  return apply_tfidf(vectorize_fc(text, vocab), idf);
}

std::string_view weighting_name(Weighting w) {
  return w == Weighting::kFc ? "fc" : "tfidf";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "fc") return Weighting::kFc;
  if (name == "tfidf") return Weighting::kTfidf;
  throw InvalidArgument(fmt::format("unknown weighting '{}'", name));
}

Featurizer::Featurizer(Vocabulary vocab, Weighting weighting, std::optional<IdfTable> idf)
    : vocab_(std::move(vocab)), weighting_(weighting), idf_(std::move(idf)) {
  if (weighting_ == Weighting::kTfidf) {
    if (!idf_) throw InvalidArgument("TF-IDF weighting requires an idf table");
    if (idf_->idf.size() != vocab_.size()) {
      throw InvalidArgument(fmt::format("idf table has {} entries but vocabulary has {}",
                                        idf_->idf.size(), vocab_.size()));
    }
  }
}

Featurizer Featurizer::fit(std::span<const std::string> train_texts, const NGramSpec& spec,
                           Weighting weighting, std::size_t min_df, int hash_bits) {
  auto vocab = build_vocabulary(train_texts, spec, min_df, hash_bits);
  std::optional<IdfTable> idf;
  if (weighting == Weighting::kTfidf) {
    std::vector<SparseVector> counts;
    counts.reserve(train_texts.size());
    for (const auto& t : train_texts) counts.push_back(vectorize_fc(t, vocab));
    idf = fit_idf(counts, vocab.size());
  }
  return Featurizer(std::move(vocab), weighting, std::move(idf));
}

SparseVector Featurizer::transform(std::string_view text) const {
  auto counts = vectorize_fc(text, vocab_);
  return weighting_ == Weighting::kTfidf ? apply_tfidf(counts, *idf_) : counts;
}

std::vector<SparseVector> Featurizer::transform(std::span<const std::string> texts) const {
  std::vector<SparseVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(transform(t));
  return out;
}

}  // namespace microtext::features
