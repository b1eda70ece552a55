#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace microtext::features {

enum class Level { kChar, kWord };

/// The N-gram group (lo, hi): every n-gram with lo <= n <= hi.
struct NGramSpec {
  Level level = Level::kChar;
  int lo = 1;
  int hi = 1;

  /// Throws InvalidArgument unless 1 <= lo <= hi.
  static NGramSpec make(Level level, int lo, int hi);
  /// Parses `char:1,7` or `word:2,2`.
  static NGramSpec parse(std::string_view flag);

  bool individual() const { return lo == hi; }
  bool combined() const { return lo == 1; }

  /// `char:1,7`
  std::string flag() const;
  /// `char(1,7)`
  std::string label() const;

  friend bool operator==(const NGramSpec&, const NGramSpec&) = default;
};

std::string_view level_name(Level level);

/// Space-separated tokens of `text`, ignoring empty tokens.
std::vector<std::string_view> tokenize(std::string_view text);

/// Calls `fn(std::string_view)` once per n-gram occurrence. Character
/// n-grams are byte substrings that may span spaces; word n-grams are
/// token sequences joined by single spaces. Views are valid only during
/// the call.
template <typename Fn>
void for_each_ngram(std::string_view text, const NGramSpec& spec, Fn&& fn) {
  if (spec.level == Level::kChar) {
    for (int n = spec.lo; n <= spec.hi; ++n) {
      const auto len = static_cast<std::size_t>(n);
      if (len > text.size()) break;
      for (std::size_t i = 0; i + len <= text.size(); ++i) fn(text.substr(i, len));
    }
    return;
  }
  // Rebuild with single spaces so that every word n-gram is a substring.
  const auto tokens = tokenize(text);
  std::string joined;
  std::vector<std::size_t> starts;
  starts.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (!joined.empty()) joined.push_back(' ');
    starts.push_back(joined.size());
    joined.append(tok);
  }
  const std::string_view view(joined);
  for (int n = spec.lo; n <= spec.hi; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (len > tokens.size()) break;
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      const std::size_t begin = starts[i];
      const std::size_t end = starts[i + len - 1] + tokens[i + len - 1].size();
      fn(view.substr(begin, end - begin));
    }
  }
}

/// All n-gram occurrences, grouped by n ascending, in text order within n.
std::vector<std::string> extract_ngrams(std::string_view text, const NGramSpec& spec);

/// Sorted sparse vector: strictly increasing indices, no zero values.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool is_valid() const;
  double dot(std::span<const double> dense) const;
  double squared_norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Feature-hashing bucket: 32-bit FNV-1a of the term bytes, multiplied by
/// 0x9E3779B1, top `bits` bits.
std::uint32_t hash_bucket(std::string_view term, int bits);

/// Term to index map with document frequencies. Exact vocabularies assign
/// indices in lexicographic term order; hashed vocabularies have 2^bits
/// anonymous buckets.
class Vocabulary {
 public:
  Vocabulary() = default;

  const NGramSpec& spec() const { return spec_; }
  std::size_t min_df() const { return min_df_; }
  std::size_t n_docs() const { return n_docs_; }
  int hash_bits() const { return hash_bits_; }
  bool hashed() const { return hash_bits_ > 0; }

  std::size_t size() const { return doc_freq_.size(); }
  bool empty() const { return doc_freq_.empty(); }

  /// Exact mode only; empty in hashed mode.
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint64_t>& doc_freq() const { return doc_freq_; }

  std::optional<std::uint32_t> find(std::string_view term) const;

  /// CSV `term,index,df` with a header row. Hashed vocabularies write an
  /// empty term for each bucket.
  void save_csv(const std::filesystem::path& path) const;
  static Vocabulary load_csv(const std::filesystem::path& path, const NGramSpec& spec,
                             std::size_t min_df, std::size_t n_docs, int hash_bits = 0);

  friend Vocabulary build_vocabulary(std::span<const std::string> corpus, const NGramSpec& spec,
                                     std::size_t min_df, int hash_bits);

 private:
  NGramSpec spec_;
  std::size_t min_df_ = 1;
  std::size_t n_docs_ = 0;
  int hash_bits_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> doc_freq_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Keeps terms occurring in at least `min_df` documents. `hash_bits` > 0
/// switches to feature hashing with 2^hash_bits buckets (no pruning).
/// Throws InvalidArgument on an empty corpus or min_df == 0.
Vocabulary build_vocabulary(std::span<const std::string> corpus, const NGramSpec& spec,
                            std::size_t min_df = 1, int hash_bits = 0);

/// Raw occurrence counts of in-vocabulary n-grams.
SparseVector vectorize_fc(std::string_view text, const Vocabulary& vocab);

struct IdfTable {
  std::vector<double> idf;
  std::size_t n_docs = 0;

  /// CSV `index,idf` with a header row; values use 17 significant digits.
  void save_csv(const std::filesystem::path& path) const;
  static IdfTable load_csv(const std::filesystem::path& path, std::size_t n_docs);
};

/// idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1 with df counted over `vectors`.
IdfTable fit_idf(std::span<const SparseVector> vectors, std::size_t n_features);

/// count * idf, then L2-normalized. Empty stays empty.
SparseVector apply_tfidf(const SparseVector& counts, const IdfTable& idf);
SparseVector vectorize_tfidf(std::string_view text, const Vocabulary& vocab, const IdfTable& idf);

enum class Weighting { kFc, kTfidf };

std::string_view weighting_name(Weighting w);
Weighting parse_weighting(std::string_view name);

/// Vocabulary plus weighting, fitted on training text and applied to any text.
class Featurizer {
 public:
  Featurizer(Vocabulary vocab, Weighting weighting, std::optional<IdfTable> idf);

  /// Builds the vocabulary (and idf table for TF-IDF) from `train_texts`.
  static Featurizer fit(std::span<const std::string> train_texts, const NGramSpec& spec,
                        Weighting weighting, std::size_t min_df = 1, int hash_bits = 0);

  SparseVector transform(std::string_view text) const;
  std::vector<SparseVector> transform(std::span<const std::string> texts) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  Weighting weighting() const { return weighting_; }
  const std::optional<IdfTable>& idf() const { return idf_; }
  std::size_t n_features() const { return vocab_.size(); }

 private:
  Vocabulary vocab_;
  Weighting weighting_;
  std::optional<IdfTable> idf_;
};

}  // namespace microtext::features
