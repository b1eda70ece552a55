#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "microtext/label_index.hpp"

namespace microtext::corpus {

/// A raw tweet. Hashtags are lowercase, unique, sorted and stored without '#'.
struct Tweet {
  std::string id;
  std::string text;
  std::vector<std::string> hashtags;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

/// A tweet restricted to the selected label set, before cleaning.
struct LabeledTweet {
  Tweet tweet;
  std::vector<LabelId> gold_labels;  // ascending ids, nonempty
  LabelId train_label;
};

/// A cleaned training/evaluation example.
struct LabeledExample {
  std::string id;
  std::string text;
  std::vector<LabelId> gold_labels;  // ascending ids, nonempty
  LabelId train_label;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

enum class InputFormat { kJsonl, kTsv };

InputFormat parse_input_format(std::string_view name);

struct IngestError {
  std::size_t line;
  std::string message;
};

struct IngestStats {
  std::size_t records = 0;          // well-formed records seen
  std::size_t no_hashtags = 0;      // dropped: empty hashtag set
  std::size_t duplicates = 0;       // dropped: text seen before
  std::vector<IngestError> errors;  // malformed lines, skipped
};

/// Parses one record. Throws InvalidArgument describing what is malformed.
Tweet parse_record(std::string_view line, InputFormat format);

/// Streams tweets from `path` into `sink`. Records without hashtags and
/// records whose trimmed text equals an earlier record's trimmed text are
/// dropped. Malformed lines are reported in the returned stats and skipped.
/// Throws IoError if the file cannot be read.
IngestStats ingest(const std::filesystem::path& path, InputFormat format,
                   const std::function<void(Tweet&&)>& sink);

/// Convenience overload collecting the stream into a vector.
std::vector<Tweet> ingest(const std::filesystem::path& path, InputFormat format,
                          IngestStats* stats = nullptr);

/// The `k` most frequent hashtags (one count per tweet). Returns all
/// distinct hashtags, with a logged warning, when fewer than `k` exist.
LabelIndex select_labels(std::span<const Tweet> tweets, std::size_t k = 50);

/// Keeps tweets carrying at least one selected label. The gold set is the
/// intersection with the label set; the training label is the gold label
/// with the highest global count (the smallest id).
std::vector<LabeledTweet> label_examples(std::span<const Tweet> tweets, const LabelIndex& index);

/// Strips label hashtags and cleans the text of each labeled tweet.
std::vector<LabeledExample> build_examples(std::span<const LabeledTweet> tweets,
                                           const LabelIndex& index);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

/// Fisher-Yates permutation of [0, n) driven by std::mt19937_64(seed).
/// Position i (from n-1 down to 1) swaps with j drawn uniformly from [0, i]
/// by rejection sampling on the raw 64-bit output, so the permutation is
/// identical on every conforming platform.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Number of training examples: round(train_fraction * n), half away from zero.
std::size_t train_size(std::size_t n, double train_fraction);

/// Shuffles with `shuffled_indices` and takes the first train_size() items
/// as training data. Throws InvalidArgument for n < 2, a fraction outside
/// (0, 1), or a split that leaves one side empty.
Split<LabeledExample> split(std::span<const LabeledExample> examples, const SplitSpec& spec);

/// examples.jsonl: one object per line with id, text, gold (label names)
/// and label (training label name).
void save_examples(const std::filesystem::path& path, std::span<const LabeledExample> examples,
                   const LabelIndex& index);
std::vector<LabeledExample> load_examples(const std::filesystem::path& path,
                                          const LabelIndex& index);

}  // namespace microtext::corpus
