#include "microtext/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "microtext/cleaning.hpp"
#include "microtext/error.hpp"

namespace microtext::corpus {
namespace {

using json = nlohmann::json;

std::string_view trim_view(std::string_view s) {
  constexpr std::string_view kSpace = " \t\n\v\f\r";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::string normalize_hashtag(std::string_view raw) {
  std::string tag(trim_view(raw));
  std::transform(tag.begin(), tag.end(), tag.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  if (tag.empty()) throw InvalidArgument("empty hashtag");
  if (tag.find_first_of(" \t\n\v\f\r#") != std::string::npos) {
    throw InvalidArgument(fmt::format("hashtag '{}' contains whitespace or '#'", tag));
  }
  return tag;
}

void finish_hashtags(std::vector<std::string>& tags) {
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
}

Tweet parse_jsonl(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw InvalidArgument("record is not a JSON object");
  Tweet tweet;
  const auto id = obj.find("id");
  const auto text = obj.find("text");
  const auto tags = obj.find("hashtags");
  if (id == obj.end() || !id->is_string()) throw InvalidArgument("missing string field 'id'");
  if (text == obj.end() || !text->is_string()) {
    throw InvalidArgument("missing string field 'text'");
  }
  if (tags == obj.end() || !tags->is_array()) {
    throw InvalidArgument("missing array field 'hashtags'");
  }
  tweet.id = id->get<std::string>();
  tweet.text = text->get<std::string>();
  for (const auto& tag : *tags) {
    if (!tag.is_string()) throw InvalidArgument("hashtag entry is not a string");
    tweet.hashtags.push_back(normalize_hashtag(tag.get<std::string>()));
  }
  return tweet;
}

Tweet parse_tsv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto tab1 = line.find('\t');
  const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
  if (tab2 == std::string_view::npos || line.find('\t', tab2 + 1) != std::string_view::npos) {
    throw InvalidArgument("expected exactly 3 tab-separated fields");
  }
  Tweet tweet;
  tweet.id = std::string(line.substr(0, tab1));
  tweet.text = std::string(line.substr(tab1 + 1, tab2 - tab1 - 1));
  const auto tags = line.substr(tab2 + 1);
  std::size_t start = 0;
  while (start <= tags.size() && !tags.empty()) {
    const auto comma = tags.find(',', start);
    const auto piece = tags.substr(start, comma == std::string_view::npos ? comma : comma - start);
    tweet.hashtags.push_back(normalize_hashtag(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tweet;
}

// Unbiased draw from [0, bound] on the raw generator output.
std::uint64_t uniform_at_most(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  while (true) {
    const std::uint64_t r = rng();
    if (r <= limit) return r % range;
  }
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "tsv") return InputFormat::kTsv;
  throw InvalidArgument(fmt::format("unknown input format '{}'", name));
}

Tweet parse_record(std::string_view line, InputFormat format) {
  Tweet tweet = format == InputFormat::kJsonl ? parse_jsonl(line) : parse_tsv(line);
  if (tweet.id.empty()) throw InvalidArgument("empty id");
  finish_hashtags(tweet.hashtags);
  return tweet;
}

IngestStats ingest(const std::filesystem::path& path, InputFormat format,
                   const std::function<void(Tweet&&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  IngestStats stats;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    Tweet tweet;
    try {
      tweet = parse_record(line, format);
    } catch (const InvalidArgument& e) {
      spdlog::warn("{}:{}: {}", path.string(), line_no, e.what());
      stats.errors.push_back({line_no, e.what()});
      continue;
    }
    ++stats.records;
    if (tweet.hashtags.empty()) {
      ++stats.no_hashtags;
      continue;
    }
    if (!seen.emplace(trim_view(tweet.text)).second) {
      ++stats.duplicates;
      continue;
    }
    sink(std::move(tweet));
  }
  if (in.bad()) throw IoError(fmt::format("read failed: {}", path.string()));
  return stats;
}

std::vector<Tweet> ingest(const std::filesystem::path& path, InputFormat format,
                          IngestStats* stats) {
  std::vector<Tweet> tweets;
  auto result = ingest(path, format, [&](Tweet&& t) { tweets.push_back(std::move(t)); });
  if (stats) *stats = std::move(result);
  return tweets;
}

LabelIndex select_labels(std::span<const Tweet> tweets, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& tweet : tweets) {
    for (const auto& tag : tweet.hashtags) ++counts[tag];
  }
  auto all = LabelIndex::from_counts({counts.begin(), counts.end()});
  if (all.size() < k) {
    spdlog::warn("only {} distinct hashtags, fewer than the requested {}", all.size(), k);
    return all;
  }
  std::vector<std::pair<std::string, std::uint64_t>> top;
  top.reserve(k);
  for (std::size_t i = 0; i < k; ++i) top.emplace_back(all.label(i), all.count(i));
  return LabelIndex::from_counts(std::move(top));
}

std::vector<LabeledTweet> label_examples(std::span<const Tweet> tweets, const LabelIndex& index) {
  if (index.empty()) throw InvalidArgument("label index is empty");
  std::vector<LabeledTweet> out;
  for (const auto& tweet : tweets) {
    std::vector<LabelId> gold;
    for (const auto& tag : tweet.hashtags) {
      if (auto id = index.find(tag)) gold.push_back(*id);
    }
    if (gold.empty()) continue;
    std::sort(gold.begin(), gold.end());
    gold.erase(std::unique(gold.begin(), gold.end()), gold.end());
    const LabelId train = gold.front();
    out.push_back({tweet, std::move(gold), train});
  }
  return out;
}

std::vector<LabeledExample> build_examples(std::span<const LabeledTweet> tweets,
                                           const LabelIndex& index) {
  std::vector<LabeledExample> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    out.push_back({t.tweet.id,
                   cleaning::clean(cleaning::strip_hashtags(t.tweet.text, index)),
                   t.gold_labels, t.train_label});
  }
  return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(uniform_at_most(rng, i));
    std::swap(order[i], order[j]);
  }
  return order;
}

std::size_t train_size(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
}

Split<LabeledExample> split(std::span<const LabeledExample> examples, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = examples.size();
  if (n < 2) throw InvalidArgument("need at least 2 examples to split");
  const std::size_t n_train = train_size(n, spec.train_fraction);
  if (n_train == 0 || n_train == n) {
    throw InvalidArgument(fmt::format("fraction {} of {} examples leaves one side empty",
                                      spec.train_fraction, n));
  }
  const auto order = shuffled_indices(n, spec.seed);
  Split<LabeledExample> result;
  result.train.reserve(n_train);
  result.test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? result.train : result.test).push_back(examples[order[i]]);
  }
  return result;
}

void save_examples(const std::filesystem::path& path, std::span<const LabeledExample> examples,
                   const LabelIndex& index) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  for (const auto& ex : examples) {
    json gold = json::array();
    for (LabelId id : ex.gold_labels) gold.push_back(index.label(id));
    json obj = {{"id", ex.id}, {"text", ex.text}, {"gold", gold},
                {"label", index.label(ex.train_label)}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

std::vector<LabeledExample> load_examples(const std::filesystem::path& path,
                                          const LabelIndex& index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t line_no = 0;
  auto lookup = [&](const std::string& name) {
    auto id = index.find(name);
    if (!id) {
      throw InvalidArgument(fmt::format("{}:{}: unknown label '{}'", path.string(), line_no, name));
    }
    return *id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    try {
      const auto obj = json::parse(line);
      LabeledExample ex;
      ex.id = obj.at("id").get<std::string>();
      ex.text = obj.at("text").get<std::string>();
      for (const auto& g : obj.at("gold")) ex.gold_labels.push_back(lookup(g.get<std::string>()));
      std::sort(ex.gold_labels.begin(), ex.gold_labels.end());
      ex.train_label = lookup(obj.at("label").get<std::string>());
      if (ex.gold_labels.empty() ||
          !std::binary_search(ex.gold_labels.begin(), ex.gold_labels.end(), ex.train_label)) {
        throw InvalidArgument("training label must be one of the gold labels");
      }
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw InvalidArgument(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

}  // namespace microtext::corpus
