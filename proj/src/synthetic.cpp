#include "microtext/synthetic.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <random>
#include <string_view>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "microtext/error.hpp"

namespace microtext::synthetic {
namespace {

constexpr std::size_t kRootsPerClass = 8;

constexpr std::array<std::array<std::string_view, kRootsPerClass>, 5> kRoots = {{
    {"football", "basketball", "touchdown", "goalkeeper", "stadium", "championship", "tournament",
     "playoff"},
    {"guitar", "concert", "melody", "drummer", "orchestra", "symphony", "album", "singer"},
    {"recipe", "chocolate", "delicious", "kitchen", "pasta", "breakfast", "dessert", "barbecue"},
    {"airport", "vacation", "passport", "luggage", "beach", "journey", "hotel", "itinerary"},
    {"software", "computer", "smartphone", "keyboard", "database", "algorithm", "startup",
     "gadget"},
}};

constexpr std::string_view kFiller[] = {
    "the",    "a",       "and",     "so",     "just",   "really", "today",  "tonight",
    "love",   "this",    "that",    "with",   "my",     "your",   "our",    "best",
    "new",    "great",   "good",    "time",   "day",    "week",   "people", "friends",
    "cant",   "wait",    "for",     "about",  "what",   "when",   "who",    "why",
    "going",  "got",     "get",    "make",    "made",   "see",    "look",   "check",
    "out",    "here",    "there",   "now",    "again",  "still",  "ever",   "never",
    "always", "maybe",   "think",   "know",   "feel",   "like",   "want",   "need",
    "some",   "more",    "most",    "very",   "much",   "many",   "little", "big",
    "first",  "last",    "next",    "year",   "morning", "night", "weekend", "city",
    "happy",  "sad",     "crazy",   "amazing", "awesome", "cool", "fun",    "guys",
    "omg",    "lol",     "yes",     "no",     "ok",     "please", "thanks", "wow",
    "café",   "naïve",   "fiancée", "résumé", "über",   "señor",  "déjà",   "vu",
};

constexpr std::string_view kSuffixes[] = {"", "s", "ing", "ed", "er", "y", "ish"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n) by rejection on the raw 64-bit output.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
  }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
  char letter() { return static_cast<char>('a' + below(26)); }

  template <typename Range>
  auto pick(const Range& r) -> decltype(*std::begin(r)) {
    return std::begin(r)[below(static_cast<std::size_t>(std::size(r)))];
  }

 private:
  std::mt19937_64 engine_;
};

// One random substitution, deletion, insertion or transposition, never at
// the first letter.
void edit(std::string& w, Rng& rng) {
  if (w.size() < 3) return;
  const std::size_t pos = rng.between(1, w.size() - 1);
  switch (rng.below(4)) {
    case 0: w[pos] = rng.letter(); break;
    case 1: w.erase(pos, 1); break;
    case 2: w.insert(w.begin() + static_cast<std::ptrdiff_t>(pos), rng.letter()); break;
    default:
      if (pos + 1 < w.size()) std::swap(w[pos], w[pos + 1]);
      break;
  }
}

std::string topic_word(std::size_t cls, const CorpusSpec& spec, Rng& rng) {
  std::string w(rng.pick(kRoots[cls]));
  if (rng.chance(spec.misspell_rate)) {
    const std::size_t edits = rng.between(1, 2);
    for (std::size_t i = 0; i < edits; ++i) edit(w, rng);
  }
  w += rng.pick(kSuffixes);
  return w;
}

std::string shout(std::string w) {
  for (char& c : w) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return w;
}

std::string stretch(std::string w, Rng& rng) {
  const std::size_t pos = rng.below(w.size());
  if (static_cast<unsigned char>(w[pos]) < 0x80) w.insert(pos, rng.between(2, 4), w[pos]);
  return w;
}

std::string compose(std::size_t cls, const CorpusSpec& spec, Rng& rng) {
  std::vector<std::string> words;
  const std::size_t n_topic = rng.between(1, 3);
  for (std::size_t i = 0; i < n_topic; ++i) words.push_back(topic_word(cls, spec, rng));
  const std::size_t n_filler = rng.between(4, 9);
  for (std::size_t i = 0; i < n_filler; ++i) words.emplace_back(rng.pick(kFiller));
  for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);

  if (rng.chance(0.15)) {
    auto& w = words[rng.below(words.size())];
    w = shout(w);
  }
  if (rng.chance(0.15)) {
    auto& w = words[rng.below(words.size())];
    w = stretch(w, rng);
  }

  std::string text;
  if (rng.chance(0.15)) text += fmt::format("RT @user{} ", rng.below(500));
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) text += ' ';
    text += words[i];
  }
  if (rng.chance(0.2)) text += rng.chance(0.5) ? "!!!" : "?";
  if (rng.chance(0.2)) {
    std::string slug;
    for (int i = 0; i < 8; ++i) slug += rng.letter();
    text += fmt::format(" https://t.co/{}", slug);
  }
  return text;
}

}  // namespace

const std::vector<std::string>& class_names() {
  static const std::vector<std::string> names = {"sports", "music", "food", "travel", "tech"};
  return names;
}

std::vector<corpus::Tweet> generate(const CorpusSpec& spec) {
  const auto& names = class_names();
  Rng rng(spec.seed);
  std::vector<corpus::Tweet> tweets;
  tweets.reserve(spec.n_docs);
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  while (tweets.size() < spec.n_docs) {
    if (++attempts > 100 * (spec.n_docs + 1)) {
      throw InvalidArgument("could not generate enough distinct synthetic tweets");
    }
    const std::size_t cls = tweets.size() % names.size();
    corpus::Tweet t;
    t.text = compose(cls, spec, rng);
    std::vector<std::string> tags = {names[cls]};
    if (rng.chance(spec.second_label_rate)) {
      const std::size_t other = (cls + rng.between(1, names.size() - 1)) % names.size();
      tags.push_back(names[other]);
    }
    // Sometimes the hashtags also appear in the text itself.
    if (rng.chance(0.5)) {
      for (const auto& tag : tags) t.text += " #" + tag;
    }
    if (!seen.insert(t.text).second) continue;
    std::sort(tags.begin(), tags.end());
    t.hashtags = std::move(tags);
    t.id = fmt::format("syn{:05}", tweets.size());
    tweets.push_back(std::move(t));
  }
  return tweets;
}

void write_jsonl(const std::filesystem::path& path, std::span<const corpus::Tweet> tweets) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  for (const auto& t : tweets) {
    const nlohmann::json obj = {{"id", t.id}, {"text", t.text}, {"hashtags", t.hashtags}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

}  // namespace microtext::synthetic
