#include <algorithm>
#include <iterator>
#include <fstream>
#include <unordered_set>

#include <fmt/format.h>

#include "microtext/error.hpp"
#include "microtext/normalize.hpp"

namespace microtext::normalize {
namespace {

constexpr std::size_t kMinLemma = 3;

bool is_alpha_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool has_vowel(std::string_view w) {
  return w.find_first_of("aeiouy") != std::string_view::npos;
}

// Irregular forms. Regular inflections are left to the suffix rules.
constexpr std::pair<std::string_view, std::string_view> kExceptions[] = {
    {"am", "be"}, {"are", "be"}, {"is", "be"}, {"was", "be"}, {"were", "be"}, {"been", "be"},
    {"being", "be"}, {"has", "have"}, {"had", "have"}, {"having", "have"}, {"does", "do"},
    {"did", "do"}, {"done", "do"}, {"doing", "do"}, {"went", "go"}, {"gone", "go"},
    {"goes", "go"}, {"going", "go"}, {"made", "make"}, {"making", "make"}, {"said", "say"},
    {"saw", "see"}, {"seen", "see"}, {"took", "take"}, {"taken", "take"}, {"taking", "take"},
    {"came", "come"}, {"coming", "come"}, {"got", "get"}, {"gotten", "get"}, {"getting", "get"},
    {"gave", "give"}, {"given", "give"}, {"giving", "give"}, {"knew", "know"}, {"known", "know"},
    {"thought", "think"}, {"told", "tell"}, {"found", "find"}, {"left", "leave"},
    {"felt", "feel"}, {"kept", "keep"}, {"brought", "bring"}, {"bought", "buy"},
    {"began", "begin"}, {"begun", "begin"}, {"wrote", "write"}, {"written", "write"},
    {"writing", "write"}, {"ran", "run"}, {"running", "run"}, {"sat", "sit"},
    {"sitting", "sit"}, {"stood", "stand"}, {"lost", "lose"}, {"paid", "pay"}, {"met", "meet"},
    {"sent", "send"}, {"built", "build"}, {"spent", "spend"}, {"won", "win"},
    {"winning", "win"}, {"ate", "eat"}, {"eaten", "eat"}, {"drove", "drive"},
    {"driven", "drive"}, {"driving", "drive"}, {"spoke", "speak"}, {"spoken", "speak"},
    {"chose", "choose"}, {"chosen", "choose"}, {"broke", "break"}, {"broken", "break"},
    {"fell", "fall"}, {"fallen", "fall"}, {"held", "hold"}, {"led", "lead"}, {"read", "read"},
    {"heard", "hear"}, {"sold", "sell"}, {"taught", "teach"}, {"caught", "catch"},
    {"fought", "fight"}, {"stopped", "stop"}, {"stopping", "stop"}, {"planned", "plan"},
    {"planning", "plan"}, {"shopping", "shop"}, {"hiring", "hire"}, {"hired", "hire"},
    {"loving", "love"}, {"loved", "love"}, {"living", "live"}, {"lived", "live"},
    {"using", "use"}, {"used", "use"}, {"better", "good"}, {"best", "good"},
    {"worse", "bad"}, {"worst", "bad"}, {"men", "man"}, {"women", "woman"},
    {"children", "child"}, {"people", "person"}, {"feet", "foot"}, {"teeth", "tooth"},
    {"mice", "mouse"}, {"geese", "goose"}, {"lives", "life"}, {"wives", "wife"},
    {"knives", "knife"}, {"leaves", "leaf"}, {"news", "news"}, {"series", "series"},
    {"species", "species"}, {"us", "us"}, {"this", "this"}, {"its", "its"},
    {"his", "his"}, {"hers", "hers"},
};

// Ordered suffix rules; the first matching rule for a part of speech wins.
// Identity rules ("ss" -> "ss") shield endings from the broader rules below them.
const std::vector<SuffixRule>& default_rules() {
  static const std::vector<SuffixRule> rules = {
      {Pos::kNoun, "ss", "ss"},   {Pos::kNoun, "us", "us"},   {Pos::kNoun, "is", "is"},
      {Pos::kNoun, "ies", "y"},   {Pos::kNoun, "ches", "ch"}, {Pos::kNoun, "shes", "sh"},
      {Pos::kNoun, "sses", "ss"}, {Pos::kNoun, "xes", "x"},   {Pos::kNoun, "zes", "z"},
      {Pos::kNoun, "men", "man"}, {Pos::kNoun, "s", ""},
      {Pos::kVerb, "ss", "ss"},   {Pos::kVerb, "ies", "y"},   {Pos::kVerb, "ied", "y"},
      {Pos::kVerb, "ches", "ch"}, {Pos::kVerb, "shes", "sh"}, {Pos::kVerb, "sses", "ss"},
      {Pos::kVerb, "xes", "x"},   {Pos::kVerb, "eed", "eed"}, {Pos::kVerb, "ated", "ate"},
      {Pos::kVerb, "ating", "ate"}, {Pos::kVerb, "ized", "ize"}, {Pos::kVerb, "izing", "ize"},
      {Pos::kVerb, "ed", ""},     {Pos::kVerb, "ing", ""},    {Pos::kVerb, "es", "e"},
      {Pos::kVerb, "s", ""},
      {Pos::kAdj, "iest", "y"},   {Pos::kAdj, "ier", "y"},    {Pos::kAdj, "est", ""},
      {Pos::kAdj, "er", ""},
  };
  return rules;
}

constexpr std::string_view kClosedClass[] = {
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "her", "its",
    "our", "their", "i", "me", "you", "he", "she", "it", "we", "they", "him", "them", "us",
    "mine", "yours", "hers", "ours", "theirs", "who", "whom", "whose", "which", "what",
    "and", "or", "but", "nor", "so", "yet", "if", "because", "while", "although", "though",
    "in", "on", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
    "of", "off", "over", "under", "again", "then", "once", "here", "there", "when", "where",
    "why", "how", "all", "any", "both", "each", "few", "more", "most", "some", "such", "no",
    "not", "only", "own", "same", "than", "too", "very", "can", "will",
};

const std::unordered_set<std::string_view>& closed_class() {
  static const std::unordered_set<std::string_view> set(std::begin(kClosedClass), std::end(kClosedClass));
  return set;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

}  // namespace

std::string_view pos_name(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "noun";
    case Pos::kVerb: return "verb";
    case Pos::kAdj: return "adj";
    case Pos::kUnknown: return "unknown";
  }
  return "unknown";
}

Pos parse_pos(std::string_view name) {
  if (name == "noun") return Pos::kNoun;
  if (name == "verb") return Pos::kVerb;
  if (name == "adj") return Pos::kAdj;
  if (name == "unknown") return Pos::kUnknown;
  throw InvalidArgument(fmt::format("unknown part of speech '{}'", name));
}

std::vector<Pos> pos_tag(std::span<const std::string> tokens) {
  std::vector<Pos> tags;
  tags.reserve(tokens.size());
  for (const auto& token : tokens) {
    std::string_view t = token;
    Pos pos = Pos::kNoun;
    if (closed_class().contains(t)) {
      pos = Pos::kUnknown;
    } else if ((t.size() > 4 && t.ends_with("ing")) || (t.size() > 3 && t.ends_with("ed"))) {
      pos = Pos::kVerb;
    } else if (t.size() > 3 && t.ends_with("ly")) {
      pos = Pos::kUnknown;
    } else if (t.ends_with("ous") || t.ends_with("ful") || t.ends_with("ive") ||
               t.ends_with("less") || t.ends_with("able") || t.ends_with("ible")) {
      pos = Pos::kAdj;
    }
    tags.push_back(pos);
  }
  return tags;
}

LemmaLexicon::LemmaLexicon(std::unordered_map<std::string, std::string> exceptions,
                           std::vector<SuffixRule> rules)
    : exceptions_(std::move(exceptions)), rules_(std::move(rules)) {
  for (const auto& rule : rules_) {
    if (rule.suffix.empty()) throw InvalidArgument("suffix rule with empty suffix");
    if (rule.pos == Pos::kUnknown) throw InvalidArgument("suffix rules need a concrete part of speech");
  }
}

const LemmaLexicon& LemmaLexicon::bundled() {
  static const LemmaLexicon lexicon = [] {
    std::unordered_map<std::string, std::string> exceptions;
    for (const auto& [word, lemma] : kExceptions) exceptions.emplace(word, lemma);
    return LemmaLexicon(std::move(exceptions), default_rules());
  }();
  return lexicon;
}

LemmaLexicon LemmaLexicon::load(const std::filesystem::path& exceptions_tsv,
                                const std::filesystem::path& rules_tsv) {
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read {}", p.string()));
    return in;
  };
  std::unordered_map<std::string, std::string> exceptions;
  std::vector<SuffixRule> rules;
  std::string line;
  std::size_t line_no = 0;

  auto in = open(exceptions_tsv);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != 2 || f[0].empty()) {
      throw InvalidArgument(fmt::format("{}:{}: expected word<TAB>lemma", exceptions_tsv.string(), line_no));
    }
    exceptions[f[0]] = f[1];
  }

  in = open(rules_tsv);
  line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() == 2) f.emplace_back();  // empty replacement
    if (f.size() != 3) {
      throw InvalidArgument(
          fmt::format("{}:{}: expected pos<TAB>suffix<TAB>replacement", rules_tsv.string(), line_no));
    }
    rules.push_back({parse_pos(f[0]), f[1], f[2]});
  }
  return LemmaLexicon(std::move(exceptions), std::move(rules));
}

bool LemmaLexicon::apply_rules(std::string_view word, Pos pos, std::string& out) const {
  for (const auto& rule : rules_) {
    if (rule.pos != pos || !word.ends_with(rule.suffix)) continue;
    const auto stem = word.substr(0, word.size() - rule.suffix.size());
    if (stem.size() + rule.replacement.size() < kMinLemma || !has_vowel(stem)) continue;
    out.assign(stem).append(rule.replacement);
    return true;
  }
  return false;
}

std::string LemmaLexicon::lemmatize(std::string_view word, Pos pos) const {
  if (auto it = exceptions_.find(std::string(word)); it != exceptions_.end()) return it->second;
  if (!is_alpha_word(word)) return std::string(word);
  std::string out;
  if (pos == Pos::kUnknown) {
    if (apply_rules(word, Pos::kVerb, out) || apply_rules(word, Pos::kNoun, out)) return out;
  } else if (apply_rules(word, pos, out)) {
    return out;
  }
  return std::string(word);
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kNone: return "none";
    case Mode::kStem: return "stem";
    case Mode::kLemmatize: return "lemma";
  }
  return "none";
}

Mode parse_mode(std::string_view name) {
  if (name == "none") return Mode::kNone;
  if (name == "stem") return Mode::kStem;
  if (name == "lemma" || name == "lemmatize") return Mode::kLemmatize;
  throw InvalidArgument(fmt::format("unknown normalizer '{}'", name));
}

std::string normalize_text(std::string_view text, Mode mode, const LemmaLexicon& lexicon) {
  if (mode == Mode::kNone) return std::string(text);
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto space = text.find(' ', start);
    const auto end = space == std::string_view::npos ? text.size() : space;
    if (end > start) tokens.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  std::vector<Pos> tags;
  if (mode == Mode::kLemmatize) tags = pos_tag(tokens);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    if (!is_alpha_word(tokens[i])) {
      out += tokens[i];
    } else if (mode == Mode::kStem) {
      out += porter_stem(tokens[i]);
    } else {
      out += lexicon.lemmatize(tokens[i], tags[i]);
    }
  }
  return out;
}

}  // namespace microtext::normalize
