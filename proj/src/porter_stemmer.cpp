#include <algorithm>
#include <array>
#include <span>
#include <string>

#include "microtext/normalize.hpp"

// Porter, "An algorithm for suffix stripping" (1980), without the later
// departures of the reference C code ("bli"->"ble", "logi"->"log").

namespace microtext::normalize {
namespace {

bool is_consonant(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 || !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// Number of VC sequences in the form [C](VC)^m[V].
int measure(std::string_view stem) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = stem.size();
  while (i < n && is_consonant(stem, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(stem, i)) ++i;
    if (i >= n) break;
    while (i < n && is_consonant(stem, i)) ++i;
    ++m;
  }
  return m;
}

bool has_vowel(std::string_view stem) {
  for (std::size_t i = 0; i < stem.size(); ++i) {
    if (!is_consonant(stem, i)) return true;
  }
  return false;
}

// *d: ends with a double consonant.
bool ends_double_consonant(std::string_view w) {
  const auto n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: ends consonant-vowel-consonant, the last not w, x or y.
bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
  const char last = w[n - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

enum class Cond { kM0, kM1, kM1Ion };

// First rule whose suffix matches decides; if its condition fails the word
// is left unchanged.
void apply_first(std::string& w, std::span<const Rule> rules, Cond cond) {
  for (const auto& rule : rules) {
    if (!w.ends_with(rule.suffix)) continue;
    const std::string_view stem(w.data(), w.size() - rule.suffix.size());
    bool ok = false;
    switch (cond) {
      case Cond::kM0: ok = measure(stem) > 0; break;
      case Cond::kM1: ok = measure(stem) > 1; break;
      case Cond::kM1Ion:
        ok = measure(stem) > 1 &&
             (rule.suffix != "ion" || (!stem.empty() && (stem.back() == 's' || stem.back() == 't')));
        break;
    }
    if (ok) w = std::string(stem).append(rule.replacement);
    return;
  }
}

void step1a(std::string& w) {
  if (w.ends_with("sses")) {
    w.resize(w.size() - 2);
  } else if (w.ends_with("ies")) {
    w.resize(w.size() - 2);
  } else if (w.ends_with("ss")) {
    // unchanged
  } else if (w.ends_with("s")) {
    w.pop_back();
  }
}

void step1b(std::string& w) {
  if (w.ends_with("eed")) {
    if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) w.pop_back();
    return;
  }
  std::size_t cut = 0;
  if (w.ends_with("ed") && has_vowel(std::string_view(w).substr(0, w.size() - 2))) {
    cut = 2;
  } else if (w.ends_with("ing") && has_vowel(std::string_view(w).substr(0, w.size() - 3))) {
    cut = 3;
  }
  if (cut == 0) return;
  w.resize(w.size() - cut);
  if (w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w) && w.back() != 'l' && w.back() != 's' && w.back() != 'z') {
    w.pop_back();
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (w.ends_with("y") && has_vowel(std::string_view(w).substr(0, w.size() - 1))) {
    w.back() = 'i';
  }
}

constexpr std::array<Rule, 20> kStep2 = {{
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
    {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
    {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
    {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
}};

constexpr std::array<Rule, 7> kStep3 = {{
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
}};

constexpr std::array<Rule, 19> kStep4 = {{
    {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
    {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
    {"ent", ""},  {"ion", ""},  {"ou", ""},   {"ism", ""}, {"ate", ""},
    {"iti", ""},  {"ous", ""},  {"ive", ""},  {"ize", ""},
}};

void step5a(std::string& w) {
  if (!w.ends_with("e")) return;
  const std::string_view stem(w.data(), w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
}

void step5b(std::string& w) {
  if (measure(w) > 1 && ends_double_consonant(w) && w.back() == 'l') w.pop_back();
}

// Overlapping suffixes ("ement", "ment", "ent") resolve to the longest match.
void step4(std::string& w) {
  const Rule* best = nullptr;
  for (const auto& rule : kStep4) {
    if (w.ends_with(rule.suffix) && (!best || rule.suffix.size() > best->suffix.size())) {
      best = &rule;
    }
  }
  if (best) apply_first(w, std::span<const Rule>(best, 1), Cond::kM1Ion);
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 2) return w;
  if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) return w;
  step1a(w);
  step1b(w);
  step1c(w);
  apply_first(w, kStep2, Cond::kM0);
  apply_first(w, kStep3, Cond::kM0);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

}  // namespace microtext::normalize
