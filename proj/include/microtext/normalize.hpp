#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace microtext::normalize {

/// Porter (1980) stemmer, original rule set. Words that are not purely
/// [a-z], and words of length <= 2, are returned unchanged.
std::string porter_stem(std::string_view word);

enum class Pos { kNoun, kVerb, kAdj, kUnknown };

std::string_view pos_name(Pos pos);
Pos parse_pos(std::string_view name);

/// Deterministic heuristic tagger: closed-class words are kUnknown, then
/// -ing/-ed give kVerb, -ly gives kUnknown, a few adjective suffixes give
/// kAdj, and everything else (including -s) is kNoun.
std::vector<Pos> pos_tag(std::span<const std::string> tokens);

struct SuffixRule {
  Pos pos;
  std::string suffix;
  std::string replacement;
};

/// Exception table plus ordered suffix rules. A suffix rule fires only if
/// its result has at least three letters and the stripped stem has a vowel.
class LemmaLexicon {
 public:
  LemmaLexicon(std::unordered_map<std::string, std::string> exceptions,
               std::vector<SuffixRule> rules);

  /// The built-in English tables.
  static const LemmaLexicon& bundled();

  /// `word<TAB>lemma` and `pos<TAB>suffix<TAB>replacement` files.
  /// Blank lines and lines starting with '#' are ignored.
  static LemmaLexicon load(const std::filesystem::path& exceptions_tsv,
                           const std::filesystem::path& rules_tsv);

  /// Exception lookup first, then the first matching rule for `pos`
  /// (kUnknown tries verb rules, then noun rules), else identity.
  std::string lemmatize(std::string_view word, Pos pos) const;

  const std::unordered_map<std::string, std::string>& exceptions() const { return exceptions_; }
  const std::vector<SuffixRule>& rules() const { return rules_; }

 private:
  bool apply_rules(std::string_view word, Pos pos, std::string& out) const;

  std::unordered_map<std::string, std::string> exceptions_;
  std::vector<SuffixRule> rules_;
};

inline std::string lemmatize(std::string_view word, Pos pos) {
  return LemmaLexicon::bundled().lemmatize(word, pos);
}

enum class Mode { kNone, kStem, kLemmatize };

std::string_view mode_name(Mode mode);
/// Accepts none, stem, lemma and lemmatize.
Mode parse_mode(std::string_view name);

/// Splits cleaned text on spaces, maps each token through the normalizer
/// and joins with single spaces. Tokens containing digits pass through.
std::string normalize_text(std::string_view text, Mode mode,
                           const LemmaLexicon& lexicon = LemmaLexicon::bundled());

}  // namespace microtext::normalize
