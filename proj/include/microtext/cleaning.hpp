#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "microtext/label_index.hpp"

namespace microtext::cleaning {

/// Deletes every `#word` whose lowercased word is a selected label. A word
/// is the run of bytes after '#' up to whitespace or ASCII punctuation other
/// than '_'. Other hashtags are left for the later character filter.
std::string strip_hashtags(std::string_view text, const LabelIndex& labels);

enum class Step {
  kTransliterate,        // NFKD, drop combining marks and anything non-ASCII
  kWhitespaceToSpace,    // tab, newline etc. become ' '
  kRemoveRetweetMarker,  // word-delimited uppercase "RT"
  kLowercase,
  kRemoveUrls,           // http:// or https:// up to the next space
  kKeepAlphanumeric,     // drop everything outside [a-z0-9 ]
  kCollapseSpaces,
  kCollapseRepeats,      // any run of one character becomes one character
  kTrim,
};

std::string_view step_name(Step step);

/// Individual steps, usable on their own.
std::string transliterate(std::string_view text);
std::string whitespace_to_space(std::string_view text);
std::string remove_retweet_marker(std::string_view text);
std::string to_lower(std::string_view text);
std::string remove_urls(std::string_view text);
std::string keep_alphanumeric(std::string_view text);
std::string collapse_spaces(std::string_view text);
std::string collapse_repeats(std::string_view text);
std::string trim(std::string_view text);

std::string apply_step(Step step, std::string_view text);

/// An ordered list of cleaning steps. Pure: equal inputs give equal outputs.
class CleaningPipeline {
 public:
  /// The nine steps in their canonical order.
  static CleaningPipeline standard();

  explicit CleaningPipeline(std::vector<Step> steps) : steps_(std::move(steps)) {}

  const std::vector<Step>& steps() const { return steps_; }
  std::string operator()(std::string_view text) const;

 private:
  std::vector<Step> steps_;
};

/// The standard pipeline. Output uses only [a-z0-9 ], has no leading,
/// trailing or doubled spaces, and never repeats a character.
std::string clean(std::string_view text);

}  // namespace microtext::cleaning
