#include "microtext/cleaning.hpp"

#include <algorithm>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "microtext/error.hpp"

namespace microtext::cleaning {
namespace {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

// Characters that end a hashtag word.
bool ends_hashtag(unsigned char c) {
  if (c >= 0x80) return false;
  if (c == '_') return false;
  return !is_ascii_alnum(static_cast<char>(c));
}

bool is_combining_mark(UChar32 c) {
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_ENCLOSING_MARK ||
         type == U_COMBINING_SPACING_MARK;
}

const icu::Normalizer2& nfkd() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKDInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error(std::string("ICU NFKD normalizer unavailable: ") + u_errorName(status));
  }
  return *norm;
}

}  // namespace

std::string strip_hashtags(std::string_view text, const LabelIndex& labels) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '#') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && !ends_hashtag(static_cast<unsigned char>(text[end]))) ++end;
    std::string word(text.substr(i + 1, end - i - 1));
    std::transform(word.begin(), word.end(), word.begin(), [](char c) {
      return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    });
    if (!word.empty() && labels.contains(word)) {
      i = end;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::string_view step_name(Step step) {
  switch (step) {
    case Step::kTransliterate: return "transliterate";
    case Step::kWhitespaceToSpace: return "whitespace_to_space";
    case Step::kRemoveRetweetMarker: return "remove_retweet_marker";
    case Step::kLowercase: return "lowercase";
    case Step::kRemoveUrls: return "remove_urls";
    case Step::kKeepAlphanumeric: return "keep_alphanumeric";
    case Step::kCollapseSpaces: return "collapse_spaces";
    case Step::kCollapseRepeats: return "collapse_repeats";
    case Step::kTrim: return "trim";
  }
  return "unknown";
}

std::string transliterate(std::string_view text) {
  const bool ascii = std::all_of(text.begin(), text.end(),
                                 [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) return std::string(text);

  UErrorCode status = U_ZERO_ERROR;
  // Invalid UTF-8 decodes to U+FFFD, which is dropped below.
  const auto source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString decomposed = nfkd().normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(std::string("NFKD normalization failed: ") + u_errorName(status));
  }
  std::string out;
  out.reserve(text.size());
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    i += U16_LENGTH(c);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (u_isUWhiteSpace(c)) {
      out.push_back(' ');
    } else if (is_combining_mark(c)) {
      continue;
    }
  }
  return out;
}

std::string whitespace_to_space(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (is_ascii_space(c)) c = ' ';
  }
  return out;
}

std::string remove_retweet_marker(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == 'R' && i + 1 < text.size() && text[i + 1] == 'T' &&
        (i == 0 || !is_ascii_alnum(text[i - 1])) &&
        (i + 2 == text.size() || !is_ascii_alnum(text[i + 2]))) {
      i += 2;
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string remove_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto rest = text.substr(i);
    if (rest.starts_with("http://") || rest.starts_with("https://")) {
      while (i < text.size() && !is_ascii_space(text[i])) ++i;
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string keep_alphanumeric(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ') out.push_back(c);
  }
  return out;
}

std::string collapse_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

std::string collapse_repeats(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(' ');
  return std::string(text.substr(first, last - first + 1));
}

std::string apply_step(Step step, std::string_view text) {
  switch (step) {
    case Step::kTransliterate: return transliterate(text);
    case Step::kWhitespaceToSpace: return whitespace_to_space(text);
    case Step::kRemoveRetweetMarker: return remove_retweet_marker(text);
    case Step::kLowercase: return to_lower(text);
    case Step::kRemoveUrls: return remove_urls(text);
    case Step::kKeepAlphanumeric: return keep_alphanumeric(text);
    case Step::kCollapseSpaces: return collapse_spaces(text);
    case Step::kCollapseRepeats: return collapse_repeats(text);
    case Step::kTrim: return trim(text);
  }
  throw InvalidArgument("unknown cleaning step");
}

CleaningPipeline CleaningPipeline::standard() {
  return CleaningPipeline({
      Step::kTransliterate,
      Step::kWhitespaceToSpace,
      Step::kRemoveRetweetMarker,
      Step::kLowercase,
      Step::kRemoveUrls,
      Step::kKeepAlphanumeric,
      Step::kCollapseSpaces,
      Step::kCollapseRepeats,
      Step::kTrim,
  });
}

std::string CleaningPipeline::operator()(std::string_view text) const {
  std::string current(text);
  for (Step step : steps_) current = apply_step(step, current);
  return current;
}

std::string clean(std::string_view text) {
  static const CleaningPipeline pipeline = CleaningPipeline::standard();
  return pipeline(text);
}

}  // namespace microtext::cleaning
