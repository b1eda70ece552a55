#pragma once

// Shared helpers and independent oracles for the test binaries. Nothing
// here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

inline std::filesystem::path data_dir() { return MICROTEXT_DATA_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("microtext_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// `word<TAB>stem` lines.
inline std::vector<std::pair<std::string, std::string>> read_pairs(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random string over [a-z0-9 ] with no leading, trailing or double spaces,
/// no repeated characters: the shape of cleaned text.
inline std::string random_cleaned(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 ";
  const std::size_t len = uniform_int(rng, 0, max_len);
  std::string s;
  while (s.size() < len) {
    const char c = alphabet[uniform_int(rng, 0, alphabet.size() - 1)];
    if (!s.empty() && s.back() == c) continue;
    if (c == ' ' && s.empty()) continue;
    s.push_back(c);
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

/// Brute-force n-gram enumeration: every (start, length) pair for
/// characters, every token window for words, counted into a map.
inline std::map<std::string, int> brute_force_ngrams(const std::string& text, bool words, int lo,
                                                     int hi) {
  std::map<std::string, int> out;
  if (!words) {
    for (std::size_t start = 0; start < text.size(); ++start) {
      for (int n = lo; n <= hi; ++n) {
        if (start + static_cast<std::size_t>(n) <= text.size()) ++out[text.substr(start, n)];
      }
    }
    return out;
  }
  std::vector<std::string> tokens;
  std::istringstream in(text);
  for (std::string t; in >> t;) tokens.push_back(t);
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    std::string gram;
    for (int n = 1; n <= hi && start + static_cast<std::size_t>(n) <= tokens.size(); ++n) {
      gram += (n == 1 ? "" : " ") + tokens[start + n - 1];
      if (n >= lo) ++out[gram];
    }
  }
  return out;
}

/// Central finite difference of f along coordinate k of x.
template <typename F>
double central_difference(F&& f, std::vector<double> x, std::size_t k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double up = f(x);
  x[k] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|) over whole vectors, 0 when both are zero.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

inline void append_utf8(std::string& s, char32_t cp) {
  if (cp < 0x80) {
    s.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    s.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

/// Tweet-like noise: ASCII, assorted whitespace, accented and fullwidth
/// letters, combining marks, CJK, emoji, retweet markers, URLs and the odd
/// stray byte that is not valid UTF-8.
inline std::string random_unicode(std::mt19937_64& rng, std::size_t max_units) {
  static const std::vector<std::pair<char32_t, char32_t>> ranges = {
      {0x20, 0x7E},     {0x20, 0x7E},     {0x20, 0x7E},   {0xC0, 0xFF},     {0x100, 0x17F},
      {0x300, 0x36F},   {0x391, 0x3C9},   {0x4E00, 0x4E50}, {0x1F600, 0x1F64F}, {0xFF01, 0xFF5E},
      {0xFB00, 0xFB06}, {0x2000, 0x200B}, {0x2460, 0x2473},
  };
  static const std::vector<std::string> pieces = {
      "RT ", " RT", "http://", "https://t.co/", "#tag", "\t", "\n", "\r\n", "  ", "\xC2\xA0",
      "\xE3\x80\x80", "!!!", "aaaa", "A\xCC\x81",
  };
  const std::size_t n = uniform_int(rng, 0, max_units);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t kind = uniform_int(rng, 0, 99);
    if (kind < 15) {
      s += pieces[uniform_int(rng, 0, pieces.size() - 1)];
    } else if (kind < 17) {
      s.push_back(static_cast<char>(uniform_int(rng, 0x80, 0xFF)));
    } else {
      const auto& [lo, hi] = ranges[uniform_int(rng, 0, ranges.size() - 1)];
      append_utf8(s, static_cast<char32_t>(uniform_int(rng, lo, hi)));
    }
  }
  return s;
}

/// A small dense classification problem with nonnegative features in
/// which every class occurs at least once.
struct DenseProblem {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  std::vector<std::vector<double>> x;  // n_docs x n_features
  std::vector<std::uint32_t> y;
};

inline DenseProblem random_dense_problem(std::mt19937_64& rng, std::size_t max_classes,
                                         std::size_t max_features, std::size_t max_docs,
                                         bool fractional) {
  DenseProblem p;
  p.n_classes = uniform_int(rng, 1, max_classes);
  p.n_features = uniform_int(rng, 1, max_features);
  const std::size_t n_docs = uniform_int(rng, p.n_classes, std::max(p.n_classes, max_docs));
  for (std::size_t i = 0; i < n_docs; ++i) {
    std::vector<double> row(p.n_features, 0.0);
    for (auto& v : row) {
      if (uniform_int(rng, 0, 2) == 0) {
        v = fractional ? uniform_real(rng, 0.0, 3.0) : static_cast<double>(uniform_int(rng, 1, 4));
      }
    }
    p.x.push_back(row);
    p.y.push_back(static_cast<std::uint32_t>(i < p.n_classes ? i : uniform_int(rng, 0, p.n_classes - 1)));
  }
  return p;
}

/// Posterior of multinomial naive Bayes evaluated straight from Bayes'
/// rule with dense arrays in extended precision: P(c) * prod_t theta_ct^x_t,
/// normalized over classes, returned as natural logs.
inline std::vector<double> dense_bayes_log_posterior(const DenseProblem& p, double alpha,
                                                     const std::vector<double>& x) {
  const std::size_t k = p.n_classes;
  const std::size_t v = p.n_features;
  std::vector<long double> doc_count(k, 0.0L);
  std::vector<std::vector<long double>> mass(k, std::vector<long double>(v, 0.0L));
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    doc_count[p.y[i]] += 1.0L;
    for (std::size_t t = 0; t < v; ++t) mass[p.y[i]][t] += p.x[i][t];
  }
  std::vector<long double> joint(k);
  for (std::size_t c = 0; c < k; ++c) {
    long double total = 0.0L;
    for (auto m : mass[c]) total += m;
    long double log_joint = std::log(doc_count[c] / static_cast<long double>(p.x.size()));
    for (std::size_t t = 0; t < v; ++t) {
      const long double theta = (alpha + mass[c][t]) / (alpha * static_cast<long double>(v) + total);
      log_joint += x[t] * std::log(theta);
    }
    joint[c] = log_joint;
  }
  const long double top = *std::max_element(joint.begin(), joint.end());
  long double norm = 0.0L;
  for (auto j : joint) norm += std::exp(j - top);
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = static_cast<double>(joint[c] - top - std::log(norm));
  return out;
}

}  // namespace testing_support
