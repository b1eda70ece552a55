#include "microtext/grid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "microtext/csv.hpp"
#include "microtext/error.hpp"

namespace microtext::eval {
namespace {

constexpr std::string_view kPaperGrid = R"(# Individual (N,N) and combined (1,N) sweeps for every learner and weighting,
# then the word-level sweeps again with stemming and lemmatization.
seed = 0
min_df = 1

[raw]
models = ["mnb", "svm", "lr"]
weightings = ["fc", "tfidf"]
normalizers = ["none"]
char_n = 8
word_n = 4
sweeps = ["individual", "combined"]

[normalized]
models = ["mnb", "svm"]
weightings = ["fc", "tfidf"]
normalizers = ["stem", "lemma"]
char_n = 0
word_n = 4
sweeps = ["individual", "combined"]
)";

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

std::string_view strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a '#' comment that is not inside double quotes.
std::string_view drop_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct GridError {
  std::size_t line;
  std::string message;
};

// A value is a bare scalar, a quoted string, or a [..] list of either.
std::vector<std::string> parse_values(std::string_view raw) {
  raw = strip(raw);
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') throw GridError{0, "unterminated list"};
    raw = strip(raw.substr(1, raw.size() - 2));
    if (raw.empty()) return {};
  }
  std::vector<std::string> values;
  std::string item;
  bool quoted = false;
  bool was_quoted = false;
  auto finish = [&] {
    const auto bare = was_quoted ? std::string_view(item) : strip(item);
    if (bare.empty() && !was_quoted) throw GridError{0, "empty list element"};
    values.emplace_back(bare);
    item.clear();
    was_quoted = false;
  };
  for (char ch : raw) {
    if (ch == '"') {
      if (!quoted && !was_quoted) {
        if (!strip(item).empty()) throw GridError{0, "text before opening quote"};
        item.clear();
      } else if (!quoted) {
        throw GridError{0, "text after closing quote"};
      }
      quoted = !quoted;
      was_quoted = true;
    } else if (ch == ',' && !quoted) {
      finish();
    } else if (quoted || !was_quoted) {
      item.push_back(ch);
    } else if (ch != ' ' && ch != '\t') {
      throw GridError{0, "text after closing quote"};
    }
  }
  if (quoted) throw GridError{0, "unterminated string"};
  finish();
  return values;
}

template <typename T>
T parse_number(std::string_view key, const std::vector<std::string>& values) {
  if (values.size() != 1) throw GridError{0, fmt::format("'{}' takes a single value", key)};
  const auto& s = values.front();
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw GridError{0, fmt::format("bad value '{}' for '{}'", s, key)};
  }
  return out;
}

using Block = std::map<std::string, std::vector<std::string>, std::less<>>;

const std::vector<std::string>& require(const Block& block, std::string_view key) {
  const auto it = block.find(key);
  if (it == block.end() || it->second.empty()) {
    throw GridError{0, fmt::format("missing '{}'", key)};
  }
  return it->second;
}

std::vector<ExperimentConfig> expand(const Block& block) {
  static const std::vector<std::string> kKnown = {
      "models", "weightings", "normalizers", "char_n", "word_n", "sweeps", "ngrams",
      "c",      "alpha",      "max_iters",   "tol",    "seed",   "min_df", "hash_bits"};
  for (const auto& [key, _] : block) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw GridError{0, fmt::format("unknown key '{}'", key)};
    }
  }
  auto number_or = [&]<typename T>(std::string_view key, T fallback) {
    const auto it = block.find(key);
    return it == block.end() ? fallback : parse_number<T>(key, it->second);
  };

  ExperimentConfig base;
  base.settings.c_reg = number_or("c", base.settings.c_reg);
  base.settings.alpha = number_or("alpha", base.settings.alpha);
  base.settings.max_iters = number_or("max_iters", base.settings.max_iters);
  base.settings.tol = number_or("tol", base.settings.tol);
  base.settings.seed = number_or("seed", base.settings.seed);
  base.min_df = number_or("min_df", base.min_df);
  base.hash_bits = number_or("hash_bits", base.hash_bits);

  bool individual = true;
  bool combined = true;
  if (const auto it = block.find("sweeps"); it != block.end()) {
    individual = combined = false;
    for (const auto& s : it->second) {
      if (s == "individual") {
        individual = true;
      } else if (s == "combined") {
        combined = true;
      } else {
        throw GridError{0, fmt::format("unknown sweep '{}'", s)};
      }
    }
  }

  std::vector<features::NGramSpec> specs;
  auto add_spec = [&](const features::NGramSpec& s) {
    if (std::find(specs.begin(), specs.end(), s) == specs.end()) specs.push_back(s);
  };
  for (const auto level : {features::Level::kChar, features::Level::kWord}) {
    const std::string key = level == features::Level::kChar ? "char_n" : "word_n";
    const int max_n = number_or(key, 0);
    if (max_n < 0) throw GridError{0, fmt::format("'{}' must be >= 0", key)};
    if (individual) {
      for (int n = 1; n <= max_n; ++n) add_spec(features::NGramSpec::make(level, n, n));
    }
    if (combined) {
      for (int n = 1; n <= max_n; ++n) add_spec(features::NGramSpec::make(level, 1, n));
    }
  }
  if (const auto it = block.find("ngrams"); it != block.end()) {
    for (const auto& flag : it->second) add_spec(features::NGramSpec::parse(flag));
  }
  if (specs.empty()) throw GridError{0, "block defines no n-gram groups"};

  std::vector<ExperimentConfig> configs;
  for (const auto& m : require(block, "models")) {
    for (const auto& w : require(block, "weightings")) {
      const auto normalizers = block.contains("normalizers") ? require(block, "normalizers")
                                                             : std::vector<std::string>{"none"};
      for (const auto& nm : normalizers) {
        for (const auto& spec : specs) {
          ExperimentConfig cfg = base;
          cfg.model = parse_model(m);
          cfg.weighting = features::parse_weighting(w);
          cfg.normalizer = normalize::parse_mode(nm);
          cfg.spec = spec;
          cfg.validate();
          configs.push_back(cfg);
        }
      }
    }
  }
  return configs;
}

std::string fmt_accuracy(double a) { return fmt::format("{:.6f}", a); }

}  // namespace

std::vector<ReportRow> run_grid(std::span<const ExperimentConfig> configs,
                                std::span<const LabeledExample> train,
                                std::span<const LabeledExample> test, unsigned jobs) {
  if (configs.empty()) throw InvalidArgument("empty experiment grid");
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, configs.size()));

  std::vector<ReportRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        rows[i] = run_experiment(configs[i], train, test);
      } catch (const std::exception& e) {
        ReportRow failed;
        failed.config = configs[i];
        failed.n_train = train.size();
        failed.n_test = test.size();
        failed.status = RunStatus::kFailed;
        failed.message = e.what();
        failed.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows[i] = std::move(failed);
        spdlog::error("cell {} failed: {}", configs[i].describe(), e.what());
        continue;
      }
      if (rows[i].status == RunStatus::kEmptyVocabulary) {
        spdlog::warn("cell {}: {}", configs[i].describe(), rows[i].message);
      }
      spdlog::debug("cell {}: accuracy {:.4f} in {:.2f}s", configs[i].describe(), rows[i].accuracy,
                    rows[i].wall_time);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<SummaryRow> summarize(std::span<const ReportRow> rows) {
  std::vector<SummaryRow> out;
  for (const auto& row : rows) {
    if (row.status == RunStatus::kFailed) continue;
    const auto& c = row.config;
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) {
      return s.model == c.model && s.weighting == c.weighting && s.normalizer == c.normalizer;
    });
    if (it == out.end()) {
      out.push_back({c.model, c.weighting, c.normalizer, c.spec, row.accuracy});
    } else if (row.accuracy > it->accuracy) {
      it->best_spec = c.spec;
      it->accuracy = row.accuracy;
    }
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& path, std::span<const ReportRow> rows) {
  auto out = open_output(path);
  out << kGridHeader << '\n';
  for (const auto& r : rows) {
    const auto& c = r.config;
    out << csv::join_record({std::string(model_name(c.model)),
                             std::string(features::weighting_name(c.weighting)),
                             std::string(features::level_name(c.spec.level)),
                             std::to_string(c.spec.lo), std::to_string(c.spec.hi), c.spec.label(),
                             std::string(normalize::mode_name(c.normalizer)),
                             std::to_string(c.min_df), std::to_string(c.hash_bits),
                             std::string(status_name(r.status)), fmt_accuracy(r.accuracy),
                             std::to_string(r.n_train), std::to_string(r.n_test),
                             std::to_string(r.vocab_size), fmt::format("{:.3f}", r.wall_time)})
        << '\n';
  }
  check_written(out, path);
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  auto out = open_output(path);
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << csv::join_record({std::string(model_name(s.model)),
                             std::string(features::weighting_name(s.weighting)),
                             std::string(normalize::mode_name(s.normalizer)), s.best_spec.label(),
                             fmt_accuracy(s.accuracy)})
        << '\n';
  }
  check_written(out, path);
}

void write_series_csv(const std::filesystem::path& path, std::span<const ReportRow> rows,
                      bool individual) {
  auto out = open_output(path);
  out << kSeriesHeader << '\n';
  for (const auto& r : rows) {
    const auto& c = r.config;
    if (r.status == RunStatus::kFailed) continue;
    if (individual ? !c.spec.individual() : !c.spec.combined()) continue;
    out << csv::join_record({std::string(model_name(c.model)),
                             std::string(features::weighting_name(c.weighting)),
                             std::string(normalize::mode_name(c.normalizer)),
                             std::string(features::level_name(c.spec.level)),
                             std::to_string(c.spec.hi), c.spec.label(), fmt_accuracy(r.accuracy)})
        << '\n';
  }
  check_written(out, path);
}

void write_reports(const std::filesystem::path& dir, std::span<const ReportRow> rows) {
  std::filesystem::create_directories(dir);
  write_grid_csv(dir / "grid.csv", rows);
  write_summary_csv(dir / "summary.csv", summarize(rows));
  write_series_csv(dir / "series_individual.csv", rows, true);
  write_series_csv(dir / "series_combined.csv", rows, false);
}

std::vector<ExperimentConfig> parse_grid(std::string_view text) {
  Block defaults;
  std::vector<std::pair<std::size_t, Block>> blocks;  // starting line, keys
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, raw)) {
      ++line_no;
      const auto line = strip(drop_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || strip(line.substr(1, line.size() - 2)).empty()) {
          throw GridError{line_no, "bad table header"};
        }
        blocks.emplace_back(line_no, Block{});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw GridError{line_no, "expected key = value"};
      const auto key = std::string(strip(line.substr(0, eq)));
      if (key.empty()) throw GridError{line_no, "empty key"};
      auto& target = blocks.empty() ? defaults : blocks.back().second;
      if (target.contains(key)) throw GridError{line_no, fmt::format("duplicate key '{}'", key)};
      try {
        target[key] = parse_values(line.substr(eq + 1));
      } catch (GridError& e) {
        e.line = line_no;
        throw;
      }
    }
    if (blocks.empty()) blocks.emplace_back(1, Block{});
    std::vector<ExperimentConfig> configs;
    for (auto& [start, block] : blocks) {
      line_no = start;
      for (const auto& [key, value] : defaults) block.try_emplace(key, value);
      auto expanded = expand(block);
      configs.insert(configs.end(), expanded.begin(), expanded.end());
    }
    return configs;
  } catch (const GridError& e) {
    throw InvalidArgument(fmt::format("grid line {}: {}", e.line == 0 ? line_no : e.line, e.message));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(fmt::format("grid line {}: {}", line_no, e.what()));
  }
}

std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read grid file {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_grid(text.str());
}

std::string_view paper_grid_text() { return kPaperGrid; }

std::vector<ExperimentConfig> paper_grid() { return parse_grid(kPaperGrid); }

}  // namespace microtext::eval
