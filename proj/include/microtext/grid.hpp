#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "microtext/eval.hpp"

namespace microtext::eval {

/// Runs every configuration on the same split with up to `jobs` worker
/// threads (0 = one per hardware thread). Rows come back in config order.
/// A configuration that throws yields a kFailed row and the grid continues.
/// Throws InvalidArgument on an empty config list.
std::vector<ReportRow> run_grid(std::span<const ExperimentConfig> configs,
                                std::span<const LabeledExample> train,
                                std::span<const LabeledExample> test, unsigned jobs = 1);

/// Best n-gram group for one (model, weighting, normalizer) triple.
struct SummaryRow {
  ModelKind model;
  features::Weighting weighting;
  normalize::Mode normalizer;
  features::NGramSpec best_spec;
  double accuracy;
};

/// One row per triple in order of first appearance. Failed rows are
/// ignored; ties keep the earlier row.
std::vector<SummaryRow> summarize(std::span<const ReportRow> rows);

// grid.csv columns
inline constexpr std::string_view kGridHeader =
    "model,weighting,level,lo,hi,ngram,normalizer,min_df,hash_bits,status,accuracy,"
    "n_train,n_test,vocab_size,wall_time";
// series_individual.csv and series_combined.csv columns; n is the N of (N,N) or (1,N)
inline constexpr std::string_view kSeriesHeader = "model,weighting,normalizer,level,n,ngram,accuracy";
inline constexpr std::string_view kSummaryHeader = "model,weighting,normalizer,best_ngram,accuracy";

void write_grid_csv(const std::filesystem::path& path, std::span<const ReportRow> rows);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);
/// `individual` selects (N,N) rows, otherwise (1,N) rows. Failed rows are skipped.
void write_series_csv(const std::filesystem::path& path, std::span<const ReportRow> rows,
                      bool individual);
/// grid.csv, summary.csv, series_individual.csv and series_combined.csv in `dir`.
void write_reports(const std::filesystem::path& dir, std::span<const ReportRow> rows);

/// Parses a grid description. Top-level `key = value` lines set defaults;
/// each `[name]` table starts a block that inherits them. Every block
/// expands to the cross product of its lists:
///
///   models      = ["mnb", "svm", "lr"]
///   weightings  = ["fc", "tfidf"]
///   normalizers = ["none"]
///   char_n      = 8          # N = 1..8 for character n-grams, 0 for none
///   word_n      = 4
///   sweeps      = ["individual", "combined"]
///   ngrams      = ["char:2,5"]   # extra explicit groups
///   c, alpha, max_iters, tol, seed, min_df, hash_bits
///
/// Duplicate n-gram groups within a block are emitted once.
/// Throws InvalidArgument with a line number on malformed input.
std::vector<ExperimentConfig> parse_grid(std::string_view text);
std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path);

/// Source text of the built-in `paper_grid` preset.
std::string_view paper_grid_text();
std::vector<ExperimentConfig> paper_grid();

}  // namespace microtext::eval
