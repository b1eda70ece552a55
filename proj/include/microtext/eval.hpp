#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "microtext/corpus.hpp"
#include "microtext/features.hpp"
#include "microtext/model_io.hpp"
#include "microtext/models.hpp"
#include "microtext/normalize.hpp"

namespace microtext::eval {

using corpus::LabeledExample;

/// Fraction of examples whose prediction is one of their gold labels.
/// Throws InvalidArgument on a length mismatch, no examples, or an empty gold set.
double accuracy(std::span<const LabelId> predictions, std::span<const std::vector<LabelId>> gold);

enum class ModelKind { kMnb, kSvm, kLr };

std::string_view model_name(ModelKind kind);
ModelKind parse_model(std::string_view name);

struct ExperimentConfig {
  ModelKind model = ModelKind::kSvm;
  features::Weighting weighting = features::Weighting::kFc;
  features::NGramSpec spec;
  normalize::Mode normalizer = normalize::Mode::kNone;
  models::TrainSettings settings;
  std::size_t min_df = 1;
  int hash_bits = 0;  // 0 = exact vocabulary

  /// Stemming or lemmatizing character n-grams is allowed but unusual.
  bool normalizer_on_chars() const {
    return normalizer != normalize::Mode::kNone && spec.level == features::Level::kChar;
  }
  /// Throws InvalidArgument on bad settings, min_df or hash_bits.
  void validate() const;
  /// `svm tfidf char(1,7) none`
  std::string describe() const;
};

enum class RunStatus { kOk, kEmptyVocabulary, kFailed };

std::string_view status_name(RunStatus status);

struct ReportRow {
  ExperimentConfig config;
  double accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t vocab_size = 0;
  double wall_time = 0.0;  // seconds
  RunStatus status = RunStatus::kOk;
  std::string message;
};

/// A featurizer and model fitted on training examples. The model sees only
/// the labels present in training, renumbered 0..K-1; `classes` maps them back.
struct Pipeline {
  features::Featurizer featurizer;
  normalize::Mode normalizer = normalize::Mode::kNone;
  models::Model model;
  std::vector<LabelId> classes;

  /// Normalizes already-cleaned text and featurizes it.
  features::SparseVector features(std::string_view cleaned) const;
  /// Labels ordered by decreasing score, ties by label id, at most `top`.
  std::vector<LabelId> rank(std::string_view cleaned, std::size_t top) const;
  LabelId predict(std::string_view cleaned) const;
};

/// Fits the vocabulary, weighting and model on `train` only.
/// Throws InvalidArgument if `train` is empty.
Pipeline fit_pipeline(const ExperimentConfig& config, std::span<const LabeledExample> train);

/// Normalize, featurize, fit and score one configuration. An empty
/// vocabulary falls back to predicting the most frequent training label and
/// is reported with RunStatus::kEmptyVocabulary. Other errors propagate.
ReportRow run_experiment(const ExperimentConfig& config, std::span<const LabeledExample> train,
                         std::span<const LabeledExample> test);

}  // namespace microtext::eval
