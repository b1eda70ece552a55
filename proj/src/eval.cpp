#include "microtext/eval.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include <fmt/format.h>

#include "microtext/error.hpp"

namespace microtext::eval {
namespace {

std::vector<std::string> normalized_texts(std::span<const LabeledExample> examples,
                                          normalize::Mode mode) {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(normalize::normalize_text(ex.text, mode));
  return out;
}

// Distinct training labels, ascending.
std::vector<LabelId> present_classes(std::span<const LabeledExample> train) {
  std::vector<LabelId> classes;
  for (const auto& ex : train) classes.push_back(ex.train_label);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

LabelId majority_label(std::span<const LabeledExample> train) {
  std::vector<std::pair<LabelId, std::size_t>> counts;
  for (const auto& ex : train) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& p) { return p.first == ex.train_label; });
    if (it == counts.end()) {
      counts.emplace_back(ex.train_label, 1);
    } else {
      ++it->second;
    }
  }
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return counts.front().first;
}

models::Model fit_model(const ExperimentConfig& config, std::span<const features::SparseVector> x,
                        std::span<const models::ClassId> y, std::size_t n_classes,
                        std::size_t n_features) {
  switch (config.model) {
    case ModelKind::kMnb:
      return models::mnb_fit(x, y, n_classes, n_features, config.settings.alpha);
    case ModelKind::kSvm:
      return models::svm_fit(x, y, n_classes, n_features, config.settings);
    case ModelKind::kLr:
      return models::lr_fit(x, y, n_classes, n_features, config.settings);
  }
  throw InvalidArgument("unknown model kind");
}

Pipeline fit_with_featurizer(const ExperimentConfig& config, std::span<const LabeledExample> train,
                             std::span<const std::string> texts, features::Featurizer featurizer) {
  const auto classes = present_classes(train);
  std::vector<models::ClassId> y;
  y.reserve(train.size());
  for (const auto& ex : train) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), ex.train_label);
    y.push_back(static_cast<models::ClassId>(it - classes.begin()));
  }
  const auto x = featurizer.transform(texts);
  auto model = fit_model(config, x, y, classes.size(), featurizer.n_features());
  return Pipeline{std::move(featurizer), config.normalizer, std::move(model), classes};
}

}  // namespace

double accuracy(std::span<const LabelId> predictions, std::span<const std::vector<LabelId>> gold) {
  if (predictions.size() != gold.size()) {
    throw InvalidArgument(fmt::format("{} predictions for {} gold sets", predictions.size(), gold.size()));
  }
  if (gold.empty()) throw InvalidArgument("accuracy of an empty evaluation set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].empty()) throw InvalidArgument(fmt::format("example {} has no gold labels", i));
    if (std::find(gold[i].begin(), gold[i].end(), predictions[i]) != gold[i].end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMnb: return "mnb";
    case ModelKind::kSvm: return "svm";
    case ModelKind::kLr: return "lr";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  if (name == "mnb") return ModelKind::kMnb;
  if (name == "svm") return ModelKind::kSvm;
  if (name == "lr") return ModelKind::kLr;
  throw InvalidArgument(fmt::format("unknown model '{}' (expected mnb, svm or lr)", name));
}

void ExperimentConfig::validate() const {
  settings.validate();
  (void)features::NGramSpec::make(spec.level, spec.lo, spec.hi);
  if (min_df == 0) throw InvalidArgument("min_df must be at least 1");
  if (hash_bits < 0 || hash_bits > 30) {
    throw InvalidArgument(fmt::format("hash_bits {} outside [0, 30]", hash_bits));
  }
}

std::string ExperimentConfig::describe() const {
  return fmt::format("{} {} {} {}", model_name(model), features::weighting_name(weighting),
                     spec.label(), normalize::mode_name(normalizer));
}

std::string_view status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kEmptyVocabulary: return "empty_vocabulary";
    case RunStatus::kFailed: return "failed";
  }
  return "?";
}

features::SparseVector Pipeline::features(std::string_view cleaned) const {
  if (normalizer == normalize::Mode::kNone) return featurizer.transform(cleaned);
  return featurizer.transform(normalize::normalize_text(cleaned, normalizer));
}

std::vector<LabelId> Pipeline::rank(std::string_view cleaned, std::size_t top) const {
  const auto scores = models::predict(model, features(cleaned)).scores;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(top, order.size()));
  std::vector<LabelId> out;
  out.reserve(order.size());
  for (auto c : order) out.push_back(classes[c]);
  return out;
}

LabelId Pipeline::predict(std::string_view cleaned) const {
  return classes[models::predict(model, features(cleaned)).label];
}

Pipeline fit_pipeline(const ExperimentConfig& config, std::span<const LabeledExample> train) {
  config.validate();
  if (train.empty()) throw InvalidArgument("no training examples");
  const auto texts = normalized_texts(train, config.normalizer);
  auto featurizer = features::Featurizer::fit(texts, config.spec, config.weighting, config.min_df,
                                              config.hash_bits);
  return fit_with_featurizer(config, train, texts, std::move(featurizer));
}

ReportRow run_experiment(const ExperimentConfig& config, std::span<const LabeledExample> train,
                         std::span<const LabeledExample> test) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (train.empty() || test.empty()) throw InvalidArgument("train and test sets must be nonempty");

  ReportRow row;
  row.config = config;
  row.n_train = train.size();
  row.n_test = test.size();

  const auto texts = normalized_texts(train, config.normalizer);
  auto featurizer = features::Featurizer::fit(texts, config.spec, config.weighting, config.min_df,
                                              config.hash_bits);
  row.vocab_size = featurizer.n_features();

  std::vector<LabelId> predictions;
  predictions.reserve(test.size());
  if (featurizer.n_features() == 0) {
    row.status = RunStatus::kEmptyVocabulary;
    row.message = "empty vocabulary; predicted the most frequent training label";
    predictions.assign(test.size(), majority_label(train));
  } else {
    const auto pipeline = fit_with_featurizer(config, train, texts, std::move(featurizer));
    for (const auto& ex : test) predictions.push_back(pipeline.predict(ex.text));
  }

  std::vector<std::vector<LabelId>> gold;
  gold.reserve(test.size());
  for (const auto& ex : test) gold.push_back(ex.gold_labels);
  row.accuracy = accuracy(predictions, gold);
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace microtext::eval
