#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "microtext/cleaning.hpp"
#include "microtext/corpus.hpp"
#include "microtext/csv.hpp"
#include "microtext/error.hpp"
#include "microtext/eval.hpp"
#include "microtext/features.hpp"
#include "microtext/grid.hpp"
#include "microtext/model_io.hpp"
#include "microtext/normalize.hpp"
#include "microtext/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace microtext;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Thrown for errors the user can fix by changing arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("microtext");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("MICROTEXT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string_view(env) != "off") {
      spdlog::warn("MICROTEXT_LOG='{}' is not a log level; keeping info", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

CLI::Validator ngram_validator() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          (void)features::NGramSpec::parse(s);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      },
      "LEVEL:LO,HI");
}

// Sidecar files written next to a model.
struct Sidecars {
  fs::path vocab, idf, meta;
};

Sidecars sidecars(const fs::path& model) {
  return {fs::path(model.string() + ".vocab.csv"), fs::path(model.string() + ".idf.csv"),
          fs::path(model.string() + ".meta.json")};
}

fs::path examples_path(const fs::path& dir) { return dir / "examples.jsonl"; }
fs::path labels_path(const fs::path& dir) { return dir / "labels.csv"; }

std::istream& open_input(const std::string& name, std::ifstream& file) {
  if (name == "-") return std::cin;
  file.open(name);
  if (!file) throw IoError(fmt::format("cannot read {}", name));
  return file;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string format = "jsonl";
  std::size_t top_k = 50;
  std::string out;
};

int cmd_ingest(const IngestArgs& a) {
  corpus::IngestStats stats;
  const auto tweets = corpus::ingest(a.input, corpus::parse_input_format(a.format), &stats);
  for (const auto& e : stats.errors) spdlog::warn("{}:{}: {}", a.input, e.line, e.message);
  spdlog::info("{} records, {} without hashtags, {} duplicates, {} malformed", stats.records,
               stats.no_hashtags, stats.duplicates, stats.errors.size());
  if (tweets.empty()) {
    spdlog::error("no usable tweets in {}", a.input);
    return kFailure;
  }
  const auto labels = corpus::select_labels(tweets, a.top_k);
  const auto labeled = corpus::label_examples(tweets, labels);
  const auto examples = corpus::build_examples(labeled, labels);
  fs::create_directories(a.out);
  corpus::save_examples(examples_path(a.out), examples, labels);
  labels.save_csv(labels_path(a.out));
  spdlog::info("wrote {} examples over {} labels to {}", examples.size(), labels.size(), a.out);
  return kOk;
}

struct CleanArgs {
  std::string labels;
};

int cmd_clean(const CleanArgs& a) {
  std::optional<LabelIndex> labels;
  if (!a.labels.empty()) labels = LabelIndex::load_csv(a.labels);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (labels) line = cleaning::strip_hashtags(line, *labels);
    std::cout << cleaning::clean(line) << '\n';
  }
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string model = "svm";
  std::string weighting = "tfidf";
  std::string ngram = "char:1,7";
  std::string normalizer = "none";
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  double c = 1.0;
  double alpha = 1.0;
  int max_iters = 1000;
  double tol = 1e-6;
  std::size_t min_df = 1;
  int hash_bits = 0;
  std::string out;
};

struct Dataset {
  LabelIndex labels;
  corpus::Split<corpus::LabeledExample> split;
};

Dataset load_dataset(const fs::path& dir, double train_fraction, std::uint64_t seed) {
  auto labels = LabelIndex::load_csv(labels_path(dir));
  const auto examples = corpus::load_examples(examples_path(dir), labels);
  auto parts = corpus::split(examples, {train_fraction, seed});
  return {std::move(labels), std::move(parts)};
}

int cmd_train(const TrainArgs& a) {
  eval::ExperimentConfig config;
  config.model = eval::parse_model(a.model);
  config.weighting = features::parse_weighting(a.weighting);
  config.spec = features::NGramSpec::parse(a.ngram);
  config.normalizer = normalize::parse_mode(a.normalizer);
  config.settings = {a.c, a.alpha, a.max_iters, a.tol, a.seed};
  config.min_df = a.min_df;
  config.hash_bits = a.hash_bits;
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (config.normalizer_on_chars()) {
    spdlog::warn("normalizer '{}' applied before character n-grams", a.normalizer);
  }

  const auto data = load_dataset(a.data, a.train_fraction, a.seed);
  const auto pipeline = eval::fit_pipeline(config, data.split.train);
  if (pipeline.featurizer.n_features() == 0) spdlog::warn("empty vocabulary; the model predicts priors");

  std::vector<LabelId> predictions;
  std::vector<std::vector<LabelId>> gold;
  for (const auto& ex : data.split.test) {
    predictions.push_back(pipeline.predict(ex.text));
    gold.push_back(ex.gold_labels);
  }
  const double test_accuracy = eval::accuracy(predictions, gold);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  models::save_model(out, pipeline.model);
  const auto files = sidecars(out);
  const auto& vocab = pipeline.featurizer.vocabulary();
  vocab.save_csv(files.vocab);
  if (pipeline.featurizer.idf()) pipeline.featurizer.idf()->save_csv(files.idf);

  json classes = json::array();
  for (auto id : pipeline.classes) classes.push_back(data.labels.label(id));
  const json meta = {
      {"model", a.model},
      {"weighting", std::string(features::weighting_name(config.weighting))},
      {"ngram", config.spec.flag()},
      {"normalizer", std::string(normalize::mode_name(config.normalizer))},
      {"min_df", config.min_df},
      {"hash_bits", config.hash_bits},
      {"n_docs", vocab.n_docs()},
      {"n_features", vocab.size()},
      {"classes", classes},
      {"seed", a.seed},
      {"train_fraction", a.train_fraction},
      {"n_train", data.split.train.size()},
      {"n_test", data.split.test.size()},
      {"test_accuracy", test_accuracy},
  };
  std::ofstream meta_out(files.meta, std::ios::trunc);
  meta_out << meta.dump(2) << '\n';
  if (!meta_out) throw IoError(fmt::format("cannot write {}", files.meta.string()));

  spdlog::info("{}: {} train / {} test, {} features, test accuracy {:.4f}", config.describe(),
               data.split.train.size(), data.split.test.size(), vocab.size(), test_accuracy);
  std::cout << fmt::format("{:.6f}", test_accuracy) << '\n';
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string input = "-";
  std::size_t top = 1;
};

int cmd_predict(const PredictArgs& a) {
  const auto files = sidecars(a.model);
  json meta;
  {
    std::ifstream in(files.meta);
    if (!in) throw IoError(fmt::format("cannot read {}", files.meta.string()));
    try {
      meta = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(fmt::format("{}: {}", files.meta.string(), e.what()));
    }
  }
  auto model = models::load_model(a.model);

  eval::Pipeline pipeline{features::Featurizer({}, features::Weighting::kFc, std::nullopt),
                          normalize::Mode::kNone, std::move(model), {}};
  std::vector<std::pair<std::string, std::uint64_t>> class_counts;
  try {
    const auto spec = features::NGramSpec::parse(meta.at("ngram").get<std::string>());
    const auto weighting = features::parse_weighting(meta.at("weighting").get<std::string>());
    const auto n_docs = meta.at("n_docs").get<std::size_t>();
    auto vocab = features::Vocabulary::load_csv(files.vocab, spec, meta.at("min_df").get<std::size_t>(),
                                                n_docs, meta.at("hash_bits").get<int>());
    std::optional<features::IdfTable> idf;
    if (weighting == features::Weighting::kTfidf) idf = features::IdfTable::load_csv(files.idf, n_docs);
    pipeline.featurizer = features::Featurizer(std::move(vocab), weighting, std::move(idf));
    pipeline.normalizer = normalize::parse_mode(meta.at("normalizer").get<std::string>());
    for (const auto& name : meta.at("classes")) class_counts.emplace_back(name.get<std::string>(), 0);
  } catch (const json::exception& e) {
    throw Error(fmt::format("{}: {}", files.meta.string(), e.what()));
  }

  // Class names in model order; the label index is only used to strip hashtags.
  std::vector<std::string> class_names;
  for (const auto& [name, _] : class_counts) class_names.push_back(name);
  const auto labels = LabelIndex::from_counts(class_counts);
  for (std::size_t c = 0; c < class_names.size(); ++c) pipeline.classes.push_back(static_cast<LabelId>(c));

  if (models::model_features(pipeline.model) != pipeline.featurizer.n_features()) {
    throw Error(fmt::format("model has {} features but its vocabulary has {}",
                            models::model_features(pipeline.model), pipeline.featurizer.n_features()));
  }
  if (models::model_classes(pipeline.model) != class_names.size()) {
    throw Error(fmt::format("model has {} classes but its metadata lists {}",
                            models::model_classes(pipeline.model), class_names.size()));
  }

  std::ifstream file;
  std::istream& in = open_input(a.input, file);
  std::string line;
  while (std::getline(in, line)) {
    const auto text = cleaning::clean(cleaning::strip_hashtags(line, labels));
    const auto ranked = pipeline.rank(text, a.top);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (i > 0) std::cout << '\t';
      std::cout << class_names[ranked[i]];
    }
    std::cout << '\n';
  }
  return kOk;
}

struct ExperimentArgs {
  std::string data;
  std::string grid = "paper_grid";
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& a) {
  std::vector<eval::ExperimentConfig> configs;
  try {
    configs = a.grid == "paper_grid" ? eval::paper_grid() : eval::load_grid(a.grid);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto data = load_dataset(a.data, a.train_fraction, a.seed);
  spdlog::info("running {} cells on {} train / {} test examples with {} job(s)", configs.size(),
               data.split.train.size(), data.split.test.size(), a.jobs);
  const auto rows = eval::run_grid(configs, data.split.train, data.split.test, a.jobs);
  eval::write_reports(a.out, rows);

  std::size_t succeeded = 0;
  for (const auto& r : rows) succeeded += r.status != eval::RunStatus::kFailed;
  spdlog::info("{} of {} cells succeeded; reports in {}", succeeded, rows.size(), a.out);
  return succeeded > 0 ? kOk : kFailure;
}

struct ReportArgs {
  std::string grid_csv;
};

int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.grid_csv);
  if (!in) throw IoError(fmt::format("cannot read {}", a.grid_csv));
  std::string line;
  if (!std::getline(in, line) || csv::split_record(line) != csv::split_record(eval::kGridHeader)) {
    throw Error(fmt::format("{} is not a grid.csv file", a.grid_csv));
  }
  struct Best {
    std::string ngram;
    std::string accuracy;
    double value;
    std::size_t cells;
  };
  std::vector<std::pair<std::string, Best>> best;  // key: model weighting normalizer
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_record(line);
    if (f.size() != 15) throw Error(fmt::format("{}:{}: expected 15 fields", a.grid_csv, line_no));
    if (f[9] == "failed") continue;
    const auto key = fmt::format("{:<5} {:<7} {:<6}", f[0], f[1], f[6]);
    const double value = std::stod(f[10]);
    auto it = std::find_if(best.begin(), best.end(), [&](const auto& p) { return p.first == key; });
    if (it == best.end()) {
      best.emplace_back(key, Best{f[5], f[10], value, 1});
    } else {
      ++it->second.cells;
      if (value > it->second.value) it->second = {f[5], f[10], value, it->second.cells};
    }
  }
  std::cout << fmt::format("{:<5} {:<7} {:<6} {:<10} {:>8} {:>5}\n", "model", "weight", "norm",
                           "best", "accuracy", "cells");
  for (const auto& [key, b] : best) {
    std::cout << fmt::format("{} {:<10} {:>8} {:>5}\n", key, b.ngram, b.accuracy, b.cells);
  }
  return kOk;
}

struct SynthArgs {
  std::string out;
  std::size_t n_docs = 2000;
  std::uint64_t seed = 7;
};

int cmd_synth(const SynthArgs& a) {
  synthetic::CorpusSpec spec;
  spec.n_docs = a.n_docs;
  spec.seed = a.seed;
  const auto tweets = synthetic::generate(spec);
  synthetic::write_jsonl(a.out, tweets);
  spdlog::info("wrote {} tweets to {}", tweets.size(), a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Hashtag classification of short texts with character and word n-grams"};
  app.set_config("--config", "", "Config file of key = value lines; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  const auto models = CLI::IsMember({"mnb", "svm", "lr"});
  const auto weightings = CLI::IsMember({"fc", "tfidf"});
  const auto normalizers = CLI::IsMember({"none", "stem", "lemma", "lemmatize"});

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Deduplicate, label and clean raw tweets");
  ingest_cmd->add_option("--input", ingest.input, "JSONL or TSV tweets")->required();
  ingest_cmd->add_option("--format", ingest.format)->check(CLI::IsMember({"jsonl", "tsv"}))->capture_default_str();
  ingest_cmd->add_option("--top-k", ingest.top_k, "Number of hashtags kept as labels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();

  CleanArgs clean;
  auto* clean_cmd = app.add_subcommand("clean", "Clean stdin line by line");
  clean_cmd->add_option("--labels", clean.labels, "labels.csv whose hashtags are stripped first")
      ->check(CLI::ExistingFile);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one model on the training split");
  train_cmd->add_option("--data", train.data, "Directory written by ingest")->required();
  train_cmd->add_option("--model", train.model)->check(models)->capture_default_str();
  train_cmd->add_option("--weighting", train.weighting)->check(weightings)->capture_default_str();
  train_cmd->add_option("--ngram", train.ngram)->check(ngram_validator())->capture_default_str();
  train_cmd->add_option("--normalizer", train.normalizer)->check(normalizers)->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Split and solver seed")->capture_default_str();
  train_cmd->add_option("--train-fraction", train.train_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--c", train.c, "Regularization constant C")->capture_default_str();
  train_cmd->add_option("--alpha", train.alpha, "Naive Bayes smoothing")->capture_default_str();
  train_cmd->add_option("--max-iters", train.max_iters)->capture_default_str();
  train_cmd->add_option("--tol", train.tol)->capture_default_str();
  train_cmd->add_option("--min-df", train.min_df)->capture_default_str();
  train_cmd->add_option("--hash-bits", train.hash_bits, "0 keeps an exact vocabulary")
      ->check(CLI::Range(0, 30))
      ->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model file")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Print the top labels for each input line");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--input", predict.input, "Text file, or - for stdin")->capture_default_str();
  predict_cmd->add_option("--top", predict.top)->check(CLI::PositiveNumber)->capture_default_str();

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run an experiment grid");
  experiment_cmd->add_option("--data", experiment.data)->required();
  experiment_cmd->add_option("--grid", experiment.grid, "Grid file, or paper_grid")->capture_default_str();
  experiment_cmd->add_option("--jobs", experiment.jobs, "Worker threads, 0 for all cores")->capture_default_str();
  experiment_cmd->add_option("--seed", experiment.seed, "Split seed")->capture_default_str();
  experiment_cmd->add_option("--train-fraction", experiment.train_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  experiment_cmd->add_option("--out", experiment.out, "Report directory")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarize a grid.csv");
  report_cmd->add_option("grid_csv", report.grid_csv)->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic benchmark corpus");
  synth_cmd->add_option("--out", synth.out)->required();
  synth_cmd->add_option("--n-docs", synth.n_docs)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest);
    if (*clean_cmd) return cmd_clean(clean);
    if (*train_cmd) return cmd_train(train);
    if (*predict_cmd) return cmd_predict(predict);
    if (*experiment_cmd) return cmd_experiment(experiment);
    if (*report_cmd) return cmd_report(report);
    if (*synth_cmd) return cmd_synth(synth);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kUsage;
}
