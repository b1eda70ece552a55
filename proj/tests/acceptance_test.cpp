// Acceptance suite: one PASS/FAIL line per criterion. Usage:
//   acceptance_test <path to microtext binary> <data dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>

#include <fmt/format.h>

#include "microtext/cleaning.hpp"
#include "microtext/csv.hpp"
#include "microtext/eval.hpp"
#include "microtext/features.hpp"
#include "microtext/grid.hpp"
#include "microtext/label_index.hpp"
#include "microtext/model_io.hpp"
#include "microtext/models.hpp"
#include "microtext/normalize.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace ts = testing_support;
using namespace microtext;

namespace {

std::string g_cli;
fs::path g_data;

// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + g_cli + "' " + args + " >> '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(ts::read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(csv::split_record(line));
  }
  return rows;
}

LabelIndex label_set(std::vector<std::string> names) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (auto& n : names) counts.emplace_back(std::move(n), 1);
  return LabelIndex::from_counts(std::move(counts));
}

models::SparseVector to_sparse(const std::vector<double>& dense) {
  models::SparseVector v;
  for (std::size_t t = 0; t < dense.size(); ++t) {
    if (dense[t] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(t));
      v.values.push_back(dense[t]);
    }
  }
  return v;
}

std::vector<models::SparseVector> to_sparse(const std::vector<std::vector<double>>& rows) {
  std::vector<models::SparseVector> out;
  for (const auto& r : rows) out.push_back(to_sparse(r));
  return out;
}

std::vector<double> signs_for(const ts::DenseProblem& p, std::uint32_t positive) {
  std::vector<double> s;
  for (auto y : p.y) s.push_back(y == positive ? 1.0 : -1.0);
  return s;
}

// ---------------------------------------------------------------------------

Check cleaning_golden() {
  Check c;
  const auto start = Clock::now();
  c.expect(cleaning::clean("i'm so happyyyyyyyy...") == "im so hapy", "stretched word example");
  const std::string raw = "want to work at robert half technology? we're in nc click for details. #hiring";
  const std::string expected = "want to work at robert half technology were in nc click for details";
  c.expect(cleaning::clean(cleaning::strip_hashtags(raw, label_set({"hiring"}))) == expected, "job advert example");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const auto s = ts::random_unicode(rng, 40);
    const auto once = cleaning::clean(s);
    c.expect(cleaning::clean(once) == once, "not idempotent on a random string");
  }
  const double t = seconds_since(start);
  c.expect(t < 1.0, fmt::format("took {:.3f}s", t));
  return c;
}

Check ngram_oracle() {
  Check c;
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto text = ts::random_cleaned(rng, 60);
    const int lo = static_cast<int>(ts::uniform_int(rng, 1, 8));
    const int hi = static_cast<int>(ts::uniform_int(rng, lo, 8));
    const bool words = ts::uniform_int(rng, 0, 1) == 1;
    const auto spec = features::NGramSpec::make(words ? features::Level::kWord : features::Level::kChar, lo, hi);
    const auto grams = features::extract_ngrams(text, spec);
    std::map<std::string, int> counts;
    for (const auto& g : grams) ++counts[g];
    c.expect(counts == ts::brute_force_ngrams(text, words, lo, hi), "differs from brute force on '" + text + "'");
    const std::size_t length = words ? features::tokenize(text).size() : text.size();
    for (int n = lo; n <= hi; ++n) {
      const auto one = features::extract_ngrams(text, features::NGramSpec::make(spec.level, n, n));
      const std::size_t law = length + 1 > static_cast<std::size_t>(n) ? length + 1 - n : 0;
      c.expect(one.size() == law, fmt::format("count law broken for n={} on '{}'", n, text));
    }
  }
  const double t = seconds_since(start);
  c.expect(t < 10.0, fmt::format("took {:.3f}s", t));
  return c;
}

Check tfidf_exact() {
  Check c;
  const std::vector<std::string> docs = {"job hiring", "job nurse", "job hiring hiring"};
  const auto f = features::Featurizer::fit(docs, features::NGramSpec::make(features::Level::kWord, 1, 1),
                                           features::Weighting::kTfidf);
  // Vocabulary hiring=0, job=1, nurse=2 with df 2, 3, 1 over 3 documents.
  // idf = ln(4/3)+1 = 1.2876820724517809274, 1, ln(2)+1 = 1.6931471805599453094
  const std::vector<std::pair<std::vector<std::uint32_t>, std::vector<double>>> expected = {
      {{0, 1}, {0.78980692906609056399, 0.61335553702497166601}},
      {{1, 2}, {0.50854232037832677959, 0.86103699594397640693}},
      {{0, 1}, {0.93219168525549094464, 0.36196500098839349879}},
  };
  c.expect(f.vocabulary().terms() == std::vector<std::string>{"hiring", "job", "nurse"}, "vocabulary order");
  const auto& idf = f.idf()->idf;
  c.expect(std::abs(idf[0] - 1.2876820724517809274) < 1e-12, "idf(hiring)");
  c.expect(std::abs(idf[1] - 1.0) < 1e-12, "idf(job)");
  c.expect(std::abs(idf[2] - 1.6931471805599453094) < 1e-12, "idf(nurse)");
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto v = f.transform(docs[d]);
    c.expect(v.indices == expected[d].first, fmt::format("indices of doc {}", d));
    for (std::size_t k = 0; k < v.nnz() && k < expected[d].second.size(); ++k) {
      c.expect(std::abs(v.values[k] - expected[d].second[k]) < 1e-12, fmt::format("value {} of doc {}", k, d));
    }
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> train;
    for (int d = 0; d < 6; ++d) train.push_back(ts::random_cleaned(rng, 30));
    const int hi = static_cast<int>(ts::uniform_int(rng, 1, 4));
    const auto g = features::Featurizer::fit(train, features::NGramSpec::make(features::Level::kChar, 1, hi),
                                             features::Weighting::kTfidf);
    const auto v = g.transform(ts::random_cleaned(rng, 30));
    if (!v.empty()) c.expect(std::abs(std::sqrt(v.squared_norm()) - 1.0) < 1e-12, "norm is not 1");
  }
  return c;
}

Check mnb_oracle() {
  Check c;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = ts::random_dense_problem(rng, 5, 20, 30, trial % 2 == 1);
    const auto m = models::mnb_fit(to_sparse(p.x), p.y, p.n_classes, p.n_features, 1.0);
    for (int qn = 0; qn < 3; ++qn) {
      std::vector<double> x(p.n_features, 0.0);
      for (auto& v : x) {
        if (ts::uniform_int(rng, 0, 2) == 0) v = static_cast<double>(ts::uniform_int(rng, 1, 3));
      }
      const auto expected = ts::dense_bayes_log_posterior(p, 1.0, x);
      const auto got = models::mnb_predict(m, to_sparse(x));
      c.expect(got.label == models::argmax(expected), fmt::format("argmax differs in instance {}", trial));
      for (std::size_t k = 0; k < expected.size(); ++k) {
        c.expect(std::abs(got.scores[k] - expected[k]) < 1e-9, fmt::format("log-posterior differs in instance {}", trial));
      }
    }
  }
  return c;
}

Check svm_contract() {
  Check c;
  std::mt19937_64 rng(5);
  // Separable: the class is whichever of the first two features is present.
  ts::DenseProblem sep;
  sep.n_classes = 2;
  sep.n_features = 5;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> row(5, 0.0);
    row[i % 2] = ts::uniform_real(rng, 0.5, 2.0);
    for (int t = 2; t < 5; ++t) row[t] = ts::uniform_int(rng, 0, 1) ? ts::uniform_real(rng, 0.0, 1.0) : 0.0;
    sep.x.push_back(row);
    sep.y.push_back(static_cast<std::uint32_t>(i % 2));
  }
  const auto x = to_sparse(sep.x);
  const auto model = models::svm_fit(x, sep.y, 2, 5, models::TrainSettings{});
  std::size_t right = 0;
  for (std::size_t i = 0; i < x.size(); ++i) right += models::linear_predict(model, x[i]).label == sep.y[i];
  c.expect(right == x.size(), fmt::format("training accuracy {}/{}", right, x.size()));

  for (int trial = 0; trial < 30; ++trial) {
    const auto p = ts::random_dense_problem(rng, 4, 15, 30, true);
    if (p.n_classes < 2) continue;
    models::TrainSettings s;
    s.c_reg = ts::uniform_real(rng, 0.1, 4.0);
    const auto xs = to_sparse(p.x);
    const std::vector<double> zero(p.n_features, 0.0);
    const double n = static_cast<double>(p.x.size());
    c.expect(models::squared_hinge_objective(zero, 0.0, xs, signs_for(p, 0), s.c_reg) == s.c_reg * n,
             "objective at zero is not C*N");
    const auto m = models::svm_fit(xs, p.y, p.n_classes, p.n_features, s);
    for (const auto& meta : m.meta) {
      const auto& h = meta.objective_history;
      c.expect(!h.empty() && h.front() == s.c_reg * n, "history does not start at C*N");
      for (std::size_t k = 1; k < h.size(); ++k) {
        c.expect(h[k] <= h[k - 1] + 1e-12 * std::abs(h[k - 1]), fmt::format("objective rose at epoch {}", k));
      }
    }
  }

  int checked = 0;
  while (checked < 50) {
    const auto p = ts::random_dense_problem(rng, 3, 10, 20, true);
    const auto xs = to_sparse(p.x);
    const auto signs = signs_for(p, 0);
    const double creg = ts::uniform_real(rng, 0.1, 3.0);
    std::vector<double> point(p.n_features + 1);
    for (auto& v : point) v = ts::uniform_real(rng, -1.0, 1.0);
    const std::span<const double> w(point.data(), p.n_features);
    bool near_kink = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      near_kink |= std::abs(1.0 - signs[i] * (xs[i].dot(w) + point.back())) < 1e-3;
    }
    if (near_kink) continue;
    std::vector<double> grad(p.n_features);
    double grad_b = 0.0;
    models::squared_hinge_gradient(w, point.back(), xs, signs, creg, grad, grad_b);
    grad.push_back(grad_b);
    auto objective = [&](const std::vector<double>& z) {
      return models::squared_hinge_objective(std::span<const double>(z.data(), p.n_features), z.back(), xs, signs,
                                             creg);
    };
    std::vector<double> numeric(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) numeric[k] = ts::central_difference(objective, point, k, 1e-6);
    const double err = ts::relative_error(grad, numeric);
    c.expect(err < 1e-4, fmt::format("finite-difference error {:.3g}", err));
    ++checked;
  }
  return c;
}

Check lr_gradient() {
  Check c;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = ts::random_dense_problem(rng, 4, 8, 15, true);
    const auto xs = to_sparse(p.x);
    const std::size_t k = p.n_classes;
    const std::size_t v = p.n_features;
    const double creg = ts::uniform_real(rng, 0.2, 3.0);
    std::vector<double> point(k * v + k);
    for (auto& z : point) z = ts::uniform_real(rng, -0.5, 0.5);
    auto objective = [&](const std::vector<double>& z) {
      return models::lr_objective(std::span<const double>(z).first(k * v), std::span<const double>(z).subspan(k * v),
                                  xs, p.y, k, creg);
    };
    std::vector<double> grad(k * v + k);
    models::lr_gradient(std::span<const double>(point).first(k * v), std::span<const double>(point).subspan(k * v),
                        xs, p.y, k, creg, std::span<double>(grad).first(k * v), std::span<double>(grad).subspan(k * v));
    std::vector<double> numeric(point.size());
    for (std::size_t j = 0; j < point.size(); ++j) numeric[j] = ts::central_difference(objective, point, j, 1e-5);
    const double err = ts::relative_error(grad, numeric);
    c.expect(err < 1e-5, fmt::format("instance {}: relative error {:.3g}", trial, err));
  }
  return c;
}

Check porter_vocabulary() {
  Check c;
  const auto pairs = ts::read_pairs(g_data / "porter_vocabulary.tsv");
  c.expect(pairs.size() >= 100, fmt::format("only {} pairs", pairs.size()));
  std::set<std::pair<std::string, std::string>> set(pairs.begin(), pairs.end());
  c.expect(set.contains({"caresses", "caress"}), "caresses missing");
  c.expect(set.contains({"hiring", "hire"}), "hiring missing");
  for (const auto& [word, stem] : pairs) {
    const auto got = normalize::porter_stem(word);
    c.expect(got == stem, fmt::format("{} -> {} (expected {})", word, got, stem));
    c.expect(normalize::porter_stem(got) == got, fmt::format("{} is not a fixed point", got));
  }
  return c;
}

Check accuracy_fixtures() {
  Check c;
  using Gold = std::vector<std::vector<LabelId>>;
  c.expect(eval::accuracy(std::vector<LabelId>{0, 1}, Gold{{0}, {2}}) == 0.5, "half right");
  c.expect(eval::accuracy(std::vector<LabelId>{0}, Gold{{1, 0}}) == 1.0, "multi-gold counts as correct");
  c.expect(eval::accuracy(std::vector<LabelId>{0, 1, 2}, Gold{{0}, {1}, {2}}) == 1.0, "all right");
  c.expect(eval::accuracy(std::vector<LabelId>{3}, Gold{{0, 1}}) == 0.0, "outside the gold set");
  bool threw = false;
  try {
    eval::accuracy(std::vector<LabelId>{0}, Gold{{}});
  } catch (const InvalidArgument&) {
    threw = true;
  }
  c.expect(threw, "empty gold set accepted");
  threw = false;
  try {
    eval::accuracy(std::vector<LabelId>{0, 1}, Gold{{0}});
  } catch (const InvalidArgument&) {
    threw = true;
  }
  c.expect(threw, "length mismatch accepted");
  return c;
}

Check grid_reproduction(const fs::path& work) {
  Check c;
  const auto dir = work / "grid";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto log = dir / "log.txt";
  const auto start = Clock::now();
  c.expect(run_cli("ingest --input " + q(g_data / "synthetic_corpus.jsonl") + " --out " + q(dir / "data"), log) == 0,
           "ingest failed");
  c.expect(run_cli("experiment --data " + q(dir / "data") + " --grid paper_grid --jobs 0 --out " + q(dir / "reports"),
                   log) == 0,
           "experiment failed");
  const double t = seconds_since(start);
  c.expect(t < 300.0, fmt::format("took {:.1f}s", t));
  for (const char* f : {"grid.csv", "summary.csv", "series_individual.csv", "series_combined.csv"}) {
    c.expect(fs::exists(dir / "reports" / f), std::string(f) + " missing");
  }
  if (!c.ok()) return c;

  const auto labels = read_csv(dir / "data" / "labels.csv");
  c.expect(labels.size() == 6, "expected 5 labels");
  const auto grid = read_csv(dir / "reports" / "grid.csv");
  c.expect(grid.size() == 1 + eval::paper_grid().size(), fmt::format("{} grid rows", grid.size() - 1));
  double best_cell = -1.0;
  double baseline = -1.0;
  std::map<std::string, double> row_max;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto& r = grid[i];
    c.expect(r[9] == "ok", fmt::format("cell {} {} {} has status {}", r[0], r[1], r[5], r[9]));
    const double acc = std::stod(r[10]);
    const auto key = r[0] + "," + r[1] + "," + r[6];
    row_max[key] = std::max(row_max.contains(key) ? row_max[key] : -1.0, acc);
    if (r[0] == "svm" && r[1] == "tfidf" && r[5] == "char(1,4)" && r[6] == "none") best_cell = acc;
    if (r[1] == "fc" && r[5] == "word(1,1)") baseline = std::max(baseline, acc);
  }
  c.expect(best_cell > baseline,
           fmt::format("char(1,4)-tfidf-svm {:.4f} does not beat word(1,1)-fc {:.4f}", best_cell, baseline));
  const auto summary = read_csv(dir / "reports" / "summary.csv");
  c.expect(summary.size() == 1 + row_max.size(), "summary row count");
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const auto key = summary[i][0] + "," + summary[i][1] + "," + summary[i][2];
    c.expect(row_max.contains(key) && std::stod(summary[i][4]) == row_max[key], "summary is not the row max for " + key);
  }
  std::cout << fmt::format("       char(1,4)-tfidf-svm {:.4f} vs best word(1,1)-fc {:.4f}, {} cells in {:.1f}s\n",
                           best_cell, baseline, grid.size() - 1, t);
  return c;
}

// Drops the wall_time column of a grid.csv.
std::string without_wall_time(const fs::path& grid_csv) {
  std::string out;
  for (auto row : read_csv(grid_csv)) {
    row.pop_back();
    out += csv::join_record(row) + "\n";
  }
  return out;
}

Check determinism(const fs::path& work) {
  Check c;
  const auto grid_file = work / "determinism.toml";
  ts::write_file(grid_file,
                 "[raw]\n"
                 "models = [\"mnb\", \"svm\", \"lr\"]\n"
                 "weightings = [\"fc\", \"tfidf\"]\n"
                 "char_n = 3\nword_n = 2\n"
                 "[normalized]\nmodels = [\"mnb\"]\nweightings = [\"fc\", \"tfidf\"]\nnormalizers = [\"stem\", \"lemma\"]\nchar_n = 0\nword_n = 1\n");
  std::vector<fs::path> runs;
  for (int r = 0; r < 2; ++r) {
    const auto dir = work / fmt::format("run{}", r);
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto log = dir / "log.txt";
    c.expect(run_cli("ingest --input " + q(g_data / "synthetic_corpus.jsonl") + " --out " + q(dir / "data"), log) == 0,
             "ingest failed");
    for (const char* model : {"mnb", "svm", "lr"}) {
      c.expect(run_cli(fmt::format("train --data {} --model {} --weighting tfidf --ngram char:1,3 --seed 11 --out {}",
                                   q(dir / "data"), model, q(dir / "models" / (std::string(model) + ".bin"))),
                       log) == 0,
               std::string("train failed for ") + model);
    }
    c.expect(run_cli("experiment --data " + q(dir / "data") + " --grid " + q(grid_file) + " --seed 11 --jobs " +
                         (r == 0 ? "1" : "0") + " --out " + q(dir / "reports"),
                     log) == 0,
             "experiment failed");
    runs.push_back(dir);
  }
  if (!c.ok()) return c;
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(runs[0])) {
    if (!entry.is_regular_file() || entry.path().filename() == "log.txt") continue;
    const auto rel = fs::relative(entry.path(), runs[0]);
    const auto other = runs[1] / rel;
    if (!fs::exists(other)) {
      c.expect(false, rel.string() + " missing in second run");
      continue;
    }
    if (rel.filename() == "grid.csv") {
      c.expect(without_wall_time(entry.path()) == without_wall_time(other), rel.string() + " differs");
    } else {
      c.expect(ts::read_file(entry.path()) == ts::read_file(other), rel.string() + " differs");
    }
    ++compared;
  }
  c.expect(compared >= 15, fmt::format("only {} artifacts compared", compared));
  c.expect(read_csv(runs[0] / "reports" / "grid.csv").size() == 1 + 48 + 4, "unexpected grid size");
  return c;
}

models::Model random_model(std::mt19937_64& rng, int i) {
  const auto p = ts::random_dense_problem(rng, 5, 20, 30, i % 2 == 0);
  const auto x = to_sparse(p.x);
  models::TrainSettings s;
  s.c_reg = ts::uniform_real(rng, 0.1, 3.0);
  s.alpha = ts::uniform_real(rng, 0.1, 2.0);
  const int kind = i % 3;
  if (kind == 0 || p.n_classes < 2) return models::mnb_fit(x, p.y, p.n_classes, p.n_features, s.alpha);
  if (kind == 1) return models::svm_fit(x, p.y, p.n_classes, p.n_features, s);
  return models::lr_fit(x, p.y, p.n_classes, p.n_features, s);
}

template <typename E>
bool raises(const std::vector<std::uint8_t>& bytes) {
  try {
    models::deserialize_model(bytes);
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

Check serialization(const fs::path& work) {
  Check c;
  const auto dir = work / "models";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_model(rng, i);
    const auto path = dir / fmt::format("m{}.bin", i);
    models::save_model(path, m);
    const auto back = models::load_model(path);
    const auto n_features = models::model_features(m);
    for (int qn = 0; qn < 10; ++qn) {
      std::vector<double> x(n_features, 0.0);
      for (auto& v : x) {
        if (ts::uniform_int(rng, 0, 2) == 0) v = ts::uniform_real(rng, 0.0, 3.0);
      }
      const auto a = models::predict(m, to_sparse(x));
      const auto b = models::predict(back, to_sparse(x));
      c.expect(a.label == b.label && std::memcmp(a.scores.data(), b.scores.data(), a.scores.size() * sizeof(double)) == 0 &&
                   a.scores.size() == b.scores.size(),
               fmt::format("model {} predicts differently after reload", i));
    }
  }
  const auto good = models::serialize_model(random_model(rng, 1));
  auto bad_magic = good;
  bad_magic[1] = 'Z';
  c.expect(raises<models::ModelVersionError>(bad_magic), "bad magic");
  auto bad_version = good;
  bad_version[4] = 2;
  c.expect(raises<models::ModelVersionError>(bad_version), "bad version");
  c.expect(raises<models::ModelTruncatedError>({good.begin(), good.begin() + 30}), "truncated header");
  c.expect(raises<models::ModelTruncatedError>({good.begin(), good.end() - 9}), "truncated body");
  auto flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  c.expect(raises<models::ModelChecksumError>(flipped), "flipped payload bit");
  bool io_error = false;
  try {
    models::load_model(dir / "does_not_exist.bin");
  } catch (const IoError&) {
    io_error = true;
  }
  c.expect(io_error, "missing file");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance_test <microtext binary> <data dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];
  const auto work = ts::scratch_dir("acceptance");

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"cleaning golden examples and idempotence", cleaning_golden},
      {"n-gram extraction matches brute force", ngram_oracle},
      {"tf-idf values on a fixed fixture", tfidf_exact},
      {"naive Bayes matches dense Bayes oracle", mnb_oracle},
      {"squared-hinge SVM contract", svm_contract},
      {"logistic regression gradient check", lr_gradient},
      {"Porter stemmer reference vocabulary", porter_vocabulary},
      {"accuracy metric fixtures", accuracy_fixtures},
      {"paper_grid on the synthetic corpus", [&] { return grid_reproduction(work); }},
      {"pipeline artifacts are reproducible", [&] { return determinism(work); }},
      {"model serialization round trip", [&] { return serialization(work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Check result;
    try {
      result = criteria[i].second();
    } catch (const std::exception& e) {
      result.failures.push_back(std::string("exception: ") + e.what());
    }
    const double t = seconds_since(start);
    std::cout << fmt::format("[{}] {:2} {} ({:.2f}s)\n", result.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first, t);
    for (const auto& f : result.failures) std::cout << "       " << f << "\n";
    std::cout.flush();
    failed += !result.ok();
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
