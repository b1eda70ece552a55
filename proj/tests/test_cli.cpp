#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
namespace ts = testing_support;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stdout is captured, stderr discarded.
Result run(const std::string& args, const std::string& stdin_text = "") {
  const auto dir = fs::temp_directory_path() / "microtext_cli_io";
  fs::create_directories(dir);
  const auto in = dir / "stdin.txt";
  const auto out = dir / "stdout.txt";
  ts::write_file(in, stdin_text);
  const std::string cmd = std::string("'") + MICROTEXT_CLI + "' " + args + " < '" + in.string() + "' > '" +
                          out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ts::read_file(out);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count_fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t')) + 1; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = ts::scratch_dir("cli");
    ASSERT_EQ(run("synth --out " + q(dir_ / "tweets.jsonl") + " --n-docs 300 --seed 3").code, 0);
    ASSERT_EQ(run("ingest --input " + q(dir_ / "tweets.jsonl") + " --out " + q(dir_ / "data")).code, 0);
    const auto r = run("train --data " + q(dir_ / "data") + " --model svm --weighting tfidf --ngram char:1,3 --out " +
                       q(dir_ / "svm.bin"));
    ASSERT_EQ(r.code, 0);
    train_stdout_ = r.out;
  }

  static inline fs::path dir_;
  static inline std::string train_stdout_;
};

}  // namespace

TEST_F(Cli, IngestWritesExamplesAndLabels) {
  EXPECT_TRUE(fs::exists(dir_ / "data" / "examples.jsonl"));
  const auto labels = lines(ts::read_file(dir_ / "data" / "labels.csv"));
  ASSERT_EQ(labels.size(), 6u);
  EXPECT_EQ(labels[0], "label,count");
}

TEST_F(Cli, IngestTopKAndDuplicates) {
  const auto d = ts::scratch_dir("cli_ingest");
  ts::write_file(d / "in.tsv",
                 "1\tgreat game tonight\tsports\n"
                 "2\tgreat game tonight\tsports\n"
                 "3\tnew album out\tmusic\n"
                 "4\tpasta recipe\tfood,music\n"
                 "5\tflight delayed\ttravel\n"
                 "6\tlive concert\tmusic\n");
  ASSERT_EQ(run("ingest --input " + q(d / "in.tsv") + " --format tsv --top-k 2 --out " + q(d / "out")).code, 0);
  EXPECT_EQ(ts::read_file(d / "out" / "labels.csv"), "label,count\nmusic,3\nfood,1\n");
  EXPECT_EQ(lines(ts::read_file(d / "out" / "examples.jsonl")).size(), 3u);
}

TEST_F(Cli, IngestFailures) {
  const auto d = ts::scratch_dir("cli_ingest_fail");
  ts::write_file(d / "empty.jsonl", "");
  EXPECT_EQ(run("ingest --input " + q(d / "empty.jsonl") + " --out " + q(d / "out")).code, 1);
  EXPECT_EQ(run("ingest --input " + q(d / "missing.jsonl") + " --out " + q(d / "out")).code, 1);
  EXPECT_EQ(run("ingest --input " + q(d / "empty.jsonl") + " --format xml --out " + q(d / "out")).code, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "data") + " --bogus 1 --out " + q(dir_ / "x.bin")).code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "data") + " --ngram char:0,2 --out " + q(dir_ / "x.bin")).code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "data") + " --ngram char1,2 --out " + q(dir_ / "x.bin")).code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "data") + " --model knn --out " + q(dir_ / "x.bin")).code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "data")).code, 2);
  EXPECT_EQ(run("predict --model " + q(dir_ / "svm.bin") + " --top 0").code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "x.bin"));
}

TEST_F(Cli, TrainWritesModelAndSidecars) {
  EXPECT_TRUE(fs::exists(dir_ / "svm.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "svm.bin.vocab.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "svm.bin.idf.csv"));
  const auto meta = nlohmann::json::parse(ts::read_file(dir_ / "svm.bin.meta.json"));
  EXPECT_EQ(meta.at("model"), "svm");
  EXPECT_EQ(meta.at("ngram"), "char:1,3");
  EXPECT_EQ(meta.at("n_train").get<int>() + meta.at("n_test").get<int>(), 300);
  const double acc = std::stod(train_stdout_);
  EXPECT_GT(acc, 0.5);
  EXPECT_LE(acc, 1.0);
  EXPECT_NEAR(meta.at("test_accuracy").get<double>(), acc, 1e-6);
}

TEST_F(Cli, TrainMissingDataIsRuntimeFailure) {
  EXPECT_EQ(run("train --data " + q(dir_ / "nowhere") + " --out " + q(dir_ / "y.bin")).code, 1);
}

TEST_F(Cli, PredictRanksLabels) {
  const auto r = run("predict --model " + q(dir_ / "svm.bin") + " --top 3",
                     "FOOTBALL touchdown at the stadium!!\n\nmy new guitar and a concert\n");
  ASSERT_EQ(r.code, 0);
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& l : out) EXPECT_EQ(count_fields(l), 3u) << l;
  EXPECT_EQ(out[0].substr(0, out[0].find('\t')), "sports");
  EXPECT_EQ(out[2].substr(0, out[2].find('\t')), "music");

  const auto top1 = run("predict --model " + q(dir_ / "svm.bin") + " --top 1 --input -", "\n");
  ASSERT_EQ(top1.code, 0);
  EXPECT_EQ(count_fields(lines(top1.out).at(0)), 1u);
}

TEST_F(Cli, PredictReadsInputFile) {
  ts::write_file(dir_ / "queries.txt", "pasta and chocolate dessert\n");
  const auto r = run("predict --model " + q(dir_ / "svm.bin") + " --input " + q(dir_ / "queries.txt"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).at(0), "food");
}

TEST_F(Cli, PredictMismatchedVocabularyFails) {
  const auto d = ts::scratch_dir("cli_mismatch");
  for (const char* suffix : {".vocab.csv", ".idf.csv", ".meta.json"}) {
    fs::copy_file(dir_ / ("svm.bin" + std::string(suffix)), d / ("m.bin" + std::string(suffix)));
  }
  fs::copy_file(dir_ / "svm.bin", d / "m.bin");
  ts::write_file(d / "m.bin.vocab.csv", "term,index,df\na,0,1\n");
  EXPECT_EQ(run("predict --model " + q(d / "m.bin"), "hello\n").code, 1);
  ts::write_file(d / "m.bin", "garbage");
  EXPECT_EQ(run("predict --model " + q(d / "m.bin"), "hello\n").code, 1);
}

TEST_F(Cli, ConfigOverlayWithFlagPrecedence) {
  ts::write_file(dir_ / "overlay.toml", "[train]\nmodel = \"mnb\"\nweighting = \"fc\"\nngram = \"word:1,1\"\n");
  ASSERT_EQ(run("--config " + q(dir_ / "overlay.toml") + " train --data " + q(dir_ / "data") + " --out " +
                q(dir_ / "mnb.bin"))
                .code,
            0);
  auto meta = nlohmann::json::parse(ts::read_file(dir_ / "mnb.bin.meta.json"));
  EXPECT_EQ(meta.at("model"), "mnb");
  EXPECT_EQ(meta.at("ngram"), "word:1,1");
  EXPECT_FALSE(fs::exists(dir_ / "mnb.bin.idf.csv"));

  ASSERT_EQ(run("--config " + q(dir_ / "overlay.toml") + " train --model lr --data " + q(dir_ / "data") +
                " --out " + q(dir_ / "lr.bin"))
                .code,
            0);
  meta = nlohmann::json::parse(ts::read_file(dir_ / "lr.bin.meta.json"));
  EXPECT_EQ(meta.at("model"), "lr");
  EXPECT_EQ(meta.at("weighting"), "fc");

  ts::write_file(dir_ / "bad.toml", "[train]\nmodle = \"mnb\"\n");
  EXPECT_EQ(run("--config " + q(dir_ / "bad.toml") + " train --data " + q(dir_ / "data") + " --out " +
                q(dir_ / "z.bin"))
                .code,
            2);
}

TEST_F(Cli, ExperimentWritesReports) {
  ts::write_file(dir_ / "small.toml",
                 "models = [\"mnb\", \"svm\"]\nweightings = [\"fc\"]\nchar_n = 2\nword_n = 1\n");
  ASSERT_EQ(run("experiment --data " + q(dir_ / "data") + " --grid " + q(dir_ / "small.toml") + " --jobs 2 --out " +
                q(dir_ / "reports"))
                .code,
            0);
  for (const char* f : {"grid.csv", "summary.csv", "series_individual.csv", "series_combined.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "reports" / f)) << f;
  }
  EXPECT_EQ(lines(ts::read_file(dir_ / "reports" / "grid.csv")).size(), 1u + 2u * 4u);
  const auto report = run("report " + q(dir_ / "reports" / "grid.csv"));
  EXPECT_EQ(report.code, 0);
  EXPECT_EQ(lines(report.out).size(), 3u);
  EXPECT_EQ(run("report " + q(dir_ / "reports" / "summary.csv")).code, 1);
}

TEST_F(Cli, ExperimentGridErrorsAreUsageErrors) {
  EXPECT_EQ(run("experiment --data " + q(dir_ / "data") + " --grid " + q(dir_ / "none.toml") + " --out " +
                q(dir_ / "r2"))
                .code,
            2);
  ts::write_file(dir_ / "broken.toml", "models = [\"mnb\"\n");
  EXPECT_EQ(run("experiment --data " + q(dir_ / "data") + " --grid " + q(dir_ / "broken.toml") + " --out " +
                q(dir_ / "r2"))
                .code,
            2);
}

TEST_F(Cli, CleanFiltersStdin) {
  const auto r = run("clean", "i'm so happyyyyyyyy...\nRT @user CHECK https://t.co/xyz NOW!!\n");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "im so hapy\nuser check now\n");
  const auto stripped = run("clean --labels " + q(dir_ / "data" / "labels.csv"), "great game #sports #fun\n");
  EXPECT_EQ(stripped.out, "great game fun\n");
}
