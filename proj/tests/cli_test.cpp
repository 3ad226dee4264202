#include <sys/wait.h>

#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace ps = parastyle;
using namespace testing_support;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string shell_arg(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli(const std::string& args, const TempDir& scratch) {
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = std::string("'") + PARASTYLE_CLI_PATH + "' " + args + " > " + shell_arg(out) + " 2> " + shell_arg(err);
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = ps::read_text_file(out);
  o.err = ps::read_text_file(err);
  return o;
}

// Two topics, one style; compliance halves after the first turn.
fs::path write_mock_manifest(const TempDir& dir, const std::string& style = "sadness") {
  const nlohmann::json j = {
      {"run_id", "cli-mock"},
      {"model", {{"kind", "scripted"}, {"name", "mock"}, {"schedule", {{"population", 2}, {"turns", {100, 50, 50, 50}}}}}},
      {"matrix",
       {{"openers", PARASTYLE_SOURCE_DIR "/data/openers.jsonl"}, {"topics", 2}, {"styles", {style}}, {"seed", 3}}}};
  const auto path = dir / "manifest.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

std::size_t count_records(const fs::path& run) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(run / "records"))
    if (e.path().extension() == ".json" && e.path().string().find(".timing.") == std::string::npos) ++n;
  return n;
}

const std::string kJudges = PARASTYLE_SOURCE_DIR "/configs/mock_judges.json";

}  // namespace

TEST(Cli, RunJudgeReportEndToEnd) {
  TempDir dir;
  const auto manifest = write_mock_manifest(dir);
  const auto run = dir / "run";
  auto r = cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(run) + " --workers 2", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_records(run), 2u);
  EXPECT_TRUE(fs::exists(run / "manifest.json"));
  EXPECT_NE(r.out.find("2 complete"), std::string::npos) << r.out;

  r = cli("judge --run " + shell_arg(run) + " --judges " + shell_arg(kJudges), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(run / "judgments" / "001_sadness.json"));
  EXPECT_TRUE(fs::exists(run / "judgments" / "002_sadness.json"));

  const auto report = dir / "report";
  r = cli("report --runs " + shell_arg(run) + " --out " + shell_arg(report), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto metrics = ps::read_text_file(report / "metrics.csv");
  EXPECT_NE(metrics.find("all,mock,sadness,user,4,100.0,50.0,50.0,50.0,50.0"), std::string::npos) << metrics;
  EXPECT_TRUE(fs::exists(report / "if_curves_all.svg"));
  EXPECT_TRUE(fs::exists(report / "report.md"));
}

TEST(Cli, RerunSkipsFinishedDialoguesAndKeepsBytes) {
  TempDir dir;
  const auto manifest = write_mock_manifest(dir);
  const auto run = dir / "run";
  ASSERT_EQ(cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(run), dir).code, 0);
  const auto before = ps::read_text_file(run / "records" / "001_sadness.json");
  const auto r = cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(run), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2 already finished"), std::string::npos) << r.out;
  EXPECT_EQ(ps::read_text_file(run / "records" / "001_sadness.json"), before);

  // Judging twice skips what is already judged unless asked to redo it.
  ASSERT_EQ(cli("judge --run " + shell_arg(run) + " --judges " + shell_arg(kJudges), dir).code, 0);
  auto again = cli("judge --run " + shell_arg(run) + " --judges " + shell_arg(kJudges), dir);
  EXPECT_NE(again.out.find("judged 0 dialogues, skipped 2"), std::string::npos) << again.out;
  again = cli("judge --run " + shell_arg(run) + " --judges " + shell_arg(kJudges) + " --rejudge", dir);
  EXPECT_NE(again.out.find("judged 2 dialogues"), std::string::npos) << again.out;
}

TEST(Cli, IdenticalRunsProduceIdenticalRecords) {
  TempDir dir;
  const auto manifest = write_mock_manifest(dir, "fast");
  ASSERT_EQ(cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(dir / "a") + " --workers 1", dir).code, 0);
  ASSERT_EQ(cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(dir / "b") + " --workers 2", dir).code, 0);
  for (const char* id : {"001_fast.json", "002_fast.json"})
    EXPECT_EQ(ps::read_text_file(dir / "a" / "records" / id), ps::read_text_file(dir / "b" / "records" / id)) << id;
}

TEST(Cli, UnreachableEndpointFailsPreflight) {
  TempDir dir;
  const nlohmann::json j = {
      {"run_id", "remote"},
      {"model", {{"kind", "remote"}, {"endpoint", {{"url", "http://127.0.0.1:9/respond"}, {"timeout_seconds", 2}}}}},
      {"matrix", {{"openers", PARASTYLE_SOURCE_DIR "/data/openers.jsonl"}, {"topics", 1}, {"styles", {"anger"}}}}};
  std::ofstream(dir / "remote.json") << j.dump();
  const auto r = cli("run --manifest " + shell_arg(dir / "remote.json") + " --out " + shell_arg(dir / "run"), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("preflight"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "run" / "manifest.json"));
}

TEST(Cli, ConfigurationProblemsExitWithTwo) {
  TempDir dir;
  EXPECT_EQ(cli("run --out " + shell_arg(dir / "x"), dir).code, 2);
  EXPECT_EQ(cli("run --manifest " + shell_arg(dir / "missing.json") + " --out " + shell_arg(dir / "x"), dir).code, 2);
  EXPECT_EQ(cli("explode", dir).code, 2);
  std::ofstream(dir / "broken.json") << "{\"run_id\": ";
  EXPECT_EQ(cli("run --manifest " + shell_arg(dir / "broken.json") + " --out " + shell_arg(dir / "x"), dir).code, 2);

  fs::create_directories(dir / "empty");
  auto r = cli("judge --run " + shell_arg(dir / "empty") + " --judges " + shell_arg(kJudges), dir);
  EXPECT_EQ(r.code, 2);
  r = cli("report --runs " + shell_arg(dir / "empty") + " --out " + shell_arg(dir / "rep"), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("judge stage"), std::string::npos) << r.err;
  EXPECT_EQ(cli("--help", dir).code, 0);
}

TEST(Cli, JudgeRefusesMissingBackends) {
  TempDir dir;
  const auto manifest = write_mock_manifest(dir);
  ASSERT_EQ(cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(dir / "run"), dir).code, 0);
  const auto r = cli("judge --run " + shell_arg(dir / "run") + " --judges '{\"coherence\": false}'", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir / "run" / "judgments" / "001_sadness.json"));
}

TEST(Cli, ValidateJudgesWritesAgreementTable) {
  TempDir dir;
  const auto manifest = write_mock_manifest(dir);
  const auto run = dir / "run";
  ASSERT_EQ(cli("run --manifest " + shell_arg(manifest) + " --out " + shell_arg(run), dir).code, 0);
  ASSERT_EQ(cli("judge --run " + shell_arg(run) + " --judges " + shell_arg(kJudges), dir).code, 0);
  std::ofstream(dir / "ann.jsonl") << R"({"item_id": "001_sadness#1", "human_labels": [1, 1, 0]})" << "\n"
                                   << R"({"item_id": "001_sadness#2", "human_labels": [1, 1]})" << "\n"
                                   << R"({"item_id": "777_sadness#1", "human_labels": [1]})" << "\n";
  const auto r = cli("validate-judges --annotations " + shell_arg(dir / "ann.jsonl") + " --judgments " +
                         shell_arg(run / "judgments") + " --out " + shell_arg(dir / "agreement.csv"),
                     dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = ps::read_text_file(dir / "agreement.csv");
  EXPECT_EQ(csv.rfind("task,judge,items,ties_excluded,kappa,mcc,note\n", 0), 0u);
  EXPECT_NE(csv.find("emotion,"), std::string::npos);
  EXPECT_NE(r.err.find("777_sadness#1"), std::string::npos) << r.err;
}

TEST(Cli, GenOpenersWritesAcceptedAndRejected) {
  TempDir dir;
  std::ofstream(dir / "sources.jsonl")
      << R"({"source_id": "a", "narrative": "I stayed up all night.", "first_utterance": "I am so tired today."})" << "\n"
      << R"({"source_id": "b", "narrative": "My dog ran away.", "first_utterance": "I can't find my dog."})" << "\n";
  std::ofstream(dir / "skip.txt") << "b\n";
  const auto r = cli("gen-openers --source " + shell_arg(dir / "sources.jsonl") + " --out " + shell_arg(dir / "openers.jsonl") +
                         " --exclusions " + shell_arg(dir / "skip.txt"),
                     dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rejected = ps::read_text_file(dir / "openers.jsonl.rejected.jsonl");
  EXPECT_NE(rejected.find("rejected_manually"), std::string::npos);
  const auto openers = ps::read_text_file(dir / "openers.jsonl");
  EXPECT_EQ(openers.find("\"b\""), std::string::npos);
}
