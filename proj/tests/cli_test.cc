/* Copyright 2026 The tibadv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Runs the tibadv executable and checks exit codes and output.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "fake_server.hpp"
#include "json.hpp"
#include "scenarios.hpp"
#include "test_util.hpp"

namespace tibadv::testing {
namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string Quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

CliResult RunCli(const std::string& args, const std::string& stdin_text = "") {
  std::string command = Quote(TIBADV_CLI_PATH) + " " + args +
                        " 2>" + Quote(TempPath("cli_stderr.txt"));
  command = "printf %s " + Quote(stdin_text) + " | " + command;
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.out.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
}

std::string TwoMarkerMockConfig() {
  const std::string path = TempPath("cli_two_marker.json");
  WriteFile(path, json({{"classifier",
                         UnigramMockSpecToJson(TwoMarkerClassifierSpec())},
                        {"masked_lm", TableMockSpecToJson(TwoMarkerTableSpec())}})
                      .dump());
  return path;
}

const std::string kMocks = "--mock unigram --mock table";

TEST(CliTest, AttackSucceedsWithExitZero) {
  const CliResult r = RunCli(kMocks + " attack --text " +
                             Quote(Join({"བདེ", "ཡིན"})));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json outcome = json::parse(r.out);
  EXPECT_EQ(outcome["status"], "success");
  EXPECT_EQ(outcome["original_label_name"], "positive");
}

TEST(CliTest, AttackReadsStdin) {
  const CliResult r = RunCli(kMocks + " attack", Join({"བདེ", "ཡིན"}) + "\n");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(json::parse(r.out)["original_text"], Join({"བདེ", "ཡིན"}));
}

TEST(CliTest, FailureAndSkippedExitOne) {
  const std::string config = TempPath("cli_empty_table.json");
  WriteFile(config, R"({"masked_lm": {"syllables": []}})");
  CliResult r = RunCli(kMocks + " --mock-config " + Quote(config) +
                       " attack --text " + Quote("བདེ"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.out)["status"], "failure");
  r = RunCli(kMocks + " attack --text " + Quote(kTsheg));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.out)["status"], "skipped");
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli("attack --text x").exit_code, 64);
  EXPECT_EQ(RunCli("--mock unigram attack --text x").exit_code, 64);
  EXPECT_EQ(RunCli(kMocks + " --classifier-url http://127.0.0.1:1 attack "
                            "--text x")
                .exit_code,
            64);
  EXPECT_EQ(RunCli(kMocks + " --budget 0 attack --text x").exit_code, 64);
  EXPECT_EQ(RunCli(kMocks + " --granularity phrase attack --text x").exit_code,
            64);
  EXPECT_EQ(RunCli(kMocks).exit_code, 64);
  EXPECT_EQ(RunCli(kMocks + " campaign --out x.jsonl").exit_code, 64);
  EXPECT_EQ(RunCli("--help").exit_code, 0);
}

TEST(CliTest, MissingInputsExit66) {
  EXPECT_EQ(RunCli(kMocks + " --dataset " + Quote(TempPath("absent.tsv")) +
                   " --out " + Quote(TempPath("absent.jsonl")) + " campaign")
                .exit_code,
            66);
  EXPECT_EQ(RunCli(kMocks + " --lexicon " + Quote(TempPath("absent.txt")) +
                   " attack --text x")
                .exit_code,
            66);
}

TEST(CliTest, MalformedDatasetExit65) {
  const std::string dataset = TempPath("cli_bad.tsv");
  WriteFile(dataset, "a\tpositive\tབདེ\na\tpositive\tབདེ\n");
  EXPECT_EQ(RunCli(kMocks + " --dataset " + Quote(dataset) + " --out " +
                   Quote(TempPath("cli_bad.jsonl")) + " campaign")
                .exit_code,
            65);
}

TEST(CliTest, UnwritableOutputExit73) {
  const std::string dataset = TempPath("cli_ok.tsv");
  WriteFile(dataset, "a\tpositive\tབདེ\n");
  EXPECT_EQ(RunCli(kMocks + " --dataset " + Quote(dataset) +
                   " --out /nonexistent-dir/x.jsonl campaign")
                .exit_code,
            73);
}

TEST(CliTest, UnreachableOracleExit69) {
  const std::string url = "http://127.0.0.1:" + std::to_string(UnusedPort());
  EXPECT_EQ(RunCli("--classifier-url " + url + " --mock table --retries 0 "
                   "attack --text x")
                .exit_code,
            69);
}

TEST(CliTest, ProbeConformantAndNot) {
  FakeModelServer good;
  CliResult r = RunCli("--classifier-url " + good.url() + " --mlm-url " +
                       good.url() + " probe");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_TRUE(json::parse(r.out)["conformant"].get<bool>());

  FakeModelServer::Faults faults;
  faults.ascending_scores = true;
  FakeModelServer bad(faults);
  r = RunCli("--classifier-url " + bad.url() + " --mlm-url " + bad.url() +
             " probe");
  EXPECT_EQ(r.exit_code, 69);
  EXPECT_FALSE(json::parse(r.out)["conformant"].get<bool>());
}

TEST(CliTest, AttackOverHttp) {
  FakeModelServer server;
  const CliResult r =
      RunCli("--classifier-url " + server.url() + " --mlm-url " + server.url() +
             " attack --text " + Quote(Join({"བདེ", "ཡིན"})));
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_GT(server.classify_calls.load(), 0);
}

TEST(CliTest, ConfigFileAndFlagPrecedence) {
  const std::string config = TempPath("cli_config.toml");
  WriteFile(config,
            "k = 7\nmock = [\"unigram\", \"table\"]\ngranularity = \"word\"\n"
            "seed = 11\n");
  CliResult r = RunCli("--config " + Quote(config) + " --print-config attack");
  ASSERT_EQ(r.exit_code, 0);
  json spec = json::parse(r.out);
  EXPECT_EQ(spec["k"], 7);
  EXPECT_EQ(spec["granularity"], "word");
  EXPECT_EQ(spec["seed"], 11);
  EXPECT_EQ(spec["mock"], json({"unigram", "table"}));
  EXPECT_EQ(spec["subcommand"], "attack");

  r = RunCli("--config " + Quote(config) +
             " --k 9 --granularity syllable --print-config attack");
  spec = json::parse(r.out);
  EXPECT_EQ(spec["k"], 9);
  EXPECT_EQ(spec["granularity"], "syllable");
  EXPECT_EQ(spec["seed"], 11);

  r = RunCli("--config " + Quote(config) + " attack --text " + Quote("བདེ"));
  EXPECT_EQ(r.exit_code, 0) << r.out;
}

TEST(CliTest, CampaignMatchesScenario) {
  std::string tsv = "id\tlabel\ttext\n";
  for (const Sample& s : TenSampleDataset()) {
    tsv += s.id + "\t" + *s.gold_label + "\t" + s.text + "\n";
  }
  const std::string dataset = TempPath("cli_ten.tsv");
  const std::string outcomes = TempPath("cli_ten.jsonl");
  const std::string report = TempPath("cli_ten_report.json");
  WriteFile(dataset, tsv);
  const CliResult r = RunCli(
      kMocks + " --mock-config " + Quote(TwoMarkerMockConfig()) +
      " --k 3 --budget 10 --parallelism 3 --dataset " + Quote(dataset) +
      " --out " + Quote(outcomes) + " --report " + Quote(report) +
      " campaign");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("greedy-s"), std::string::npos);
  EXPECT_NE(r.out.find("0.7778"), std::string::npos) << r.out;
  const json j = json::parse(ReadFile(report));
  const ExpectedReport e = TenSampleBudgetTen();
  EXPECT_NEAR(j["asr"].get<double>(), e.asr, 1e-12);
  EXPECT_NEAR(j["mean_ld"].get<double>(), e.mean_ld, 1e-12);
  EXPECT_EQ(j["config"]["query_budget"], 10);

  const CliResult table = RunCli("report " + Quote(outcomes));
  EXPECT_EQ(table.exit_code, 0);
  EXPECT_NE(table.out.find("cli_ten"), std::string::npos);
  EXPECT_NE(table.out.find("0.7778"), std::string::npos);
}

TEST(CliTest, MaxSubstitutionsOne) {
  const std::string dataset = TempPath("cli_four.tsv");
  WriteFile(dataset, "id\tlabel\ttext\n"
                     "a\tA\t" + kKa + "\n"
                     "b\tB\t" + kKha + "\n"
                     "c\tA\t" + Join({kKa, kKa}) + "\n"
                     "d\tA\t" + kGa + "\n");
  const std::string report = TempPath("cli_four.json");
  const CliResult r = RunCli(
      kMocks + " --mock-config " + Quote(TwoMarkerMockConfig()) +
      " --k 3 --max-substitutions 1 --dataset " + Quote(dataset) + " --out " +
      Quote(TempPath("cli_four.jsonl")) + " --report " + Quote(report) +
      " campaign");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_DOUBLE_EQ(json::parse(ReadFile(report))["asr"].get<double>(), 0.75);
}

TEST(CliTest, BaselineIsDeterministic) {
  const std::string data = TIBADV_DATA_DIR;
  const std::string common =
      kMocks + " --mock-config " + Quote(data + "/mock.json") +
      " --k 10 --budget 200 --dataset " + Quote(data + "/benchmark.tsv") +
      " --parallelism 4 baseline";
  const std::string a = TempPath("cli_base_a.jsonl");
  const std::string b = TempPath("cli_base_b.jsonl");
  const std::string c = TempPath("cli_base_c.jsonl");
  ASSERT_EQ(RunCli("--seed 5 --out " + Quote(a) + " " + common).exit_code, 0);
  ASSERT_EQ(RunCli("--seed 5 --out " + Quote(b) + " " + common).exit_code, 0);
  ASSERT_EQ(RunCli("--seed 6 --out " + Quote(c) + " " + common).exit_code, 0);

  auto by_id = [](const std::string& path) {
    std::map<std::string, std::string> records;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      const json j = json::parse(line);
      records[j["id"].get<std::string>()] = line;
    }
    return records;
  };
  const auto ra = by_id(a);
  EXPECT_EQ(ra.size(), 200u);
  EXPECT_EQ(ra, by_id(b));
  EXPECT_NE(ra, by_id(c));
}

}  // namespace
}  // namespace tibadv::testing
