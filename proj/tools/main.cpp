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

// tibadv: command-line front end to libtibadv.
//
// Exit codes:
//   0    success (attack: label flipped; probe: conformant)
//   1    attack finished without flipping the label, or the text was empty
//   2    attack hit an oracle error
//   64   usage error
//   65   malformed dataset
//   66   input file not found
//   69   oracle unavailable or non-conformant
//   70   internal error
//   73   output file cannot be written
//   130  interrupted

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "baseline.hpp"
#include "capi.hpp"
#include "json.hpp"
#include "tibadv/tibadv.h"

namespace tibadv_tools {
namespace {

using nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitAttackFailed = 1,
  kExitAttackError = 2,
  kExitUsage = 64,
  kExitDataErr = 65,
  kExitNoInput = 66,
  kExitUnavailable = 69,
  kExitSoftware = 70,
  kExitCantCreate = 73,
  kExitInterrupted = 130,
};

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void OnInterrupt(int) { g_interrupted = 1; }

void InstallInterruptHandler() {
  struct sigaction action {};
  action.sa_handler = OnInterrupt;
  sigemptyset(&action.sa_mask);
  // A second interrupt terminates immediately.
  action.sa_flags = SA_RESETHAND;
  sigaction(SIGINT, &action, nullptr);
  sigaction(SIGTERM, &action, nullptr);
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string subcommand;
  std::optional<std::string> text;
  std::string dataset;
  std::string granularity = "syllable";
  std::size_t k = 50;
  std::string classifier_url;
  std::string mlm_url;
  std::vector<std::string> mock;
  std::string mock_config;
  std::string lexicon;
  std::string out;
  std::string report;
  std::size_t parallelism = 1;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> max_substitutions;
  bool skip_nonpositive_gain = false;
  bool isolated = false;
  std::uint64_t seed = 0;
  bool resume = false;
  double timeout = 60.0;
  int retries = 2;
  std::vector<std::string> inputs;
};

json SpecToJson(const RunSpec& spec) {
  auto opt = [](const auto& value) {
    return value ? json(*value) : json(nullptr);
  };
  return {{"subcommand", spec.subcommand},
          {"text", opt(spec.text)},
          {"dataset", spec.dataset},
          {"granularity", spec.granularity},
          {"k", spec.k},
          {"classifier_url", spec.classifier_url},
          {"mlm_url", spec.mlm_url},
          {"mock", spec.mock},
          {"mock_config", spec.mock_config},
          {"lexicon", spec.lexicon},
          {"out", spec.out},
          {"report", spec.report},
          {"parallelism", spec.parallelism},
          {"budget", opt(spec.budget)},
          {"max_substitutions", opt(spec.max_substitutions)},
          {"skip_nonpositive_gain", spec.skip_nonpositive_gain},
          {"isolated", spec.isolated},
          {"seed", spec.seed},
          {"resume", spec.resume},
          {"timeout", spec.timeout},
          {"retries", spec.retries},
          {"inputs", spec.inputs}};
}

int ExitFor(tibadv_status status) {
  switch (status) {
    case TIBADV_OK:
      return kExitOk;
    case TIBADV_INVALID_ARGUMENT:
      return kExitUsage;
    case TIBADV_TRANSPORT_ERROR:
    case TIBADV_PROTOCOL_ERROR:
    case TIBADV_MODEL_ERROR:
      return kExitUnavailable;
    case TIBADV_DATASET_ERROR:
    case TIBADV_SEGMENTER_ERROR:
      return kExitDataErr;
    case TIBADV_IO_ERROR:
      return kExitCantCreate;
    case TIBADV_CANCELLED:
      return kExitInterrupted;
    default:
      return kExitSoftware;
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StatusError(TIBADV_IO_ERROR, "cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void RequireInput(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw StatusError(TIBADV_IO_ERROR,
                      std::string(what) + " not found: " + path);
  }
}

void WriteText(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw StatusError(TIBADV_IO_ERROR, "cannot write " + path);
}

struct Oracles {
  ClassifierPtr classifier;
  MaskedLmPtr masked_lm;
  SegmenterPtr segmenter;
};

tibadv_granularity Granularity(const RunSpec& spec) {
  return spec.granularity == "word" ? TIBADV_WORD : TIBADV_SYLLABLE;
}

Oracles OpenOracles(const RunSpec& spec) {
  bool mock_classifier = false;
  bool mock_masked_lm = false;
  for (const std::string& m : spec.mock) {
    (m == "unigram" ? mock_classifier : mock_masked_lm) = true;
  }
  if (mock_classifier == !spec.classifier_url.empty()) {
    throw UsageError(
        "exactly one classifier source is required: --classifier-url or "
        "--mock unigram");
  }
  if (mock_masked_lm == !spec.mlm_url.empty()) {
    throw UsageError(
        "exactly one masked-LM source is required: --mlm-url or --mock table");
  }

  json mock_specs = json::object();
  if (!spec.mock_config.empty()) {
    RequireInput(spec.mock_config, "mock config");
    mock_specs = json::parse(ReadFile(spec.mock_config), nullptr, false);
    if (mock_specs.is_discarded() || !mock_specs.is_object()) {
      throw UsageError("mock config is not a JSON object: " + spec.mock_config);
    }
  }
  auto mock_spec = [&mock_specs](const char* key) -> std::string {
    return mock_specs.contains(key) ? mock_specs[key].dump() : std::string();
  };

  tibadv_http_options http;
  tibadv_http_options_init(&http);
  http.read_timeout_seconds = spec.timeout;
  http.max_retries = spec.retries;

  Oracles oracles;
  tibadv_classifier* classifier = nullptr;
  if (mock_classifier) {
    const std::string json_spec = mock_spec("classifier");
    Check(tibadv_classifier_open_mock(
              json_spec.empty() ? nullptr : json_spec.c_str(), &classifier),
          "mock classifier");
  } else {
    Check(tibadv_classifier_open_http(spec.classifier_url.c_str(), &http,
                                      &classifier),
          "classifier");
  }
  oracles.classifier.reset(classifier);

  tibadv_masked_lm* masked_lm = nullptr;
  if (mock_masked_lm) {
    const std::string json_spec = mock_spec("masked_lm");
    Check(tibadv_masked_lm_open_mock(
              json_spec.empty() ? nullptr : json_spec.c_str(), &masked_lm),
          "mock masked LM");
  } else {
    Check(tibadv_masked_lm_open_http(spec.mlm_url.c_str(), &http, &masked_lm),
          "masked LM");
  }
  oracles.masked_lm.reset(masked_lm);

  if (!spec.lexicon.empty()) {
    RequireInput(spec.lexicon, "lexicon");
    tibadv_segmenter* segmenter = nullptr;
    Check(tibadv_segmenter_open_lexicon(spec.lexicon.c_str(), &segmenter),
          "lexicon");
    oracles.segmenter.reset(segmenter);
  } else if (spec.granularity == "word" && spec.subcommand != "probe") {
    std::cerr << "warning: --granularity word without --lexicon; each "
                 "syllable is treated as one word\n";
  }
  return oracles;
}

tibadv_attack_config AttackConfig(const RunSpec& spec) {
  tibadv_attack_config config;
  tibadv_attack_config_init(&config);
  config.granularity = Granularity(spec);
  config.k = spec.k;
  config.query_budget = spec.budget.value_or(0);
  config.max_substitutions = spec.max_substitutions.value_or(0);
  config.skip_nonpositive_gain = spec.skip_nonpositive_gain ? 1 : 0;
  config.isolated_substitutions = spec.isolated ? 1 : 0;
  return config;
}

void Preflight(const Oracles& oracles) {
  char* raw = nullptr;
  Check(tibadv_classifier_info(oracles.classifier.get(), &raw), "classifier");
  TakeString(raw);
  Check(tibadv_masked_lm_info(oracles.masked_lm.get(), &raw), "masked LM");
  TakeString(raw);
}

int CmdAttack(const RunSpec& spec) {
  std::string text;
  if (spec.text) {
    text = *spec.text;
  } else {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
      text.pop_back();
    }
  }
  if (text.empty()) throw UsageError("no input text (use --text or stdin)");

  const Oracles oracles = OpenOracles(spec);
  Preflight(oracles);
  const tibadv_attack_config config = AttackConfig(spec);
  char* raw = nullptr;
  Check(tibadv_attack(text.c_str(), oracles.classifier.get(),
                      oracles.masked_lm.get(), oracles.segmenter.get(),
                      &config, &raw),
        "attack");
  const json outcome = json::parse(TakeString(raw));
  const std::string rendered = outcome.dump(2);
  std::cout << rendered << "\n";
  if (!spec.out.empty()) WriteText(spec.out, rendered + "\n");

  const std::string status = outcome.at("status").get<std::string>();
  if (status == "success") return kExitOk;
  if (status == "error") return kExitAttackError;
  return kExitAttackFailed;
}

int CmdCampaign(const RunSpec& spec, bool baseline) {
  if (spec.dataset.empty()) throw UsageError("--dataset is required");
  if (spec.out.empty()) throw UsageError("--out (outcome file) is required");
  RequireInput(spec.dataset, "dataset");

  const Oracles oracles = OpenOracles(spec);
  const tibadv_attack_config config = AttackConfig(spec);
  const std::string suffix = spec.granularity == "word" ? "-w" : "-s";
  const std::string name = (baseline ? "random" : "greedy") + suffix;

  std::optional<RandomBaseline> random;
  tibadv_campaign_options options;
  tibadv_campaign_options_init(&options);
  options.attack = config;
  options.parallelism = spec.parallelism;
  options.outcome_path = spec.out.c_str();
  options.resume = spec.resume ? 1 : 0;
  options.cancel_flag = &g_interrupted;
  options.attack_name = name.c_str();
  if (baseline) {
    random.emplace(oracles.classifier.get(), oracles.masked_lm.get(),
                   oracles.segmenter.get(), config, spec.seed);
    options.attack_fn = &RandomBaseline::Callback;
    options.attack_user = &*random;
  }

  InstallInterruptHandler();
  char* raw = nullptr;
  const tibadv_status status =
      tibadv_campaign_run(spec.dataset.c_str(), oracles.classifier.get(),
                          oracles.masked_lm.get(), oracles.segmenter.get(),
                          &options, &raw);
  if (status == TIBADV_CANCELLED) {
    std::cerr << "interrupted; completed records are in " << spec.out
              << " (rerun with --resume)\n";
    return kExitInterrupted;
  }
  Check(status, "campaign");
  json report = json::parse(TakeString(raw));
  if (baseline) report["config"]["seed"] = spec.seed;
  if (!spec.report.empty()) WriteText(spec.report, report.dump(2) + "\n");

  const std::string report_text = report.dump();
  const char* reports[] = {report_text.c_str()};
  char* table = nullptr;
  Check(tibadv_report_table(reports, 1, &table), "report");
  std::cout << TakeString(table);
  return kExitOk;
}

int CmdProbe(const RunSpec& spec) {
  const Oracles oracles = OpenOracles(spec);
  char* raw = nullptr;
  int conformant = 0;
  Check(tibadv_probe(oracles.classifier.get(), oracles.masked_lm.get(), &raw,
                     &conformant),
        "probe");
  const std::string report = json::parse(TakeString(raw)).dump(2);
  std::cout << report << "\n";
  if (!spec.out.empty()) WriteText(spec.out, report + "\n");
  return conformant ? kExitOk : kExitUnavailable;
}

int CmdReport(const RunSpec& spec) {
  if (spec.inputs.empty()) throw UsageError("report needs at least one file");
  std::vector<std::string> reports;
  for (const std::string& path : spec.inputs) {
    RequireInput(path, "report input");
    const std::filesystem::path p(path);
    if (p.extension() == ".jsonl") {
      char* raw = nullptr;
      Check(tibadv_report_from_outcomes(path.c_str(), p.stem().c_str(), &raw),
            path);
      reports.push_back(TakeString(raw));
    } else {
      reports.push_back(ReadFile(path));
    }
  }
  std::vector<const char*> pointers;
  for (const std::string& r : reports) pointers.push_back(r.c_str());
  char* table = nullptr;
  Check(tibadv_report_table(pointers.data(), pointers.size(), &table),
        "report");
  std::cout << TakeString(table);
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Black-box adversarial attacks on Tibetan text classifiers",
               "tibadv"};
  app.set_version_flag("--version", std::string(tibadv_version()));
  app.set_config("--config", "",
                 "Read options from a TOML/INI file; flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  RunSpec spec;
  bool print_config = false;
  app.add_option("--text", spec.text, "Text to attack (default: stdin)");
  app.add_option("--dataset", spec.dataset,
                 "Dataset: .jsonl or tab-separated id, label, text");
  app.add_option("--granularity", spec.granularity, "Attack unit")
      ->check(CLI::IsMember({"syllable", "word"}));
  app.add_option("--k", spec.k, "Fill candidates per position")
      ->check(CLI::PositiveNumber);
  app.add_option("--classifier-url", spec.classifier_url,
                 "Classifier oracle base URL (http://host:port)");
  app.add_option("--mlm-url", spec.mlm_url,
                 "Masked-LM oracle base URL (http://host:port)");
  app.add_option("--mock", spec.mock,
                 "In-process mock oracle; repeat for both")
      ->check(CLI::IsMember({"unigram", "table"}));
  app.add_option("--mock-config", spec.mock_config,
                 "JSON file with \"classifier\" / \"masked_lm\" mock specs");
  app.add_option("--lexicon", spec.lexicon,
                 "Word list for word segmentation, one entry per line");
  app.add_option("--out", spec.out,
                 "Outcome file (campaign, baseline) or output copy");
  app.add_option("--report", spec.report, "Write the report JSON here");
  app.add_option("--parallelism", spec.parallelism, "Concurrent samples")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget", spec.budget, "Classifier queries per sample")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-substitutions", spec.max_substitutions,
                 "Substitutions per sample")
      ->check(CLI::PositiveNumber);
  app.add_flag("--skip-nonpositive-gain", spec.skip_nonpositive_gain,
               "Drop positions whose best fill does not lower P(y)");
  app.add_flag("--isolated", spec.isolated,
               "Try each substitution alone instead of accumulating");
  app.add_option("--seed", spec.seed, "Baseline random seed");
  app.add_flag("--resume", spec.resume,
               "Keep records already in --out and attack the rest");
  app.add_option("--timeout", spec.timeout, "HTTP read timeout, seconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--retries", spec.retries,
                 "HTTP retries after transport failures")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--print-config", print_config,
               "Print the resolved options as JSON and exit");

  app.add_subcommand("attack", "Attack a single text");
  app.add_subcommand("campaign", "Attack every sample of a dataset");
  app.add_subcommand("baseline", "Random-substitution attack on a dataset");
  app.add_subcommand("probe", "Check both oracles for protocol conformance");
  CLI::App* report = app.add_subcommand(
      "report", "Render reports or outcome files side by side");
  report->add_option("files", spec.inputs, "Report .json or outcome .jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spec.subcommand = app.get_subcommands().front()->get_name();

  if (print_config) {
    std::cout << SpecToJson(spec).dump(2) << "\n";
    return kExitOk;
  }

  try {
    if (spec.subcommand == "attack") return CmdAttack(spec);
    if (spec.subcommand == "campaign") return CmdCampaign(spec, false);
    if (spec.subcommand == "baseline") return CmdCampaign(spec, true);
    if (spec.subcommand == "probe") return CmdProbe(spec);
    return CmdReport(spec);
  } catch (const UsageError& e) {
    std::cerr << "tibadv: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StatusError& e) {
    std::cerr << "tibadv: " << e.what() << "\n";
    const std::string message = e.what();
    if (e.status() == TIBADV_IO_ERROR &&
        message.find("not found") != std::string::npos) {
      return kExitNoInput;
    }
    return ExitFor(e.status());
  } catch (const std::exception& e) {
    std::cerr << "tibadv: " << e.what() << "\n";
    return kExitSoftware;
  }
}

}  // namespace
}  // namespace tibadv_tools

int main(int argc, char** argv) { return tibadv_tools::Main(argc, argv); }
