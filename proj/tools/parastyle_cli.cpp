// parastyle: run -> judge -> report pipeline for paralinguistic style
// adherence across multi-turn spoken dialogues.
//
// Exit codes: 0 success, 1 partial failures, 2 configuration error.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "parastyle/parastyle.hpp"

namespace ps = parastyle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  std::string manifest;
  std::string out;
  int workers = 4;
  std::string run_id;  // overrides the manifest
};

struct JudgeArgs {
  std::string run;
  std::string judges;
  bool rejudge = false;
  int workers = 0;  // 0: judge config value
};

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
  std::string format = "both";
};

struct ValidateArgs {
  std::string annotations;
  std::vector<std::string> judgments;
  std::string out;
};

struct GenArgs {
  std::string source;
  std::string out;
  std::string llm;
  std::string exclusions;
};

nlohmann::json read_spec(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
  return ps::read_json_file(arg);
}

int cmd_run(const RunArgs& a) {
  auto manifest = ps::load_manifest(a.manifest);
  if (!a.run_id.empty()) manifest.run_id = a.run_id;
  ps::RunStore store(a.out);
  if (store.has_manifest()) {
    const auto previous = store.manifest();
    if (previous.value("run_id", std::string()) != manifest.run_id)
      throw ps::Error(ps::ErrorKind::Config, "output directory belongs to run '" +
                                                 previous.value("run_id", std::string()) + "'");
  }

  // Preflight before any dialogue starts.
  auto first = ps::make_run_backends(manifest);
  try {
    first.model->ping();
    first.simulator->ping();
    if (first.asr) first.asr->ping();
  } catch (const ps::Error& e) {
    throw ps::Error(ps::ErrorKind::Config, std::string("preflight failed: ") + e.what());
  }
  store.save_manifest({{"run_id", manifest.run_id},
                       {"dataset_hash", manifest.dataset_hash},
                       {"model_id", first.model->id()},
                       {"dialogues", manifest.configs.size()},
                       {"manifest", manifest.source}});

  std::mutex mu;
  std::vector<ps::RunBackends> backends{first};
  bool first_taken = false;
  auto make_services = [&]() -> ps::DialogueServices {
    std::lock_guard lock(mu);
    if (!first_taken) {
      first_taken = true;
      return backends.front().services(manifest.simulator_sees_recall);
    }
    backends.push_back(ps::make_run_backends(manifest));
    return backends.back().services(manifest.simulator_sees_recall);
  };
  backends.reserve(static_cast<std::size_t>(std::max(1, a.workers)) + 1);
  std::atomic<int> done{0};
  const auto total = manifest.configs.size();
  auto summary = ps::run_all(manifest.configs, store, a.workers, make_services, [&](const ps::DialogueRecord& r) {
    const int n = ++done;
    std::fprintf(stderr, "[%d/%zu] %s %s\n", n, total, r.id().c_str(), std::string(ps::to_string(r.status)).c_str());
  });
  for (const auto& e : summary.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  std::printf("run %s: %d complete, %d partial failures, %d already finished\n", manifest.run_id.c_str(),
              summary.complete, summary.partial_failures, summary.skipped);
  return summary.partial_failures > 0 ? kExitPartial : kExitOk;
}

int cmd_judge(const JudgeArgs& a) {
  ps::RunStore store(a.run);
  if (!store.has_manifest()) throw ps::Error(ps::ErrorKind::Config, a.run + " has no manifest.json");
  const auto run_manifest = store.manifest();
  auto backends = ps::make_judge_backends(read_spec(a.judges), run_manifest.at("manifest").at("model"), store.root());
  if (backends.sidecar) backends.sidecar->pin();

  const auto ids = store.record_ids();
  if (ids.empty()) throw ps::Error(ps::ErrorKind::Config, "no dialogue records in " + a.run);
  std::vector<std::string> todo;
  for (const auto& id : ids) {
    if (!a.rejudge && store.load_judgments(id)) continue;
    todo.push_back(id);
  }
  // Refuse early when a needed backend is missing.
  for (const auto& id : todo) {
    const auto record = store.load(id);
    ps::require_backends(record->config.instruction.style, record->config.recall_enabled, backends.services);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> unavailable{0}, judged{0};
  std::mutex mu;
  std::vector<std::string> errors;
  auto work = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        const auto record = store.load(todo[i]);
        if (record->status == ps::DialogueStatus::InProgress) {
          std::lock_guard lock(mu);
          errors.push_back(todo[i] + ": dialogue still in progress");
          continue;
        }
        const auto j = ps::judge_dialogue(*record, backends.services);
        for (const auto& t : j.turns)
          if (!t.available()) ++unavailable;
        store.save_judgments(todo[i], ps::to_json(j));
        ++judged;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        errors.push_back(todo[i] + ": " + e.what());
      }
    }
  };
  const int workers = std::max(1, a.workers > 0 ? a.workers : backends.workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (backends.sidecar) backends.sidecar->pin();  // throws when versions moved mid-run

  for (const auto& e : errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  std::printf("judged %d dialogues, skipped %zu, %d unavailable turn judgments, %zu errors\n", judged.load(),
              ids.size() - todo.size(), unavailable.load(), errors.size());
  return errors.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const ReportArgs& a) {
  std::vector<ps::RunJudgments> runs;
  for (const auto& r : a.runs) runs.push_back(ps::load_run_judgments(r));
  const auto bundle = ps::build_report(runs);
  const auto written = ps::write_report(bundle, a.out, ps::parse_report_format(a.format));
  for (const auto& f : written) std::printf("%s\n", (ps::fs::path(a.out) / f).string().c_str());
  return kExitOk;
}

int cmd_validate(const ValidateArgs& a) {
  std::vector<ps::RunJudgments> runs;
  for (const auto& r : a.judgments) {
    ps::fs::path p(r);
    if (p.filename() == "judgments") p = p.parent_path();
    runs.push_back(ps::load_run_judgments(p));
  }
  const auto result = ps::validate_judges(a.annotations, runs);
  const auto csv = ps::agreement_csv(result);
  if (a.out.empty()) std::fputs(csv.c_str(), stdout);
  else ps::write_file_atomic(a.out, csv);
  for (const auto& row : result.rows)
    if (!row.kappa) std::fprintf(stderr, "task %s: kappa %s\n", row.task.c_str(), row.kappa_error.c_str());
  if (!result.unjoined.empty()) {
    std::fprintf(stderr, "%zu annotation items without a judgment:\n", result.unjoined.size());
    for (const auto& id : result.unjoined) std::fprintf(stderr, "  %s\n", id.c_str());
  }
  return kExitOk;
}

int cmd_gen_openers(const GenArgs& a) {
  auto llm = ps::make_llm(read_spec(a.llm));
  std::set<std::string> excluded;
  if (!a.exclusions.empty()) excluded = ps::load_exclusions(a.exclusions);
  const auto sources = ps::load_sources(a.source);
  std::string accepted, rejected;
  int n_ok = 0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& src = sources[i];
    if (excluded.count(src.source_id)) {
      rejected += nlohmann::json{{"source_id", src.source_id}, {"status", "rejected_manually"}}.dump() + "\n";
      continue;
    }
    const auto c = ps::generate_opener(src, *llm, i);
    if (const auto* ok = std::get_if<ps::Accepted>(&c.status)) {
      accepted += nlohmann::json{{"source_id", src.source_id}, {"text", ok->text}}.dump() + "\n";
      ++n_ok;
    } else {
      rejected += nlohmann::json{{"source_id", src.source_id}, {"status", "rejected_by_model"}}.dump() + "\n";
    }
  }
  ps::write_file_atomic(a.out, accepted);
  ps::write_file_atomic(a.out + ".rejected.jsonl", rejected);
  std::printf("%d accepted, %zu rejected\n", n_ok, sources.size() - static_cast<std::size_t>(n_ok));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-turn paralinguistic style adherence harness"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Execute every dialogue of a manifest");
  run_cmd->add_option("--manifest", run.manifest, "Run manifest (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Run directory")->required();
  run_cmd->add_option("--workers", run.workers, "Concurrent dialogues")->check(CLI::PositiveNumber);
  run_cmd->add_option("--run-id", run.run_id, "Override the manifest run_id");

  JudgeArgs judge;
  auto* judge_cmd = app.add_subcommand("judge", "Judge every persisted dialogue of a run");
  judge_cmd->add_option("--run", judge.run, "Run directory")->required()->check(CLI::ExistingDirectory);
  judge_cmd->add_option("--judges", judge.judges, "Judge config (JSON file or inline JSON)")->required();
  judge_cmd->add_flag("--rejudge", judge.rejudge, "Replace existing judgments");
  judge_cmd->add_option("--workers", judge.workers, "Concurrent dialogues");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Aggregate judgments into tables and plots");
  report_cmd->add_option("--runs", report.runs, "Run directories")->required()->expected(1, -1);
  report_cmd->add_option("--out", report.out, "Report directory")->required();
  report_cmd->add_option("--format", report.format, "table, plot or both")
      ->check(CLI::IsMember({"table", "plot", "both"}));

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate-judges", "Agreement between human annotations and judges");
  validate_cmd->add_option("--annotations", validate.annotations, "Annotation JSONL")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--judgments", validate.judgments, "Run or judgments directories")->required()->expected(1, -1);
  validate_cmd->add_option("--out", validate.out, "Write the agreement table here instead of stdout");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-openers", "Rewrite source dialogues into conversation openers");
  gen_cmd->add_option("--source", gen.source, "Source JSONL {source_id, narrative, first_utterance}")
      ->required()
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", gen.out, "Opener JSONL to write")->required();
  gen_cmd->add_option("--llm", gen.llm, "LLM spec (JSON file or inline JSON)")->default_val("{\"kind\":\"offline\"}");
  gen_cmd->add_option("--exclusions", gen.exclusions, "Source ids to drop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*judge_cmd) return cmd_judge(judge);
    if (*report_cmd) return cmd_report(report);
    if (*validate_cmd) return cmd_validate(validate);
    if (*gen_cmd) return cmd_gen_openers(gen);
  } catch (const ps::Error& e) {
    std::fprintf(stderr, "parastyle: %s error: %s\n", std::string(ps::to_string(e.kind())).c_str(), e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "parastyle: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
