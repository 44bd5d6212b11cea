// vislint: guideline linter and evaluation harness for scientific diagrams.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vislint/catalog.hpp"
#include "vislint/dataset.hpp"
#include "vislint/errors.hpp"
#include "vislint/experiment.hpp"
#include "vislint/lint_report.hpp"
#include "vislint/vlm_client.hpp"

namespace fs = std::filesystem;
using namespace vislint;

namespace {

constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

struct BackendOptions {
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::string mock;
  std::string decode_mode = "server-default";
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 512;
  int timeout = 120;
  int max_retries = 3;
};

struct RunOptions {
  std::vector<std::string> strategies{"individual"};
  std::string exemplars;
  std::string thresholds;
  std::string invalid_policy = "penalize";
  std::size_t parallelism = 4;
  bool chart_specific = false;
};

void add_backend_options(CLI::App* app, BackendOptions& o) {
  app->add_option("--endpoint", o.endpoint, "Chat-completions base URL, e.g. http://localhost:8000/v1");
  app->add_option("--model", o.model, "Model name sent to the endpoint and recorded in results");
  app->add_option("--api-key", o.api_key, "API key (default: $VISLINT_API_KEY)");
  app->add_option("--mock", o.mock, "Scripted replies (JSON) instead of a live endpoint");
  app->add_option("--decode-mode", o.decode_mode, "server-default or sampling")
      ->check(CLI::IsMember({"server-default", "sampling"}));
  app->add_option("--temperature", o.temperature, "Sampling temperature (sampling mode)");
  app->add_option("--top-p", o.top_p, "Nucleus mass (sampling mode)");
  app->add_option("--max-tokens", o.max_tokens, "Reply token limit");
  app->add_option("--timeout", o.timeout, "Per-request timeout in seconds");
  app->add_option("--max-retries", o.max_retries, "Retries on transport/5xx errors (0-5)")->check(CLI::Range(0, 5));
}

void add_run_options(CLI::App* app, RunOptions& o, bool many_strategies) {
  auto* s = app->add_option("--strategy", o.strategies,
                            many_strategies ? "Prompting strategies; repeat to compare" : "Prompting strategy");
  s->check(CLI::IsMember({"individual", "context", "elaborate", "summary", "intro", "fewshot"}));
  if (!many_strategies) s->expected(1);
  app->add_option("--exemplars", o.exemplars, "Few-shot exemplars: JSON array of {question_id, image, answer}");
  app->add_option("--thresholds", o.thresholds, "JSON with max_lines, max_colors, max_legend_groups");
  app->add_option("--invalid-policy", o.invalid_policy, "penalize or drop invalid classification answers")
      ->check(CLI::IsMember({"penalize", "drop"}));
  app->add_option("--parallelism", o.parallelism, "Images processed concurrently")->check(CLI::PositiveNumber);
  app->add_flag("--chart-specific", o.chart_specific, "Model has no system role");
}

std::unique_ptr<ChatBackend> make_backend(const BackendOptions& o, std::string& model_name) {
  if (!o.mock.empty()) {
    model_name = o.model.empty() ? "mock" : o.model;
    return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(o.mock));
  }
  if (o.endpoint.empty() || o.model.empty()) throw PreconditionError("either --mock or both --endpoint and --model are required");
  ModelConfig cfg;
  cfg.endpoint_url = o.endpoint;
  cfg.model_name = o.model;
  if (!o.api_key.empty()) cfg.api_key = o.api_key;
  apply_api_key_env(cfg);
  cfg.decode_mode = decode_mode_from_name(o.decode_mode);
  cfg.temperature = o.temperature;
  cfg.top_p = o.top_p;
  cfg.max_tokens = o.max_tokens;
  cfg.timeout = std::chrono::seconds(o.timeout);
  cfg.max_retries = o.max_retries;
  model_name = o.model;
  return std::make_unique<LiveClient>(cfg);
}

RunConfig make_run_config(const RunOptions& o, Strategy strategy, const std::string& model_name) {
  RunConfig cfg;
  cfg.strategy = strategy;
  cfg.model_name = model_name;
  cfg.parallelism = o.parallelism;
  cfg.plan_options.chart_specific_mode = o.chart_specific;
  cfg.invalid_policy = invalid_policy_from_name(o.invalid_policy);
  if (!o.thresholds.empty()) cfg.thresholds = load_thresholds(o.thresholds);
  if (strategy == Strategy::few_shot) {
    if (o.exemplars.empty()) throw MissingExemplars("--strategy fewshot needs --exemplars");
    cfg.exemplars = load_exemplars(o.exemplars);
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string extension(Format f) { return f == Format::json ? ".json" : ".md"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vislint - check scientific diagrams against visualization guidelines with a vision-language model"};
  app.require_subcommand(1);

  // catalog
  bool catalog_as_json = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "Print the guideline questions");
  catalog_cmd->add_flag("--json", catalog_as_json, "Emit JSON");

  // lint
  BackendOptions lint_backend;
  RunOptions lint_run;
  std::string lint_image_path, lint_manifest, lint_out, lint_format = "markdown", lint_image_id;
  bool strict = false;
  auto* lint_cmd = app.add_subcommand("lint", "Lint one image or every image of a manifest");
  lint_cmd->add_option("--image", lint_image_path, "Image to lint (PNG or JPEG)");
  lint_cmd->add_option("--image-id", lint_image_id, "Id for --image (default: file stem)");
  lint_cmd->add_option("--manifest", lint_manifest, "Manifest with diagram types and exclusion flags");
  lint_cmd->add_option("--out", lint_out, "Output directory (default: print to stdout)");
  lint_cmd->add_option("--format", lint_format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
  lint_cmd->add_flag("--strict", strict, "Exit 1 when any violation is found");
  add_backend_options(lint_cmd, lint_backend);
  add_run_options(lint_cmd, lint_run, false);

  // experiment
  BackendOptions exp_backend;
  RunOptions exp_run;
  std::string exp_manifest, exp_out = "vislint-out", exp_format = "markdown";
  auto* exp_cmd = app.add_subcommand("experiment", "Run strategies over an annotated manifest and score them");
  exp_cmd->add_option("--manifest", exp_manifest, "Annotated manifest (JSON)")->required();
  exp_cmd->add_option("--out", exp_out, "Output directory for answers.jsonl and reports");
  exp_cmd->add_option("--format", exp_format, "Summary printed to stdout: json or markdown")
      ->check(CLI::IsMember({"json", "markdown"}));
  add_backend_options(exp_cmd, exp_backend);
  add_run_options(exp_cmd, exp_run, true);

  // evaluate
  std::string eval_manifest, eval_predictions, eval_out, eval_format = "markdown", eval_policy = "penalize";
  std::vector<std::string> eval_strategies, eval_models;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a logged run (answers.jsonl) against a manifest");
  eval_cmd->add_option("--manifest", eval_manifest, "Annotated manifest (JSON)")->required();
  eval_cmd->add_option("--predictions", eval_predictions, "answers.jsonl written by experiment")->required();
  eval_cmd->add_option("--strategy", eval_strategies, "Restrict to these strategies (default: all logged)");
  eval_cmd->add_option("--model", eval_models, "Restrict to these models (default: all logged)");
  eval_cmd->add_option("--out", eval_out, "Write reports into this directory");
  eval_cmd->add_option("--format", eval_format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
  eval_cmd->add_option("--invalid-policy", eval_policy, "penalize or drop")->check(CLI::IsMember({"penalize", "drop"}));

  // sample
  std::string sample_manifest, sample_plan, sample_out;
  std::optional<std::uint64_t> sample_seed;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a stratified sample from a pool manifest");
  sample_cmd->add_option("--manifest", sample_manifest, "Pool manifest (JSON)")->required();
  sample_cmd->add_option("--plan", sample_plan, "Sample plan JSON (default: the 1010-image plan)");
  sample_cmd->add_option("--seed", sample_seed, "Override the plan's seed");
  sample_cmd->add_option("--out", sample_out, "Output manifest (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (catalog_cmd->parsed()) {
      if (catalog_as_json) {
        std::cout << catalog_json() << '\n';
      } else {
        for (const auto& q : catalog()) std::cout << q.id << ". [" << to_string(q.kind) << "] " << q.text << '\n';
      }
      return 0;
    }

    if (sample_cmd->parsed()) {
      auto pool = load_manifest(sample_manifest, TypeMode::ingestion);
      auto plan = sample_plan.empty() ? default_sample_plan() : load_sample_plan(sample_plan);
      if (sample_seed) plan.seed = *sample_seed;
      const auto sampled = stratified_sample(pool, plan);
      const std::string text = manifest_to_json(sampled).dump(2);
      if (sample_out.empty()) {
        std::cout << text << '\n';
      } else {
        write_file(sample_out, text);
        std::cerr << "sampled " << sampled.size() << " records into " << sample_out << '\n';
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      const auto records = load_manifest(eval_manifest);
      const auto rows = load_answers(eval_predictions);
      std::set<std::pair<std::string, std::string>> runs;
      for (const auto& r : rows) {
        const bool s_ok = eval_strategies.empty() ||
                          std::find(eval_strategies.begin(), eval_strategies.end(), r.strategy) != eval_strategies.end();
        const bool m_ok = eval_models.empty() || std::find(eval_models.begin(), eval_models.end(), r.model) != eval_models.end();
        if (s_ok && m_ok) runs.emplace(r.strategy, r.model);
      }
      if (runs.empty()) throw Error("no logged answers match the requested strategies/models");
      const auto fmt = format_from_name(eval_format);
      std::vector<AggregateReport> reports;
      for (const auto& [strategy, model] : runs) {
        reports.push_back(evaluate_answers(rows, records, strategy_from_name(strategy), model,
                                           invalid_policy_from_name(eval_policy)));
        if (!eval_out.empty()) {
          write_file(fs::path(eval_out) / ("report_" + strategy + "_" + model + extension(fmt)),
                     render(reports.back(), fmt));
        }
      }
      const std::string text = reports.size() == 1 ? render(reports.front(), fmt) : render_comparison(reports, fmt);
      if (!eval_out.empty()) write_file(fs::path(eval_out) / ("evaluation" + extension(fmt)), text);
      std::cout << text << '\n';
      return 0;
    }

    if (exp_cmd->parsed()) {
      const auto records = load_manifest(exp_manifest);
      std::string model_name;
      auto backend = make_backend(exp_backend, model_name);
      const fs::path out_dir = exp_out;
      const auto fmt = format_from_name(exp_format);
      std::vector<AggregateReport> reports;
      std::size_t error_count = 0;
      for (const auto& name : exp_run.strategies) {
        const auto cfg = make_run_config(exp_run, strategy_from_name(name), model_name);
        auto result = run_experiment(cfg, *backend, records, out_dir / "answers.jsonl");
        std::cerr << name << ": " << result.scripts_run << " conversations run, " << result.scripts_reused
                  << " replayed from the log, " << result.errors.size() << " failed\n";
        for (const auto& e : result.errors) std::cerr << "  " << e << '\n';
        error_count += result.errors.size();
        write_file(out_dir / ("report_" + name + ".json"), render(result.report, Format::json));
        write_file(out_dir / ("report_" + name + ".md"), render(result.report, Format::markdown));
        reports.push_back(std::move(result.report));
      }
      if (reports.size() > 1) {
        write_file(out_dir / "comparison.md", render_comparison(reports, Format::markdown));
        write_file(out_dir / "comparison.json", render_comparison(reports, Format::json));
        std::cout << render_comparison(reports, fmt) << '\n';
      } else {
        std::cout << render(reports.front(), fmt) << '\n';
      }
      return error_count == 0 ? 0 : kExitFindings;
    }

    if (lint_cmd->parsed()) {
      if (lint_image_path.empty() && lint_manifest.empty()) throw PreconditionError("lint needs --image or --manifest");
      std::string model_name;
      auto backend = make_backend(lint_backend, model_name);
      const auto cfg = make_run_config(lint_run, strategy_from_name(lint_run.strategies.front()), model_name);
      const auto fmt = format_from_name(lint_format);

      std::vector<LintReport> reports;
      if (!lint_image_path.empty()) {
        const std::string id = lint_image_id.empty() ? fs::path(lint_image_path).stem().string() : lint_image_id;
        std::optional<ImagePayload> image;
        if (backend->needs_image_bytes()) image = load_image(lint_image_path);
        std::optional<AnnotationRecord> record;
        if (!lint_manifest.empty()) {
          for (auto& r : load_manifest(lint_manifest)) {
            if (r.image_id == id) record = std::move(r);
          }
          if (!record) throw MissingGroundTruth({id});
        }
        reports.push_back(lint_image(id, image, *backend, cfg, record ? &*record : nullptr));
      } else {
        const auto records = load_manifest(lint_manifest);
        const fs::path log = lint_out.empty() ? fs::temp_directory_path() / "vislint-lint-answers.jsonl"
                                              : fs::path(lint_out) / "answers.jsonl";
        if (lint_out.empty()) fs::remove(log);
        reports = run_experiment(cfg, *backend, records, log).lint_reports;
        if (lint_out.empty()) fs::remove(log);
      }

      bool errors = false, violations = false;
      for (const auto& r : reports) {
        errors = errors || !r.errors.empty();
        violations = violations || r.has_violation();
        if (lint_out.empty()) {
          std::cout << render(r, fmt) << '\n';
        } else {
          write_file(fs::path(lint_out) / (r.image_id + extension(fmt)), render(r, fmt));
        }
      }
      return (errors || (strict && violations)) ? kExitFindings : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "vislint: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
