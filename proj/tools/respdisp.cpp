// respdisp: collect LLM responses, compute response dispersion, benchmark
// trivia accuracy and report how well dispersion picks the better model.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/openai_client.hpp"
#include "respdisp/project.hpp"

namespace fs = std::filesystem;
using namespace respdisp;

namespace {

void setup_logging(const fs::path& project, bool verbose) {
  std::vector<spdlog::sink_ptr> sinks;
  auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  console->set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  sinks.push_back(console);
  std::error_code ec;
  fs::create_directories(project / "logs", ec);
  if (!ec) {
    auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>((project / "logs" / "respdisp.log").string());
    file->set_level(spdlog::level::debug);
    sinks.push_back(file);
  }
  auto logger = std::make_shared<spdlog::logger>("respdisp", sinks.begin(), sinks.end());
  logger->set_level(spdlog::level::debug);
  spdlog::set_default_logger(logger);
}

ProjectConfig load_config(const fs::path& project, const std::optional<fs::path>& config_file) {
  if (config_file) return load_project_config(*config_file);
  if (fs::exists(project / "project.json")) return load_project_config(project / "project.json");
  ProjectConfig config;
  config.root = project;
  config.dataset = project / "dataset.jsonl";
  return config;
}

void report(const std::string& command, const CommandStatus& status) {
  for (const auto& out : status.outputs) spdlog::info("{}: wrote {}", command, out.string());
  spdlog::info("{}: {} error(s), {} warning(s), {} provider call(s)", command, status.errors, status.warnings,
               status.provider_calls);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Response dispersion toolkit"};
  app.require_subcommand(1);

  fs::path project = ".";
  std::optional<fs::path> config_file;
  bool offline = false;
  bool verbose = false;
  app.add_option("--project", project, "Project directory")->capture_default_str();
  app.add_option("--config", config_file, "Config file (default: <project>/project.json when present)");
  app.add_flag("--offline", offline, "Replay stored responses only; never contact a provider");
  app.add_flag("-v,--verbose", verbose, "Debug logging on stderr");

  std::vector<std::string> models, categories;
  std::optional<std::size_t> n;
  std::optional<double> threshold;
  std::vector<std::string> embeddings;
  std::optional<std::string> tolerance_grid;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> dataset;

  auto* collect = app.add_subcommand("collect", "Sample opinion-prompt responses");
  collect->add_option("--models", models, "Model ids (comma separated; default: roster)")->delimiter(',');
  collect->add_option("--categories", categories, "Categories (comma separated; default: config)")->delimiter(',');
  collect->add_option("--n", n, "Responses per (model, category)");

  auto* dispersion = app.add_subcommand("dispersion", "Compute response dispersion from stored responses");
  dispersion->add_option("--n", n, "Use responses with seed below n");
  dispersion->add_option("--threshold", threshold, "Explained-variance threshold in (0, 1]");
  dispersion->add_option("--embedding", embeddings, "rss and/or remote (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"rss", "remote"}));

  auto* bench = app.add_subcommand("bench", "Answer the trivia dataset and grade the answers");
  bench->add_option("--models", models, "Model ids (comma separated; default: roster)")->delimiter(',');
  bench->add_option("--dataset", dataset, "Curated dataset (JSONL)");

  auto* grade = app.add_subcommand("grade", "Grade stored trivia answers");
  grade->add_option("--models", models, "Model ids (comma separated; default: roster)")->delimiter(',');
  grade->add_option("--dataset", dataset, "Curated dataset (JSONL)");

  auto* rep = app.add_subcommand("report", "Write the use-case report bundle");
  rep->add_option("--tolerance-grid", tolerance_grid, "\"a,b,c\" or \"start:stop:step\"");
  rep->add_option("--seed", seed, "Seed for the random-choice baseline");

  fs::path raw_input, curated_output;
  std::string delimiters = "*";
  auto* curate = app.add_subcommand("curate-dataset", "Convert and curate the upstream trivia file");
  curate->add_option("input", raw_input, "Upstream text file")->required()->check(CLI::ExistingFile);
  curate->add_option("output", curated_output, "Curated JSONL output")->required();
  curate->add_option("--delimiters", delimiters, "Answer delimiter characters")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  setup_logging(project, verbose);

  try {
    if (curate->parsed()) {
      const auto status = cmd_curate(raw_input, curated_output, delimiters);
      report("curate-dataset", status);
      return status.ok() ? EXIT_SUCCESS : EXIT_FAILURE;
    }

    ProjectConfig config = load_config(project, config_file);
    if (n) config.n_responses = *n;
    if (threshold) config.variance_threshold = *threshold;
    if (!embeddings.empty()) {
      config.embedding_kinds.clear();
      for (const auto& e : embeddings) config.embedding_kinds.push_back(*parse_embedding_kind(e));
    }
    if (tolerance_grid) config.tolerance_grid = parse_tolerance_grid(*tolerance_grid);
    if (seed) config.rng_seed = *seed;
    if (dataset) config.dataset = *dataset;
    config.validate();

    std::unique_ptr<OpenAiCompatibleClient> chat, embed;
    Providers providers;
    if (!offline) {
      chat = std::make_unique<OpenAiCompatibleClient>(config.chat);
      embed = std::make_unique<OpenAiCompatibleClient>(config.embeddings);
      providers = {chat.get(), embed.get()};
    }

    CommandStatus status;
    std::string name = app.get_subcommands().front()->get_name();
    if (collect->parsed()) status = cmd_collect(config, providers, models, categories);
    if (dispersion->parsed()) status = cmd_dispersion(config, providers);
    if (bench->parsed()) status = cmd_bench(config, providers, models);
    if (grade->parsed()) status = cmd_grade(config, providers, models);
    if (rep->parsed()) status = cmd_report(config);
    report(name, status);
    return status.ok() ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return EXIT_FAILURE;
  }
}
