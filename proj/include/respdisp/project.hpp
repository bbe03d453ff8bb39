#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "respdisp/analysis.hpp"
#include "respdisp/dispersion.hpp"
#include "respdisp/gateway/openai_client.hpp"
#include "respdisp/gateway/provider.hpp"
#include "respdisp/qa_bench.hpp"

namespace respdisp {

struct ModelEntry {
  std::string id;          // provider identifier, used in every file
  std::string short_name;  // used in human-facing tables
};

/// The model roster evaluated in the original study (OpenRouter ids).
const std::vector<ModelEntry>& default_roster();

/// Project directory layout:
///   project.json            configuration (optional)
///   responses/records.jsonl every chat exchange (opinion, trivia, grading)
///   responses/embeddings.jsonl remote embedding cache
///   dispersion/             dispersion.jsonl + summary.md
///   grades/                 grades.jsonl + accuracy_<grader>.jsonl
///   reports/                summary.md, categories.md, tolerance_curve.csv, use_case.json
///   manifests/              content-addressed collection manifests
struct ProjectConfig {
  std::filesystem::path root = ".";
  ProviderConfig chat;
  ProviderConfig embeddings{.base_url = "https://api.openai.com/v1", .api_key_env = "OPENAI_API_KEY"};
  std::vector<ModelEntry> models = default_roster();
  std::string judge_model = "gpt-4-1106-preview";
  std::vector<std::string> categories;
  std::size_t n_responses = 100;
  double variance_threshold = 0.95;
  VarianceConvention convention = VarianceConvention::squared;
  bool center_columns = false;
  std::vector<EmbeddingKind> embedding_kinds{EmbeddingKind::rss};
  std::vector<Grader> graders{Grader::substring, Grader::llm_judge};
  Grader accuracy_grader = Grader::llm_judge;
  std::optional<double> opinion_temperature;
  std::filesystem::path dataset;
  std::vector<double> tolerance_grid = default_tolerance_grid();
  std::uint64_t rng_seed = 0;
  std::size_t baseline_iterations = 100;

  std::filesystem::path records_file() const { return root / "responses" / "records.jsonl"; }
  std::filesystem::path embeddings_file() const { return root / "responses" / "embeddings.jsonl"; }
  std::filesystem::path dispersion_file() const { return root / "dispersion" / "dispersion.jsonl"; }
  std::filesystem::path grades_file() const { return root / "grades" / "grades.jsonl"; }
  std::filesystem::path accuracy_file(Grader grader) const;
  std::filesystem::path reports_dir() const { return root / "reports"; }
  std::filesystem::path manifests_dir() const { return root / "manifests"; }

  /// Short name from the roster, or the id itself.
  std::string short_name(const std::string& model_id) const;
  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Reads a JSON config; absent keys keep their defaults. `root` defaults to
/// the config file's directory. RESPDISP_CHAT_KEY_ENV / RESPDISP_EMBED_KEY_ENV
/// override the configured API-key variable names.
ProjectConfig load_project_config(const std::filesystem::path& file);

/// Chat/embedding backends for a run. Null members mean replay-only: every
/// answer must already be in the project's stores.
struct Providers {
  ChatProvider* chat = nullptr;
  EmbeddingProvider* embeddings = nullptr;
};

/// Outcome of a command: errors make the process exit nonzero, warnings do not.
struct CommandStatus {
  std::size_t errors = 0;
  std::size_t warnings = 0;
  std::uint64_t provider_calls = 0;
  std::vector<std::filesystem::path> outputs;
  void error(const std::string& message);
  void warn(const std::string& message);
  bool ok() const { return errors == 0; }
};

/// Opinion-prompt campaigns for every (model, category). Resumable: requests
/// already answered in the store are not re-sent. A failure of one
/// (model, category) does not stop the others.
CommandStatus cmd_collect(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models,
                          const std::vector<std::string>& categories);

/// One DispersionResult per (model, category, embedding kind) from the stored
/// opinion responses (seeds below n_responses).
CommandStatus cmd_dispersion(const ProjectConfig& config, Providers providers);

/// Collects trivia answers (seed 0, temperature 0) for the models, then
/// grades them (cmd_grade).
CommandStatus cmd_bench(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models);

/// Grades every stored trivia answer of the dataset with the configured
/// graders and writes grades and per-grader accuracy files.
CommandStatus cmd_grade(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models);

/// Writes the report bundle from the dispersion and accuracy files.
/// Byte-deterministic for fixed inputs and seed.
CommandStatus cmd_report(const ProjectConfig& config);

/// Converts and curates an upstream raw dataset into the JSONL schema and
/// prints the category audit.
CommandStatus cmd_curate(const std::filesystem::path& raw_input, const std::filesystem::path& output,
                         const std::string& answer_delimiters = "*");

std::string render_audit(const CategoryAudit& audit);

}  // namespace respdisp
