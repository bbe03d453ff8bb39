#include "respdisp/project.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/campaign.hpp"
#include "respdisp/gateway/embedding_cache.hpp"
#include "respdisp/gateway/prompts.hpp"
#include "respdisp/gateway/record_store.hpp"
#include "respdisp/io.hpp"
#include "respdisp/jsonl.hpp"
#include "respdisp/report.hpp"
#include "respdisp/text.hpp"

namespace respdisp {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const std::vector<ModelEntry>& default_roster() {
  static const std::vector<ModelEntry> roster = {
      {"01-ai/yi-34b-chat", "Yi-34b"},
      {"anthropic/claude-3-opus", "Claude3-Opus"},
      {"codellama/codellama-70b-instruct", "Codellama-70b"},
      {"google/gemini-pro", "Gemini-Pro"},
      {"gpt-3.5-turbo-1106", "GPT-3.5"},
      {"gpt-4-1106-preview", "GPT-4"},
      {"meta-llama/llama-2-70b-chat", "Llama2-70b"},
      {"meta-llama/llama-3-70b-instruct:nitro", "Llama3-70b"},
      {"meta-llama/llama-3-8b-instruct:nitro", "Llama3-8b"},
      {"mistralai/mistral-7b-instruct", "Mistral-7bv0.1"},
      {"mistralai/mistral-7b-instruct:nitro", "Mistral-7bv0.2"},
      {"mistralai/mixtral-8x22b", "Mixtral-8x22b"},
      {"mistralai/mixtral-8x7b-instruct:nitro", "Mixtral-8x7b"},
  };
  return roster;
}

fs::path ProjectConfig::accuracy_file(Grader grader) const {
  return root / "grades" / ("accuracy_" + std::string(to_string(grader)) + ".jsonl");
}

std::string ProjectConfig::short_name(const std::string& model_id) const {
  for (const auto& m : models) {
    if (m.id == model_id) return m.short_name.empty() ? m.id : m.short_name;
  }
  return model_id;
}

void ProjectConfig::validate() const {
  if (n_responses < 2) throw ConfigError("n_responses must be at least 2");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw ConfigError("variance_threshold must lie in (0, 1]");
  }
  if (chat.max_concurrent < 1 || embeddings.max_concurrent < 1) throw ConfigError("max_concurrent must be >= 1");
  if (chat.retry_limit < 0 || embeddings.retry_limit < 0) throw ConfigError("retry_limit must be >= 0");
  if (embedding_kinds.empty()) throw ConfigError("at least one embedding kind is required");
  if (baseline_iterations == 0) throw ConfigError("baseline_iterations must be positive");
}

namespace {

void read_provider(const nlohmann::json& j, ProviderConfig& p) {
  p.base_url = j.value("base_url", p.base_url);
  p.api_key_env = j.value("api_key_env", p.api_key_env);
  p.max_concurrent = j.value("max_concurrent", p.max_concurrent);
  p.retry_limit = j.value("retry_limit", p.retry_limit);
  p.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", p.backoff_base.count()));
  p.timeout = std::chrono::seconds(j.value("timeout_s", p.timeout.count()));
  p.embedding_model = j.value("model", p.embedding_model);
  p.embedding_batch = j.value("batch_size", p.embedding_batch);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

fs::path write_manifest(const ProjectConfig& config, const ordered_json& manifest) {
  const std::string body = manifest.dump(2) + "\n";
  const fs::path path =
      config.manifests_dir() / (manifest.at("command").get<std::string>() + "-" + sha256_hex(body).substr(0, 16) + ".json");
  if (!fs::exists(path)) jsonl::write_file_atomic(path, body);
  return path;
}

std::vector<std::string> select_models(const ProjectConfig& config, const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  std::vector<std::string> ids;
  for (const auto& m : config.models) ids.push_back(m.id);
  return ids;
}

bool in_roster(const ProjectConfig& config, const std::string& model) {
  return std::any_of(config.models.begin(), config.models.end(), [&](const ModelEntry& m) { return m.id == model; });
}

}  // namespace

ProjectConfig load_project_config(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(jsonl::read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }

  ProjectConfig c;
  c.root = file.has_parent_path() ? file.parent_path() : fs::path(".");
  try {
    if (j.contains("root")) c.root = c.root / j.at("root").get<std::string>();
    if (j.contains("providers")) {
      const auto& p = j.at("providers");
      if (p.contains("chat")) read_provider(p.at("chat"), c.chat);
      if (p.contains("embeddings")) read_provider(p.at("embeddings"), c.embeddings);
    }
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) {
        if (m.is_string()) {
          const auto id = m.get<std::string>();
          const auto& roster = default_roster();
          const auto known = std::find_if(roster.begin(), roster.end(), [&](const ModelEntry& e) { return e.id == id; });
          c.models.push_back({id, known == roster.end() ? id : known->short_name});
        } else {
          c.models.push_back({m.at("id").get<std::string>(), m.value("short_name", m.at("id").get<std::string>())});
        }
      }
    }
    c.judge_model = j.value("judge_model", c.judge_model);
    c.categories = j.value("categories", c.categories);
    c.n_responses = j.value("n_responses", c.n_responses);
    c.variance_threshold = j.value("variance_threshold", c.variance_threshold);
    if (j.contains("variance_convention")) {
      const auto v = j.at("variance_convention").get<std::string>();
      if (v != "squared" && v != "raw") throw ConfigError("variance_convention must be squared or raw");
      c.convention = v == "raw" ? VarianceConvention::raw : VarianceConvention::squared;
    }
    c.center_columns = j.value("center_columns", c.center_columns);
    if (j.contains("embedding_kinds")) {
      c.embedding_kinds.clear();
      for (const auto& k : j.at("embedding_kinds")) {
        const auto kind = parse_embedding_kind(k.get<std::string>());
        if (!kind) throw ConfigError("unknown embedding kind " + k.dump());
        c.embedding_kinds.push_back(*kind);
      }
    }
    if (j.contains("graders")) {
      c.graders.clear();
      for (const auto& g : j.at("graders")) {
        const auto grader = parse_grader(g.get<std::string>());
        if (!grader || *grader == Grader::human) throw ConfigError("unknown automated grader " + g.dump());
        c.graders.push_back(*grader);
      }
    }
    if (j.contains("accuracy_grader")) {
      const auto grader = parse_grader(j.at("accuracy_grader").get<std::string>());
      if (!grader) throw ConfigError("unknown accuracy_grader");
      c.accuracy_grader = *grader;
    }
    if (j.contains("opinion_temperature") && !j.at("opinion_temperature").is_null()) {
      c.opinion_temperature = j.at("opinion_temperature").get<double>();
    }
    c.dataset = c.root / j.value("dataset", std::string("dataset.jsonl"));
    if (j.contains("tolerance_grid")) {
      const auto& g = j.at("tolerance_grid");
      c.tolerance_grid = g.is_string() ? parse_tolerance_grid(g.get<std::string>()) : g.get<std::vector<double>>();
    }
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.baseline_iterations = j.value("baseline_iterations", c.baseline_iterations);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }

  if (const char* env = std::getenv("RESPDISP_CHAT_KEY_ENV"); env && *env) c.chat.api_key_env = env;
  if (const char* env = std::getenv("RESPDISP_EMBED_KEY_ENV"); env && *env) c.embeddings.api_key_env = env;
  c.validate();
  return c;
}

void CommandStatus::error(const std::string& message) {
  ++errors;
  spdlog::error("{}", message);
}

void CommandStatus::warn(const std::string& message) {
  ++warnings;
  spdlog::warn("{}", message);
}

CommandStatus cmd_collect(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models,
                          const std::vector<std::string>& categories) {
  config.validate();
  CommandStatus status;
  const auto model_ids = select_models(config, models);
  const auto cats = categories.empty() ? config.categories : categories;
  if (cats.empty()) {
    status.error("collect: no categories given (config \"categories\" or --categories)");
    return status;
  }

  ordered_json manifest;
  manifest["command"] = "collect";
  manifest["prompt_kind"] = "opinion";
  manifest["prompt_template"] = std::string(kPromptTemplateVersion);
  manifest["prompt_template_sha256"] = sha256_hex(opinion_template());
  manifest["models"] = model_ids;
  manifest["categories"] = cats;
  manifest["n_responses"] = config.n_responses;
  manifest["seeds"] = fmt::format("0..{}", config.n_responses - 1);
  manifest["temperature"] = config.opinion_temperature ? ordered_json(*config.opinion_temperature) : ordered_json();
  manifest["chat_base_url"] = config.chat.base_url;
  status.outputs.push_back(write_manifest(config, manifest));

  RecordStore store(config.records_file());
  ReplayChatProvider replay(store);
  Collector collector(store, providers.chat ? *providers.chat : replay, config.chat.max_concurrent);

  for (const auto& model : model_ids) {
    if (!in_roster(config, model)) {
      status.error("collect: unknown model id \"" + model + "\" (not in the configured roster)");
      continue;
    }
    for (const auto& category : cats) {
      try {
        const auto records =
            collect_opinion_responses(collector, model, category, config.n_responses, config.opinion_temperature);
        const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok(); });
        if (failed > 0) ++status.warnings;
      } catch (const Error& e) {
        status.error(fmt::format("collect {} / {}: {}", model, category, e.what()));
      }
    }
  }
  status.provider_calls = collector.provider_calls();
  status.outputs.push_back(config.records_file());
  return status;
}

CommandStatus cmd_dispersion(const ProjectConfig& config, Providers providers) {
  config.validate();
  CommandStatus status;
  RecordStore store(config.records_file());

  std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
  for (const auto& r : store.snapshot()) {
    if (r.prompt_kind != PromptKind::opinion || r.seed >= config.n_responses) continue;
    auto& texts = groups[{r.model_id, r.category}];
    if (r.ok()) texts.push_back(r.response_text);
  }
  if (groups.empty()) {
    status.error("dispersion: no opinion responses in " + config.records_file().string());
    return status;
  }

  std::optional<CachingEmbeddingProvider> remote;
  if (std::find(config.embedding_kinds.begin(), config.embedding_kinds.end(), EmbeddingKind::remote) !=
      config.embedding_kinds.end()) {
    remote.emplace(config.embeddings_file(), config.embeddings.embedding_model, providers.embeddings);
  }

  DispersionOptions options;
  options.threshold = config.variance_threshold;
  options.convention = config.convention;
  options.center_columns = config.center_columns;

  std::vector<DispersionResult> results;
  for (const auto& [key, texts] : groups) {
    const auto& [model, category] = key;
    if (texts.size() < 2) {
      status.warn(fmt::format("dispersion {} / {}: only {} ok response(s); skipped", model, category, texts.size()));
      continue;
    }
    for (EmbeddingKind kind : config.embedding_kinds) {
      try {
        results.push_back(response_dispersion(texts, kind, options, model, category, remote ? &*remote : nullptr));
      } catch (const Error& e) {
        status.error(fmt::format("dispersion {} / {} ({}): {}", model, category, to_string(kind), e.what()));
      }
    }
  }

  write_dispersions(config.dispersion_file(), results);
  std::string md = "# Response dispersion\n\n| Model | Category | Embedding | Dispersion | Responses |\n|---|---|---|---:|---:|\n";
  for (const auto& r : results) {
    md += fmt::format("| {} | {} | {} | {} | {} |\n", config.short_name(r.model_id), r.category,
                      to_string(r.embedding_kind), r.count, r.n_responses);
  }
  const fs::path summary = config.dispersion_file().parent_path() / "summary.md";
  jsonl::write_file_atomic(summary, md);
  status.outputs = {config.dispersion_file(), summary};
  return status;
}

CommandStatus cmd_bench(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models) {
  config.validate();
  CommandStatus status;
  std::vector<TriviaItem> items;
  try {
    items = load_dataset(config.dataset);
  } catch (const Error& e) {
    status.error(std::string("bench: ") + e.what());
    return status;
  }

  {
    RecordStore store(config.records_file());
    ReplayChatProvider replay(store);
    Collector collector(store, providers.chat ? *providers.chat : replay, config.chat.max_concurrent);
    for (const auto& model : select_models(config, models)) {
      if (!in_roster(config, model)) {
        status.error("bench: unknown model id \"" + model + "\" (not in the configured roster)");
        continue;
      }
      const auto records = collect_answers(collector, model, items);
      const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok(); });
      if (failed > 0) status.warn(fmt::format("bench {}: {} trivia request(s) failed", model, failed));
    }
    status.provider_calls = collector.provider_calls();
  }

  CommandStatus graded = cmd_grade(config, providers, models);
  graded.errors += status.errors;
  graded.warnings += status.warnings;
  graded.provider_calls += status.provider_calls;
  return graded;
}

CommandStatus cmd_grade(const ProjectConfig& config, Providers providers, const std::vector<std::string>& models) {
  config.validate();
  CommandStatus status;
  std::vector<TriviaItem> items;
  try {
    items = load_dataset(config.dataset);
  } catch (const Error& e) {
    status.error(std::string("grade: ") + e.what());
    return status;
  }
  std::map<std::string, const TriviaItem*> by_id;
  for (const auto& item : items) by_id[item.id] = &item;

  std::set<std::string> wanted;
  for (const auto& m : select_models(config, models)) wanted.insert(m);

  RecordStore store(config.records_file());
  std::vector<ResponseRecord> answers;
  for (auto& r : store.snapshot()) {
    if (r.prompt_kind == PromptKind::trivia && r.ok() && wanted.contains(r.model_id) && r.question_id &&
        by_id.contains(*r.question_id)) {
      answers.push_back(std::move(r));
    }
  }
  if (answers.empty()) {
    status.error("grade: no trivia answers in " + config.records_file().string() + " (run bench first)");
    return status;
  }

  std::vector<GradeRecord> grades;
  auto add_grade = [&](const ResponseRecord& answer, Grader grader, Verdict verdict) {
    grades.push_back({*answer.question_id, answer.model_id, by_id.at(*answer.question_id)->category,
                      answer.response_text, grader, verdict});
  };

  for (Grader grader : config.graders) {
    if (grader == Grader::substring) {
      for (const auto& a : answers) add_grade(a, grader, grade_substring(by_id.at(*a.question_id)->answer_key, a.response_text));
    } else if (grader == Grader::llm_judge) {
      ReplayChatProvider replay(store);
      Collector judge(store, providers.chat ? *providers.chat : replay, config.chat.max_concurrent);
      std::vector<ResponseRecord> requests;
      std::vector<const ResponseRecord*> asked;
      for (const auto& a : answers) {
        if (text::trim(a.response_text).empty()) {
          add_grade(a, grader, Verdict::incorrect);
          continue;
        }
        requests.push_back(make_grading_request(config.judge_model, *by_id.at(*a.question_id), a.response_text, a.model_id));
        asked.push_back(&a);
      }
      const auto replies = judge.run(std::move(requests));
      for (std::size_t i = 0; i < replies.size(); ++i) {
        if (!replies[i].ok()) {
          status.error(fmt::format("grade: judge request failed for {} / {}", asked[i]->model_id, *asked[i]->question_id));
          continue;
        }
        try {
          add_grade(*asked[i], grader, parse_judge_reply(replies[i].response_text));
        } catch (const JudgeProtocolError& e) {
          status.error(fmt::format("grade {} / {}: {}", asked[i]->model_id, *asked[i]->question_id, e.what()));
        }
      }
      status.provider_calls += judge.provider_calls();
    }
  }

  std::sort(grades.begin(), grades.end(), [](const GradeRecord& a, const GradeRecord& b) {
    return std::tie(a.model_id, a.question_id, a.grader) < std::tie(b.model_id, b.question_id, b.grader);
  });
  write_grades(config.grades_file(), grades);
  status.outputs.push_back(config.grades_file());

  for (Grader grader : config.graders) {
    std::vector<CategoryAccuracy> rows;
    for (const auto& model : wanted) {
      auto acc = category_accuracy(grades, model, grader);
      rows.insert(rows.end(), acc.begin(), acc.end());
    }
    write_accuracies(config.accuracy_file(grader), rows);
    status.outputs.push_back(config.accuracy_file(grader));
  }

  // Agreement between the two automated graders, for the log.
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> verdicts;
  for (const auto& g : grades) {
    auto& v = verdicts[{g.model_id, g.question_id}];
    (g.grader == Grader::substring ? v.first : v.second) = g.verdict == Verdict::correct ? 2 : 1;
  }
  std::size_t both = 0, agree = 0;
  for (const auto& [key, v] : verdicts) {
    if (v.first && v.second) {
      ++both;
      if (v.first == v.second) ++agree;
    }
  }
  if (both > 0) spdlog::info("substring vs llm_judge agreement: {}/{} ({:.1f}%)", agree, both, 100.0 * agree / both);
  return status;
}

CommandStatus cmd_report(const ProjectConfig& config) {
  config.validate();
  CommandStatus status;
  const fs::path disp_file = config.dispersion_file();
  const fs::path acc_file = config.accuracy_file(config.accuracy_grader);
  for (const auto& f : {disp_file, acc_file}) {
    if (!fs::exists(f)) status.error("report: missing input " + f.string());
  }
  if (!status.ok()) return status;

  const auto dispersions = read_dispersions(disp_file);
  const auto accuracies = read_accuracies(acc_file);
  const UseCaseReport report =
      tolerance_curve(dispersions, accuracies, config.tolerance_grid, config.rng_seed, config.baseline_iterations);
  const auto tables = category_tables(dispersions, accuracies);

  ordered_json detail;
  detail["accuracy_grader"] = to_string(config.accuracy_grader);
  detail["rng_algorithm"] = report.rng_algorithm;
  detail["rng_seed"] = report.rng_seed;
  detail["iterations"] = report.iterations;
  auto series = [](const std::vector<CurvePoint>& curve) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : curve) {
      ordered_json point;
      point["tolerance"] = p.tolerance;
      point["mean"] = p.mean;
      ordered_json cats = ordered_json::object();
      for (const auto& c : p.categories) cats[c.category] = c.fraction;
      point["categories"] = cats;
      arr.push_back(point);
    }
    return arr;
  };
  for (const auto& [kind, curve] : report.dispersion) detail[std::string(to_string(kind))] = series(curve);
  detail["baseline"] = series(report.baseline);

  const fs::path dir = config.reports_dir();
  const std::vector<std::pair<fs::path, std::string>> bundle = {
      {dir / "summary.md", render_summary_markdown(report, tables, config.embeddings.embedding_model)},
      {dir / "categories.md", render_category_markdown(tables, [&](const std::string& id) { return config.short_name(id); })},
      {dir / "tolerance_curve.csv", curve_csv(report)},
      {dir / "use_case.json", detail.dump(2) + "\n"},
  };
  for (const auto& [path, content] : bundle) {
    jsonl::write_file_atomic(path, content);
    status.outputs.push_back(path);
  }
  return status;
}

std::string render_audit(const CategoryAudit& audit) {
  std::string out = "| Category | Observed | Reference | |\n|---|---:|---:|---|\n";
  for (const auto& row : audit.rows) {
    out += fmt::format("| {} | {} | {} | {} |\n", row.category, row.observed,
                       row.expected ? std::to_string(*row.expected) : std::string("-"),
                       row.mismatch() ? (row.expected ? "MISMATCH" : "UNKNOWN CATEGORY") : "ok");
  }
  out += fmt::format("\nTotal questions: {}\n", audit.total);
  return out;
}

CommandStatus cmd_curate(const fs::path& raw_input, const fs::path& output, const std::string& answer_delimiters) {
  CommandStatus status;
  std::vector<RawTriviaItem> raw;
  try {
    raw = parse_raw_dataset(jsonl::read_file(raw_input), answer_delimiters);
  } catch (const Error& e) {
    status.error(fmt::format("curate-dataset {}: {}", raw_input.string(), e.what()));
    return status;
  }
  const auto curated = curate_dataset(raw);
  if (curated.empty()) status.warn("curate-dataset: no items survived curation");
  write_dataset(output, curated);
  status.outputs.push_back(output);

  const auto audit = audit_categories(curated);
  fmt::print("{}", render_audit(audit));
  if (!audit.all_match()) status.warn("curated category counts differ from the reference table (flagged above)");
  return status;
}

}  // namespace respdisp
