#include "respdisp/gateway/records.hpp"

#include <chrono>
#include <ctime>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "respdisp/errors.hpp"

namespace respdisp {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::opinion: return "opinion";
    case PromptKind::trivia: return "trivia";
    case PromptKind::grading: return "grading";
  }
  return "opinion";
}

std::string_view to_string(RecordStatus status) { return status == RecordStatus::ok ? "ok" : "failed"; }

std::optional<PromptKind> parse_prompt_kind(std::string_view name) {
  if (name == "opinion") return PromptKind::opinion;
  if (name == "trivia") return PromptKind::trivia;
  if (name == "grading") return PromptKind::grading;
  return std::nullopt;
}

RecordKey key_of(const ResponseRecord& record) {
  RecordKey key;
  key.model_id = record.model_id;
  key.prompt_kind = record.prompt_kind;
  key.scope = record.prompt_kind == PromptKind::opinion ? record.category : record.question_id.value_or("");
  key.seed = record.seed;
  return key;
}

bool same_request(const ResponseRecord& stored, const ResponseRecord& wanted) {
  return key_of(stored) == key_of(wanted) && stored.prompt == wanted.prompt &&
         stored.temperature == wanted.temperature;
}

std::string to_jsonl(const ResponseRecord& r) {
  ordered_json j;
  j["model_id"] = r.model_id;
  j["prompt_kind"] = to_string(r.prompt_kind);
  j["category"] = r.category;
  j["question_id"] = r.question_id ? ordered_json(*r.question_id) : ordered_json(nullptr);
  j["seed"] = r.seed;
  j["temperature"] = r.temperature ? ordered_json(*r.temperature) : ordered_json(nullptr);
  j["prompt"] = r.prompt;
  j["response_text"] = r.ok() ? ordered_json(r.response_text) : ordered_json(nullptr);
  j["status"] = to_string(r.status);
  j["timestamp"] = r.timestamp;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ResponseRecord record_from_jsonl(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  try {
    ResponseRecord r;
    r.model_id = j.at("model_id").get<std::string>();
    const auto kind = parse_prompt_kind(j.at("prompt_kind").get<std::string>());
    if (!kind) throw ParseError("unknown prompt_kind", 0);
    r.prompt_kind = *kind;
    r.category = j.at("category").get<std::string>();
    if (const auto& q = j.at("question_id"); !q.is_null()) r.question_id = q.get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (const auto& t = j.at("temperature"); !t.is_null()) r.temperature = t.get<double>();
    r.prompt = j.at("prompt").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.status = RecordStatus::ok;
    } else if (status == "failed") {
      r.status = RecordStatus::failed;
    } else {
      throw ParseError("unknown status \"" + status + "\"", 0);
    }
    if (const auto& text = j.at("response_text"); !text.is_null()) r.response_text = text.get<std::string>();
    if (r.ok() && j.at("response_text").is_null()) throw ParseError("ok record without response_text", 0);
    r.timestamp = j.value("timestamp", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed response record: ") + e.what(), 0);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace respdisp
