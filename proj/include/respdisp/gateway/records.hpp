#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace respdisp {

enum class PromptKind { opinion, trivia, grading };
enum class RecordStatus { ok, failed };

std::string_view to_string(PromptKind kind);
std::string_view to_string(RecordStatus status);
std::optional<PromptKind> parse_prompt_kind(std::string_view name);

/// One seeded generation with its full provenance. Persisted one per line in
/// the response store.
struct ResponseRecord {
  std::string model_id;
  PromptKind prompt_kind = PromptKind::opinion;
  std::string category;
  std::optional<std::string> question_id;  // trivia/grading only
  std::uint64_t seed = 0;
  std::optional<double> temperature;  // nullopt: provider default
  std::string prompt;
  std::string response_text;  // empty unless status == ok
  RecordStatus status = RecordStatus::ok;
  std::string timestamp;  // ISO 8601 UTC, excluded from determinism checks

  bool ok() const { return status == RecordStatus::ok; }
};

/// Identity of a record within a campaign: opinion records are scoped by
/// category, trivia and grading records by question id.
struct RecordKey {
  std::string model_id;
  PromptKind prompt_kind = PromptKind::opinion;
  std::string scope;
  std::uint64_t seed = 0;

  friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

RecordKey key_of(const ResponseRecord& record);

/// True when `stored` answers the same request as `wanted` (same key, prompt
/// and temperature).
bool same_request(const ResponseRecord& stored, const ResponseRecord& wanted);

/// Serializes with the fixed key order model_id, prompt_kind, category,
/// question_id, seed, temperature, prompt, response_text, status, timestamp.
/// No trailing newline.
std::string to_jsonl(const ResponseRecord& record);

/// Throws ParseError (line 0; callers add their own line numbers).
ResponseRecord record_from_jsonl(std::string_view line);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace respdisp
