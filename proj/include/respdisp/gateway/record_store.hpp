#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "respdisp/gateway/records.hpp"
#include "respdisp/jsonl.hpp"

namespace respdisp {

/// Append-only JSONL store of ResponseRecords. When a key occurs more than
/// once the last line wins (a failed request retried on a later run).
/// Thread-safe.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path path);

  /// Persists the record (flushed) before returning.
  void append(const ResponseRecord& record);

  std::optional<ResponseRecord> find(const RecordKey& key) const;

  /// Latest ok record answering exactly this request, if any.
  std::optional<ResponseRecord> find_completion(const std::string& model_id, const std::string& prompt,
                                                std::uint64_t seed, std::optional<double> temperature) const;

  /// Latest record per key, ordered by key.
  std::vector<ResponseRecord> snapshot() const;

  std::size_t size() const;
  std::size_t appended_count() const;
  const std::filesystem::path& path() const { return appender_.path(); }

 private:
  using RequestKey = std::tuple<std::string, std::string, std::uint64_t, std::optional<double>>;
  void index(ResponseRecord record);

  jsonl::Appender appender_;
  mutable std::mutex mutex_;
  std::map<RecordKey, ResponseRecord> latest_;
  std::map<RequestKey, RecordKey> by_request_;
  std::size_t appended_ = 0;
};

}  // namespace respdisp
