#include "respdisp/gateway/record_store.hpp"

#include "respdisp/errors.hpp"

namespace respdisp {

RecordStore::RecordStore(std::filesystem::path path) : appender_(std::move(path)) {
  jsonl::for_each_line(appender_.path(), [this](std::string_view line, std::size_t line_no) {
    try {
      index(record_from_jsonl(line));
    } catch (const ParseError& e) {
      throw ParseError(appender_.path().string() + ": " + e.what(), line_no);
    }
  });
}

void RecordStore::index(ResponseRecord record) {
  RecordKey key = key_of(record);
  if (record.ok()) {
    by_request_[RequestKey{record.model_id, record.prompt, record.seed, record.temperature}] = key;
  }
  latest_.insert_or_assign(std::move(key), std::move(record));
}

void RecordStore::append(const ResponseRecord& record) {
  const std::string line = to_jsonl(record);
  std::lock_guard lock(mutex_);
  appender_.append(line);
  ++appended_;
  index(record);
}

std::optional<ResponseRecord> RecordStore::find(const RecordKey& key) const {
  std::lock_guard lock(mutex_);
  const auto it = latest_.find(key);
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

std::optional<ResponseRecord> RecordStore::find_completion(const std::string& model_id, const std::string& prompt,
                                                           std::uint64_t seed,
                                                           std::optional<double> temperature) const {
  std::lock_guard lock(mutex_);
  const auto it = by_request_.find(RequestKey{model_id, prompt, seed, temperature});
  if (it == by_request_.end()) return std::nullopt;
  const auto rec = latest_.find(it->second);
  if (rec == latest_.end() || !rec->second.ok() || rec->second.prompt != prompt ||
      rec->second.temperature != temperature) return std::nullopt;
  return rec->second;
}

std::vector<ResponseRecord> RecordStore::snapshot() const {
  std::lock_guard lock(mutex_);
  std::vector<ResponseRecord> out;
  out.reserve(latest_.size());
  for (const auto& [key, record] : latest_) out.push_back(record);
  return out;
}

std::size_t RecordStore::size() const {
  std::lock_guard lock(mutex_);
  return latest_.size();
}

std::size_t RecordStore::appended_count() const {
  std::lock_guard lock(mutex_);
  return appended_;
}

}  // namespace respdisp
