#include "respdisp/gateway/embedding_cache.hpp"

#include <set>

#include <json.hpp>

#include "respdisp/errors.hpp"

namespace respdisp {

CachingEmbeddingProvider::CachingEmbeddingProvider(std::filesystem::path cache_file, std::string model,
                                                   EmbeddingProvider* upstream)
    : model_(std::move(model)), upstream_(upstream), appender_(std::move(cache_file)) {
  jsonl::for_each_line(appender_.path(), [this](std::string_view line, std::size_t line_no) {
    try {
      const auto j = nlohmann::json::parse(line);
      cache_[{j.at("model").get<std::string>(), j.at("text").get<std::string>()}] =
          j.at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(appender_.path().string() + ": " + e.what(), line_no);
    }
  });
}

std::size_t CachingEmbeddingProvider::cached() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::vector<std::vector<double>> CachingEmbeddingProvider::embed(std::span<const std::string> texts) {
  std::lock_guard lock(mutex_);

  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto& t : texts) {
    if (!cache_.contains({model_, t}) && seen.insert(t).second) missing.push_back(t);
  }

  if (!missing.empty()) {
    if (upstream_ == nullptr) {
      throw RequestError("replay miss: " + std::to_string(missing.size()) + " text(s) have no cached " + model_ +
                             " embedding (offline mode)",
                         0, 0);
    }
    ++upstream_requests_;
    auto rows = upstream_->embed(missing);
    if (rows.size() != missing.size()) {
      throw ProviderError("embedding provider returned " + std::to_string(rows.size()) + " rows for " +
                          std::to_string(missing.size()) + " texts");
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      nlohmann::ordered_json line;
      line["model"] = model_;
      line["text"] = missing[i];
      line["embedding"] = rows[i];
      appender_.append(line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
      cache_[{model_, missing[i]}] = std::move(rows[i]);
    }
  }

  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cache_.at({model_, t}));
  return out;
}

}  // namespace respdisp
