#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "respdisp/gateway/provider.hpp"
#include "respdisp/jsonl.hpp"

namespace respdisp {

/// Embedding provider backed by an append-only JSONL cache
/// ({"model", "text", "embedding"} per line). Misses go to `upstream` in one
/// batch and are persisted before being returned. With no upstream the cache
/// is replay-only and a miss throws RequestError.
class CachingEmbeddingProvider : public EmbeddingProvider {
 public:
  CachingEmbeddingProvider(std::filesystem::path cache_file, std::string model, EmbeddingProvider* upstream);

  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

  std::size_t cached() const;
  std::size_t upstream_requests() const { return upstream_requests_; }

 private:
  std::string model_;
  EmbeddingProvider* upstream_;
  jsonl::Appender appender_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::vector<double>> cache_;
  std::size_t upstream_requests_ = 0;
};

}  // namespace respdisp
