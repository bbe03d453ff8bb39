#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "respdisp/gateway/provider.hpp"

namespace respdisp {

struct ProviderConfig {
  std::string base_url = "https://openrouter.ai/api/v1";
  std::string api_key_env = "OPENROUTER_API_KEY";
  std::size_t max_concurrent = 4;
  int retry_limit = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::seconds timeout{120};
  /// Model used by the embeddings endpoint.
  std::string embedding_model = "text-embedding-3-large";
  /// Inputs per embeddings request.
  std::size_t embedding_batch = 256;
};

/// Client for OpenAI-style `/chat/completions` and `/embeddings` endpoints
/// (OpenAI, OpenRouter, local servers). Stateless apart from counters, so one
/// instance can serve many threads.
///
/// 429, 5xx and transport failures are retried up to `retry_limit` times; the
/// k-th retry waits `backoff_base * 2^(k-1)`. Other statuses fail at once.
/// The API key is read from the environment variable named in the config;
/// without one no Authorization header is sent.
class OpenAiCompatibleClient : public ChatProvider, public EmbeddingProvider {
 public:
  explicit OpenAiCompatibleClient(ProviderConfig config);

  std::string complete(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

  nlohmann::json chat_payload(const ChatRequest& request) const;

  /// Total HTTP attempts made, retries included.
  std::uint64_t attempts() const { return attempts_.load(); }
  const ProviderConfig& config() const { return config_; }

 private:
  nlohmann::json post_json(std::string_view endpoint, const nlohmann::json& body);

  ProviderConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. /api/v1
  std::string api_key_;
  std::atomic<std::uint64_t> attempts_{0};
};

}  // namespace respdisp
