#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "respdisp/gateway/openai_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"

namespace respdisp {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

OpenAiCompatibleClient::OpenAiCompatibleClient(ProviderConfig config) : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();

  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr) api_key_ = key;
  }
  if (api_key_.empty()) spdlog::debug("no API key in ${}; requests to {} are unauthenticated", config_.api_key_env, origin_);
}

nlohmann::json OpenAiCompatibleClient::chat_payload(const ChatRequest& request) const {
  nlohmann::json body = {
      {"model", request.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"seed", request.seed},
  };
  if (request.temperature) body["temperature"] = *request.temperature;
  return body;
}

nlohmann::json OpenAiCompatibleClient::post_json(std::string_view endpoint, const nlohmann::json& body) {
  const std::string path = path_prefix_ + std::string(endpoint);
  const std::string payload = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  int last_status = 0;
  std::string last_error;
  const int max_attempts = config_.retry_limit + 1;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempt - 1)));
    ++attempts_;

    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count());
    client.set_read_timeout(config_.timeout.count());
    client.set_write_timeout(config_.timeout.count());
    if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);

    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      spdlog::info("POST {}{} attempt {}/{}: transport error: {}", origin_, path, attempt + 1, max_attempts, last_error);
      continue;
    }
    spdlog::info("POST {}{} attempt {}/{}: HTTP {}", origin_, path, attempt + 1, max_attempts, res->status);
    if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("response body is not JSON: ") + e.what());
      }
    }
    last_status = res->status;
    last_error = res->body.substr(0, 300);
    if (!retryable(res->status)) {
      throw RequestError("HTTP " + std::to_string(res->status) + " from " + path + ": " + last_error, res->status,
                         attempt + 1);
    }
  }
  throw RequestError("request to " + path + " failed after " + std::to_string(max_attempts) +
                         " attempts (last: " + (last_status ? "HTTP " + std::to_string(last_status) : last_error) + ")",
                     last_status, max_attempts);
}

std::string OpenAiCompatibleClient::complete(const ChatRequest& request) {
  const nlohmann::json reply = post_json("/chat/completions", chat_payload(request));
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw DecodeError("choices[0].message.content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed chat completion: ") + e.what());
  }
}

std::vector<std::vector<double>> OpenAiCompatibleClient::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> rows;
  rows.reserve(texts.size());
  const std::size_t batch = std::max<std::size_t>(1, config_.embedding_batch);
  for (std::size_t begin = 0; begin < texts.size(); begin += batch) {
    const auto chunk = texts.subspan(begin, std::min(batch, texts.size() - begin));
    nlohmann::json body = {{"model", config_.embedding_model}, {"input", chunk}};
    const nlohmann::json reply = post_json("/embeddings", body);

    std::vector<std::vector<double>> chunk_rows(chunk.size());
    try {
      const auto& data = reply.at("data");
      if (!data.is_array() || data.size() != chunk.size()) {
        throw ProviderError("embeddings endpoint returned " + std::to_string(data.size()) + " rows for " +
                            std::to_string(chunk.size()) + " inputs");
      }
      for (std::size_t k = 0; k < data.size(); ++k) {
        const std::size_t index = data[k].contains("index") ? data[k].at("index").get<std::size_t>() : k;
        if (index >= chunk_rows.size() || !chunk_rows[index].empty()) {
          throw ProviderError("embeddings endpoint returned a bad or repeated index " + std::to_string(index));
        }
        chunk_rows[index] = data[k].at("embedding").get<std::vector<double>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw DecodeError(std::string("malformed embeddings response: ") + e.what());
    }
    for (auto& row : chunk_rows) {
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw ProviderError("embedding rows differ in length (" + std::to_string(row.size()) + " vs " +
                            std::to_string(rows.front().size()) + ")");
      }
      if (rows.empty() && row.empty()) throw ProviderError("embedding provider returned an empty vector");
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace respdisp
