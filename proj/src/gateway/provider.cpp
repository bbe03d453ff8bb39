#include "respdisp/gateway/provider.hpp"

#include <thread>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/record_store.hpp"

namespace respdisp {

Eigen::MatrixXd embed_texts(EmbeddingProvider& provider, std::span<const std::string> texts) {
  if (texts.empty()) throw DomainError("embed_texts: empty text list");
  const auto rows = provider.embed(texts);
  if (rows.size() != texts.size()) {
    throw ProviderError("embedding provider returned " + std::to_string(rows.size()) + " rows for " +
                        std::to_string(texts.size()) + " texts");
  }
  const std::size_t dim = rows.front().size();
  if (dim == 0) throw ProviderError("embedding provider returned an empty vector");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw ProviderError("embedding rows differ in length (" + std::to_string(rows[i].size()) + " vs " +
                          std::to_string(dim) + ")");
    }
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::string ReplayChatProvider::complete(const ChatRequest& request) {
  auto hit = store_.find_completion(request.model_id, request.prompt, request.seed, request.temperature);
  if (!hit) {
    throw RequestError("replay miss for model " + request.model_id + " seed " + std::to_string(request.seed) +
                           " (offline mode)",
                       0, 0);
  }
  return std::move(hit->response_text);
}

std::string ScriptedChatProvider::complete(const ChatRequest& request) {
  ++calls_;
  const int now = ++in_flight_;
  int peak = peak_in_flight_.load();
  while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
  }
  struct Leave {
    std::atomic<int>& counter;
    ~Leave() { --counter; }
  } leave{in_flight_};
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  return script_(request);
}

std::vector<std::vector<double>> ScriptedEmbeddingProvider::embed(std::span<const std::string> texts) {
  ++calls_;
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(script_(t));
  return out;
}

}  // namespace respdisp
