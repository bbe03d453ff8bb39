#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace respdisp {

class RecordStore;

/// A single-user-message chat completion request.
struct ChatRequest {
  std::string model_id;
  std::string prompt;
  std::uint64_t seed = 0;
  std::optional<double> temperature;  // nullopt: leave to the provider
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Assistant text for a fresh one-message conversation.
  virtual std::string complete(const ChatRequest& request) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// One vector per input text, in input order.
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
};

/// Embeds `texts` and stacks the rows. Throws DomainError on an empty list and
/// ProviderError if the provider returns the wrong number of rows or rows of
/// unequal length.
Eigen::MatrixXd embed_texts(EmbeddingProvider& provider, std::span<const std::string> texts);

/// Serves completions already present in a response store and never touches
/// the network. A miss throws RequestError with status 0.
class ReplayChatProvider : public ChatProvider {
 public:
  explicit ReplayChatProvider(const RecordStore& store) : store_(store) {}
  std::string complete(const ChatRequest& request) override;

 private:
  const RecordStore& store_;
};

/// In-process provider driven by a callback; used for mocks and fault
/// injection. Tracks call counts and peak concurrency.
class ScriptedChatProvider : public ChatProvider {
 public:
  using Script = std::function<std::string(const ChatRequest&)>;

  explicit ScriptedChatProvider(Script script, std::chrono::microseconds latency = {})
      : script_(std::move(script)), latency_(latency) {}

  std::string complete(const ChatRequest& request) override;

  std::uint64_t calls() const { return calls_.load(); }
  int peak_in_flight() const { return peak_in_flight_.load(); }

 private:
  Script script_;
  std::chrono::microseconds latency_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
};

class ScriptedEmbeddingProvider : public EmbeddingProvider {
 public:
  using Script = std::function<std::vector<double>(const std::string&)>;
  explicit ScriptedEmbeddingProvider(Script script) : script_(std::move(script)) {}

  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  std::uint64_t calls() const { return calls_.load(); }

 private:
  Script script_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace respdisp
