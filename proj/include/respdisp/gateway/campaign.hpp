#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "respdisp/gateway/provider.hpp"
#include "respdisp/gateway/record_store.hpp"
#include "respdisp/gateway/records.hpp"

namespace respdisp {

/// Runs batches of requests against a provider with write-ahead persistence.
///
/// A request whose key already has an ok record for the same prompt and
/// temperature is answered from the store without calling the provider.
/// Everything else is sent (at most `max_concurrent` at a time) and its
/// outcome, ok or failed, is appended to the store before `run` returns it.
class Collector {
 public:
  Collector(RecordStore& store, ChatProvider& provider, std::size_t max_concurrent = 1);

  /// `requests` carry everything but response_text/status/timestamp. Results
  /// come back in request order regardless of completion order.
  std::vector<ResponseRecord> run(std::vector<ResponseRecord> requests);

  std::uint64_t provider_calls() const { return provider_calls_.load(); }
  RecordStore& store() { return store_; }

 private:
  RecordStore& store_;
  ChatProvider& provider_;
  std::size_t max_concurrent_;
  std::atomic<std::uint64_t> provider_calls_{0};
};

/// Asks `model_id` the opinion prompt for `category` with seeds 0..n-1, each in
/// a clean single-message context. Returns all n records ordered by seed,
/// failed ones included. Throws DomainError for n < 2 and CampaignError when
/// fewer than 2 requests succeed.
std::vector<ResponseRecord> collect_opinion_responses(Collector& collector, const std::string& model_id,
                                                      const std::string& category, std::size_t n = 100,
                                                      std::optional<double> temperature = std::nullopt);

/// Texts of the ok records, in the given order.
std::vector<std::string> ok_texts(const std::vector<ResponseRecord>& records);

}  // namespace respdisp
