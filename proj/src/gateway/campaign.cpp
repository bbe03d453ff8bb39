#include "respdisp/gateway/campaign.hpp"

#include <algorithm>
#include <thread>

#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/prompts.hpp"

namespace respdisp {

Collector::Collector(RecordStore& store, ChatProvider& provider, std::size_t max_concurrent)
    : store_(store), provider_(provider), max_concurrent_(std::max<std::size_t>(1, max_concurrent)) {}

std::vector<ResponseRecord> Collector::run(std::vector<ResponseRecord> requests) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    auto& req = requests[i];
    if (auto stored = store_.find(key_of(req)); stored && stored->ok() && same_request(*stored, req)) {
      req = std::move(*stored);
    } else {
      pending.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      ResponseRecord& rec = requests[pending[k]];
      ++provider_calls_;
      try {
        rec.response_text = provider_.complete({rec.model_id, rec.prompt, rec.seed, rec.temperature});
        rec.status = RecordStatus::ok;
      } catch (const std::exception& e) {
        spdlog::warn("{} {} [{}] seed {}: request failed: {}", rec.model_id, to_string(rec.prompt_kind),
                     rec.question_id.value_or(rec.category), rec.seed, e.what());
        rec.response_text.clear();
        rec.status = RecordStatus::failed;
      }
      rec.timestamp = utc_timestamp();
      store_.append(rec);
    }
  };

  const std::size_t threads = std::min(max_concurrent_, pending.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return requests;
}

std::vector<ResponseRecord> collect_opinion_responses(Collector& collector, const std::string& model_id,
                                                      const std::string& category, std::size_t n,
                                                      std::optional<double> temperature) {
  if (n < 2) throw DomainError("collect_opinion_responses: n must be at least 2");
  const std::string prompt = build_opinion_prompt(category);

  std::vector<ResponseRecord> requests(n);
  for (std::size_t seed = 0; seed < n; ++seed) {
    auto& r = requests[seed];
    r.model_id = model_id;
    r.prompt_kind = PromptKind::opinion;
    r.category = category;
    r.seed = seed;
    r.temperature = temperature;
    r.prompt = prompt;
  }
  auto records = collector.run(std::move(requests));

  const auto ok = static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.ok(); }));
  if (ok == 0) throw CampaignError("all " + std::to_string(n) + " requests failed for " + model_id + " / " + category);
  if (ok < 2) {
    throw CampaignError("only 1 of " + std::to_string(n) + " requests succeeded for " + model_id + " / " + category);
  }
  if (ok < n) {
    spdlog::warn("{} / {}: {} of {} requests failed; continuing with {} responses", model_id, category, n - ok, n, ok);
  }
  return records;
}

std::vector<std::string> ok_texts(const std::vector<ResponseRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(r.response_text);
  }
  return out;
}

}  // namespace respdisp
