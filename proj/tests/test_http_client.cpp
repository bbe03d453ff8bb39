#include <atomic>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/openai_client.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose `_res` macro breaks Eigen.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

using namespace respdisp;
using nlohmann::json;

namespace {

// Local OpenAI-style endpoint whose handlers the tests script.
class FakeServer {
 public:
  FakeServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  ProviderConfig config() const {
    ProviderConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    c.api_key_env = "RESPDISP_TEST_KEY";
    c.retry_limit = 3;
    c.backoff_base = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(5);
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json chat_reply(const std::string& content) {
  return {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

struct CapturedLog {
  std::ostringstream out;
  std::shared_ptr<spdlog::logger> previous = spdlog::default_logger();
  CapturedLog() {
    spdlog::set_default_logger(
        std::make_shared<spdlog::logger>("capture", std::make_shared<spdlog::sinks::ostream_sink_mt>(out)));
  }
  ~CapturedLog() { spdlog::set_default_logger(previous); }
  int count(const std::string& needle) const {
    const std::string s = out.str();
    int n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
  }
};

}  // namespace

TEST(HttpClient, RetriesAfter429) {
  FakeServer fake;
  std::atomic<int> hits{0};
  json seen;
  std::string auth;
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 429;
      res.set_content("{\"error\":\"slow down\"}", "application/json");
      return;
    }
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(chat_reply("Sourdough").dump(), "application/json");
  });

  setenv("RESPDISP_TEST_KEY", "sk-test", 1);
  CapturedLog log;
  OpenAiCompatibleClient client(fake.config());
  EXPECT_EQ(client.complete({"some/model", "Say one word", 7, 0.0}), "Sourdough");
  EXPECT_EQ(client.attempts(), 2u);
  EXPECT_EQ(log.count("attempt"), 2);
  EXPECT_EQ(auth, "Bearer sk-test");
  EXPECT_EQ(seen["model"], "some/model");
  EXPECT_EQ(seen["seed"], 7);
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["messages"], json::parse(R"([{"role":"user","content":"Say one word"}])"));
  unsetenv("RESPDISP_TEST_KEY");
}

TEST(HttpClient, PersistentServerErrorExhaustsRetries) {
  FakeServer fake;
  std::atomic<int> hits{0};
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
    res.set_content("oops", "text/plain");
  });
  OpenAiCompatibleClient client(fake.config());
  try {
    client.complete({"m", "p", 0, std::nullopt});
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.attempts(), 4);
  }
  EXPECT_EQ(hits.load(), 4);
}

TEST(HttpClient, ClientErrorIsNotRetried) {
  FakeServer fake;
  std::atomic<int> hits{0};
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
  });
  OpenAiCompatibleClient client(fake.config());
  EXPECT_THROW(client.complete({"m", "p", 0, std::nullopt}), RequestError);
  EXPECT_EQ(hits.load(), 1);
}

TEST(HttpClient, TemperatureOmittedWhenUnset) {
  OpenAiCompatibleClient client(ProviderConfig{});
  EXPECT_FALSE(client.chat_payload({"m", "p", 1, std::nullopt}).contains("temperature"));
}

TEST(HttpClient, MalformedBodyIsDecodeError) {
  FakeServer fake;
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\":[]}", "application/json");
  });
  OpenAiCompatibleClient client(fake.config());
  EXPECT_THROW(client.complete({"m", "p", 0, std::nullopt}), DecodeError);
}

TEST(HttpClient, EmbeddingsBatchedAndReordered) {
  FakeServer fake;
  std::atomic<int> requests{0};
  fake.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++requests;
    const auto body = json::parse(req.body);
    json data = json::array();
    const auto& input = body["input"];
    // Reverse order on the wire; the client must restore it by index.
    for (std::size_t i = input.size(); i-- > 0;) {
      const double v = static_cast<double>(input[i].get<std::string>().size());
      data.push_back({{"index", i}, {"embedding", {v, 1.0}}});
    }
    res.set_content(json{{"data", data}}.dump(), "application/json");
  });
  auto config = fake.config();
  config.embedding_batch = 2;
  OpenAiCompatibleClient client(config);
  const std::vector<std::string> texts = {"a", "bb", "ccc"};
  const auto rows = client.embed(texts);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], 1.0);
  EXPECT_EQ(rows[1][0], 2.0);
  EXPECT_EQ(rows[2][0], 3.0);
  EXPECT_EQ(requests.load(), 2);
}

TEST(HttpClient, RaggedEmbeddingsRejected) {
  FakeServer fake;
  fake.server().Post("/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"index":0,"embedding":[1,2]},{"index":1,"embedding":[1]}]})", "application/json");
  });
  OpenAiCompatibleClient client(fake.config());
  const std::vector<std::string> texts = {"a", "b"};
  EXPECT_THROW(client.embed(texts), ProviderError);
}

TEST(HttpClient, UnreachableHostIsTransportFailure) {
  auto config = ProviderConfig{};
  config.base_url = "http://127.0.0.1:1/v1";
  config.retry_limit = 1;
  config.backoff_base = std::chrono::milliseconds(1);
  config.timeout = std::chrono::seconds(2);
  OpenAiCompatibleClient client(config);
  try {
    client.complete({"m", "p", 0, std::nullopt});
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.status(), 0);
    EXPECT_EQ(e.attempts(), 2);
  }
}
