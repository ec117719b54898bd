#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "semeval/embed_client.hpp"
#include "semeval/error.hpp"

// after Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro that clashes with Eigen parameter names
#include <httplib.h>
#include <json.hpp>

using namespace semeval;
using nlohmann::json;

namespace {

// Deterministic stand-in for the embedding model: a hash of the text spread
// over 8 dimensions.
std::vector<double> fake_vector(const std::string& text, bool normalize) {
  std::vector<double> v(8);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) h = (h ^ c) * 1099511628211ULL;
  for (std::size_t i = 0; i < v.size(); ++i) {
    h = h * 6364136223846793005ULL + 1442695040888963407ULL;
    v[i] = double(h >> 40) / double(1ULL << 24) - 0.5;
  }
  if (normalize) {
    double n = 0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
  }
  return v;
}

struct FakeService {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> embed_calls{0};
  std::atomic<int> fail_first{0};
  int fail_status = 503;
  int dim_override = 0;
  std::vector<std::size_t> batch_sizes;

  FakeService() {
    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"status", "ok"}, {"model", "fake-8"}, {"dim", 8}}.dump(), "application/json");
    });
    server.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++embed_calls;
      if (fail_first > 0) {
        --fail_first;
        res.status = fail_status;
        res.set_content("try later", "text/plain");
        return;
      }
      const auto body = json::parse(req.body);
      if (!body.contains("texts")) {
        res.status = 400;
        res.set_content("missing texts", "text/plain");
        return;
      }
      const auto texts = body["texts"].get<std::vector<std::string>>();
      batch_sizes.push_back(texts.size());
      if (texts.size() == 1 && texts[0] == "__reject__") {
        res.status = 400;
        res.set_content("text rejected by validator", "text/plain");
        return;
      }
      json vectors = json::array();
      for (std::size_t i = 0; i < texts.size(); ++i) {
        auto v = fake_vector(texts[i], body.value("normalize", false));
        if (dim_override && i == texts.size() - 1) v.resize(std::size_t(dim_override));
        vectors.push_back(v);
      }
      res.set_content(json{{"model", "fake-8"}, {"dim", 8}, {"vectors", vectors}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeService() {
    server.stop();
    thread.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

EmbedClientOptions fast_options() {
  EmbedClientOptions o;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST_CASE("health check") {
  FakeService svc;
  const auto h = check_health(svc.endpoint(), fast_options());
  CHECK(h.status == "ok");
  CHECK(h.model == "fake-8");
  CHECK(h.dim == 8);
}

TEST_CASE("batches preserve order") {
  FakeService svc;
  auto opts = fast_options();
  opts.batch_size = 2;
  const std::vector<std::string> texts{"one", "two", "three", "four", "five"};
  const auto got = fetch_embeddings_detailed(texts, svc.endpoint(), opts, {"a", "b", "c", "d", "e"});
  CHECK(got.requests == 3);
  CHECK(svc.batch_sizes == std::vector<std::size_t>{2, 2, 1});
  CHECK(got.model == "fake-8");
  CHECK(got.matrix.ids == std::vector<std::string>{"a", "b", "c", "d", "e"});
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto want = fake_vector(texts[i], false);
    for (std::size_t k = 0; k < 8; ++k) CHECK(got.matrix.vectors(long(i), long(k)) == want[k]);
  }
}

TEST_CASE("normalize flag is forwarded") {
  FakeService svc;
  auto opts = fast_options();
  opts.normalize = true;
  const auto m = fetch_embeddings({"x", "y"}, svc.endpoint(), opts);
  CHECK(m.ids == std::vector<std::string>{"0", "1"});
  for (long i = 0; i < 2; ++i) CHECK(std::abs(m.vectors.row(i).norm() - 1.0) < 1e-4);
}

TEST_CASE("transient failures are retried") {
  FakeService svc;
  svc.fail_first = 2;
  const auto m = fetch_embeddings({"x"}, svc.endpoint(), fast_options());
  CHECK(m.rows() == 1);
  CHECK(svc.embed_calls == 3);

  FakeService busy;
  busy.fail_first = 10;
  busy.fail_status = 429;
  CHECK_THROWS_WITH_AS(fetch_embeddings({"x"}, busy.endpoint(), fast_options()),
                       doctest::Contains("after 3 attempts"), ServiceError);
  CHECK(busy.embed_calls == 3);
}

TEST_CASE("client errors surface the response body without retrying") {
  FakeService svc;
  CHECK_THROWS_WITH_AS(fetch_embeddings({"__reject__"}, svc.endpoint(), fast_options()),
                       doctest::Contains("text rejected by validator"), ServiceError);
  CHECK(svc.embed_calls == 1);
}

TEST_CASE("dimension disagreement is an error") {
  FakeService svc;
  svc.dim_override = 5;
  CHECK_THROWS_WITH_AS(fetch_embeddings({"x", "y"}, svc.endpoint(), fast_options()),
                       doctest::Contains("dimension"), ServiceError);
}

TEST_CASE("unreachable service and empty input") {
  auto opts = fast_options();
  opts.max_attempts = 2;
  opts.timeout = std::chrono::seconds(1);
  CHECK_THROWS_AS(fetch_embeddings({"x"}, "http://127.0.0.1:1", opts), ServiceError);
  // no texts, no request
  const auto empty = fetch_embeddings({}, "http://127.0.0.1:1", opts);
  CHECK(empty.rows() == 0);
  CHECK_THROWS_AS(fetch_embeddings({"x"}, "http://127.0.0.1:1", opts, {"a", "b"}), InvalidArgument);
}
