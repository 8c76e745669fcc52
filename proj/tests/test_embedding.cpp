#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>

#include "propshift/embedding.hpp"
#include "propshift/error.hpp"
#include "propshift/http_transport.hpp"

using namespace propshift;
using json = nlohmann::json;

namespace {

double naive_norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidConfig;
}

class ScriptedTransport : public HttpTransport {
 public:
  explicit ScriptedTransport(std::function<HttpResponse(const HttpRequest&)> fn) : fn_(std::move(fn)) {}
  HttpResponse post(const HttpRequest& r) override {
    ++calls;
    return fn_(r);
  }
  int calls = 0;

 private:
  std::function<HttpResponse(const HttpRequest&)> fn_;
};

}  // namespace

TEST_CASE("truncate_renormalize") {
  const std::vector<double> a{0.6, 0.8, 0, 0};
  auto t = truncate_renormalize(a, 2);
  REQUIRE(t.dim() == 2);
  CHECK(t[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(t[1] == doctest::Approx(0.8).epsilon(1e-15));

  const std::vector<double> b{0.5, 0.5, 0.5, 0.5};
  auto u = truncate_renormalize(b, 2);
  CHECK(u[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(u[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const std::vector<double> zero_prefix{0, 0, 1};
  CHECK(kind_of([&] { truncate_renormalize(zero_prefix, 2); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([&] { truncate_renormalize(b, 0); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { truncate_renormalize(b, 5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("truncation preserves prefix direction and yields unit norm") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto v = random_vector(rng, 64);
    const std::size_t d = 1 + rng() % 64;
    const auto t = truncate_renormalize(v, d);
    CHECK(naive_norm(t.values()) == doctest::Approx(1.0).epsilon(1e-12));
    std::span<const double> prefix(v.data(), d);
    CHECK(cosine(t.values(), prefix) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Identity at full dimension for an already-unit vector.
  const EmbeddingVector unit(random_vector(rng, 16));
  const auto same = truncate_renormalize(unit.values(), 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(same[i] == doctest::Approx(unit[i]).epsilon(1e-15));
}

TEST_CASE("cosine") {
  const std::vector<double> x{1, 0}, y{0, 1};
  CHECK(cosine(x, y) == 0.0);
  CHECK(cosine(x, x) == doctest::Approx(1.0));
  const std::vector<double> three{1, 2, 3};
  CHECK(kind_of([&] { cosine(x, three); }) == ErrorKind::DimensionMismatch);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_vector(rng, 32);
    const auto b = random_vector(rng, 32);
    double dot = 0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    const double oracle = dot / (naive_norm(a) * naive_norm(b));
    CHECK(cosine(a, b) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(cosine(a, b) == cosine(b, a));
    CHECK(std::abs(cosine(a, b)) <= 1.0 + 1e-9);
  }
}

TEST_CASE("EmbeddingVector rejects zero vectors") {
  CHECK(kind_of([] { EmbeddingVector(std::vector<double>{0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([] { EmbeddingVector(std::vector<double>{}); }) == ErrorKind::DegenerateVector);
}

TEST_CASE("deterministic local provider") {
  EmbeddingProviderConfig cfg;
  const auto a = embed(cfg, "alpha beta");
  const auto b = embed(cfg, "alpha beta");
  REQUIRE(a.dim() == 256);
  CHECK(a == b);
  CHECK(naive_norm(a.values()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(kind_of([&] { embed(cfg, "   "); }) == ErrorKind::EmptyText);

  // Token overlap is visible in the similarity.
  CHECK(cosine(embed(cfg, "satellite broadband in rural areas"), embed(cfg, "rural satellite broadband")) >
        cosine(embed(cfg, "satellite broadband in rural areas"), embed(cfg, "consumer complaints report")));

  // Different seeds give measurably different vectors for the same text.
  auto other = cfg;
  other.seed = 1;
  double worst = 0;
  for (const char* t : {"alpha beta", "the regulator approved the merger", "fiber expansion"}) {
    worst = std::max(worst, cosine(embed(cfg, t), embed(other, t)));
  }
  CHECK(worst < 0.9);
}

TEST_CASE("local provider prefix equals truncating the native vector") {
  EmbeddingProviderConfig full;
  full.native_dim = 512;
  full.target_dim = 512;
  EmbeddingProviderConfig small = full;
  small.target_dim = 64;
  for (const char* t : {"alpha beta", "Disney+ 2020 pre-sale discounts in Brazil"}) {
    const auto native = embed(full, t);
    const auto expect = truncate_renormalize(native.values(), 64);
    const auto got = embed(small, t);
    for (std::size_t i = 0; i < 64; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("provider config validation") {
  EmbeddingProviderConfig cfg;
  cfg.target_dim = 4000;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidConfig);
  cfg.target_dim = 0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidConfig);
  CHECK(parse_embedding_provider("local") == EmbeddingProviderKind::DeterministicLocal);
  CHECK(parse_embedding_provider("remote") == EmbeddingProviderKind::Remote);
}

TEST_CASE("remote provider wire format") {
  EmbeddingProviderConfig cfg;
  cfg.provider = EmbeddingProviderKind::Remote;
  cfg.native_dim = 4;
  cfg.target_dim = 2;
  cfg.endpoint_url = "http://127.0.0.1:9/v1/embeddings";
  cfg.retry_backoff = std::chrono::milliseconds(1);

  json seen;
  auto transport = std::make_shared<ScriptedTransport>([&](const HttpRequest& r) {
    seen = json::parse(r.body);
    // Out of order on purpose; the client must honor "index".
    json data = json::array();
    data.push_back({{"index", 1}, {"embedding", {0.0, 2.0, 9.0, 9.0}}});
    data.push_back({{"index", 0}, {"embedding", {0.5, 0.5, 0.5, 0.5}}});
    return HttpResponse{200, json{{"data", data}}.dump()};
  });
  RemoteEmbeddingProvider provider(cfg, transport, std::string("k"));
  const auto out = provider.embed_batch({"first", "second"});
  CHECK(seen["model"] == "text-embedding-3-large");
  CHECK(seen["input"] == json::array({"first", "second"}));
  REQUIRE(out.size() == 2);
  CHECK(out[0][0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(out[1][0] == 0.0);
  CHECK(out[1][1] == doctest::Approx(1.0));
  CHECK(transport->calls == 1);

  auto short_vec = std::make_shared<ScriptedTransport>([](const HttpRequest&) {
    return HttpResponse{200, R"({"data":[{"index":0,"embedding":[1,0]}]})"};
  });
  RemoteEmbeddingProvider bad(cfg, short_vec, std::string("k"));
  CHECK(kind_of([&] { bad.embed("x"); }) == ErrorKind::MalformedResponse);

  ::unsetenv("PROPSHIFT_EMBEDDING_API_KEY");
  auto unused = std::make_shared<ScriptedTransport>([](const HttpRequest&) { return HttpResponse{500, ""}; });
  RemoteEmbeddingProvider no_key(cfg, unused, std::nullopt);
  CHECK(kind_of([&] { no_key.embed("x"); }) == ErrorKind::AuthMissing);
  CHECK(unused->calls == 0);
}
