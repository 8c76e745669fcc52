#include "propshift/embedding.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "propshift/error.hpp"
#include "propshift/text.hpp"

namespace propshift {

using json = nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  const double n = std::sqrt(squared_norm(values_));
  if (values_.empty() || n == 0.0 || !std::isfinite(n)) {
    throw Error(ErrorKind::DegenerateVector, "vector has no direction");
  }
  for (double& x : values_) x /= n;
}

double EmbeddingVector::norm() const { return std::sqrt(squared_norm(values_)); }

EmbeddingVector truncate_renormalize(std::span<const double> v, std::size_t d) {
  if (d == 0 || d > v.size()) {
    throw Error(ErrorKind::InvalidConfig,
                "truncation dim " + std::to_string(d) + " outside 1.." + std::to_string(v.size()));
  }
  auto prefix = v.first(d);
  if (std::all_of(prefix.begin(), prefix.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorKind::DegenerateVector, "the first " + std::to_string(d) + " components are zero");
  }
  return EmbeddingVector(std::vector<double>(prefix.begin(), prefix.end()));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double denom = std::sqrt(squared_norm(a)) * std::sqrt(squared_norm(b));
  if (denom == 0.0) throw Error(ErrorKind::DegenerateVector, "cosine of a zero vector");
  return std::clamp(dot / denom, -1.0, 1.0);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) { return cosine(a.values(), b.values()); }

std::string_view to_string(EmbeddingProviderKind kind) {
  return kind == EmbeddingProviderKind::Remote ? "remote" : "local";
}

std::optional<EmbeddingProviderKind> parse_embedding_provider(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "remote") return EmbeddingProviderKind::Remote;
  if (lower == "local" || lower == "deterministiclocal" || lower == "deterministic") {
    return EmbeddingProviderKind::DeterministicLocal;
  }
  return std::nullopt;
}

void EmbeddingProviderConfig::validate() const {
  if (native_dim == 0) throw Error(ErrorKind::InvalidConfig, "native_dim must be positive");
  if (target_dim == 0 || target_dim > native_dim) {
    throw Error(ErrorKind::InvalidConfig, "target_dim must be in 1..native_dim");
  }
  if (!(timeout.count() > 0.0)) throw Error(ErrorKind::InvalidConfig, "timeout must be positive");
  if (max_retries < 0) throw Error(ErrorKind::InvalidConfig, "max_retries must be >= 0");
  if (max_in_flight < 1) throw Error(ErrorKind::InvalidConfig, "max_in_flight must be >= 1");
  if (batch_size == 0) throw Error(ErrorKind::InvalidConfig, "batch_size must be positive");
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

std::vector<std::string> embedding_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      current += static_cast<char>(std::tolower(u));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

DeterministicLocalProvider::DeterministicLocalProvider(const EmbeddingProviderConfig& cfg)
    : native_dim_(cfg.native_dim), target_dim_(cfg.target_dim), seed_(cfg.seed) {
  cfg.validate();
}

EmbeddingVector DeterministicLocalProvider::embed(std::string_view text) {
  if (trim(text).empty()) throw Error(ErrorKind::EmptyText, "cannot embed blank text");
  std::map<std::string, int> counts;
  for (auto& t : embedding_tokens(text)) ++counts[t];
  // Text made only of punctuation still gets a direction of its own.
  if (counts.empty()) ++counts[trim(text)];

  // Native components are independent, so the truncated prefix is computed
  // directly; components past target_dim would be discarded anyway. Weights
  // are a random sign times a magnitude in [0.5, 1.5), so distinct tokens
  // cannot cancel each other out exactly the way plain +/-1 patterns can.
  std::vector<double> values(target_dim_, 0.0);
  const std::uint64_t seed_mix = splitmix64(seed_);
  for (const auto& [token, count] : counts) {
    const std::uint64_t token_hash = fnv1a64(token) ^ seed_mix;
    for (std::size_t i = 0; i < target_dim_; ++i) {
      const std::uint64_t h = splitmix64(token_hash + 0x9e3779b97f4a7c15ULL * (i + 1));
      const double magnitude = 0.5 + static_cast<double>(h & ((1ULL << 52) - 1)) / static_cast<double>(1ULL << 52);
      values[i] += ((h >> 63) ? magnitude : -magnitude) * static_cast<double>(count);
    }
  }
  if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) values[0] = 1.0;
  return EmbeddingVector(std::move(values));
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(const EmbeddingProviderConfig& cfg,
                                                 std::shared_ptr<HttpTransport> transport,
                                                 std::optional<std::string> api_key)
    : cfg_(cfg),
      transport_(transport ? std::move(transport) : make_http_transport()),
      api_key_(std::move(api_key)),
      in_flight_(cfg.max_in_flight > 0 ? cfg.max_in_flight : 1) {
  cfg_.validate();
  if (!api_key_) {
    if (const char* env = std::getenv(kEmbeddingApiKeyEnv); env != nullptr && *env != '\0') api_key_ = env;
  }
}

EmbeddingVector RemoteEmbeddingProvider::embed(std::string_view text) {
  return embed_batch({std::string(text)}).front();
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += cfg_.batch_size) {
    const std::size_t end = std::min(texts.size(), begin + cfg_.batch_size);
    auto part = request(std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                                 texts.begin() + static_cast<std::ptrdiff_t>(end)));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::request(const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (trim(t).empty()) throw Error(ErrorKind::EmptyText, "cannot embed blank text");
  }
  if (!api_key_) {
    throw Error(ErrorKind::AuthMissing, std::string("set ") + kEmbeddingApiKeyEnv + " to use remote embeddings");
  }
  HttpRequest req;
  req.url = cfg_.endpoint_url;
  req.body = json{{"model", cfg_.model_name}, {"input", texts}}.dump();
  req.headers = {{"Authorization", "Bearer " + *api_key_}, {"Content-Type", "application/json"}};
  req.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(cfg_.timeout);

  HttpResponse response;
  in_flight_.acquire();
  try {
    response = post_with_retries(*transport_, req, RetryPolicy{cfg_.max_retries, cfg_.retry_backoff});
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();

  json doc;
  try {
    doc = json::parse(response.body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("embedding reply is not JSON: ") + e.what());
  }
  if (!doc.contains("data") || !doc["data"].is_array() || doc["data"].size() != texts.size()) {
    throw Error(ErrorKind::MalformedResponse, "embedding reply must carry one data item per input");
  }
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  std::size_t position = 0;
  for (const auto& item : doc["data"]) {
    if (!item.contains("embedding") || !item["embedding"].is_array()) {
      throw Error(ErrorKind::MalformedResponse, "data item without an embedding array");
    }
    std::vector<double> values;
    try {
      values = item["embedding"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::MalformedResponse, std::string("non-numeric embedding: ") + e.what());
    }
    if (values.size() != cfg_.native_dim) {
      throw Error(ErrorKind::MalformedResponse, "embedding has " + std::to_string(values.size()) +
                                                    " components, expected " + std::to_string(cfg_.native_dim));
    }
    const std::size_t index = item.contains("index") && item["index"].is_number_unsigned()
                                  ? item["index"].get<std::size_t>()
                                  : position;
    rows.emplace_back(index, std::move(values));
    ++position;
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EmbeddingVector> out;
  out.reserve(rows.size());
  for (const auto& [index, values] : rows) out.push_back(truncate_renormalize(values, cfg_.target_dim));
  return out;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& cfg,
                                                           std::shared_ptr<HttpTransport> transport,
                                                           std::optional<std::string> api_key) {
  if (cfg.provider == EmbeddingProviderKind::Remote) {
    return std::make_unique<RemoteEmbeddingProvider>(cfg, std::move(transport), std::move(api_key));
  }
  return std::make_unique<DeterministicLocalProvider>(cfg);
}

EmbeddingVector embed(const EmbeddingProviderConfig& cfg, std::string_view text) {
  return make_embedding_provider(cfg)->embed(text);
}

}  // namespace propshift
