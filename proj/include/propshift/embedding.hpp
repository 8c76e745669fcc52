#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propshift/http_transport.hpp"

namespace propshift {

inline constexpr const char* kEmbeddingApiKeyEnv = "PROPSHIFT_EMBEDDING_API_KEY";

/// Unit-norm real vector. Every constructor normalizes, so the norm is 1
/// to rounding; an all-zero input is rejected with DegenerateVector.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Keeps the first `d` components and rescales them to unit length.
/// Throws InvalidConfig when d is 0 or exceeds v.size(), DegenerateVector
/// when the prefix is all zeros.
EmbeddingVector truncate_renormalize(std::span<const double> v, std::size_t d);

/// dot(a, b) / (|a| |b|), accumulated in double. Throws DimensionMismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine(std::span<const double> a, std::span<const double> b);

enum class EmbeddingProviderKind { Remote, DeterministicLocal };

std::string_view to_string(EmbeddingProviderKind kind);
std::optional<EmbeddingProviderKind> parse_embedding_provider(std::string_view name);

struct EmbeddingProviderConfig {
  EmbeddingProviderKind provider = EmbeddingProviderKind::DeterministicLocal;
  std::size_t native_dim = 3072;
  std::size_t target_dim = 256;
  std::string endpoint_url = "https://api.openai.com/v1/embeddings";
  std::string model_name = "text-embedding-3-large";
  std::uint64_t seed = 0;
  std::chrono::duration<double> timeout{30.0};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{250};
  int max_in_flight = 8;
  std::size_t batch_size = 64;

  /// Throws InvalidConfig unless 0 < target_dim <= native_dim and the
  /// remote knobs are sane.
  void validate() const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// Unit vector of target_dim. Throws EmptyText for blank input.
  virtual EmbeddingVector embed(std::string_view text) = 0;
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);
  virtual std::size_t dim() const = 0;
};

/// Signed-hash bag of words: every token adds a seeded pattern of random signs
/// and magnitudes over the native dimensions, weighted by its count. Bitwise
/// deterministic for a given (seed, text) and safe to share across threads.
class DeterministicLocalProvider final : public EmbeddingProvider {
 public:
  explicit DeterministicLocalProvider(const EmbeddingProviderConfig& cfg);

  EmbeddingVector embed(std::string_view text) override;
  std::size_t dim() const override { return target_dim_; }

 private:
  std::size_t native_dim_;
  std::size_t target_dim_;
  std::uint64_t seed_;
};

/// Embeddings endpoint client: {model, input: [texts]} ->
/// {data: [{embedding: [...]}]}, then truncation to target_dim.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(const EmbeddingProviderConfig& cfg, std::shared_ptr<HttpTransport> transport,
                          std::optional<std::string> api_key);

  EmbeddingVector embed(std::string_view text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return cfg_.target_dim; }

 private:
  std::vector<EmbeddingVector> request(const std::vector<std::string>& texts);

  EmbeddingProviderConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  std::optional<std::string> api_key_;
  std::counting_semaphore<> in_flight_;
};

/// `api_key` defaults to $PROPSHIFT_EMBEDDING_API_KEY for the remote provider.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& cfg, std::shared_ptr<HttpTransport> transport = nullptr,
    std::optional<std::string> api_key = std::nullopt);

/// One-shot convenience over make_embedding_provider.
EmbeddingVector embed(const EmbeddingProviderConfig& cfg, std::string_view text);

/// Lowercased word tokens as the local provider sees them.
std::vector<std::string> embedding_tokens(std::string_view text);

}  // namespace propshift
