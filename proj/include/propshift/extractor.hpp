#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "propshift/http_transport.hpp"
#include "propshift/lexicon.hpp"
#include "propshift/speechact.hpp"

namespace propshift {

inline constexpr const char* kLlmApiKeyEnv = "PROPSHIFT_LLM_API_KEY";

enum class ExtractorBackend { Rule, RemoteLlm };

std::string_view to_string(ExtractorBackend backend);
std::optional<ExtractorBackend> parse_extractor_backend(std::string_view name);

struct ExtractorConfig {
  ExtractorBackend backend = ExtractorBackend::Rule;
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4";
  std::chrono::duration<double> timeout{30.0};  // seconds
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{250};
  std::optional<std::filesystem::path> cache_path;
  int max_in_flight = 4;

  /// Throws Error(InvalidConfig) when timeout <= 0, max_retries < 0 or
  /// max_in_flight < 1.
  void validate() const;
};

/// The instruction prompt sent as the system message, byte for byte.
std::string_view build_system_prompt();

/// Chat-completions request body: system prompt, the utterance as the user
/// message, temperature 0.
std::string build_chat_request(const ExtractorConfig& cfg, std::string_view utterance);

/// Extracts the single reply text from a chat-completions response, with
/// surrounding quotes and whitespace removed. Throws MalformedResponse when
/// the body is not JSON, has zero or several choices, or the text is empty.
std::string parse_chat_reply(std::string_view body);

/// Append-only JSON Lines cache of model replies keyed by (model, utterance).
/// Thread-safe; writes are serialized.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> path);

  static std::string key(std::string_view model, std::string_view utterance);

  std::optional<std::string> get(std::string_view model, std::string_view utterance) const;
  void put(std::string_view model, std::string_view utterance, std::string_view output);
  std::size_t size() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> entries_;
};

/// One extraction contract over both backends.
class Extractor {
 public:
  /// `api_key` defaults to $PROPSHIFT_LLM_API_KEY; `transport` to cpp-httplib.
  explicit Extractor(ExtractorConfig cfg, std::shared_ptr<HttpTransport> transport = nullptr,
                     std::optional<std::string> api_key = std::nullopt,
                     const IfidLexicon& lexicon = IfidLexicon::builtin());

  Proposition extract(const Utterance& u);

  /// Order-preserving; at most cfg.max_in_flight requests run at once.
  std::vector<Proposition> extract_all(const std::vector<Utterance>& utterances);

  const ExtractorConfig& config() const noexcept { return cfg_; }
  const ResponseCache& cache() const noexcept { return cache_; }

 private:
  Proposition extract_remote(const Utterance& u);

  ExtractorConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  std::optional<std::string> api_key_;
  const IfidLexicon& lexicon_;
  ResponseCache cache_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace propshift
