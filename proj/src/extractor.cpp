#include "propshift/extractor.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "propshift/error.hpp"
#include "propshift/text.hpp"

namespace propshift {

using json = nlohmann::json;

namespace {

constexpr std::string_view kSystemPrompt =
      "You are an assistant specialized in extracting propositional content from user queries \n"
      "based on Speech Act Theory.\n"
      "\n"
      "Your task is to transform user inputs into simplified statements that clearly preserve \n"
      "the core propositional content, systematically removing linguistic indicators of \n"
      "illocutionary force to optimize retrieval performance.\n"
      "\n"
      "Apply these enhanced transformation rules for each speech act category:\n"
      "1. Assertives:\n"
      "   - Preserve the original content and phrasing exactly as provided, without alterations.\n"
      "2. Interrogatives:\n"
      "   - Convert questions into clear, direct affirmative statements.\n"
      "   - Completely remove question markers (\"?\"), interrogative words \n"
      "   (\"what,\" \"who,\" \"where,\" \"when,\" \"why,\" \"how\"), and auxiliary verbs \n"
      "   in questions (\"is,\" \"does,\" \"did,\" \"can,\" \"will\").\n"
      "3. Directives (requests/commands):\n"
      "   - Convert commands or requests into concise noun phrases or topical expressions.\n"
      "   - Eliminate imperative verbs (\"show,\" \"provide,\" \"tell\") and politeness terms \n"
      "   (\"please,\" \"kindly\").\n"
      "4. Expressives:\n"
      "   - Remove all subjective, emotional, or attitudinal markers (\"I'm happy,\" \n"
      "   \"unfortunately,\" \"luckily\"), maintaining strictly factual content.\n"
      "5. Commissives (speaker commitments/promises):\n"
      "   - Simplify to reflect the committed action clearly and concisely, omitting \n"
      "   explicit performative verbs (\"I promise,\" \"I commit,\" \"I will\").\n"
      "   - Express the propositional core as a neutral statement of intended action or \n"
      "   future occurrence.\n"
      "6. Indirect Speech Acts:\n"
      "   - Eliminate introductory clauses or indirect phrasing (e.g., \"I wonder if,\" \n"
      "   \"Could you tell me,\" \"Do you know if\"), converting indirect queries into direct \n"
      "   affirmative statements.\n"
      "7. Declaratives:\n"
      "   - Remove introductory declarative phrases explicitly stating the act itself, \n"
      "   such as \"I declare,\" \"We declare,\" \"I hereby confirm,\" \"I officially proclaim,\" \n"
      "   leaving only the core propositional content clearly expressed.\n"
      "\n"
      "Specifically target and address these linguistic indicators:\n"
      "- Question markers: Completely remove punctuation and interrogative terms associated \n"
      "with questions.\n"
      "- Imperative markers: Eliminate command verbs and polite expressions entirely.\n"
      "- Performative verbs: Omit verbs explicitly declaring intent or commitment \n"
      "(\"I ask,\" \"I request,\" \"I suggest,\" \"I wonder,\" \"I promise,\" \"I commit,\" \"I declare,\" \n"
      "\"I hereby confirm,\" \"I officially proclaim\").\n"
      "- Expressive terms: Fully exclude emotional or attitudinal expressions.\n"
      "- Meta-conversational phrases: Completely omit conversational fillers and \n"
      "indirect discourse markers (\"can you,\" \"could you,\" \"would you,\" \"do you know,\" \n"
      "\"I'd like to know\").\n"
      "\n"
      "Respond ONLY with the extracted propositional content. \n"
      "Do NOT include explanations or additional text.";

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string strip_quotes(std::string s) {
  s = trim(s);
  static constexpr std::string_view kPairs[][2] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}, {"`", "`"}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& pair : kPairs) {
      const auto& open = pair[0];
      const auto& close = pair[1];
      if (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
          s.compare(s.size() - close.size(), close.size(), close) == 0) {
        s = trim(std::string_view(s).substr(open.size(), s.size() - open.size() - close.size()));
        changed = true;
      }
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(ExtractorBackend backend) {
  return backend == ExtractorBackend::Rule ? "rule" : "llm";
}

std::optional<ExtractorBackend> parse_extractor_backend(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "rule") return ExtractorBackend::Rule;
  if (lower == "llm" || lower == "remote" || lower == "remotellm") return ExtractorBackend::RemoteLlm;
  return std::nullopt;
}

void ExtractorConfig::validate() const {
  if (!(timeout.count() > 0.0)) throw Error(ErrorKind::InvalidConfig, "timeout must be positive");
  if (max_retries < 0) throw Error(ErrorKind::InvalidConfig, "max_retries must be >= 0");
  if (max_in_flight < 1) throw Error(ErrorKind::InvalidConfig, "max_in_flight must be >= 1");
}

std::string_view build_system_prompt() { return kSystemPrompt; }

std::string build_chat_request(const ExtractorConfig& cfg, std::string_view utterance) {
  json body = {
      {"model", cfg.model_name},
      {"temperature", 0},
      {"messages",
       json::array({{{"role", "system"}, {"content", std::string(build_system_prompt())}},
                    {{"role", "user"}, {"content", std::string(utterance)}}})},
  };
  return body.dump();
}

std::string parse_chat_reply(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("reply is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array()) {
    throw Error(ErrorKind::MalformedResponse, "reply has no choices array");
  }
  const auto& choices = doc["choices"];
  if (choices.size() != 1) {
    throw Error(ErrorKind::MalformedResponse,
                "expected exactly one choice, got " + std::to_string(choices.size()));
  }
  const auto& choice = choices[0];
  std::string content;
  if (choice.contains("message") && choice["message"].is_object() &&
      choice["message"].contains("content") && choice["message"]["content"].is_string()) {
    content = choice["message"]["content"].get<std::string>();
  } else if (choice.contains("text") && choice["text"].is_string()) {
    content = choice["text"].get<std::string>();
  } else {
    throw Error(ErrorKind::MalformedResponse, "choice carries no text");
  }
  content = strip_quotes(content);
  if (content.empty()) throw Error(ErrorKind::MalformedResponse, "empty reply");
  std::istringstream lines(content);
  std::size_t non_empty = 0;
  for (std::string line; std::getline(lines, line);) {
    if (!trim(line).empty()) ++non_empty;
  }
  if (non_empty > 1) throw Error(ErrorKind::MalformedResponse, "reply spans several lines");
  return content;
}

ResponseCache::ResponseCache(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (!path_) return;
  std::ifstream in(*path_);
  if (!in) return;  // first use creates it
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json entry = json::parse(line);
      entries_[entry.at("key").get<std::string>()] = entry.at("output").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::SchemaError,
                  path_->string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string ResponseCache::key(std::string_view model, std::string_view utterance) {
  std::string material(model);
  material += '\x1f';
  material += utterance;
  return fnv1a_hex(material);
}

std::optional<std::string> ResponseCache::get(std::string_view model, std::string_view utterance) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key(model, utterance));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(std::string_view model, std::string_view utterance, std::string_view output) {
  const std::string k = key(model, utterance);
  std::lock_guard lock(mutex_);
  entries_[k] = std::string(output);
  if (!path_) return;
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot append to cache " + path_->string());
  const json entry = {{"key", k},
                      {"utterance", std::string(utterance)},
                      {"output", std::string(output)},
                      {"model", std::string(model)},
                      {"timestamp", utc_timestamp()}};
  out << entry.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

Extractor::Extractor(ExtractorConfig cfg, std::shared_ptr<HttpTransport> transport,
                     std::optional<std::string> api_key, const IfidLexicon& lexicon)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      lexicon_(lexicon),
      cache_(cfg_.cache_path),
      in_flight_(cfg_.max_in_flight > 0 ? cfg_.max_in_flight : 1) {
  cfg_.validate();
  if (!api_key_) {
    if (const char* env = std::getenv(kLlmApiKeyEnv); env != nullptr && *env != '\0') api_key_ = env;
  }
  if (!transport_ && cfg_.backend == ExtractorBackend::RemoteLlm) transport_ = make_http_transport();
}

Proposition Extractor::extract(const Utterance& u) {
  if (cfg_.backend == ExtractorBackend::Rule) return extract_rule(u, lexicon_);
  return extract_remote(u);
}

Proposition Extractor::extract_remote(const Utterance& u) {
  Proposition p;
  p.source_category = classify(u, lexicon_);
  std::string reply;
  if (auto hit = cache_.get(cfg_.model_name, u.normalized())) {
    reply = *hit;
    p.trace.transforms_applied.emplace_back("cache-hit");
  } else {
    if (!api_key_) {
      throw Error(ErrorKind::AuthMissing, std::string("set ") + kLlmApiKeyEnv + " to use the llm backend");
    }
    HttpRequest request;
    request.url = cfg_.endpoint_url;
    request.body = build_chat_request(cfg_, u.normalized());
    request.headers = {{"Authorization", "Bearer " + *api_key_}, {"Content-Type", "application/json"}};
    request.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(cfg_.timeout);
    HttpResponse response;
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      response = post_with_retries(*transport_, request, RetryPolicy{cfg_.max_retries, cfg_.retry_backoff});
    }
    reply = normalize_text(parse_chat_reply(response.body));
    cache_.put(cfg_.model_name, u.normalized(), reply);
    p.trace.transforms_applied.emplace_back("remote-llm");
  }
  p.text = normalize_text(reply);
  if (!satisfies_proposition_invariants(p.text, lexicon_)) {
    p.text = enforce_proposition_invariants(p.text, lexicon_);
    p.trace.transforms_applied.emplace_back("enforce-invariants");
  }
  return p;
}

std::vector<Proposition> Extractor::extract_all(const std::vector<Utterance>& utterances) {
  std::vector<Proposition> out(utterances.size());
  if (cfg_.backend == ExtractorBackend::Rule || utterances.size() < 2) {
    for (std::size_t i = 0; i < utterances.size(); ++i) out[i] = extract(utterances[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg_.max_in_flight), utterances.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < utterances.size(); i = next++) {
        try {
          out[i] = extract(utterances[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace propshift
