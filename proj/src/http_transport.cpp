#include "propshift/http_transport.hpp"

#include <httplib.h>

#include <thread>

#include "propshift/error.hpp"

namespace propshift {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::InvalidConfig, "endpoint url needs a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const SplitUrl parts = split_url(request.url);
    httplib::Client client(parts.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        headers.emplace(k, v);
      }
    }
    auto result = client.Post(parts.path, headers, request.body, content_type);
    if (!result) {
      const auto err = result.error();
      const std::string what = httplib::to_string(err);
      if (err == httplib::Error::Read || err == httplib::Error::Write ||
          err == httplib::Error::ConnectionTimeout) {
        throw Error(ErrorKind::Timeout, request.url + ": " + what);
      }
      throw Error(ErrorKind::ServiceError, request.url + ": " + what);
    }
    return HttpResponse{result->status, result->body};
  }
};

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

HttpResponse post_with_retries(HttpTransport& transport, const HttpRequest& request,
                               const RetryPolicy& policy) {
  ErrorKind last_kind = ErrorKind::ServiceError;
  std::string last_message;
  auto delay = policy.backoff;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0 && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    try {
      HttpResponse response = transport.post(request);
      if (response.status >= 200 && response.status < 300) return response;
      last_kind = ErrorKind::ServiceError;
      last_message = request.url + " answered HTTP " + std::to_string(response.status);
      if (!retryable_status(response.status)) break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Timeout && e.kind() != ErrorKind::ServiceError) throw;
      last_kind = e.kind();
      last_message = e.detail();
    }
  }
  throw Error(last_kind, last_message + " (after " + std::to_string(policy.max_retries) + " retries)");
}

}  // namespace propshift
