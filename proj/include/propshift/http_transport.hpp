#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace propshift {

struct HttpRequest {
  std::string url;  // scheme://host[:port]/path
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POST-only transport seam. Implementations throw Error(Timeout) when the
/// peer does not answer in time and Error(ServiceError) when it cannot be
/// reached at all; any HTTP status is returned, not thrown.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; https needs the OpenSSL build.
std::shared_ptr<HttpTransport> make_http_transport();

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds backoff{250};  // doubled per attempt
};

/// Sends `request`, retrying transport failures, 429 and 5xx replies.
/// Returns the first 2xx response. Throws Timeout or ServiceError once the
/// retries are spent, ServiceError at once for other statuses.
HttpResponse post_with_retries(HttpTransport& transport, const HttpRequest& request,
                               const RetryPolicy& policy);

}  // namespace propshift
