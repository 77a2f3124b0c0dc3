#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace summit {

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type = "application/json";
    std::chrono::milliseconds connect_timeout{5000};
    std::chrono::milliseconds read_timeout{120000};
};

struct HttpResponse {
    /// 0 when the request never produced an HTTP status (DNS, refused, timeout).
    int status = 0;
    std::string body;
    std::string error;
};

/// Seam between the wire clients and the network; tests substitute fakes.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport. Supports http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_http_transport();

}  // namespace summit
