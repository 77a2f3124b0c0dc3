#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "summit/http.hpp"

namespace summit {
namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override {
        auto [origin, path] = split_url(request.url);
        httplib::Client client(origin);
        if (!client.is_valid()) return {0, {}, "invalid URL: " + request.url};
        client.set_connection_timeout(request.connect_timeout);
        client.set_read_timeout(request.read_timeout);
        client.set_write_timeout(request.read_timeout);

        httplib::Headers headers;
        for (const auto& [k, v] : request.headers) headers.emplace(k, v);

        auto result = client.Post(path, headers, request.body, request.content_type);
        if (!result) return {0, {}, httplib::to_string(result.error())};
        return {result->status, result->body, {}};
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() {
    return std::make_shared<HttplibTransport>();
}

}  // namespace summit
