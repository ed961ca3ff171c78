#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hometwin::ingestion {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Blocking request/response hop. Implementations throw Error(source) when no
/// response arrives at all; HTTP error statuses are returned, not thrown.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Plain-HTTP transport on cpp-httplib. `https://` URLs are rejected.
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_s = 10) : timeout_s_(timeout_s) {}
    HttpResponse send(const HttpRequest& request) override;

private:
    int timeout_s_;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_url(const std::string& url);

/// `application/x-www-form-urlencoded` body from ordered pairs.
std::string form_encode(const std::vector<std::pair<std::string, std::string>>& fields);

} // namespace hometwin::ingestion
