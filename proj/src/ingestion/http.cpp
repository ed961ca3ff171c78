#include "hometwin/ingestion/http.hpp"

#include "hometwin/core/error.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>

namespace hometwin::ingestion {

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::invalid_argument, "url without scheme: '" + url + "'");
    }
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https") {
        throw Error(ErrorCode::invalid_argument, "unsupported url scheme '" + out.scheme + "'");
    }
    out.port = out.scheme == "https" ? 443 : 80;
    const auto host_begin = scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    std::string authority = url.substr(host_begin, path_begin == std::string::npos ? std::string::npos
                                                                                    : path_begin - host_begin);
    out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    const auto colon = authority.rfind(':');
    if (colon != std::string::npos && authority.find(']') == std::string::npos) {
        const std::string port = authority.substr(colon + 1);
        int value = 0;
        auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
        if (ec != std::errc{} || ptr != port.data() + port.size() || value <= 0 || value > 65535) {
            throw Error(ErrorCode::invalid_argument, "bad port in url '" + url + "'");
        }
        out.port = value;
        authority.resize(colon);
    }
    if (authority.empty()) {
        throw Error(ErrorCode::invalid_argument, "url without host: '" + url + "'");
    }
    out.host = authority;
    return out;
}

std::string form_encode(const std::vector<std::pair<std::string, std::string>>& fields) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    auto encode = [](const std::string& s) {
        std::string out;
        for (unsigned char c : s) {
            if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
                out.push_back(static_cast<char>(c));
            } else if (c == ' ') {
                out.push_back('+');
            } else {
                out.push_back('%');
                out.push_back(kHex[c >> 4]);
                out.push_back(kHex[c & 15]);
            }
        }
        return out;
    };
    std::string body;
    for (const auto& [k, v] : fields) {
        if (!body.empty()) {
            body.push_back('&');
        }
        body += encode(k) + "=" + encode(v);
    }
    return body;
}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    const ParsedUrl url = parse_url(request.url);
    if (url.scheme != "http") {
        throw Error(ErrorCode::source, "https is not supported by this build: '" + request.url + "'");
    }
    httplib::Client client(url.host, url.port);
    client.set_connection_timeout(timeout_s_, 0);
    client.set_read_timeout(timeout_s_, 0);
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) {
        headers.emplace(k, v);
    }
    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(url.path, headers);
    } else if (request.method == "POST") {
        result = client.Post(url.path, headers, request.body,
                             request.content_type.empty() ? "application/octet-stream" : request.content_type);
    } else {
        throw Error(ErrorCode::invalid_argument, "unsupported method " + request.method);
    }
    if (!result) {
        throw Error(ErrorCode::source, request.method + " " + request.url + " failed: " + httplib::to_string(result.error()));
    }
    return HttpResponse{result->status, result->body};
}

} // namespace hometwin::ingestion
