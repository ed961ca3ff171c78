#include "hometwin/ingestion/token.hpp"

#include "hometwin/core/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>

namespace hometwin::ingestion {

using nlohmann::json;

std::string base64url_encode(std::string_view bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) | static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
        out.push_back(kAlphabet[n & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t n = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
    } else if (rest == 2) {
        const std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
    }
    return out;
}

std::string stub_jwt_signer(const std::string& signing_input, const std::string& secret) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    mix(secret);
    mix(signing_input);
    mix(secret);
    std::string digest(8, '\0');
    for (int i = 0; i < 8; ++i) {
        digest[static_cast<std::size_t>(i)] = static_cast<char>((h >> (8 * i)) & 0xff);
    }
    return base64url_encode(digest);
}

std::string build_jwt_assertion(const SourceConfig& config, Seconds now, const JwtSigner& signer) {
    const json header = {{"alg", "HS256"}, {"typ", "JWT"}, {"kid", config.credential("key_id")}};
    const auto iat = now.time_since_epoch().count();
    const json claims = {{"iss", config.credential("subject")},
                         {"aud", config.credential("token_url")},
                         {"iat", iat},
                         {"exp", iat + 3600}};
    const std::string input = base64url_encode(header.dump()) + "." + base64url_encode(claims.dump());
    return input + "." + signer(input, config.credential("key_secret"));
}

TokenManager::TokenManager(SourceConfig config, HttpTransport& transport, JwtSigner signer)
    : config_(std::move(config)), transport_(transport), signer_(std::move(signer)) {
    config_.validate();
}

TokenState TokenManager::acquire(Seconds now) {
    std::lock_guard lock(mutex_);
    if (cached_ && !cached_->access_token.empty() && now + kRefreshMargin < cached_->expires_at) {
        return *cached_;
    }
    cached_ = request_token(now);
    return *cached_;
}

void TokenManager::invalidate() {
    std::lock_guard lock(mutex_);
    if (cached_) {
        cached_->access_token.clear();
    }
}

std::size_t TokenManager::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

TokenState TokenManager::request_token(Seconds now) {
    if (config_.kind == SourceKind::poll_bearer) {
        // static token, no exchange
        return TokenState{config_.credential("token"), Seconds::max(), std::nullopt};
    }
    HttpRequest req;
    req.method = "POST";
    req.url = config_.credential("token_url");
    req.content_type = "application/x-www-form-urlencoded";
    if (auto ua = config_.credentials.find("user_agent"); ua != config_.credentials.end()) {
        req.headers.emplace_back("User-Agent", ua->second);
    }
    if (config_.kind == SourceKind::poll_oauth_password) {
        if (cached_ && cached_->refresh_token) {
            req.body = form_encode({{"grant_type", "refresh_token"},
                                    {"refresh_token", *cached_->refresh_token},
                                    {"client_id", config_.credential("client_id")},
                                    {"client_secret", config_.credential("client_secret")}});
        } else {
            req.body = form_encode({{"grant_type", "password"},
                                    {"client_id", config_.credential("client_id")},
                                    {"client_secret", config_.credential("client_secret")},
                                    {"username", config_.credential("username")},
                                    {"password", config_.credential("password")}});
        }
    } else if (config_.kind == SourceKind::poll_jwt_assertion) {
        req.body = form_encode({{"grant_type", "urn:ietf:params:oauth:grant-type:jwt-bearer"},
                                {"assertion", build_jwt_assertion(config_, now, signer_)}});
    } else {
        throw Error(ErrorCode::config, "source '" + config_.source_id + "' does not use tokens");
    }
    ++requests_;
    const HttpResponse resp = transport_.send(req);
    if (resp.status == 400 || resp.status == 401) {
        if (cached_ && cached_->refresh_token) {
            // refresh token rejected; fall back to a full grant next time
            cached_.reset();
        }
        throw Error(ErrorCode::unauthorized, "token request for '" + config_.source_id + "' rejected with status " +
                                                 std::to_string(resp.status));
    }
    if (resp.status < 200 || resp.status >= 300) {
        throw Error(ErrorCode::source, "token request for '" + config_.source_id + "' failed with status " +
                                           std::to_string(resp.status));
    }
    return parse_token_response(resp, now);
}

TokenState TokenManager::parse_token_response(const HttpResponse& response, Seconds now) const {
    json body;
    try {
        body = json::parse(response.body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::source, "token response for '" + config_.source_id + "' is not JSON: " + e.what());
    }
    if (!body.is_object() || !body.contains("access_token") || !body["access_token"].is_string() ||
        body["access_token"].get<std::string>().empty()) {
        throw Error(ErrorCode::source, "token response for '" + config_.source_id + "' has no access_token");
    }
    if (!body.contains("expires_in") || !body["expires_in"].is_number() || body["expires_in"].get<double>() <= 0) {
        throw Error(ErrorCode::source, "token response for '" + config_.source_id + "' has no positive expires_in");
    }
    TokenState state;
    state.access_token = body["access_token"].get<std::string>();
    state.expires_at = now + std::chrono::seconds{static_cast<std::int64_t>(body["expires_in"].get<double>())};
    if (body.contains("refresh_token") && body["refresh_token"].is_string()) {
        state.refresh_token = body["refresh_token"].get<std::string>();
    } else if (cached_ && cached_->refresh_token) {
        state.refresh_token = cached_->refresh_token;
    }
    return state;
}

} // namespace hometwin::ingestion
