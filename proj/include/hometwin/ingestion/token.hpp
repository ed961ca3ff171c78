#pragma once

#include "hometwin/ingestion/http.hpp"
#include "hometwin/ingestion/source.hpp"

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

namespace hometwin::ingestion {

using Seconds = std::chrono::sys_seconds;

struct TokenState {
    std::string access_token;
    Seconds expires_at{};
    std::optional<std::string> refresh_token;

    bool valid_at(Seconds now) const { return !access_token.empty() && now < expires_at; }
};

/// Signs `header.payload` for the jwt-assertion kind. The default hook is a keyed
/// FNV-1a digest, not HS256; swap in a real signer when live credentials exist.
using JwtSigner = std::function<std::string(const std::string& signing_input, const std::string& secret)>;

std::string stub_jwt_signer(const std::string& signing_input, const std::string& secret);
std::string base64url_encode(std::string_view bytes);
std::string build_jwt_assertion(const SourceConfig& config, Seconds now, const JwtSigner& signer);

/// Tokens are refreshed this long before they expire.
inline constexpr std::chrono::seconds kRefreshMargin{60};

/// Caches one token per source and refreshes it inside the pre-expiry margin.
/// Thread-safe; at most one network exchange runs at a time.
class TokenManager {
public:
    TokenManager(SourceConfig config, HttpTransport& transport, JwtSigner signer = stub_jwt_signer);

    /// Cached token when still outside the refresh margin, otherwise a fresh one.
    TokenState acquire(Seconds now);
    /// Drops the cached token, e.g. after the provider answered 401.
    void invalidate();
    std::size_t requests() const;

private:
    TokenState request_token(Seconds now);
    TokenState parse_token_response(const HttpResponse& response, Seconds now) const;

    SourceConfig config_;
    HttpTransport& transport_;
    JwtSigner signer_;
    mutable std::mutex mutex_;
    std::optional<TokenState> cached_;
    std::size_t requests_ = 0;
};

} // namespace hometwin::ingestion
