#pragma once

#include "hometwin/core/kvtext.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hometwin::ingestion {

enum class SourceKind { replay, simulator, poll_bearer, poll_oauth_password, poll_jwt_assertion };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);
bool is_polling(SourceKind kind);

/// Credential keys required per kind:
///   replay               path
///   simulator            (none; seed, days, start are optional)
///   poll-bearer          token
///   poll-oauth-password  token_url, client_id, client_secret, username, password
///   poll-jwt-assertion   token_url, key_id, key_secret, subject
/// Any kind may carry `user_agent`, sent with every request.
struct SourceConfig {
    std::string source_id;
    SourceKind kind = SourceKind::replay;
    std::string endpoint;
    int poll_interval_s = 60;
    std::map<std::string, std::string> credentials;

    /// Throws Error(config) naming the source and the missing or bad field.
    void validate() const;
    const std::string& credential(std::string_view key) const;
};

/// Builds a source from a `[source <id>]` section. Keys `kind`, `endpoint` and
/// `poll_interval_s` are fields; every other key is a credential.
SourceConfig source_from_section(const core::KvDocument& doc, const core::KvSection& section);

/// Reads every `[source ...]` section of a document; other sections are ignored.
std::vector<SourceConfig> parse_sources(const core::KvDocument& doc);
std::vector<SourceConfig> load_sources(const std::filesystem::path& path);

} // namespace hometwin::ingestion
