#include "hometwin/ingestion/source.hpp"

#include "hometwin/core/error.hpp"

#include <array>

namespace hometwin::ingestion {

namespace {

struct KindName {
    SourceKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 5> kKindNames = {{
    {SourceKind::replay, "replay"},
    {SourceKind::simulator, "simulator"},
    {SourceKind::poll_bearer, "poll-bearer"},
    {SourceKind::poll_oauth_password, "poll-oauth-password"},
    {SourceKind::poll_jwt_assertion, "poll-jwt-assertion"},
}};

std::vector<std::string_view> required_credentials(SourceKind kind) {
    switch (kind) {
    case SourceKind::replay:
        return {"path"};
    case SourceKind::simulator:
        return {};
    case SourceKind::poll_bearer:
        return {"token"};
    case SourceKind::poll_oauth_password:
        return {"token_url", "client_id", "client_secret", "username", "password"};
    case SourceKind::poll_jwt_assertion:
        return {"token_url", "key_id", "key_secret", "subject"};
    }
    return {};
}

} // namespace

std::string_view to_string(SourceKind kind) {
    for (const auto& k : kKindNames) {
        if (k.kind == kind) {
            return k.name;
        }
    }
    return "?";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
    for (const auto& k : kKindNames) {
        if (k.name == text) {
            return k.kind;
        }
    }
    return std::nullopt;
}

bool is_polling(SourceKind kind) {
    return kind == SourceKind::poll_bearer || kind == SourceKind::poll_oauth_password ||
           kind == SourceKind::poll_jwt_assertion;
}

void SourceConfig::validate() const {
    const std::string who = "source '" + source_id + "'";
    if (source_id.empty()) {
        throw Error(ErrorCode::config, "source id must not be empty");
    }
    if (is_polling(kind)) {
        if (poll_interval_s < 1) {
            throw Error(ErrorCode::config, who + ": poll_interval_s must be >= 1");
        }
        if (endpoint.empty()) {
            throw Error(ErrorCode::config, who + ": endpoint is required for " + std::string(to_string(kind)));
        }
    }
    for (std::string_view key : required_credentials(kind)) {
        auto it = credentials.find(std::string(key));
        if (it == credentials.end() || it->second.empty()) {
            throw Error(ErrorCode::config, who + ": missing credential '" + std::string(key) + "' for kind " +
                                               std::string(to_string(kind)));
        }
    }
}

const std::string& SourceConfig::credential(std::string_view key) const {
    auto it = credentials.find(std::string(key));
    if (it == credentials.end()) {
        throw Error(ErrorCode::config, "source '" + source_id + "': missing credential '" + std::string(key) + "'");
    }
    return it->second;
}

SourceConfig source_from_section(const core::KvDocument& doc, const core::KvSection& section) {
    SourceConfig cfg;
    cfg.source_id = section.name;
    if (cfg.source_id.empty()) {
        core::config_error(doc.origin, section.line, "source section needs a name: [source <id>]");
    }
    const core::KvEntry* kind = section.find("kind");
    if (kind == nullptr) {
        core::config_error(doc.origin, section.line, "source '" + cfg.source_id + "' has no kind");
    }
    auto parsed = parse_source_kind(kind->value);
    if (!parsed) {
        core::config_error(doc.origin, kind->line, "unknown source kind '" + kind->value + "'");
    }
    cfg.kind = *parsed;
    for (const auto& e : section.entries) {
        if (e.key == "kind") {
            continue;
        }
        if (e.key == "endpoint") {
            cfg.endpoint = e.value;
        } else if (e.key == "poll_interval_s") {
            cfg.poll_interval_s = static_cast<int>(core::kv_int(doc, e));
        } else {
            cfg.credentials[e.key] = e.value;
        }
    }
    try {
        cfg.validate();
    } catch (const Error& err) {
        core::config_error(doc.origin, section.line, err.what());
    }
    return cfg;
}

std::vector<SourceConfig> parse_sources(const core::KvDocument& doc) {
    std::vector<SourceConfig> out;
    for (const auto& section : doc.sections) {
        if (section.kind != "source") {
            continue;
        }
        for (const auto& prev : out) {
            if (prev.source_id == section.name) {
                core::config_error(doc.origin, section.line, "duplicate source '" + section.name + "'");
            }
        }
        out.push_back(source_from_section(doc, section));
    }
    return out;
}

std::vector<SourceConfig> load_sources(const std::filesystem::path& path) {
    return parse_sources(core::parse_kv_document(path));
}

} // namespace hometwin::ingestion
