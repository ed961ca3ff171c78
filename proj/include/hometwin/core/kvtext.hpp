#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hometwin::core {

/// Line-oriented key-value document:
///
///     # comment
///     [section]            or  [section name]
///     key = value
///
/// Keys before the first section header belong to an unnamed section with an empty kind.
struct KvEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct KvSection {
    std::string kind;
    std::string name;
    std::size_t line = 0;
    std::vector<KvEntry> entries;

    const KvEntry* find(std::string_view key) const;
};

struct KvDocument {
    std::string origin;
    std::vector<KvSection> sections;
};

KvDocument parse_kv_document(std::istream& in, std::string origin = "<stream>");
KvDocument parse_kv_document(const std::filesystem::path& path);

/// Throws Error(config) formatted as `origin:line: message`.
[[noreturn]] void config_error(std::string_view origin, std::size_t line, const std::string& message);

/// Typed accessors that report the offending line on failure.
double kv_double(const KvDocument& doc, const KvEntry& entry);
long long kv_int(const KvDocument& doc, const KvEntry& entry);
bool kv_bool(const KvDocument& doc, const KvEntry& entry);

} // namespace hometwin::core
