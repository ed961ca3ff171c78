#include "hometwin/core/kvtext.hpp"

#include "hometwin/core/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace hometwin::core {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

const KvEntry* KvSection::find(std::string_view key) const {
    for (const KvEntry& e : entries) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

void config_error(std::string_view origin, std::size_t line, const std::string& message) {
    throw Error(ErrorCode::config, std::string(origin) + ":" + std::to_string(line) + ": " + message);
}

KvDocument parse_kv_document(std::istream& in, std::string origin) {
    KvDocument doc;
    doc.origin = std::move(origin);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                config_error(doc.origin, line_no, "unterminated section header");
            }
            std::string_view inner = trim(line.substr(1, line.size() - 2));
            if (inner.empty()) {
                config_error(doc.origin, line_no, "empty section header");
            }
            KvSection section;
            section.line = line_no;
            const std::size_t space = inner.find_first_of(" \t");
            section.kind = std::string(inner.substr(0, space));
            if (space != std::string_view::npos) {
                section.name = std::string(trim(inner.substr(space)));
            }
            doc.sections.push_back(std::move(section));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            config_error(doc.origin, line_no, "expected 'key = value'");
        }
        KvEntry entry{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (entry.key.empty()) {
            config_error(doc.origin, line_no, "empty key");
        }
        if (doc.sections.empty()) {
            doc.sections.push_back(KvSection{"", "", 0, {}});
        }
        KvSection& section = doc.sections.back();
        if (section.find(entry.key) != nullptr) {
            config_error(doc.origin, line_no, "duplicate key '" + entry.key + "'");
        }
        section.entries.push_back(std::move(entry));
    }
    return doc;
}

KvDocument parse_kv_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::config, "cannot read config '" + path.string() + "'");
    }
    return parse_kv_document(in, path.string());
}

double kv_double(const KvDocument& doc, const KvEntry& entry) {
    double v = 0.0;
    const char* first = entry.value.data();
    const char* last = first + entry.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        config_error(doc.origin, entry.line, "'" + entry.key + "' expects a number, got '" + entry.value + "'");
    }
    return v;
}

long long kv_int(const KvDocument& doc, const KvEntry& entry) {
    long long v = 0;
    const char* first = entry.value.data();
    const char* last = first + entry.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        config_error(doc.origin, entry.line, "'" + entry.key + "' expects an integer, got '" + entry.value + "'");
    }
    return v;
}

bool kv_bool(const KvDocument& doc, const KvEntry& entry) {
    if (entry.value == "true" || entry.value == "yes" || entry.value == "1") {
        return true;
    }
    if (entry.value == "false" || entry.value == "no" || entry.value == "0") {
        return false;
    }
    config_error(doc.origin, entry.line, "'" + entry.key + "' expects true/false, got '" + entry.value + "'");
}

} // namespace hometwin::core
