#include "rti/keyval.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "rti/errors.hpp"

namespace rti {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source_name) {
    KeyValueFile file;
    Section* current = nullptr;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header '" + line + "'");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail("empty section name");
            for (const Section& s : file.sections)
                if (s.name == name) fail("duplicate section [" + name + "]");
            file.sections.push_back({name, {}});
            current = &file.sections.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
        if (!current) fail("entry before any [section] header");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        for (const auto& [k, v] : current->entries)
            if (k == key) fail("duplicate key '" + key + "' in section [" + current->name + "]");
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return file;
}

const KeyValueFile::Section* KeyValueFile::find_section(const std::string& name) const {
    for (const Section& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const std::string* KeyValueFile::find(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (!s) return nullptr;
    for (const auto& [k, v] : s->entries)
        if (k == key) return &v;
    return nullptr;
}

void KeyValueFile::set(const std::string& section, const std::string& key, const std::string& value) {
    for (Section& s : sections) {
        if (s.name != section) continue;
        for (auto& [k, v] : s.entries) {
            if (k == key) {
                v = value;
                return;
            }
        }
        s.entries.emplace_back(key, value);
        return;
    }
    sections.push_back({section, {{key, value}}});
}

void KeyValueFile::write(std::ostream& out) const {
    for (const Section& s : sections) {
        out << '[' << s.name << "]\n";
        for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, ptr};
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<unsigned long long> parse_uint(const std::string& s) {
    if (s.empty()) return std::nullopt;
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(sep, start);
        if (end == std::string::npos) end = s.size();
        std::string item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = end + 1;
    }
    return out;
}

} // namespace rti
