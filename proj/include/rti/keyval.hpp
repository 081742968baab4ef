#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rti {

/// Sectioned key = value text file. '#' starts a comment, blank lines are
/// skipped, section headers are bracketed. Order is preserved; duplicate keys
/// within a section are rejected at parse time.
struct KeyValueFile {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections;

    static KeyValueFile parse(std::istream& in, const std::string& source_name);

    const Section* find_section(const std::string& name) const;
    const std::string* find(const std::string& section, const std::string& key) const;
    /// Creates the section/key when absent, overwrites when present.
    void set(const std::string& section, const std::string& key, const std::string& value);
    void write(std::ostream& out) const;
};

/// Shortest round-trippable decimal form of a double ("nan"/"inf" included).
std::string format_double(double v);

/// Strict full-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& s);
std::optional<long long> parse_int(const std::string& s);
std::optional<unsigned long long> parse_uint(const std::string& s);

/// Split on a separator, trimming whitespace; empty items dropped.
std::vector<std::string> split_list(const std::string& s, char sep);

} // namespace rti
