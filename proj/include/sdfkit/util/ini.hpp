#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdfkit {

// Line-oriented config format shared by run configs, dataset manifests and
// schedule files:
//
//   # comment
//   key = value
//   [section]
//   [section argument]     e.g. [shape sphere_a]
//   key = value
//
// Entries keep file order so a parse -> serialize round trip is stable.
struct IniSection {
    std::string name;  // empty for the leading global section
    std::string arg;   // optional word(s) after the section name
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(std::string_view key) const;
    std::string get(std::string_view key, std::string_view fallback) const;
    std::string require(std::string_view key) const;  // throws std::runtime_error
    double require_double(std::string_view key) const;
    long long require_int(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    long long get_int(std::string_view key, long long fallback) const;
    std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;  // seeds use the full range
    bool get_bool(std::string_view key, bool fallback) const;
    void set(std::string_view key, std::string_view value);
};

struct IniFile {
    IniSection global;
    std::vector<IniSection> sections;

    static IniFile parse(std::string_view text, std::string_view origin = "<memory>");
    static IniFile load(const std::string& path);

    std::string serialize() const;
    void save(const std::string& path) const;

    IniSection* find_section(std::string_view name, std::string_view arg = "");
    const IniSection* find_section(std::string_view name, std::string_view arg = "") const;
    std::vector<const IniSection*> sections_named(std::string_view name) const;
    IniSection& add_section(std::string_view name, std::string_view arg = "");
};

std::string trim(std::string_view s);
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);
std::uint64_t parse_u64(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);
std::string format_double(double v);  // round-trip exact, shortest-ish

} // namespace sdfkit
