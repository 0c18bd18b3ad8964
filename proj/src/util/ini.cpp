#include "sdfkit/util/ini.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdfkit {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view s, std::string_view what) {
    std::string t = trim(s);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || t.empty() || errno == ERANGE)
        throw std::runtime_error("bad numeric value '" + t + "' for " + std::string(what));
    return v;
}

long long parse_int(std::string_view s, std::string_view what) {
    std::string t = trim(s);
    long long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
        throw std::runtime_error("bad integer value '" + t + "' for " + std::string(what));
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::string t = trim(s);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
        throw std::runtime_error("bad integer value '" + t + "' for " + std::string(what));
    return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
    std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::runtime_error("bad boolean value '" + t + "' for " + std::string(what));
}

std::string format_double(double v) {
    char buf[64];
    // %.17g always round-trips; try shorter first
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::string* IniSection::find(std::string_view key) const {
    for (auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

std::string IniSection::get(std::string_view key, std::string_view fallback) const {
    const std::string* v = find(key);
    return v ? *v : std::string(fallback);
}

std::string IniSection::require(std::string_view key) const {
    const std::string* v = find(key);
    if (!v)
        throw std::runtime_error("missing key '" + std::string(key) + "'" +
                                 (name.empty() ? "" : " in section [" + name +
                                                          (arg.empty() ? "" : " " + arg) + "]"));
    return *v;
}

double IniSection::require_double(std::string_view key) const { return parse_double(require(key), key); }
long long IniSection::require_int(std::string_view key) const { return parse_int(require(key), key); }

double IniSection::get_double(std::string_view key, double fallback) const {
    const std::string* v = find(key);
    return v ? parse_double(*v, key) : fallback;
}

long long IniSection::get_int(std::string_view key, long long fallback) const {
    const std::string* v = find(key);
    return v ? parse_int(*v, key) : fallback;
}

std::uint64_t IniSection::get_u64(std::string_view key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    return v ? parse_u64(*v, key) : fallback;
}

bool IniSection::get_bool(std::string_view key, bool fallback) const {
    const std::string* v = find(key);
    return v ? parse_bool(*v, key) : fallback;
}

void IniSection::set(std::string_view key, std::string_view value) {
    for (auto& [k, v] : entries)
        if (k == key) {
            v = std::string(value);
            return;
        }
    entries.emplace_back(std::string(key), std::string(value));
}

IniFile IniFile::parse(std::string_view text, std::string_view origin) {
    IniFile f;
    IniSection* cur = &f.global;
    size_t lineno = 0, pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(std::string(origin) + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
            size_t sp = inner.find_first_of(" \t");
            IniSection s;
            if (sp == std::string::npos) {
                s.name = inner;
            } else {
                s.name = inner.substr(0, sp);
                s.arg = trim(std::string_view(inner).substr(sp + 1));
            }
            f.sections.push_back(std::move(s));
            cur = &f.sections.back();
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(std::string(origin) + ":" + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + line + "'");
        cur->entries.emplace_back(trim(std::string_view(line).substr(0, eq)),
                                  trim(std::string_view(line).substr(eq + 1)));
    }
    return f;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string IniFile::serialize() const {
    std::string out;
    auto emit = [&out](const IniSection& s) {
        if (!s.name.empty()) {
            out += "[" + s.name + (s.arg.empty() ? "" : " " + s.arg) + "]\n";
        }
        for (auto& [k, v] : s.entries) out += k + " = " + v + "\n";
    };
    emit(global);
    for (auto& s : sections) {
        if (!out.empty()) out += "\n";
        emit(s);
    }
    return out;
}

void IniFile::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << serialize();
}

IniSection* IniFile::find_section(std::string_view name, std::string_view arg) {
    for (auto& s : sections)
        if (s.name == name && (arg.empty() || s.arg == arg)) return &s;
    return nullptr;
}

const IniSection* IniFile::find_section(std::string_view name, std::string_view arg) const {
    for (auto& s : sections)
        if (s.name == name && (arg.empty() || s.arg == arg)) return &s;
    return nullptr;
}

std::vector<const IniSection*> IniFile::sections_named(std::string_view name) const {
    std::vector<const IniSection*> out;
    for (auto& s : sections)
        if (s.name == name) out.push_back(&s);
    return out;
}

IniSection& IniFile::add_section(std::string_view name, std::string_view arg) {
    IniSection s;
    s.name = std::string(name);
    s.arg = std::string(arg);
    sections.push_back(std::move(s));
    return sections.back();
}

} // namespace sdfkit
