#include "sdfkit/data/manifest.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "sdfkit/util/ini.hpp"

namespace sdfkit {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
    return buf;
}

std::uint64_t parse_hex64(const std::string& s, const char* what) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 0);
    if (errno != 0 || end == s.c_str() || *end != '\0')
        throw std::runtime_error(std::string("manifest: bad ") + what + ": '" + s + "'");
    return v;
}

} // namespace

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
    for (const ManifestEntry& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<const ManifestEntry*> DatasetManifest::split_entries(const std::string& split) const {
    std::vector<const ManifestEntry*> out;
    for (const ManifestEntry& e : entries)
        if (e.split == split) out.push_back(&e);
    return out;
}

void DatasetManifest::validate() const {
    sampling.validate();
    std::set<std::string> ids;
    for (const ManifestEntry& e : entries) {
        if (e.id.empty()) throw std::runtime_error("manifest: empty shape id");
        if (!ids.insert(e.id).second)
            throw std::runtime_error("manifest: duplicate shape id '" + e.id + "'");
        if (e.split != "train" && e.split != "test")
            throw std::runtime_error("manifest: shape '" + e.id + "' has unknown split '" +
                                     e.split + "' (expected train or test)");
        if (e.file.empty())
            throw std::runtime_error("manifest: shape '" + e.id + "' has no sample file");
        if (e.source.empty())
            throw std::runtime_error("manifest: shape '" + e.id + "' has no source");
    }
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    m.validate();
    IniFile f;
    f.global.set("version", "1");
    f.global.set("seed", std::to_string(m.seed));
    f.global.set("config_hash", hex64(m.config_hash));

    IniSection& s = f.add_section("sampling");
    s.set("count", std::to_string(m.sampling.count));
    s.set("near_fraction_1", format_double(m.sampling.near_fraction_1));
    s.set("near_fraction_2", format_double(m.sampling.near_fraction_2));
    s.set("uniform_fraction", format_double(m.sampling.uniform_fraction));
    s.set("noise_std_1", format_double(m.sampling.noise_std_1));
    s.set("noise_std_2", format_double(m.sampling.noise_std_2));
    s.set("proxy_resolution", std::to_string(m.sampling.proxy_resolution));

    for (const ManifestEntry& e : m.entries) {
        IniSection& sec = f.add_section("shape", e.id);
        sec.set("file", e.file);
        sec.set("source", e.source);
        sec.set("split", e.split);
        sec.set("count", std::to_string(e.count));
        sec.set("seed", std::to_string(e.seed));
    }
    f.save(path);
}

DatasetManifest load_manifest(const std::string& path) {
    IniFile f = IniFile::load(path);
    if (f.global.get_int("version", -1) != 1)
        throw std::runtime_error(path + ": unsupported manifest version");

    DatasetManifest m;
    m.seed = f.global.get_u64("seed", 0);
    if (const std::string* h = f.global.find("config_hash"))
        m.config_hash = parse_hex64(*h, "config_hash");

    const IniSection* s = f.find_section("sampling");
    if (!s) throw std::runtime_error(path + ": missing [sampling] section");
    m.sampling.count = std::size_t(s->require_int("count"));
    m.sampling.near_fraction_1 = s->require_double("near_fraction_1");
    m.sampling.near_fraction_2 = s->require_double("near_fraction_2");
    m.sampling.uniform_fraction = s->require_double("uniform_fraction");
    m.sampling.noise_std_1 = s->require_double("noise_std_1");
    m.sampling.noise_std_2 = s->require_double("noise_std_2");
    m.sampling.proxy_resolution = int(s->get_int("proxy_resolution", 96));

    for (const IniSection* sec : f.sections_named("shape")) {
        ManifestEntry e;
        e.id = sec->arg;
        e.file = sec->require("file");
        e.source = sec->require("source");
        e.split = sec->get("split", "train");
        e.count = std::size_t(sec->require_int("count"));
        e.seed = sec->get_u64("seed", 0);
        m.entries.push_back(std::move(e));
    }
    m.validate();

    // Resolve sample files against the manifest location and insist they exist.
    namespace fs = std::filesystem;
    fs::path dir = fs::path(path).parent_path();
    for (ManifestEntry& e : m.entries) {
        fs::path p(e.file);
        if (p.is_relative()) p = dir / p;
        if (!fs::exists(p))
            throw std::runtime_error(path + ": sample file for shape '" + e.id +
                                     "' not found: " + p.string());
        e.file = p.string();
    }
    return m;
}

} // namespace sdfkit
