#include "sdfkit/data/samples.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sdfkit {

namespace {

constexpr char kMagic[8] = {'S', 'D', 'F', 'S', 'A', 'M', 'P', '1'};

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw std::runtime_error(path + ": " + what + " (byte offset " + std::to_string(offset) + ")");
}

void put_u32(std::string& out, std::uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    out.append(b, 4);
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::uint32_t get_u32(const char* p) {
    const auto* u = reinterpret_cast<const unsigned char*>(p);
    return std::uint32_t(u[0]) | std::uint32_t(u[1]) << 8 | std::uint32_t(u[2]) << 16 |
           std::uint32_t(u[3]) << 24;
}

float get_f32(const char* p) {
    std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

} // namespace

void SamplingConfig::validate() const {
    if (count < 1) throw std::invalid_argument("sampling: count must be >= 1");
    auto frac_ok = [](double f) { return std::isfinite(f) && f >= 0.0 && f <= 1.0; };
    if (!frac_ok(near_fraction_1) || !frac_ok(near_fraction_2) || !frac_ok(uniform_fraction))
        throw std::invalid_argument("sampling: fractions must lie in [0, 1]");
    double total = near_fraction_1 + near_fraction_2 + uniform_fraction;
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("sampling: fractions must sum to 1");
    if (!(noise_std_1 > 0.0) || !(noise_std_2 > 0.0))
        throw std::invalid_argument("sampling: noise stds must be positive");
    if (proxy_resolution < 2) throw std::invalid_argument("sampling: proxy_resolution must be >= 2");
}

void save_samples(const ShapeSamples& s, const std::string& path) {
    if (s.samples.size() > 0xffffffffu)
        throw std::invalid_argument("save_samples: too many samples for format");
    std::string buf;
    buf.reserve(12 + 16 * s.samples.size());
    buf.append(kMagic, 8);
    put_u32(buf, std::uint32_t(s.samples.size()));
    for (const SdfSample& p : s.samples) {
        put_f32(buf, float(p.x.x));
        put_f32(buf, float(p.x.y));
        put_f32(buf, float(p.x.z));
        put_f32(buf, float(p.s));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

ShapeSamples load_samples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0)
        parse_fail(path, 0, "bad magic, not an SDF sample file");
    if (buf.size() < 12) parse_fail(path, 8, "truncated header, missing sample count");
    std::uint32_t count = get_u32(buf.data() + 8);
    std::size_t need = 12 + std::size_t(count) * 16;
    if (buf.size() < need)
        parse_fail(path, buf.size(), "truncated payload, expected " + std::to_string(need) + " bytes");
    if (buf.size() > need)
        parse_fail(path, need, "trailing bytes after " + std::to_string(count) + " samples");

    ShapeSamples s;
    s.samples.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const char* p = buf.data() + 12 + std::size_t(i) * 16;
        SdfSample& q = s.samples[i];
        q.x = {double(get_f32(p)), double(get_f32(p + 4)), double(get_f32(p + 8))};
        q.s = double(get_f32(p + 12));
        if (!finite(q.x) || !std::isfinite(q.s))
            parse_fail(path, 12 + std::size_t(i) * 16, "non-finite sample " + std::to_string(i));
    }
    return s;
}

void save_samples_text(const ShapeSamples& s, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char line[160];
    for (const SdfSample& p : s.samples) {
        std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g\n", p.x.x, p.x.y, p.x.z, p.s);
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace sdfkit
