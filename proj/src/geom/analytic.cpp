#include "sdfkit/geom/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sdfkit/util/ini.hpp"

namespace sdfkit {

AnalyticShape AnalyticShape::sphere(const Vec3& c, double r) {
    AnalyticShape s;
    s.kind = Kind::Sphere;
    s.center = c;
    s.radius = r;
    return s;
}

AnalyticShape AnalyticShape::box(const Vec3& c, const Vec3& half) {
    AnalyticShape s;
    s.kind = Kind::Box;
    s.center = c;
    s.half_extents = half;
    return s;
}

AnalyticShape AnalyticShape::torus(const Vec3& c, double major, double minor) {
    AnalyticShape s;
    s.kind = Kind::Torus;
    s.center = c;
    s.major_radius = major;
    s.radius = minor;
    return s;
}

AnalyticShape AnalyticShape::capsule(const Vec3& a, const Vec3& b, double r) {
    AnalyticShape s;
    s.kind = Kind::Capsule;
    s.seg_a = a;
    s.seg_b = b;
    s.radius = r;
    return s;
}

AnalyticShape AnalyticShape::make_union(std::vector<AnalyticShape> parts) {
    AnalyticShape s;
    s.kind = Kind::Union;
    s.members = std::move(parts);
    return s;
}

void AnalyticShape::validate() const {
    switch (kind) {
        case Kind::Sphere:
            if (radius <= 0.0) throw std::invalid_argument("sphere radius must be > 0");
            break;
        case Kind::Box:
            if (half_extents.x <= 0.0 || half_extents.y <= 0.0 || half_extents.z <= 0.0)
                throw std::invalid_argument("box half-extents must be > 0");
            break;
        case Kind::Torus:
            if (major_radius <= 0.0 || radius <= 0.0)
                throw std::invalid_argument("torus radii must be > 0");
            break;
        case Kind::Capsule:
            if (radius <= 0.0) throw std::invalid_argument("capsule radius must be > 0");
            break;
        case Kind::Union:
            if (members.empty()) throw std::invalid_argument("union needs at least one member");
            for (const auto& m : members) m.validate();
            break;
    }
}

double signed_distance(const AnalyticShape& s, const Vec3& p) {
    switch (s.kind) {
        case AnalyticShape::Kind::Sphere:
            return norm(p - s.center) - s.radius;
        case AnalyticShape::Kind::Box: {
            const Vec3 q{std::abs(p.x - s.center.x) - s.half_extents.x,
                         std::abs(p.y - s.center.y) - s.half_extents.y,
                         std::abs(p.z - s.center.z) - s.half_extents.z};
            const Vec3 qpos{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
            return norm(qpos) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
        }
        case AnalyticShape::Kind::Torus: {
            const Vec3 q = p - s.center;
            const double ring = std::hypot(q.x, q.y) - s.major_radius;
            return std::hypot(ring, q.z) - s.radius;
        }
        case AnalyticShape::Kind::Capsule: {
            const Vec3 ab = s.seg_b - s.seg_a;
            const double len2 = norm2(ab);
            double t = len2 > 0.0 ? dot(p - s.seg_a, ab) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            return norm(p - (s.seg_a + ab * t)) - s.radius;
        }
        case AnalyticShape::Kind::Union: {
            double best = signed_distance(s.members[0], p);
            for (std::size_t i = 1; i < s.members.size(); ++i)
                best = std::min(best, signed_distance(s.members[i], p));
            return best;
        }
    }
    return 0.0;
}

std::string AnalyticShape::describe() const {
    auto num = [](double v) { return format_double(v); };
    switch (kind) {
        case Kind::Sphere:
            return "sphere(" + num(center.x) + "," + num(center.y) + "," + num(center.z) + "," +
                   num(radius) + ")";
        case Kind::Box:
            return "box(" + num(center.x) + "," + num(center.y) + "," + num(center.z) + "," +
                   num(half_extents.x) + "," + num(half_extents.y) + "," + num(half_extents.z) + ")";
        case Kind::Torus:
            return "torus(" + num(center.x) + "," + num(center.y) + "," + num(center.z) + "," +
                   num(major_radius) + "," + num(radius) + ")";
        case Kind::Capsule:
            return "capsule(" + num(seg_a.x) + "," + num(seg_a.y) + "," + num(seg_a.z) + "," +
                   num(seg_b.x) + "," + num(seg_b.y) + "," + num(seg_b.z) + "," + num(radius) + ")";
        case Kind::Union: {
            std::string out = "union(";
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (i) out += ",";
                out += members[i].describe();
            }
            return out + ")";
        }
    }
    return {};
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("analytic shape '" + text + "': " + msg + " at offset " +
                                 std::to_string(pos));
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string ident() {
        skip_ws();
        std::size_t b = pos;
        while (pos < text.size() && (std::isalpha((unsigned char)text[pos]) || text[pos] == '_'))
            ++pos;
        if (pos == b) fail("expected shape name");
        return text.substr(b, pos - b);
    }
    double number() {
        skip_ws();
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number");
        pos += std::size_t(end - begin);
        return v;
    }
};

AnalyticShape parse_expr(Cursor& c) {
    std::string name = c.ident();
    c.expect('(');
    AnalyticShape out;
    if (name == "sphere") {
        double cx = c.number(); c.expect(','); double cy = c.number(); c.expect(',');
        double cz = c.number(); c.expect(','); double r = c.number();
        out = AnalyticShape::sphere({cx, cy, cz}, r);
    } else if (name == "box") {
        double cx = c.number(); c.expect(','); double cy = c.number(); c.expect(',');
        double cz = c.number(); c.expect(','); double hx = c.number(); c.expect(',');
        double hy = c.number(); c.expect(','); double hz = c.number();
        out = AnalyticShape::box({cx, cy, cz}, {hx, hy, hz});
    } else if (name == "torus") {
        double cx = c.number(); c.expect(','); double cy = c.number(); c.expect(',');
        double cz = c.number(); c.expect(','); double R = c.number(); c.expect(',');
        double r = c.number();
        out = AnalyticShape::torus({cx, cy, cz}, R, r);
    } else if (name == "capsule") {
        double ax = c.number(); c.expect(','); double ay = c.number(); c.expect(',');
        double az = c.number(); c.expect(','); double bx = c.number(); c.expect(',');
        double by = c.number(); c.expect(','); double bz = c.number(); c.expect(',');
        double r = c.number();
        out = AnalyticShape::capsule({ax, ay, az}, {bx, by, bz}, r);
    } else if (name == "union") {
        std::vector<AnalyticShape> parts;
        parts.push_back(parse_expr(c));
        while (c.accept(',')) parts.push_back(parse_expr(c));
        out = AnalyticShape::make_union(std::move(parts));
    } else {
        c.fail("unknown shape '" + name + "'");
    }
    c.expect(')');
    return out;
}

} // namespace

AnalyticShape parse_analytic_shape(const std::string& text) {
    Cursor c{text};
    AnalyticShape s = parse_expr(c);
    c.skip_ws();
    if (c.pos != text.size()) c.fail("trailing characters");
    s.validate();
    return s;
}

} // namespace sdfkit
