#include "sdfkit/geom/mesh_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdfkit {

namespace {

// "3", "3/1", "3//2", "3/1/2" -> vertex index; also OBJ negative (relative) indices
long parse_obj_index(const std::string& tok, const std::string& path, std::size_t lineno) {
    const std::size_t slash = tok.find('/');
    const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
    try {
        return std::stol(head);
    } catch (...) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad face index '" +
                                 tok + "'");
    }
}

} // namespace

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    TriangleMesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string tok;
            while (ss >> tok) {
                long i = parse_obj_index(tok, path, lineno);
                if (i < 0) i = long(mesh.vertices.size()) + i + 1;
                if (i < 1 || std::size_t(i) > mesh.vertices.size())
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": face index out of range");
                idx.push_back(std::uint32_t(i - 1));
            }
            if (idx.size() < 3)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        }
        // vn/vt/usemtl/etc ignored
    }
    const std::size_t dropped = drop_degenerate_triangles(mesh);
    if (dropped > 0)
        std::fprintf(stderr, "%s: dropped %zu degenerate triangle(s)\n", path.c_str(), dropped);
    return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path,
              const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (const auto& c : comments) out << "# " << c << "\n";
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void save_ply(const TriangleMesh& mesh, const std::string& path,
              const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "ply\nformat binary_little_endian 1.0\n";
    for (const auto& c : comments) out << "comment " << c << "\n";
    out << "element vertex " << mesh.vertices.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar int vertex_indices\n"
        << "end_header\n";
    for (const Vec3& v : mesh.vertices) {
        const float f[3] = {float(v.x), float(v.y), float(v.z)};
        out.write(reinterpret_cast<const char*>(f), sizeof f);
    }
    for (const auto& t : mesh.triangles) {
        const unsigned char n = 3;
        const std::int32_t idx[3] = {std::int32_t(t[0]), std::int32_t(t[1]), std::int32_t(t[2])};
        out.write(reinterpret_cast<const char*>(&n), 1);
        out.write(reinterpret_cast<const char*>(idx), sizeof idx);
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace sdfkit
