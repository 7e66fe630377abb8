#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "tmc/mesh.hpp"

namespace tmc {

// Wavefront OBJ, `v`/`f` records only, 1-based indices. Face winding carries
// the orientation; everything else in the file is ignored.
inline TriangleMesh read_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                throw parse_error("obj line " + std::to_string(lineno) + ": bad vertex record");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            std::string tok;
            int k = 0;
            while (ls >> tok) {
                if (k >= 3)
                    throw parse_error("obj line " + std::to_string(lineno) +
                                      ": only triangles are supported");
                // accept v, v/vt, v/vt/vn, v//vn forms; only v is used
                const std::size_t slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                int idx = 0;
                try {
                    idx = std::stoi(head);
                } catch (...) {
                    throw parse_error("obj line " + std::to_string(lineno) + ": bad face index");
                }
                if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<int>(mesh.vertices.size()))
                    throw parse_error("obj line " + std::to_string(lineno) +
                                      ": face index out of range");
                f[k++] = idx - 1;
            }
            if (k != 3)
                throw parse_error("obj line " + std::to_string(lineno) +
                                  ": face needs exactly 3 vertices");
            mesh.faces.push_back(f);
        }
        // comments, groups, normals etc. ignored
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw parse_error("obj: no vertices or faces found");
    return mesh;
}

inline TriangleMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("obj: cannot open " + path);
    return read_obj(in);
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    for (const Vec3& v : mesh.vertices)
        out << "v " << format_g12(v.x()) << ' ' << format_g12(v.y()) << ' ' << format_g12(v.z())
            << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_obj(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw parse_error("obj: cannot open " + path + " for writing");
    write_obj(out, mesh);
}

}  // namespace tmc
