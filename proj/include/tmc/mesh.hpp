#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tmc/core.hpp"

namespace tmc {

// Oriented closed triangle mesh. Faces are wound so that the computed face
// normal (b-a)x(c-a) is the *inner* normal of an embedded surface; with that
// convention a round sphere has positive mean curvature H = k1 + k2.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::optional<int> genus_hint;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

struct MeshDiagnostics {
    bool edge_manifold = false;       // every edge on exactly two faces
    bool oriented = false;            // opposite traversal on the two faces
    bool closed = false;              // no boundary edges
    bool has_degenerate_faces = false;
    bool has_isolated_vertices = false;
    int boundary_edges = 0;
    int nonmanifold_edges = 0;
    int euler_characteristic = 0;
    int genus = -1;
    double min_face_area = 0.0;
    double max_face_area = 0.0;
    double min_edge_length = 0.0;
    double max_edge_length = 0.0;

    bool valid() const {
        return edge_manifold && oriented && closed && !has_degenerate_faces &&
               !has_isolated_vertices && genus >= 0;
    }
};

inline double bounding_box_diagonal(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) return 0.0;
    Vec3 lo = mesh.vertices.front(), hi = lo;
    for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

inline Vec3 face_normal_area(const TriangleMesh& mesh, int f) {
    const auto& t = mesh.faces[f];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    return 0.5 * (b - a).cross(c - a);  // |.| = area, direction = inner normal
}

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

}  // namespace detail

// Never throws: problems are reported as flags, the mesh is not touched.
inline MeshDiagnostics validate(const TriangleMesh& mesh) {
    MeshDiagnostics d;
    const int nv = mesh.vertex_count();
    const int nf = mesh.face_count();
    if (nv == 0 || nf == 0) return d;

    const double diag2 = bounding_box_diagonal(mesh) * bounding_box_diagonal(mesh);
    const double area_tol = 1e-12 * diag2;

    std::vector<char> used(nv, 0);
    d.min_face_area = 1e300;
    d.min_edge_length = 1e300;
    // undirected edge -> (count, winding balance). For a closed oriented
    // 2-manifold every edge appears exactly twice, once per direction.
    std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(nf) * 3 / 2);
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) return d;  // out of range: all flags fail
            used[t[k]] = 1;
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            d.has_degenerate_faces = true;
            continue;
        }
        const double area = face_normal_area(mesh, f).norm();
        d.min_face_area = std::min(d.min_face_area, area);
        d.max_face_area = std::max(d.max_face_area, area);
        if (area <= area_tol) d.has_degenerate_faces = true;
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            auto& e = edges[detail::edge_key(a, b)];
            e.first += 1;
            e.second += (a < b) ? 1 : -1;
            const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
            d.min_edge_length = std::min(d.min_edge_length, len);
            d.max_edge_length = std::max(d.max_edge_length, len);
        }
    }
    d.has_isolated_vertices = std::find(used.begin(), used.end(), 0) != used.end();

    bool oriented = true;
    for (const auto& [key, e] : edges) {
        (void)key;
        if (e.first == 1) d.boundary_edges += 1;
        if (e.first > 2) d.nonmanifold_edges += 1;
        if (e.first == 2 && e.second != 0) oriented = false;
    }
    d.edge_manifold = d.nonmanifold_edges == 0;
    d.closed = d.boundary_edges == 0;
    d.oriented = d.edge_manifold && d.closed && oriented;

    const int ne = static_cast<int>(edges.size());
    d.euler_characteristic = nv - ne + nf;
    if (d.closed && d.edge_manifold && !d.has_isolated_vertices) {
        const int chi = d.euler_characteristic;
        if (chi <= 2 && (2 - chi) % 2 == 0) d.genus = (2 - chi) / 2;
    }
    return d;
}

inline void require_valid(const TriangleMesh& mesh, const char* where) {
    const MeshDiagnostics d = validate(mesh);
    if (!d.valid()) {
        std::string msg = std::string(where) + ": mesh failed validation (";
        if (!d.closed) msg += "open boundary; ";
        if (!d.edge_manifold) msg += "non-manifold edges; ";
        if (!d.oriented) msg += "incoherent orientation; ";
        if (d.has_degenerate_faces) msg += "degenerate faces; ";
        if (d.has_isolated_vertices) msg += "isolated vertices; ";
        msg += ")";
        throw geometry_error(msg);
    }
}

// --- rigid / affine helpers ------------------------------------------------

inline TriangleMesh scaled(TriangleMesh mesh, double s) {
    for (Vec3& v : mesh.vertices) v *= s;
    return mesh;
}

inline TriangleMesh translated(TriangleMesh mesh, const Vec3& t) {
    for (Vec3& v : mesh.vertices) v += t;
    return mesh;
}

inline TriangleMesh rotated(TriangleMesh mesh, const Mat3& R) {
    for (Vec3& v : mesh.vertices) v = R * v;
    return mesh;
}

inline TriangleMesh flipped_orientation(TriangleMesh mesh) {
    for (auto& f : mesh.faces) std::swap(f[1], f[2]);
    return mesh;
}

// --- constructions ----------------------------------------------------------

// Icosphere by midpoint subdivision of the icosahedron, vertices projected to
// the given radius. subdivisions is capped at 8 as a resource guard.
inline TriangleMesh build_icosphere(int subdivisions, double radius) {
    if (subdivisions < 0 || subdivisions > 8)
        throw resource_error("build_icosphere: subdivisions must be in [0, 8]");
    if (!(radius > 0.0)) throw precondition_error("build_icosphere: radius must be positive");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.vertices = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1},
    };
    // outward winding, flipped below to the inner-normal convention
    const int out[20][3] = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},  {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},  {9, 8, 1},
    };
    for (const auto& f : out) m.faces.push_back({f[0], f[2], f[1]});
    for (Vec3& v : m.vertices) v.normalize();

    for (int level = 0; level < subdivisions; ++level) {
        std::unordered_map<std::uint64_t, int> midpoint;
        std::vector<std::array<int, 3>> next;
        next.reserve(m.faces.size() * 4);
        auto mid = [&](int a, int b) {
            const std::uint64_t key = detail::edge_key(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = m.vertex_count();
            m.vertices.push_back((0.5 * (m.vertices[a] + m.vertices[b])).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        for (const auto& f : m.faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    for (Vec3& v : m.vertices) v *= radius;
    m.genus_hint = 0;
    return m;
}

// Torus of revolution (sqrt(x^2+y^2) - R)^2 + z^2 = r^2 on an n_u x n_v grid.
inline TriangleMesh build_torus(double major_R, double minor_r, int n_u, int n_v) {
    if (!(minor_r > 0.0) || !(major_R > 0.0))
        throw precondition_error("build_torus: radii must be positive");
    if (minor_r >= major_R)
        throw geometry_error("build_torus: minor_r >= major_R gives a self-intersecting torus");
    if (n_u < 8 || n_v < 8) throw precondition_error("build_torus: need n_u, n_v >= 8");

    TriangleMesh m;
    m.vertices.reserve(static_cast<std::size_t>(n_u) * n_v);
    for (int i = 0; i < n_u; ++i) {
        const double u = 2.0 * kPi * i / n_u;
        for (int j = 0; j < n_v; ++j) {
            const double v = 2.0 * kPi * j / n_v;
            const double w = major_R + minor_r * std::cos(v);
            m.vertices.push_back({w * std::cos(u), w * std::sin(u), minor_r * std::sin(v)});
        }
    }
    auto id = [&](int i, int j) { return (i % n_u) * n_v + (j % n_v); };
    for (int i = 0; i < n_u; ++i) {
        for (int j = 0; j < n_v; ++j) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), dd = id(i, j + 1);
            // wound so the normal points into the solid tube
            m.faces.push_back({a, c, b});
            m.faces.push_back({a, dd, c});
        }
    }
    m.genus_hint = 1;
    return m;
}

// 1:4 midpoint subdivision. Refines the polyhedron (no smoothing).
inline TriangleMesh subdivide_midpoint(const TriangleMesh& mesh) {
    TriangleMesh m = mesh;
    std::unordered_map<std::uint64_t, int> midpoint;
    std::vector<std::array<int, 3>> next;
    next.reserve(m.faces.size() * 4);
    auto mid = [&](int a, int b) {
        const std::uint64_t key = detail::edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = m.vertex_count();
        m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& f : mesh.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        next.push_back({f[0], ab, ca});
        next.push_back({f[1], bc, ab});
        next.push_back({f[2], ca, bc});
        next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
    return m;
}

// Concatenates meshes (no welding).
inline TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts) {
    TriangleMesh out;
    for (const TriangleMesh& p : parts) {
        const int base = out.vertex_count();
        out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
        for (const auto& f : p.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
    return out;
}

// Identifies vertices closer than tol (spatial hash on a tol-grid, then exact
// distance check against earlier candidates in neighboring cells).
inline TriangleMesh weld_vertices(const TriangleMesh& mesh, double tol) {
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    std::vector<int> remap(mesh.vertex_count(), -1);
    TriangleMesh out;
    auto cell_key = [&](long long ix, long long iy, long long iz) {
        std::uint64_t h = 1469598103934665603ull;
        for (long long v : {ix, iy, iz}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    };
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        const Vec3& v = mesh.vertices[i];
        const long long ix = static_cast<long long>(std::floor(v.x() / tol));
        const long long iy = static_cast<long long>(std::floor(v.y() / tol));
        const long long iz = static_cast<long long>(std::floor(v.z() / tol));
        int found = -1;
        for (long long dx = -1; dx <= 1 && found < 0; ++dx)
            for (long long dy = -1; dy <= 1 && found < 0; ++dy)
                for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = grid.find(cell_key(ix + dx, iy + dy, iz + dz));
                    if (it == grid.end()) continue;
                    for (int j : it->second)
                        if ((out.vertices[j] - v).norm() <= tol) {
                            found = j;
                            break;
                        }
                }
        if (found < 0) {
            found = out.vertex_count();
            out.vertices.push_back(v);
            grid[cell_key(ix, iy, iz)].push_back(found);
        }
        remap[i] = found;
    }
    for (const auto& f : mesh.faces) {
        const std::array<int, 3> g = {remap[f[0]], remap[f[1]], remap[f[2]]};
        if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
    }
    out.genus_hint = mesh.genus_hint;
    return out;
}

// Drops vertices referenced by no face, remapping indices.
inline TriangleMesh remove_unused_vertices(const TriangleMesh& mesh) {
    std::vector<int> remap(mesh.vertex_count(), -1);
    TriangleMesh out;
    out.genus_hint = mesh.genus_hint;
    for (const auto& f : mesh.faces) {
        std::array<int, 3> g{};
        for (int k = 0; k < 3; ++k) {
            if (remap[f[k]] < 0) {
                remap[f[k]] = out.vertex_count();
                out.vertices.push_back(mesh.vertices[f[k]]);
            }
            g[k] = remap[f[k]];
        }
        out.faces.push_back(g);
    }
    return out;
}

// Conforming local refinement by repeated edge splits: any edge whose midpoint
// lies within `radius` of `center` and whose length exceeds
// target_edge_length(distance to center) is bisected (splitting both adjacent
// faces, so no hanging nodes appear). Used to track curvature concentration
// near an inversion center.
inline TriangleMesh refine_near(const TriangleMesh& mesh, const Vec3& center, double radius,
                                const std::function<double(double)>& target_edge_length,
                                int max_passes = 40) {
    TriangleMesh m = mesh;
    for (int pass = 0; pass < max_passes; ++pass) {
        // adjacency rebuilt per pass; each pass splits an independent edge set
        std::unordered_map<std::uint64_t, std::vector<int>> edge_faces;
        for (int f = 0; f < m.face_count(); ++f)
            for (int k = 0; k < 3; ++k)
                edge_faces[detail::edge_key(m.faces[f][k], m.faces[f][(k + 1) % 3])].push_back(f);

        std::vector<std::pair<double, std::uint64_t>> marked;
        for (const auto& [key, fs] : edge_faces) {
            (void)fs;
            const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
            const Vec3 mid = 0.5 * (m.vertices[a] + m.vertices[b]);
            const double dist = (mid - center).norm();
            if (dist > radius) continue;
            const double len = (m.vertices[a] - m.vertices[b]).norm();
            if (len > target_edge_length(dist)) marked.push_back({-len, key});
        }
        if (marked.empty()) break;
        std::sort(marked.begin(), marked.end());  // longest edges first

        std::vector<char> face_touched(m.face_count(), 0);
        int splits = 0;
        for (const auto& [neg_len, key] : marked) {
            (void)neg_len;
            const auto& fs = edge_faces[key];
            if (fs.size() != 2) continue;
            if (face_touched[fs[0]] || face_touched[fs[1]]) continue;
            const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
            const int mid_idx = m.vertex_count();
            m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
            for (int f : fs) {
                face_touched[f] = 1;
                auto tri = m.faces[f];
                int k = 0;
                while (!((tri[k] == a && tri[(k + 1) % 3] == b) ||
                         (tri[k] == b && tri[(k + 1) % 3] == a)))
                    ++k;
                const int p = tri[k], q = tri[(k + 1) % 3], r = tri[(k + 2) % 3];
                m.faces[f] = {p, mid_idx, r};
                m.faces.push_back({mid_idx, q, r});
            }
            ++splits;
        }
        if (splits == 0) break;
    }
    return m;
}

}  // namespace tmc
