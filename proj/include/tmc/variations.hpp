#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "tmc/mesh.hpp"

namespace tmc {

// Edge-based total mean curvature: sum over interior edges of edge length
// times the signed dihedral turning angle (positive on convex edges under
// the inner-normal winding). An independent route to int H dvol that shares
// nothing with the cotangent pipeline, used as a cross-check oracle.
inline double edge_total_mean_curvature(const TriangleMesh& mesh) {
    std::unordered_map<std::uint64_t, std::array<int, 4>> edge_data;  // i, j, k, l
    edge_data.reserve(mesh.faces.size() * 3 / 2);
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
            const std::uint64_t key = detail::edge_key(a, b);
            auto it = edge_data.find(key);
            if (it == edge_data.end())
                edge_data.emplace(key, std::array<int, 4>{a, b, c, -1});
            else
                it->second[3] = c;
        }
    }
    double total = 0.0;
    for (const auto& [key, e] : edge_data) {
        (void)key;
        if (e[3] < 0) continue;  // boundary edges carry no dihedral
        const Vec3& xi = mesh.vertices[e[0]];
        const Vec3& xj = mesh.vertices[e[1]];
        const Vec3& xk = mesh.vertices[e[2]];
        const Vec3& xl = mesh.vertices[e[3]];
        const Vec3 ev = xj - xi;
        const double len = ev.norm();
        const Vec3 n1 = ev.cross(xk - xi);
        const Vec3 n2 = (xl - xi).cross(ev);
        const double sin_t = -n1.cross(n2).dot(ev) / len;
        const double cos_t = n1.dot(n2);
        total += len * std::atan2(sin_t, cos_t);
    }
    return total;
}

}  // namespace tmc
