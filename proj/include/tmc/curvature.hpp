#pragma once

#include <cmath>
#include <vector>

#include "tmc/mesh.hpp"

namespace tmc {

// Per-vertex discrete curvature data. H is the sum of the principal
// curvatures (H = k1 + k2, positive on a sphere with inner normals), K the
// angle-defect Gauss curvature, area the mixed Voronoi weight.
struct DiscreteCurvatures {
    std::vector<Vec3> normal;     // unit inner normals
    std::vector<double> mean;     // H, 1/length
    std::vector<double> gauss;    // K, 1/length^2
    std::vector<double> area;     // length^2, partitions the total area
    double total_area = 0.0;      // sum of face areas
};

using VertexField = std::vector<double>;

namespace detail {

// Mixed Voronoi area of Meyer et al.: circumcentric pieces for non-obtuse
// triangles, T/2 at the obtuse corner and T/4 elsewhere otherwise. Keeps all
// weights positive and partitions the face area exactly.
inline void accumulate_mixed_area(const Vec3& a, const Vec3& b, const Vec3& c, double& wa,
                                  double& wb, double& wc) {
    const Vec3 ab = b - a, ac = c - a, bc = c - b;
    const double area = 0.5 * ab.cross(ac).norm();
    const double dot_a = ab.dot(ac);
    const double dot_b = (-ab).dot(bc);
    const double dot_c = (-ac).dot(-bc);
    if (dot_a < 0.0) {
        wa += area / 2.0;
        wb += area / 4.0;
        wc += area / 4.0;
    } else if (dot_b < 0.0) {
        wa += area / 4.0;
        wb += area / 2.0;
        wc += area / 4.0;
    } else if (dot_c < 0.0) {
        wa += area / 4.0;
        wb += area / 4.0;
        wc += area / 2.0;
    } else {
        // cot(alpha) = dot/(2*area) at each corner; each edge contributes
        // |e|^2 cot(opposite)/8 to both of its endpoints
        const double cot_a = dot_a / (2.0 * area);
        const double cot_b = dot_b / (2.0 * area);
        const double cot_c = dot_c / (2.0 * area);
        wa += (ab.squaredNorm() * cot_c + ac.squaredNorm() * cot_b) / 8.0;
        wb += (ab.squaredNorm() * cot_c + bc.squaredNorm() * cot_a) / 8.0;
        wc += (ac.squaredNorm() * cot_b + bc.squaredNorm() * cot_a) / 8.0;
    }
}

}  // namespace detail

// Cotangent mean curvature vector over mixed Voronoi areas plus angle-defect
// Gauss curvature. Vertex normals are angle-weighted face normals.
inline DiscreteCurvatures compute_curvatures(const TriangleMesh& mesh) {
    require_valid(mesh, "compute_curvatures");
    const int nv = mesh.vertex_count();

    DiscreteCurvatures c;
    c.normal.assign(nv, Vec3::Zero());
    c.mean.assign(nv, 0.0);
    c.gauss.assign(nv, 0.0);
    c.area.assign(nv, 0.0);
    std::vector<Vec3> hvec(nv, Vec3::Zero());      // 1/2 sum_j w_ij (x_j - x_i)
    std::vector<double> defect(nv, 2.0 * kPi);

    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& cc = mesh.vertices[f[2]];
        const Vec3 n2 = (b - a).cross(cc - a);     // 2*area * inner normal
        const double area2 = n2.norm();
        c.total_area += 0.5 * area2;

        detail::accumulate_mixed_area(a, b, cc, c.area[f[0]], c.area[f[1]], c.area[f[2]]);

        for (int k = 0; k < 3; ++k) {
            const Vec3 u = mesh.vertices[f[(k + 1) % 3]] - mesh.vertices[f[k]];
            const Vec3 v = mesh.vertices[f[(k + 2) % 3]] - mesh.vertices[f[k]];
            const double angle = std::atan2(u.cross(v).norm(), u.dot(v));
            defect[f[k]] -= angle;
            c.normal[f[k]] += angle * n2.normalized();
            // cot at corner k weights the opposite edge (k+1, k+2):
            // A_i * Hvec_i = 1/2 sum_j (cot a_ij + cot b_ij)(x_j - x_i)
            const double cot = u.dot(v) / u.cross(v).norm();
            const int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
            const Vec3 d = mesh.vertices[j] - mesh.vertices[i];
            hvec[i] += 0.5 * cot * d;
            hvec[j] -= 0.5 * cot * d;
        }
    }

    for (int i = 0; i < nv; ++i) {
        if (!(c.area[i] > 0.0))
            throw geometry_error("compute_curvatures: zero Voronoi area at a vertex");
        const double nn = c.normal[i].norm();
        if (!(nn > 0.0))
            throw geometry_error("compute_curvatures: degenerate vertex normal");
        c.normal[i] /= nn;
        c.mean[i] = hvec[i].dot(c.normal[i]) / c.area[i];
        c.gauss[i] = defect[i] / c.area[i];
    }
    return c;
}

// Cotangent Laplace-Beltrami of a per-vertex scalar field (div grad sign,
// so it vanishes on constants and is negative semidefinite).
inline VertexField laplace_beltrami(const TriangleMesh& mesh, const DiscreteCurvatures& curv,
                                    const VertexField& field) {
    const int nv = mesh.vertex_count();
    VertexField out(nv, 0.0);
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
            const Vec3 u = mesh.vertices[i] - mesh.vertices[f[k]];
            const Vec3 v = mesh.vertices[j] - mesh.vertices[f[k]];
            const double cot = u.dot(v) / u.cross(v).norm();
            const double d = field[j] - field[i];
            out[i] += 0.5 * cot * d;
            out[j] -= 0.5 * cot * d;
        }
    }
    for (int i = 0; i < nv; ++i) out[i] /= curv.area[i];
    return out;
}

// Area-weighted L2 inner product of two vertex fields.
inline double l2_inner(const VertexField& f, const VertexField& g,
                       const DiscreteCurvatures& curv) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * curv.area[i];
    return s;
}

inline double l2_norm(const VertexField& f, const DiscreteCurvatures& curv) {
    return std::sqrt(l2_inner(f, f, curv));
}

// Displace every vertex along its (inner) normal by the given scalar field.
inline TriangleMesh displaced_along_normals(const TriangleMesh& mesh,
                                            const DiscreteCurvatures& curv,
                                            const VertexField& amount) {
    TriangleMesh out = mesh;
    for (int i = 0; i < mesh.vertex_count(); ++i) out.vertices[i] += amount[i] * curv.normal[i];
    return out;
}

}  // namespace tmc
