#pragma once

#include <cmath>
#include <string>

#include "tmc/curvature.hpp"
#include "tmc/mesh.hpp"

namespace tmc {

// Scalar functionals of one surface. W and T are dimensionless
// (scale-invariant); total_mean_curvature is the unnormalized integral of H.
struct FunctionalReport {
    double willmore = 0.0;              // W = 1/4 int H^2
    double tmc_ratio = 0.0;             // T = int H / sqrt(A)
    double area = 0.0;                  // A
    double volume = 0.0;                // V, positive for inner-normal embeddings
    double iso = 0.0;                   // A / V^(2/3), 0 when V <= 0
    double total_mean_curvature = 0.0;  // int H

    std::string csv_header() const { return "W,T,A,V,iso,intH"; }
    std::string csv_row() const {
        return format_g12(willmore) + "," + format_g12(tmc_ratio) + "," + format_g12(area) + "," +
               format_g12(volume) + "," + format_g12(iso) + "," + format_g12(total_mean_curvature);
    }
};

inline double willmore_energy(const DiscreteCurvatures& curv) {
    double w = 0.0;
    for (std::size_t i = 0; i < curv.mean.size(); ++i)
        w += curv.mean[i] * curv.mean[i] * curv.area[i];
    return 0.25 * w;
}

inline double total_mean_curvature(const DiscreteCurvatures& curv) {
    double s = 0.0;
    for (std::size_t i = 0; i < curv.mean.size(); ++i) s += curv.mean[i] * curv.area[i];
    return s;
}

inline double total_mean_curvature_ratio(const DiscreteCurvatures& curv) {
    if (!(curv.total_area > 0.0))
        throw geometry_error("total_mean_curvature_ratio: zero total area");
    return total_mean_curvature(curv) / std::sqrt(curv.total_area);
}

inline double area(const TriangleMesh& mesh) {
    double a = 0.0;
    for (int f = 0; f < mesh.face_count(); ++f) a += face_normal_area(mesh, f).norm();
    return a;
}

// Signed volume by tetrahedra against the origin. With the inner-normal
// winding this is positive for correctly oriented embedded meshes and equals
// -1/3 int <f, n> dvol.
inline double enclosed_volume(const TriangleMesh& mesh) {
    double v = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        v -= a.dot(b.cross(c)) / 6.0;
    }
    return v;
}

inline double isoperimetric_ratio(const TriangleMesh& mesh) {
    const double v = enclosed_volume(mesh);
    if (!(v > 0.0))
        throw geometry_error("isoperimetric_ratio: non-positive volume (orientation?)");
    return area(mesh) / std::pow(v, 2.0 / 3.0);
}

// Helfrich bending energy int (H/2 - c0)^2; reduces to W at c0 = 0.
inline double helfrich_energy(const DiscreteCurvatures& curv, double c0) {
    double e = 0.0;
    for (std::size_t i = 0; i < curv.mean.size(); ++i) {
        const double d = 0.5 * curv.mean[i] - c0;
        e += d * d * curv.area[i];
    }
    return e;
}

// Minimizer of c0 -> helfrich_energy(curv, c0): c0 = int H / (2A) and
// inf = W - T^2/4.
inline std::pair<double, double> optimal_spontaneous_curvature(const DiscreteCurvatures& curv) {
    if (!(curv.total_area > 0.0))
        throw geometry_error("optimal_spontaneous_curvature: zero total area");
    const double int_h = total_mean_curvature(curv);
    const double c0 = int_h / (2.0 * curv.total_area);
    const double t = int_h / std::sqrt(curv.total_area);
    return {c0, willmore_energy(curv) - 0.25 * t * t};
}

inline FunctionalReport functional_report(const TriangleMesh& mesh,
                                          const DiscreteCurvatures& curv) {
    FunctionalReport r;
    r.willmore = willmore_energy(curv);
    r.total_mean_curvature = total_mean_curvature(curv);
    r.area = curv.total_area;
    r.tmc_ratio = r.total_mean_curvature / std::sqrt(r.area);
    r.volume = enclosed_volume(mesh);
    r.iso = r.volume > 0.0 ? r.area / std::pow(r.volume, 2.0 / 3.0) : 0.0;
    return r;
}

inline FunctionalReport functional_report(const TriangleMesh& mesh) {
    return functional_report(mesh, compute_curvatures(mesh));
}

// L2 gradient of T under normal variations: T*H/(2A) - 2K/sqrt(A).
// Vanishes exactly when the surface is a round sphere.
inline VertexField gradient_T(const DiscreteCurvatures& curv) {
    if (!(curv.total_area > 0.0)) throw geometry_error("gradient_T: zero total area");
    const double t = total_mean_curvature_ratio(curv);
    const double a = curv.total_area;
    VertexField g(curv.mean.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = t * curv.mean[i] / (2.0 * a) - 2.0 * curv.gauss[i] / std::sqrt(a);
    return g;
}

// L2 gradient of W = 1/4 int H^2 under normal variations:
// 1/2 (Lap H + |II0|^2 H) with |II0|^2 = H^2/2 - 2K. The 1/2 prefactor makes
// the field match central finite differences of the energy.
inline VertexField gradient_W(const TriangleMesh& mesh, const DiscreteCurvatures& curv) {
    VertexField lap_h = laplace_beltrami(mesh, curv, curv.mean);
    VertexField g(curv.mean.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double h = curv.mean[i];
        const double tracefree2 = 0.5 * h * h - 2.0 * curv.gauss[i];
        g[i] = 0.5 * (lap_h[i] + tracefree2 * h);
    }
    return g;
}

}  // namespace tmc
