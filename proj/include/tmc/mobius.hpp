#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "tmc/functionals.hpp"
#include "tmc/mesh.hpp"

namespace tmc {

struct InversionCenter {
    Vec3 a = Vec3::Zero();
    double clearance = 0.0;  // distance from a to the surface
};

// One row per transform parameter; rows with a clearance violation are
// flagged instead of aborting the sweep.
struct SweepSeries {
    std::vector<double> parameter;
    std::vector<double> tmc_ratio;
    std::vector<double> willmore;
    std::vector<char> error_flag;
    std::optional<double> fitted_decay_exponent;

    void write_csv(std::ostream& out, const std::string& comment) const {
        if (!comment.empty()) out << "# " << comment << '\n';
        out << "param,T,W,error_flag\n";
        for (std::size_t i = 0; i < parameter.size(); ++i)
            out << format_g12(parameter[i]) << ',' << format_g12(tmc_ratio[i]) << ','
                << format_g12(willmore[i]) << ',' << int(error_flag[i]) << '\n';
    }
};

namespace detail {

inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson's barycentric region walk
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + (d1 / (d1 - d3)) * ab)).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + (d2 / (d2 - d6)) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return (p - (b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

}  // namespace detail

inline double distance_to_surface(const TriangleMesh& mesh, const Vec3& p) {
    double d = 1e300;
    for (const auto& f : mesh.faces)
        d = std::min(d, detail::point_triangle_distance(p, mesh.vertices[f[0]],
                                                        mesh.vertices[f[1]], mesh.vertices[f[2]]));
    return d;
}

// Sphere inversion x -> (x - a)/|x - a|^2. The map reverses orientation, so
// face windings are flipped to keep the computed normals inward.
inline TriangleMesh sphere_inversion(const TriangleMesh& mesh, const Vec3& a) {
    const double clearance = distance_to_surface(mesh, a);
    if (clearance <= 1e-9 * bounding_box_diagonal(mesh))
        throw precondition_error("sphere_inversion: center lies on (or too close to) the surface");
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) {
        const Vec3 d = v - a;
        v = d / d.squaredNorm();
    }
    for (auto& f : out.faces) std::swap(f[1], f[2]);
    return out;
}

struct InvarianceCheck {
    double willmore_before = 0.0;
    double willmore_after = 0.0;
    double rel_gap = 0.0;
};

// Discrete probe of the conformal invariance of W; the gap is pure
// discretization error and shrinks under refinement.
inline InvarianceCheck willmore_invariance_check(const TriangleMesh& mesh, const Vec3& a) {
    InvarianceCheck chk;
    chk.willmore_before = willmore_energy(compute_curvatures(mesh));
    chk.willmore_after = willmore_energy(compute_curvatures(sphere_inversion(mesh, a)));
    chk.rel_gap = std::abs(chk.willmore_after - chk.willmore_before) / chk.willmore_before;
    return chk;
}

// Stereographic-type involution T(p) = e3 + 2 (p - e3)/|p - e3|^2.
inline Vec3 stereographic_T(const Vec3& p) {
    const Vec3 e3(0.0, 0.0, 1.0);
    const Vec3 d = p - e3;
    const double n2 = d.squaredNorm();
    if (n2 == 0.0) throw precondition_error("stereographic_T: p = e3 is the pole");
    return e3 + 2.0 * d / n2;
}

inline TriangleMesh apply_stereographic_T(const TriangleMesh& mesh) {
    const Vec3 e3(0.0, 0.0, 1.0);
    if (distance_to_surface(mesh, e3) <= 1e-9 * bounding_box_diagonal(mesh))
        throw precondition_error("apply_stereographic_T: surface passes through e3");
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = stereographic_T(v);
    for (auto& f : out.faces) std::swap(f[1], f[2]);
    return out;
}

// Least-squares sphere through a point cloud; returns (center, radius,
// max relative residual). Linearized fit: |x|^2 - 2<x,c> + |c|^2 - r^2 = 0.
inline std::tuple<Vec3, double, double> best_fit_sphere(const std::vector<Vec3>& pts) {
    Eigen::MatrixXd A(pts.size(), 4);
    Eigen::VectorXd b(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        A(i, 0) = 2.0 * pts[i].x();
        A(i, 1) = 2.0 * pts[i].y();
        A(i, 2) = 2.0 * pts[i].z();
        A(i, 3) = 1.0;
        b(i) = pts[i].squaredNorm();
    }
    const Eigen::Vector4d sol = (A.transpose() * A).ldlt().solve(A.transpose() * b);
    const Vec3 center(sol(0), sol(1), sol(2));
    const double r = std::sqrt(std::max(0.0, sol(3) + center.squaredNorm()));
    double max_rel = 0.0;
    for (const auto& p : pts) max_rel = std::max(max_rel, std::abs((p - center).norm() - r) / r);
    return {center, r, max_rel};
}

// T under inversions centered far away: T(I_a f) -> T(f) at rate O(1/|a|).
// Fits the decay exponent of |T(I_a f) - T(f)| against 1/|a|.
inline SweepSeries blow_down_sweep(const TriangleMesh& mesh, const Vec3& direction,
                                   const std::vector<double>& radii) {
    const Vec3 dir = direction.normalized();
    const double t_base = total_mean_curvature_ratio(compute_curvatures(mesh));
    SweepSeries series;
    for (double r : radii) {
        series.parameter.push_back(r);
        try {
            const TriangleMesh inv = sphere_inversion(mesh, r * dir);
            const auto curv = compute_curvatures(inv);
            series.tmc_ratio.push_back(total_mean_curvature_ratio(curv));
            series.willmore.push_back(willmore_energy(curv));
            series.error_flag.push_back(0);
        } catch (const std::exception&) {
            series.tmc_ratio.push_back(0.0);
            series.willmore.push_back(0.0);
            series.error_flag.push_back(1);
        }
    }
    // log-log fit of the gap against 1/|a|
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (series.error_flag[i]) continue;
        const double gap = std::abs(series.tmc_ratio[i] - t_base);
        if (gap <= 0.0) continue;
        xs.push_back(std::log(1.0 / radii[i]));
        ys.push_back(std::log(gap));
    }
    if (xs.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double n = static_cast<double>(xs.size());
        series.fitted_decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return series;
}

struct BlowUpConfig {
    double refine_radius_factor = 2.0;   // refine within factor * sqrt(t * diam)
    double target_factor = 0.35;         // edge target: factor * max(t, dist)
    int max_passes = 40;
};

// T under inversions approaching the surface along the outward ray from a
// vertex: T(I_{gamma(t)} f) -> T(S^2) = 4 sqrt(pi) as t -> 0. Each row gets
// its own locally refined copy of the base mesh; the refinement is graded so
// mesh edges resolve the inversion scale t near the foot point.
inline SweepSeries blow_up_sweep(const TriangleMesh& mesh, int vertex_index,
                                 const std::vector<double>& t_values,
                                 const BlowUpConfig& config = {}) {
    if (vertex_index < 0 || vertex_index >= mesh.vertex_count())
        throw precondition_error("blow_up_sweep: vertex index out of range");
    const auto base_curv = compute_curvatures(mesh);
    const Vec3 p = mesh.vertices[vertex_index];
    const Vec3 n_in = base_curv.normal[vertex_index];
    const double diam = bounding_box_diagonal(mesh);

    SweepSeries series;
    for (double t : t_values) {
        series.parameter.push_back(t);
        try {
            const double ball = config.refine_radius_factor * std::sqrt(t * diam);
            TriangleMesh fine = refine_near(
                mesh, p, ball,
                [&](double dist) { return config.target_factor * std::max(t, dist); },
                config.max_passes);
            const Vec3 center = p - t * n_in;  // outside: -n_in is the outward normal
            if (distance_to_surface(fine, center) <= 1e-6 * t)
                throw precondition_error("blow_up_sweep: clearance violated");
            const TriangleMesh inv = sphere_inversion(fine, center);
            const auto curv = compute_curvatures(inv);
            series.tmc_ratio.push_back(total_mean_curvature_ratio(curv));
            series.willmore.push_back(willmore_energy(curv));
            series.error_flag.push_back(0);
        } catch (const std::exception&) {
            series.tmc_ratio.push_back(0.0);
            series.willmore.push_back(0.0);
            series.error_flag.push_back(1);
        }
    }
    return series;
}

// Finds an inversion center on the outward ray from a vertex realizing a
// prescribed total mean curvature ratio strictly between T(mesh) and
// T(S^2) = 4 sqrt(pi). Bracketed bisection with a monotonicity pre-scan;
// W is conformally invariant along the whole ray.
inline InversionCenter match_T_by_inversion(const TriangleMesh& mesh, double target_T,
                                            int vertex_index = -1, int prescan_points = 24) {
    const auto curv = compute_curvatures(mesh);
    const double t_mesh = total_mean_curvature_ratio(curv);
    const double t_sphere = 4.0 * std::sqrt(kPi);
    const double lo_T = std::min(t_mesh, t_sphere), hi_T = std::max(t_mesh, t_sphere);
    if (!(target_T > lo_T && target_T < hi_T))
        throw precondition_error(
            "match_T_by_inversion: target must lie strictly between T(mesh) and 4 sqrt(pi)");

    if (vertex_index < 0) {
        // farthest vertex from the centroid: its outward ray escapes the hull
        Vec3 centroid = Vec3::Zero();
        for (const Vec3& v : mesh.vertices) centroid += v;
        centroid /= mesh.vertex_count();
        double best = -1.0;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            const double d = (mesh.vertices[i] - centroid).squaredNorm();
            if (d > best) {
                best = d;
                vertex_index = i;
            }
        }
    }
    const Vec3 p = mesh.vertices[vertex_index];
    const Vec3 outward = -curv.normal[vertex_index];
    const double diam = bounding_box_diagonal(mesh);

    auto t_at = [&](double t) {
        const Vec3 center = p + t * outward;
        return total_mean_curvature_ratio(compute_curvatures(sphere_inversion(mesh, center)));
    };

    // geometric pre-scan from near the surface out to far field
    const double t_min = 0.05 * diam, t_max = 50.0 * diam;
    std::vector<double> ts, vals;
    for (int i = 0; i < prescan_points; ++i) {
        const double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (prescan_points - 1));
        const Vec3 center = p + t * outward;
        if (distance_to_surface(mesh, center) <= 1e-6 * diam)
            throw precondition_error("match_T_by_inversion: ray blocked by the surface");
        ts.push_back(t);
        vals.push_back(t_at(t));
    }
    int bracket = -1;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if ((vals[i] - target_T) * (vals[i + 1] - target_T) <= 0.0) {
            bracket = static_cast<int>(i);
            break;
        }
    }
    if (bracket < 0)
        throw geometry_error("match_T_by_inversion: target not bracketed along the ray");

    double a = ts[bracket], b = ts[bracket + 1];
    double fa = vals[bracket] - target_T;
    const double tol = 1e-3 * std::abs(t_sphere - t_mesh);
    Vec3 result = p + 0.5 * (a + b) * outward;
    for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = t_at(m) - target_T;
        result = p + m * outward;
        if (std::abs(fm) <= tol) break;
        if (fa * fm <= 0.0)
            b = m;
        else {
            a = m;
            fa = fm;
        }
    }
    return {result, distance_to_surface(mesh, result)};
}

}  // namespace tmc
