#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "tmc/axisym.hpp"
#include "tmc/functionals.hpp"
#include "tmc/mesh.hpp"
#include "tmc/mobius.hpp"

namespace tmc {

// --- catenoid bridge ---------------------------------------------------------

// Scales of the two tangent spheres of the catenoid bridge and of its
// Moebius normalization: -lambda S(t) = T(dB_sigma), lambda S(t) = T(dB_{1/sigma}).
struct CatenoidBridgeParams {
    double t = 0.0;
    double r_t = 0.0;       // sphere radius cosh^2 t
    double xi_t = 0.0;      // center height sinh t cosh t + t
    double alpha_t = 0.0;   // cap opening angle, cos(alpha/2) = tanh t
    double sigma_t = 0.0;   // in (0, 1)
    double lambda_t = 0.0;  // rescale factor
    double rho_sigma = 0.0;  // image sphere radius 2 sigma/(1 - sigma^2)
    double zeta_sigma = 0.0; // image sphere center height -(1 + sigma^2)/(1 - sigma^2)
};

// Smallest t with tanh t + t/cosh^2 t > 1 (disjoint spheres), found once.
inline double catenoid_bridge_t_min() {
    static const double t_min = [] {
        auto m = [](double t) { return std::tanh(t) + t / (std::cosh(t) * std::cosh(t)); };
        double lo = 0.1, hi = 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (m(mid) > 1.0 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return t_min;
}

inline CatenoidBridgeParams catenoid_bridge_params(double t) {
    const double m = std::tanh(t) + t / (std::cosh(t) * std::cosh(t));
    if (!(m > 1.0))
        throw geometry_error("catenoid_bridge_params: spheres intersect (t below " +
                             format_g12(catenoid_bridge_t_min()) + ")");
    CatenoidBridgeParams p;
    p.t = t;
    p.r_t = std::cosh(t) * std::cosh(t);
    p.xi_t = std::sinh(t) * std::cosh(t) + t;
    p.alpha_t = 2.0 * std::acos(std::tanh(t));
    // sigma solves sigma^2 - 2 m sigma + 1 = 0 in (0,1)
    p.sigma_t = m - std::sqrt(m * m - 1.0);
    p.rho_sigma = 2.0 * p.sigma_t / (1.0 - p.sigma_t * p.sigma_t);
    p.zeta_sigma = -(1.0 + p.sigma_t * p.sigma_t) / (1.0 - p.sigma_t * p.sigma_t);
    p.lambda_t = p.rho_sigma / p.r_t;
    return p;
}

namespace detail {

// Generating curve of Gamma_t: lower tangent sphere arc, catenoid segment
// cosh(v) for v in [-t, t], upper sphere arc. Tangency angle acos(-tanh t).
// Appends samples piecewise with exact arclength and analytic theta'.
inline ProfileCurve bridge_profile(const CatenoidBridgeParams& p, int sphere_steps,
                                   double catenoid_max_ds) {
    const double t = p.t, r = p.r_t, xi = p.xi_t;
    const double phi_tan = std::acos(-std::tanh(t));
    ProfileCurve curve;

    // lower sphere, theta = phi
    for (int k = 0; k < sphere_steps; ++k) {
        const double phi = phi_tan * k / sphere_steps;
        curve.samples.push_back({r * phi, r * std::sin(phi), -xi - r * std::cos(phi), phi});
    }
    // catenoid: s = r phi_tan + sinh v + sinh t, theta = pi/2 - gd(v)
    const double s_cat0 = r * phi_tan + std::sinh(t);
    double v = -t;
    while (v < t) {
        const double theta = 0.5 * kPi - std::atan(std::sinh(v));
        curve.samples.push_back({s_cat0 + std::sinh(v), std::cosh(v), v, theta});
        v += catenoid_max_ds / std::cosh(v);
    }
    // upper sphere, theta = pi - phi traversed with phi decreasing
    const double s_up0 = r * phi_tan + 2.0 * std::sinh(t);
    for (int k = 0; k <= sphere_steps; ++k) {
        const double phi = phi_tan * (1.0 - static_cast<double>(k) / sphere_steps);
        curve.samples.push_back(
            {s_up0 + r * (phi_tan - phi), r * std::sin(phi), xi + r * std::cos(phi), kPi - phi});
    }
    curve.total_length = curve.samples.back().s;
    return curve;
}

}  // namespace detail

// Profile curve of the bridge surface Gamma_t (two tangent spheres joined by
// the catenoid neck). W(Gamma_t) = 8 pi - 4 pi (1 - tanh t) exactly.
inline ProfileCurve make_bridge_profile(double t, int profile_samples = 400) {
    const CatenoidBridgeParams p = catenoid_bridge_params(t);
    const int sphere_steps = std::max(48, 2 * profile_samples / 5);
    // keep the chord-vs-arc defect below the unit-speed validation tolerance
    const double length_estimate = 2.0 * p.r_t * std::acos(-std::tanh(t)) + 2.0 * std::sinh(t);
    const double ds = std::min(0.3 * std::cbrt(24.0 * 1e-8 * length_estimate),
                               2.0 * std::sinh(t) / std::max(64, profile_samples / 4));
    ProfileCurve curve = detail::bridge_profile(p, sphere_steps, ds);
    validate_profile(curve);
    return curve;
}

inline TriangleMesh build_gamma_t(double t, int profile_samples = 400, int n_phi = 64) {
    TriangleMesh mesh = revolve_profile(make_bridge_profile(t, profile_samples), n_phi);
    mesh.genus_hint = 0;
    return mesh;
}

inline double bridge_willmore_prediction(double t) {
    return 8.0 * kPi - 4.0 * kPi * (1.0 - std::tanh(t));
}

// --- the sub-8pi surfaces Sigma^{1,g}, Sigma^{2,g} ---------------------------

struct SigmaConfig {
    double eps_handle = 0.78;  // Euclidean radius of the transplant ball B_eps(p_i)
    int n_phi = 64;
    int sphere_rings = 128;    // polar resolution of a full great circle
    int handle_samples = 220;  // target sample count of one handle profile
};

namespace detail {

// half-plane image of the bridge under p -> T(lambda p)
inline Vec2 sigma_map(const Vec2& p, double lambda) {
    const double x = lambda * p.x(), z = lambda * p.y();
    const double den = x * x + (z - 1.0) * (z - 1.0);
    return {2.0 * x / den, 1.0 + 2.0 * (z - 1.0) / den};
}

// image of the catenoid segment, sampled adaptively by image chord length
// and turning angle
inline std::vector<Vec2> mapped_catenoid_samples(double t, double lambda, double max_chord,
                                                 double max_turn, int max_samples = 4000) {
    auto point = [&](double v) { return sigma_map({std::cosh(v), v}, lambda); };
    std::vector<double> vs = {-t, t};
    for (int i = 0; i < 6; ++i) {  // seed grid
        std::vector<double> next;
        for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
            next.push_back(vs[k]);
            next.push_back(0.5 * (vs[k] + vs[k + 1]));
        }
        next.push_back(vs.back());
        vs = next;
    }
    bool changed = true;
    while (changed && static_cast<int>(vs.size()) < max_samples) {
        changed = false;
        std::vector<double> next;
        for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
            next.push_back(vs[k]);
            const Vec2 a = point(vs[k]), b = point(vs[k + 1]);
            const Vec2 m = point(0.5 * (vs[k] + vs[k + 1]));
            const double chord = (b - a).norm();
            const double sag = (m - 0.5 * (a + b)).norm();
            if (chord > max_chord || sag > 0.125 * max_turn * chord) {
                next.push_back(0.5 * (vs[k] + vs[k + 1]));
                changed = true;
            }
        }
        next.push_back(vs.back());
        vs = next;
    }
    std::vector<Vec2> out;
    out.reserve(vs.size());
    for (double v : vs) out.push_back(point(v));
    return out;
}

// polar angle of a point on a sphere about the origin, measured from the
// direction `axis`
inline double polar_about(const Vec3& p, const Vec3& axis) {
    return std::acos(std::clamp(p.normalized().dot(axis.normalized()), -1.0, 1.0));
}

struct SigmaGeometry {
    CatenoidBridgeParams params;
    double sigma = 0.0, rho_small = 0.0, rho_big = 0.0;
    Vec2 junction_small = Vec2::Zero();  // on the small sphere, half-plane coords
    Vec2 junction_big = Vec2::Zero();
    double psi_junction_small = 0.0;  // polar angle of the junction about -e3
    double psi_junction_big = 0.0;
    double footprint = 0.0;  // Euclidean reach of the handle from -e3
};

inline SigmaGeometry sigma_geometry(double t) {
    SigmaGeometry g;
    g.params = catenoid_bridge_params(t);
    g.sigma = g.params.sigma_t;
    g.rho_small = g.sigma;
    g.rho_big = 1.0 / g.sigma;
    const double lam = g.params.lambda_t;
    g.junction_small = sigma_map({std::cosh(t), -t}, lam);
    g.junction_big = sigma_map({std::cosh(t), t}, lam);
    g.psi_junction_small = std::acos(-g.junction_small.y() / g.rho_small);
    g.psi_junction_big = std::acos(-g.junction_big.y() / g.rho_big);
    const Vec2 south(0.0, -1.0);
    g.footprint = std::max((g.junction_small - south).norm(), (g.junction_big - south).norm());
    return g;
}

// polar angle (from the south pole) at which a sphere of radius rho crosses
// the ball B_eps(-e3)
inline double eps_crossing_polar(double rho, double eps) {
    const double c = (rho * rho + 1.0 - eps * eps) / (2.0 * rho);
    if (!(c > -1.0 && c < 1.0))
        throw geometry_error("build_sigma_g: eps ball does not cut the sphere");
    return std::acos(c);
}

// south-handle profile from the small-sphere junction to the big-sphere
// junction, optionally extended along both spheres out to the eps crossing
inline std::vector<Vec2> handle_profile(const SigmaGeometry& g, double psi_end_small,
                                        double psi_end_big, const SigmaConfig& cfg) {
    std::vector<Vec2> pts;
    const int n_small = std::max(
        8, static_cast<int>(cfg.sphere_rings * (psi_end_small - g.psi_junction_small) / kPi));
    // small sphere from the eps ring down toward the junction (polar decreasing)
    for (int k = 0; k < n_small; ++k) {
        const double a = psi_end_small +
                         (g.psi_junction_small - psi_end_small) * k / n_small;
        pts.push_back({g.rho_small * std::sin(a), -g.rho_small * std::cos(a)});
    }
    // mapped catenoid (from small junction to big junction)
    const double image_span = (g.junction_big - g.junction_small).norm() +
                              (g.junction_small - Vec2(0, -1)).norm();
    auto cat = mapped_catenoid_samples(g.params.t, g.params.lambda_t,
                                       std::max(1e-4, image_span * 3.0 / cfg.handle_samples), 0.25);
    pts.insert(pts.end(), cat.begin(), cat.end());
    // big sphere from the junction out to the eps ring (polar increasing)
    const int n_big =
        std::max(8, static_cast<int>(cfg.sphere_rings * (psi_end_big - g.psi_junction_big) / kPi));
    for (int k = 1; k <= n_big; ++k) {
        const double a =
            g.psi_junction_big + (psi_end_big - g.psi_junction_big) * k / n_big;
        pts.push_back({g.rho_big * std::sin(a), -g.rho_big * std::cos(a)});
    }
    return pts;
}

// arc of a sphere of radius rho in the half plane, polar angles measured
// from the south pole, inclusive endpoints
inline std::vector<Vec2> sphere_arc(double rho, double psi_from, double psi_to, int rings_full) {
    const int n = std::max(8, static_cast<int>(rings_full * std::abs(psi_to - psi_from) / kPi));
    std::vector<Vec2> pts;
    pts.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double a = psi_from + (psi_to - psi_from) * k / n;
        pts.push_back({rho * std::sin(a), -rho * std::cos(a)});
    }
    return pts;
}

inline void append_skip_first(std::vector<Vec2>& dst, const std::vector<Vec2>& src) {
    dst.insert(dst.end(), src.begin() + 1, src.end());
}

inline Mat3 rotation_from_south(const Vec3& target) {
    return Eigen::Quaterniond::FromTwoVectors(Vec3(0, 0, -1), target).toRotationMatrix();
}

// ordered boundary loop of an open mesh region (single loop expected)
inline std::vector<int> boundary_loop(const TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    std::map<int, int> next;  // directed boundary edges follow face winding
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1) next[a] = b;
        }
    if (next.empty()) throw geometry_error("boundary_loop: mesh is closed");
    std::vector<int> loop;
    const int start = next.begin()->first;
    int cur = start;
    do {
        loop.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end()) throw geometry_error("boundary_loop: open chain");
        cur = it->second;
        if (loop.size() > next.size() + 1)
            throw geometry_error("boundary_loop: multiple loops");
    } while (cur != start);
    if (loop.size() != next.size()) throw geometry_error("boundary_loop: multiple loops");
    return loop;
}

// Umbrella relaxation of selected vertices with reprojection onto their
// sphere: a reparametrization that evens out the zip-band triangles without
// moving the surface.
inline void relax_on_sphere(TriangleMesh& mesh, const std::vector<char>& movable, double radius,
                            int iterations) {
    std::vector<std::vector<int>> neighbors(mesh.vertex_count());
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            neighbors[f[k]].push_back(f[(k + 1) % 3]);
            neighbors[f[k]].push_back(f[(k + 2) % 3]);
        }
    for (int it = 0; it < iterations; ++it) {
        std::vector<Vec3> next = mesh.vertices;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            if (!movable[i] || neighbors[i].empty()) continue;
            Vec3 avg = Vec3::Zero();
            for (int j : neighbors[i]) avg += mesh.vertices[j];
            avg /= static_cast<double>(neighbors[i].size());
            next[i] = radius * (0.5 * (mesh.vertices[i] + avg)).normalized();
        }
        mesh.vertices = std::move(next);
    }
}

// Triangulates the band between two near-concentric loops on a sphere. Both
// loops are ordered by azimuth about `axis`; the band is wound coherently
// with the surrounding mesh (every shared edge must appear once per
// direction), decided by a single whole-band flip.
inline void zip_loops(TriangleMesh& mesh, std::vector<int> loop_a, std::vector<int> loop_b,
                      const Vec3& axis) {
    const Vec3 u = axis.normalized();
    Vec3 e1 = u.unitOrthogonal(), e2 = u.cross(e1);
    auto azimuth = [&](int vid) {
        const Vec3& p = mesh.vertices[vid];
        return std::atan2(p.dot(e2), p.dot(e1));
    };
    auto sort_by_azimuth = [&](std::vector<int>& loop) {
        std::sort(loop.begin(), loop.end(),
                  [&](int a, int b) { return azimuth(a) < azimuth(b); });
    };
    sort_by_azimuth(loop_a);
    sort_by_azimuth(loop_b);

    std::vector<std::array<int, 3>> band;
    const std::size_t na = loop_a.size(), nb = loop_b.size();
    std::size_t ia = 0, ib = 0;
    // align starting points
    {
        double best = 1e300;
        for (std::size_t j = 0; j < nb; ++j) {
            const double d = (mesh.vertices[loop_a[0]] - mesh.vertices[loop_b[j]]).norm();
            if (d < best) {
                best = d;
                ib = j;
            }
        }
    }
    std::size_t steps_a = 0, steps_b = 0;
    while (steps_a < na || steps_b < nb) {
        const int a_cur = loop_a[(ia) % na], b_cur = loop_b[(ib) % nb];
        const int a_next = loop_a[(ia + 1) % na], b_next = loop_b[(ib + 1) % nb];
        const bool advance_a =
            steps_b >= nb ||
            (steps_a < na && (mesh.vertices[a_next] - mesh.vertices[b_cur]).norm() <=
                                 (mesh.vertices[b_next] - mesh.vertices[a_cur]).norm());
        if (advance_a) {
            band.push_back({a_cur, a_next, b_cur});
            ++ia;
            ++steps_a;
        } else {
            band.push_back({b_next, b_cur, a_cur});
            ++ib;
            ++steps_b;
        }
    }

    // coherent orientation: a directed edge may not repeat across the mesh
    std::unordered_set<std::uint64_t> directed;
    directed.reserve(mesh.faces.size() * 3);
    auto dir_key = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) directed.insert(dir_key(f[k], f[(k + 1) % 3]));
    int conflicts = 0, agreements = 0;
    for (const auto& f : band)
        for (int k = 0; k < 3; ++k) {
            if (directed.count(dir_key(f[k], f[(k + 1) % 3]))) ++conflicts;
            if (directed.count(dir_key(f[(k + 1) % 3], f[k]))) ++agreements;
        }
    for (const auto& f : band) {
        if (conflicts > agreements)
            mesh.faces.push_back({f[0], f[2], f[1]});
        else
            mesh.faces.push_back(f);
    }
}

}  // namespace detail

// Genus-g surfaces with Willmore energy 8 pi - 4 pi (g+1)(1 - tanh t) < 8 pi:
// two concentric spheres joined by g+1 Moebius-normalized catenoid bridges
// (variant 1), or their image under the involution T (variant 2, whose total
// mean curvature ratio approaches sqrt(32 pi)). Handle sites: the south pole,
// plus +e3 for genus 1 in variant 1, plus a ring at polar angle ~120 deg
// otherwise (variant 2 requires |e3 - p_i| > 1).
inline TriangleMesh build_sigma_g(double t, int genus, int variant,
                                  const SigmaConfig& cfg = {}) {
    if (variant != 1 && variant != 2)
        throw precondition_error("build_sigma_g: variant must be 1 or 2");
    if (genus < 0) throw precondition_error("build_sigma_g: genus must be >= 0");
    const detail::SigmaGeometry g = detail::sigma_geometry(t);
    const double weld_tol = 1e-9 * g.rho_big;

    // the axisymmetric cases avoid any stitching
    if (genus == 0 || (genus == 1 && variant == 1)) {
        TriangleMesh sigma1;
        if (genus == 0) {
            // open profile: small-sphere north pole -> south handle -> big north pole
            std::vector<Vec2> path = detail::sphere_arc(g.rho_small, kPi, g.psi_junction_small,
                                                        cfg.sphere_rings);
            detail::append_skip_first(
                path, detail::mapped_catenoid_samples(
                          t, g.params.lambda_t,
                          (g.junction_big - g.junction_small).norm() * 4.0 / cfg.handle_samples,
                          0.25));
            detail::append_skip_first(
                path, detail::sphere_arc(g.rho_big, g.psi_junction_big, kPi, cfg.sphere_rings));
            sigma1 = detail::revolve_samples(path, cfg.n_phi, false, true, true);
        } else {
            // genus 1, variant 1: handles at both poles, closed-loop profile
            if (g.psi_junction_small >= 0.5 * kPi || g.psi_junction_big >= 0.5 * kPi)
                throw geometry_error("build_sigma_g: handles overlap at the equator");
            auto cat = detail::mapped_catenoid_samples(
                t, g.params.lambda_t,
                (g.junction_big - g.junction_small).norm() * 4.0 / cfg.handle_samples, 0.25);
            std::vector<Vec2> path = detail::sphere_arc(
                g.rho_small, kPi - g.psi_junction_small, g.psi_junction_small, cfg.sphere_rings);
            detail::append_skip_first(path, cat);
            detail::append_skip_first(
                path, detail::sphere_arc(g.rho_big, g.psi_junction_big,
                                         kPi - g.psi_junction_big, cfg.sphere_rings));
            // north handle: reflect the south one and traverse big -> small
            std::vector<Vec2> north(cat.rbegin(), cat.rend());
            for (Vec2& p : north) p.y() = -p.y();
            north.pop_back();  // the loop closure supplies the final point
            detail::append_skip_first(path, north);
            path.erase(path.begin());  // avoid duplicate of the loop start
            sigma1 = detail::revolve_samples(path, cfg.n_phi, true);
        }
        sigma1 = weld_vertices(sigma1, weld_tol);
        if (enclosed_volume(sigma1) < 0.0) sigma1 = flipped_orientation(sigma1);
        sigma1.genus_hint = genus;
        if (variant == 2) {
            TriangleMesh sigma2 = apply_stereographic_T(sigma1);
            if (enclosed_volume(sigma2) < 0.0) sigma2 = flipped_orientation(sigma2);
            sigma2.genus_hint = genus;
            return sigma2;
        }
        return sigma1;
    }

    // general case: south handle plus genus extra handles on a ring
    const double eps = cfg.eps_handle;
    if (g.footprint >= eps)
        throw geometry_error("build_sigma_g: handle footprint " + format_g12(g.footprint) +
                             " exceeds eps_handle " + format_g12(eps));
    // extra sites on the polar-60-degree ring, maximally far from the south
    // handle; variant 2 sits just below z = 1/2 so that |e3 - p_i| > 1
    const double ring_polar = kPi / 3.0 + (variant == 2 ? 0.02 : 0.0);
    std::vector<Vec3> sites;
    for (int i = 0; i < genus; ++i) {
        const double az = 2.0 * kPi * i / genus;
        sites.push_back({std::sin(ring_polar) * std::cos(az), std::sin(ring_polar) * std::sin(az),
                         std::cos(ring_polar)});
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if ((sites[i] - Vec3(0, 0, -1)).norm() <= 2.0 * eps)
            throw geometry_error("build_sigma_g: handle sites closer than 2 eps");
        for (std::size_t j = i + 1; j < sites.size(); ++j)
            if ((sites[i] - sites[j]).norm() <= 2.0 * eps)
                throw geometry_error("build_sigma_g: handle sites closer than 2 eps");
        if (variant == 2 && !((Vec3(0, 0, 1) - sites[i]).norm() > 1.0))
            throw geometry_error("build_sigma_g: variant 2 requires |e3 - p_i| > 1");
    }

    const double psi_eps_small = detail::eps_crossing_polar(g.rho_small, eps);
    const double psi_eps_big = detail::eps_crossing_polar(g.rho_big, eps);
    if (g.psi_junction_small >= psi_eps_small || g.psi_junction_big >= psi_eps_big)
        throw geometry_error("build_sigma_g: handle footprint exceeds the eps crossing");

    // base surface with the south handle, spheres complete up to their north poles
    std::vector<Vec2> path =
        detail::sphere_arc(g.rho_small, kPi, g.psi_junction_small, cfg.sphere_rings);
    detail::append_skip_first(
        path, detail::mapped_catenoid_samples(
                  t, g.params.lambda_t,
                  (g.junction_big - g.junction_small).norm() * 4.0 / cfg.handle_samples, 0.25));
    detail::append_skip_first(
        path, detail::sphere_arc(g.rho_big, g.psi_junction_big, kPi, cfg.sphere_rings));
    TriangleMesh base = detail::revolve_samples(path, cfg.n_phi, false, true, true);

    // transplant one handle per extra site: cut cones out of both spheres,
    // then revolve the handle patch with an azimuthal count matching the
    // measured hole-boundary density and zip it in. The cut hugs the patch
    // ring by a few mesh cells so cones stay clear of the poles and of each
    // other.
    const double cut_margin = 3.0 * kPi / cfg.sphere_rings;
    const double mid_radius = 0.5 * (g.rho_small + g.rho_big);
    for (const Vec3& site : sites) {
        const Mat3 rot = detail::rotation_from_south(site);
        std::array<std::vector<int>, 2> hole_loops;
        for (int which = 0; which < 2; ++which) {
            const double rho = which == 0 ? g.rho_small : g.rho_big;
            const double psi_cut = (which == 0 ? psi_eps_small : psi_eps_big) + cut_margin;
            // remove faces of this sphere with any vertex inside the cut cone
            std::vector<char> inside(base.vertex_count(), 0);
            for (int i = 0; i < base.vertex_count(); ++i) {
                const Vec3& v = base.vertices[i];
                if (std::abs(v.norm() - rho) > 0.02 * mid_radius) continue;
                if (detail::polar_about(v, site) < psi_cut) inside[i] = 1;
            }
            TriangleMesh cut_region;  // removed faces, used to find the loop
            std::vector<std::array<int, 3>> kept;
            for (const auto& f : base.faces) {
                if (inside[f[0]] || inside[f[1]] || inside[f[2]])
                    cut_region.faces.push_back(f);
                else
                    kept.push_back(f);
            }
            if (cut_region.faces.empty())
                throw geometry_error("build_sigma_g: cut cone removed no faces");
            cut_region.vertices = base.vertices;
            base.faces = std::move(kept);
            hole_loops[which] = detail::boundary_loop(cut_region);
            // project the ragged hole boundary onto the exact cut circle
            const Vec3 u = site.normalized();
            Vec3 e1 = u.unitOrthogonal(), e2 = u.cross(e1);
            for (int vid : hole_loops[which]) {
                const Vec3& v = base.vertices[vid];
                const double az = std::atan2(v.dot(e2), v.dot(e1));
                base.vertices[vid] =
                    rho * (std::cos(psi_cut) * u +
                           std::sin(psi_cut) * (std::cos(az) * e1 + std::sin(az) * e2));
            }
        }

        // patch azimuthal density chosen to match the denser hole boundary
        SigmaConfig patch_cfg = cfg;
        patch_cfg.n_phi = std::max<int>(
            cfg.n_phi, std::max(hole_loops[0].size(), hole_loops[1].size()));
        TriangleMesh patch = detail::revolve_samples(
            detail::handle_profile(g, psi_eps_small, psi_eps_big, cfg), patch_cfg.n_phi, false,
            false, false);
        patch = rotated(patch, rot);
        const int patch_base = base.vertex_count();
        base = merge_meshes({base, patch});

        for (int which = 0; which < 2; ++which) {
            const double rho = which == 0 ? g.rho_small : g.rho_big;
            const double psi_ring = which == 0 ? psi_eps_small : psi_eps_big;
            const double psi_cut = psi_ring + cut_margin;
            std::vector<int> patch_ring;
            for (int i = patch_base; i < patch_base + patch.vertex_count(); ++i) {
                const Vec3& v = base.vertices[i];
                if (std::abs(v.norm() - rho) > 1e-6 * mid_radius) continue;
                if (std::abs(detail::polar_about(v, site) - psi_ring) < 1e-9)
                    patch_ring.push_back(i);
            }
            if (static_cast<int>(patch_ring.size()) != patch_cfg.n_phi)
                throw geometry_error("build_sigma_g: patch boundary ring not found");
            detail::zip_loops(base, hole_loops[which], patch_ring, site);
            // even out the band triangles; the welded patch ring stays fixed
            std::vector<char> movable(base.vertex_count(), 0);
            for (int i = 0; i < base.vertex_count(); ++i) {
                if (i >= patch_base) continue;
                const Vec3& v = base.vertices[i];
                if (std::abs(v.norm() - rho) > 0.02 * mid_radius) continue;
                const double polar = detail::polar_about(v, site);
                if (polar > psi_ring + 1e-6 && polar < psi_cut + 2.5 * cut_margin) movable[i] = 1;
            }
            detail::relax_on_sphere(base, movable, rho, 40);
        }
    }
    base = remove_unused_vertices(weld_vertices(base, weld_tol));
    if (enclosed_volume(base) < 0.0) base = flipped_orientation(base);
    base.genus_hint = genus;
    require_valid(base, "build_sigma_g");
    const MeshDiagnostics diag = validate(base);
    if (diag.genus != genus)
        throw geometry_error("build_sigma_g: assembled genus " + std::to_string(diag.genus) +
                             " instead of " + std::to_string(genus));
    if (variant == 2) {
        TriangleMesh sigma2 = apply_stereographic_T(base);
        if (enclosed_volume(sigma2) < 0.0) sigma2 = flipped_orientation(sigma2);
        sigma2.genus_hint = genus;
        return sigma2;
    }
    return base;
}

// --- bump graphs (prescribing T by periodic graph bumps) --------------------

// Closed box host with a flat unit-square patch on top; patch_grid holds the
// (res+1)^2 vertex ids of the patch, row major.
struct PatchHost {
    TriangleMesh mesh;
    std::vector<int> patch_grid;
    int resolution = 0;

    bool is_interior(int row, int col) const {
        return row > 0 && col > 0 && row < resolution && col < resolution;
    }
};

inline PatchHost make_patch_host(int patch_resolution, double depth = 1.0) {
    if (patch_resolution < 4) throw precondition_error("make_patch_host: resolution too small");
    const int n = patch_resolution;
    const int nd = std::max(4, n / 4);
    std::vector<TriangleMesh> parts;

    // grid face spanned by origin + u, v; wound so the normal is u x v
    auto grid_face = [&](const Vec3& origin, const Vec3& du, const Vec3& dv, int nu, int nv) {
        TriangleMesh m;
        for (int i = 0; i <= nu; ++i)
            for (int j = 0; j <= nv; ++j)
                m.vertices.push_back(origin + du * (static_cast<double>(i) / nu) +
                                     dv * (static_cast<double>(j) / nv));
        auto id = [&](int i, int j) { return i * (nv + 1) + j; };
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) {
                m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        return m;
    };
    // inner normals point into the box [0,1]x[0,1]x[-depth,0]
    parts.push_back(grid_face({0, 0, 0}, {0, 1, 0}, {1, 0, 0}, n, n));              // top, n=-z
    parts.push_back(grid_face({0, 0, -depth}, {1, 0, 0}, {0, 1, 0}, n, n));         // bottom, n=+z
    parts.push_back(grid_face({0, 0, 0}, {1, 0, 0}, {0, 0, -depth}, n, nd));        // y=0, n=+y
    parts.push_back(grid_face({0, 1, 0}, {0, 0, -depth}, {1, 0, 0}, nd, n));        // y=1, n=-y
    parts.push_back(grid_face({0, 0, 0}, {0, 0, -depth}, {0, 1, 0}, nd, n));        // x=0, n=+x
    parts.push_back(grid_face({1, 0, 0}, {0, 1, 0}, {0, 0, -depth}, n, nd));        // x=1, n=-x

    PatchHost host;
    host.resolution = n;
    host.mesh = weld_vertices(merge_meshes(parts), 1e-9);
    if (enclosed_volume(host.mesh) < 0.0) host.mesh = flipped_orientation(host.mesh);
    require_valid(host.mesh, "make_patch_host");

    // recover the patch grid ids (top face z = 0) by position
    host.patch_grid.assign(static_cast<std::size_t>(n + 1) * (n + 1), -1);
    for (int i = 0; i < host.mesh.vertex_count(); ++i) {
        const Vec3& v = host.mesh.vertices[i];
        if (std::abs(v.z()) > 1e-12) continue;
        const double ri = v.y() * n, ci = v.x() * n;
        const int r = static_cast<int>(std::lround(ri)), c = static_cast<int>(std::lround(ci));
        if (r < 0 || c < 0 || r > n || c > n) continue;
        if (std::abs(ri - r) > 1e-9 || std::abs(ci - c) > 1e-9) continue;
        host.patch_grid[static_cast<std::size_t>(r) * (n + 1) + c] = i;
    }
    for (int id : host.patch_grid)
        if (id < 0) throw geometry_error("make_patch_host: incomplete patch grid");
    return host;
}

using BumpProfile = std::function<double(double, double)>;

// compactly supported bump with nonzero graph total mean curvature
inline BumpProfile default_bump(double amplitude = 0.55) {
    return [amplitude](double x, double y) {
        const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
        return amplitude * sx * sx * sx * sy * sy * sy;
    };
}

// Replaces the flat patch by n x n periodic copies of the rescaled bump
// (t/n) u(n x). The patch area is unchanged at t = 0 and the patch total mean
// curvature scales like n * t^3 to leading order, odd in t.
inline TriangleMesh bump_graph_surface(const PatchHost& host, const BumpProfile& u, int n,
                                       double t_amp) {
    if (n < 1) throw precondition_error("bump_graph_surface: need n >= 1");
    if (std::abs(t_amp) > 1.0) throw precondition_error("bump_graph_surface: |t_amp| <= 1");
    for (int id : host.patch_grid)
        if (std::abs(host.mesh.vertices[id].z()) > 1e-12)
            throw geometry_error("bump_graph_surface: patch is not flat");
    TriangleMesh out = host.mesh;
    const int res = host.resolution;
    for (int r = 0; r <= res; ++r)
        for (int c = 0; c <= res; ++c) {
            const int id = host.patch_grid[static_cast<std::size_t>(r) * (res + 1) + c];
            const double x = static_cast<double>(c) / res, y = static_cast<double>(r) / res;
            double fx = x * n - std::floor(x * n), fy = y * n - std::floor(y * n);
            out.vertices[id].z() += (t_amp / n) * u(fx, fy);
        }
    return out;
}

// Sum of H * area over the interior patch vertices.
inline double patch_total_mean_curvature(const PatchHost& host, const TriangleMesh& bumped) {
    const DiscreteCurvatures curv = compute_curvatures(bumped);
    double acc = 0.0;
    const int res = host.resolution;
    for (int r = 1; r < res; ++r)
        for (int c = 1; c < res; ++c) {
            const int id = host.patch_grid[static_cast<std::size_t>(r) * (res + 1) + c];
            acc += curv.mean[id] * curv.area[id];
        }
    return acc;
}

struct SolveTResult {
    int n = 0;
    double t_amp = 0.0;
    double achieved_T = 0.0;
};

// Intermediate-value search for a bump surface with T = target: n grows
// geometrically until [min_t T, max_t T] brackets the target, then bisection
// in the amplitude. Resource capped at n = 64.
inline SolveTResult solve_T_for_target(const BumpProfile& u, double target_T,
                                       int samples_per_bump = 8, double tol = 1e-2) {
    if (!std::isfinite(target_T))
        throw precondition_error("solve_T_for_target: target must be finite");
    for (int n = 1; n <= 64; n *= 2) {
        const PatchHost host = make_patch_host(n * samples_per_bump);
        auto t_of = [&](double t_amp) {
            return total_mean_curvature_ratio(
                compute_curvatures(bump_graph_surface(host, u, n, t_amp)));
        };
        double lo = -1.0, hi = 1.0;
        double f_lo = t_of(lo) - target_T, f_hi = t_of(hi) - target_T;
        if (f_lo * f_hi > 0.0) continue;  // not reachable yet, grow n
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = t_of(mid) - target_T;
            if (std::abs(f_mid) <= tol) return {n, mid, f_mid + target_T};
            if (f_lo * f_mid <= 0.0) {
                hi = mid;
                f_hi = f_mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        return {n, 0.5 * (lo + hi), t_of(0.5 * (lo + hi))};
    }
    throw resource_error("solve_T_for_target: target unreached within the n <= 64 cap");
}

}  // namespace tmc
