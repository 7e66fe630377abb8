#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "tmc/mesh.hpp"

namespace tmc {

// One sample of an arc-length parametrized generating curve in the (r, z)
// half-plane. theta is the tangent turning angle: (r', z') = (cos t, sin t).
struct ProfileSample {
    double s = 0.0;
    double r = 0.0;  // gamma_1 >= 0
    double z = 0.0;  // gamma_2
    double theta = 0.0;
};

struct ProfileCurve {
    std::vector<ProfileSample> samples;
    double total_length = 0.0;
};

struct AxisymReport {
    double int_h = 0.0;     // int H dvol
    double area = 0.0;
    double willmore = 0.0;
    double min_theta = 0.0;
    double max_theta = 0.0;
};

// --- segment-schedule construction ------------------------------------------

// theta(s) = theta0 + rate * s_local on each piece; rate = 0 is a straight
// line, rate = +-1/rho a circular arc of radius rho.
struct ProfileSegment {
    double length = 0.0;
    double theta0 = 0.0;
    double rate = 0.0;
};

namespace detail {

inline Vec2 segment_offset(const ProfileSegment& seg, double s_local) {
    if (seg.rate == 0.0)
        return {std::cos(seg.theta0) * s_local, std::sin(seg.theta0) * s_local};
    const double th = seg.theta0 + seg.rate * s_local;
    return {(std::sin(th) - std::sin(seg.theta0)) / seg.rate,
            -(std::cos(th) - std::cos(seg.theta0)) / seg.rate};
}

}  // namespace detail

// Samples a segment schedule with junction-aligned samples (so per-sample
// dtheta is exact and trapezoid quadrature never straddles a curvature jump).
inline ProfileCurve make_profile(const std::vector<ProfileSegment>& segments, Vec2 start,
                                 int samples_per_unit, int min_samples_per_segment = 8) {
    ProfileCurve curve;
    double s = 0.0;
    Vec2 pos = start;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const ProfileSegment& seg = segments[i];
        const double turn = std::abs(seg.rate) * seg.length;
        // arcs need counts scaling with the turning angle times the requested
        // resolution or the quadrature error concentrates at the fillets
        int n = std::max({min_samples_per_segment,
                          static_cast<int>(seg.length * samples_per_unit),
                          static_cast<int>(turn * std::max(32.0, samples_per_unit / 8.0))});
        for (int k = 0; k < n; ++k) {
            const double sl = seg.length * k / n;
            const Vec2 p = pos + detail::segment_offset(seg, sl);
            curve.samples.push_back({s + sl, p.x(), p.y(), seg.theta0 + seg.rate * sl});
        }
        pos += detail::segment_offset(seg, seg.length);
        s += seg.length;
    }
    if (!segments.empty()) {
        const ProfileSegment& last = segments.back();
        curve.samples.push_back(
            {s, pos.x(), pos.y(), last.theta0 + last.rate * last.length});
    }
    curve.total_length = s;
    return curve;
}

// Chains segments so theta is continuous: each entry is (length, rate).
inline std::vector<ProfileSegment> chain_segments(double theta_start,
                                                  const std::vector<std::pair<double, double>>& parts) {
    std::vector<ProfileSegment> segs;
    double th = theta_start;
    for (const auto& [len, rate] : parts) {
        segs.push_back({len, th, rate});
        th += rate * len;
    }
    return segs;
}

// --- validation ---------------------------------------------------------

inline void validate_profile(const ProfileCurve& curve) {
    if (curve.samples.size() < 4) throw precondition_error("profile: too few samples");
    const double scale = std::max(curve.total_length, 1e-30);
    const double tol = 1e-8 * scale;
    if (std::abs(curve.samples.front().r) > tol || std::abs(curve.samples.back().r) > tol)
        throw geometry_error("profile: endpoints must lie on the axis");
    if (std::abs(curve.samples.front().theta) > 1e-9)
        throw precondition_error("profile: theta(0) must be 0");
    if (std::abs(std::sin(curve.samples.back().theta)) > 1e-9)
        throw geometry_error("profile: sin(theta(T)) must vanish at the top pole");
    for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i)
        if (!(curve.samples[i].r > 0.0))
            throw geometry_error("profile: gamma_1 must be positive in the interior");
    // unit speed: each chord must match the constant-turning-rate arc between
    // consecutive samples (exact for curves assembled from lines and arcs)
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
        const ProfileSample& a = curve.samples[i];
        const ProfileSample& b = curve.samples[i + 1];
        const double ds = b.s - a.s;
        if (!(ds > 0.0)) throw geometry_error("profile: arc length must be strictly increasing");
        ProfileSegment seg{ds, a.theta, (b.theta - a.theta) / ds};
        const Vec2 pred = Vec2(a.r, a.z) + detail::segment_offset(seg, ds);
        if ((pred - Vec2(b.r, b.z)).norm() > tol)
            throw geometry_error("profile: samples are not unit-speed consistent");
    }
}

inline double max_turning_rate(const ProfileCurve& curve) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i)
        m = std::max(m, std::abs(curve.samples[i + 1].theta - curve.samples[i].theta) /
                            (curve.samples[i + 1].s - curve.samples[i].s));
    return m;
}

namespace detail {

inline double trapezoid(const ProfileCurve& curve, const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i)
        acc += 0.5 * (f[i] + f[i + 1]) * (curve.samples[i + 1].s - curve.samples[i].s);
    return acc;
}

}  // namespace detail

// --- quadrature functionals ---------------------------------------------

// Composite trapezoid on the arc-length grid with theta' taken per interval
// (the data is C^{1,1}: theta is piecewise linear across samples, so the
// interval increments d(theta) are exact and quadrature never straddles a
// curvature jump):
//   A    = 2 pi int gamma_1 ds
//   intH = 2 pi int sin(theta) ds + 2 pi int gamma_1 dtheta
//   W    = pi/2 int [ sin^2/gamma_1 ds + 2 sin(theta) dtheta + gamma_1 dtheta^2/ds ]
inline AxisymReport axisym_functionals(const ProfileCurve& curve) {
    validate_profile(curve);
    const std::size_t n = curve.samples.size();
    const double pole_band = 1e-12 * curve.total_length;

    AxisymReport rep;
    rep.min_theta = rep.max_theta = curve.samples[0].theta;
    for (std::size_t i = 0; i < n; ++i) {
        rep.min_theta = std::min(rep.min_theta, curve.samples[i].theta);
        rep.max_theta = std::max(rep.max_theta, curve.samples[i].theta);
    }
    auto k1_term = [&](const ProfileSample& p) {  // sin^2(theta)/gamma_1, 0 at the poles
        return p.r > pole_band ? std::sin(p.theta) * std::sin(p.theta) / p.r : 0.0;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const ProfileSample& a = curve.samples[i];
        const ProfileSample& b = curve.samples[i + 1];
        const double ds = b.s - a.s;
        const double dth = b.theta - a.theta;
        const double avg_r = 0.5 * (a.r + b.r);
        const double avg_sin = 0.5 * (std::sin(a.theta) + std::sin(b.theta));
        rep.area += 2.0 * kPi * avg_r * ds;
        rep.int_h += 2.0 * kPi * (avg_sin * ds + avg_r * dth);
        rep.willmore += 0.5 * kPi * (0.5 * (k1_term(a) + k1_term(b)) * ds + 2.0 * avg_sin * dth +
                                     avg_r * dth * dth / ds);
    }
    return rep;
}

struct IntegralIdentity {
    double lhs = 0.0;          // 2 pi int sin(theta) + gamma_1 theta' ds
    double rhs = 0.0;          // 2 pi int sin(theta) - cos(theta) theta ds
    double gap = 0.0;
    double closure_cos = 0.0;  // int cos(theta) ds, zero for closed profiles
    double closure_sin = 0.0;  // int sin(theta) ds = gamma_2(T) - gamma_2(0)
};

// Both sides of the integration-by-parts identity for the total mean
// curvature, plus the closure constraints.
inline IntegralIdentity both_integral_identities(const ProfileCurve& curve) {
    validate_profile(curve);
    const std::size_t n = curve.samples.size();
    IntegralIdentity id;
    std::vector<double> f_rhs(n), f_cos(n), f_sin(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ProfileSample& p = curve.samples[i];
        f_rhs[i] = std::sin(p.theta) - std::cos(p.theta) * p.theta;
        f_cos[i] = std::cos(p.theta);
        f_sin[i] = std::sin(p.theta);
    }
    double lhs = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const ProfileSample& a = curve.samples[i];
        const ProfileSample& b = curve.samples[i + 1];
        lhs += 0.5 * (std::sin(a.theta) + std::sin(b.theta)) * (b.s - a.s) +
               0.5 * (a.r + b.r) * (b.theta - a.theta);
    }
    id.lhs = 2.0 * kPi * lhs;
    id.rhs = 2.0 * kPi * detail::trapezoid(curve, f_rhs);
    id.gap = std::abs(id.lhs - id.rhs);
    id.closure_cos = detail::trapezoid(curve, f_cos);
    id.closure_sin = detail::trapezoid(curve, f_sin);
    return id;
}

// --- standard profiles ----------------------------------------------------

// Round sphere: theta(s) = s/radius on [0, pi*radius].
inline ProfileCurve make_sphere_profile(double radius, int samples) {
    std::vector<ProfileSegment> segs = {{kPi * radius, 0.0, 1.0 / radius}};
    return make_profile(segs, {0.0, 0.0}, std::max(1, static_cast<int>(samples / (kPi * radius))),
                        samples);
}

// Two hemispheres of the given radius joined by a cylinder.
inline ProfileCurve make_capsule_profile(double radius, double cyl_length, int samples_per_unit) {
    auto segs = chain_segments(0.0, {{0.5 * kPi * radius, 1.0 / radius},
                                     {cyl_length, 0.0},
                                     {0.5 * kPi * radius, 1.0 / radius}});
    return make_profile(segs, {0.0, 0.0}, samples_per_unit);
}

// Egg of three circular arcs: a convex sphere-like surface whose H-weighted
// and area centroids do not coincide, so inversion sweeps see the generic
// O(1/|a|) behavior (symmetric surfaces decay one order faster).
inline ProfileCurve make_asymmetric_egg_profile(int samples_per_unit = 512, double rho2 = 0.5,
                                                double a = 0.75 * kPi) {
    const double rho3 = (1.0 + rho2 * (std::sin(a) - 1.0)) / std::sin(a);
    if (!(rho3 > 0.0)) throw precondition_error("make_asymmetric_egg_profile: bad arc data");
    auto segs = chain_segments(0.0, {{0.5 * kPi, 1.0},
                                     {rho2 * (a - 0.5 * kPi), 1.0 / rho2},
                                     {rho3 * (kPi - a), 1.0 / rho3}});
    return make_profile(segs, {0.0, 0.0}, samples_per_unit);
}

// Stack of n unit-radius circular humps inside a shell of radius ~R; axis
// parallel lines joined by radius-1 arcs with theta sweeping [0, 2pi]. The
// inward runs at theta = 2pi make the total mean curvature go negative
// linearly in n.
inline ProfileCurve make_hump_stack_curve(int n, double R, int samples_per_unit = 64) {
    if (n < 1) throw precondition_error("make_hump_stack_curve: need n >= 1");
    if (!(R > 2.0)) throw geometry_error("make_hump_stack_curve: need R > 2");
    const double x_in = std::min(2.0, 1.0 + 0.5 * (R - 2.0));  // inner turning radius
    const double x_out = R - 1.0;                              // outer run end
    const double run = x_out - x_in;
    const double climb = 4.0 * n;  // puts the final pole just above the start

    std::vector<std::pair<double, double>> parts;
    parts.push_back({R, 0.0});                   // bottom disk, pole to x = R
    parts.push_back({0.5 * kPi, 1.0});           // turn up, bulge to R + 1
    parts.push_back({climb, 0.0});               // outer wall at x = R + 1
    parts.push_back({0.5 * kPi, 1.0});           // turn inward at the top
    parts.push_back({R - x_in, 0.0});            // top run in to x_in
    for (int i = 0; i < n; ++i) {
        parts.push_back({kPi, 1.0});             // inner arc, theta pi -> 2pi
        parts.push_back({run, 0.0});             // out at theta = 2pi
        parts.push_back({kPi, -1.0});            // outer arc, theta 2pi -> pi
        parts.push_back({run, 0.0});             // in at theta = pi
    }
    parts.push_back({x_in, 0.0});                // close to the axis at theta = pi
    return make_profile(chain_segments(0.0, parts), {0.0, 0.0}, samples_per_unit);
}

// The slope counterexample: horizontal unit runs, two slopes of length 1/eps
// at theta = -pi/2 - eps and 3pi/2 + eps, radius-delta circular joints, and a
// vertical wall whose length closes the curve with poles at -delta and
// +delta. Its total mean curvature is -2 eps + o(eps) + O(delta) times 2 pi.
inline ProfileCurve make_slope_counterexample_curve(double eps, double delta,
                                                    int samples_per_unit = 256) {
    if (!(eps > 0.0) || eps > 0.5)
        throw precondition_error("make_slope_counterexample_curve: need 0 < eps <= 0.5");
    if (!(delta > 0.0) || delta > 0.05)
        throw precondition_error("make_slope_counterexample_curve: need 0 < delta <= 0.05");

    const double turn1 = 0.5 * kPi + eps;
    // lengths of the vertical wall (index 6) and closing run (index 12) are
    // solved from the closure constraints below
    std::vector<std::pair<double, double>> parts = {
        {1.0, 0.0},                      // 0: bottom horizontal
        {delta * turn1, -1.0 / delta},   // 1: turn down to -pi/2 - eps
        {1.0 / eps, 0.0},                // 2: descending slope
        {delta * turn1, 1.0 / delta},    // 3: back to horizontal
        {1.0, 0.0},                      // 4: lowest horizontal
        {delta * 0.5 * kPi, 1.0 / delta},// 5: turn up
        {0.0, 0.0},                      // 6: vertical wall (solved)
        {delta * 0.5 * kPi, 1.0 / delta},// 7: turn left at the top
        {1.0, 0.0},                      // 8: top horizontal, theta = pi
        {delta * turn1, 1.0 / delta},    // 9: turn to 3pi/2 + eps
        {1.0 / eps, 0.0},                // 10: descending slope
        {delta * turn1, -1.0 / delta},   // 11: back to theta = pi
        {0.0, 0.0},                      // 12: closing horizontal (solved)
    };
    // accumulate horizontal/vertical displacement of everything except 6, 12
    auto segs0 = chain_segments(0.0, parts);
    double dx = 0.0, dz = 0.0;
    for (std::size_t i = 0; i < segs0.size(); ++i) {
        if (i == 6 || i == 12) continue;
        const Vec2 d = detail::segment_offset(segs0[i], segs0[i].length);
        dx += d.x();
        dz += d.y();
    }
    // wall has theta = pi/2 (dx 0, dz +L), closing run theta = pi (dx -L, dz 0)
    const double closing = dx;
    const double wall = 2.0 * delta - dz;
    if (!(closing > 0.0) || !(wall > 0.0))
        throw geometry_error("make_slope_counterexample_curve: closure failed");
    parts[6].first = wall;
    parts[12].first = closing;

    ProfileCurve curve = make_profile(chain_segments(0.0, parts), {0.0, -delta}, samples_per_unit);
    validate_profile(curve);
    for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i)
        if (curve.samples[i].r <= 0.0)
            throw geometry_error("make_slope_counterexample_curve: profile pinched");
    return curve;
}

// --- theorem checks ---------------------------------------------------------

struct WindowVerdict {
    bool window_holds = false;     // theta stays inside [-pi/2, 3pi/2]
    bool inequality_holds = false; // int H >= -1e-6 sqrt(A) (when applicable)
    double int_h = 0.0;
    double min_theta = 0.0;
    double max_theta = 0.0;
};

// If im(theta) stays in [-pi/2, 3pi/2], the total mean curvature of the
// revolved sphere is nonnegative (up to quadrature tolerance).
inline WindowVerdict check_theta_window_theorem(const ProfileCurve& curve) {
    const AxisymReport rep = axisym_functionals(curve);
    WindowVerdict v;
    v.int_h = rep.int_h;
    v.min_theta = rep.min_theta;
    v.max_theta = rep.max_theta;
    v.window_holds =
        rep.min_theta >= -0.5 * kPi - 1e-9 && rep.max_theta <= 1.5 * kPi + 1e-9;
    v.inequality_holds = !v.window_holds || rep.int_h >= -1e-6 * std::sqrt(rep.area);
    return v;
}

struct SixPiVerdict {
    bool applicable = false;       // int H <= 0
    bool bound_holds = false;      // W >= 6 pi - 1e-3
    double int_h = 0.0;
    double willmore = 0.0;
    double total_variation_bound = 0.0;  // 2 pi + pi int |theta'| |sin theta|
};

// Willmore lower bound 6 pi for axisymmetric spheres with nonpositive total
// mean curvature, with the total-variation bound reported alongside.
inline SixPiVerdict check_sixpi_bound(const ProfileCurve& curve) {
    const AxisymReport rep = axisym_functionals(curve);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
        const ProfileSample& a = curve.samples[i];
        const ProfileSample& b = curve.samples[i + 1];
        tv += 0.5 * (std::abs(std::sin(a.theta)) + std::abs(std::sin(b.theta))) *
              std::abs(b.theta - a.theta);
    }
    SixPiVerdict v;
    v.int_h = rep.int_h;
    v.willmore = rep.willmore;
    v.total_variation_bound = 2.0 * kPi + kPi * tv;
    v.applicable = rep.int_h <= 0.0;
    v.bound_holds = !v.applicable || rep.willmore >= 6.0 * kPi - 1e-3;
    return v;
}

// --- random admissible curves (property suite for the window theorem) -------

// Piecewise-linear theta inside the window with theta(0) = 0, theta(T) = pi,
// blended toward an extreme admissible profile until int cos(theta) = 0.
// Draws violating gamma_1 > 0 in the interior are rejected and retried.
inline ProfileCurve make_random_window_curve(std::mt19937& rng, int knots = 10,
                                             int samples_per_knot = 24) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lo = -0.5 * kPi, hi = 1.5 * kPi;

    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> th(knots);
        th.front() = 0.0;
        th.back() = kPi;
        for (int k = 1; k + 1 < knots; ++k) th[k] = lo + (hi - lo) * unif(rng);

        // extreme profiles with the same endpoints: "low" hugs theta ~ 0
        // (int cos > 0), "high" hugs theta ~ pi (int cos < 0)
        std::vector<double> lo_prof(knots, 0.0), hi_prof(knots, kPi);
        lo_prof.back() = kPi;
        hi_prof.front() = 0.0;

        auto sample_theta = [&](const std::vector<double>& knot_vals, double x) {
            const double t = x * (knots - 1);
            const int k = std::min(knots - 2, static_cast<int>(t));
            const double u = t - k;
            return knot_vals[k] * (1.0 - u) + knot_vals[k + 1] * u;
        };
        const int n = samples_per_knot * (knots - 1);
        // exact radial displacement of the blended curve: each step is a
        // constant-turning-rate arc, matching how the curve is laid out below
        auto end_radius = [&](double blend, const std::vector<double>& target) {
            double r = 0.0;
            const double ds = 1.0 / n;
            for (int i = 0; i < n; ++i) {
                const double x1 = static_cast<double>(i) / n;
                const double x2 = static_cast<double>(i + 1) / n;
                const double t1 =
                    (1.0 - blend) * sample_theta(th, x1) + blend * sample_theta(target, x1);
                const double t2 =
                    (1.0 - blend) * sample_theta(th, x2) + blend * sample_theta(target, x2);
                r += detail::segment_offset({ds, t1, (t2 - t1) / ds}, ds).x();
            }
            return r;
        };

        const double f0 = end_radius(0.0, lo_prof);
        const std::vector<double>& target = f0 > 0.0 ? hi_prof : lo_prof;
        double a = 0.0, b = 1.0;
        const double fa = end_radius(0.0, target);
        if (fa * end_radius(1.0, target) > 0.0) continue;  // no bracket
        for (int it = 0; it < 100; ++it) {
            const double m = 0.5 * (a + b);
            if (fa * end_radius(m, target) <= 0.0)
                b = m;
            else
                a = m;
        }
        const double blend = 0.5 * (a + b);

        ProfileCurve curve;
        double r = 0.0, z = 0.0;
        bool ok = true;
        for (int i = 0; i <= n; ++i) {
            const double x = static_cast<double>(i) / n;
            const double t =
                (1.0 - blend) * sample_theta(th, x) + blend * sample_theta(target, x);
            curve.samples.push_back({x, r, z, t});
            if (i < n) {
                // advance with the exact constant-rate arc over the step
                const double x2 = static_cast<double>(i + 1) / n;
                const double t2 =
                    (1.0 - blend) * sample_theta(th, x2) + blend * sample_theta(target, x2);
                const double ds = 1.0 / n;
                ProfileSegment seg{ds, t, (t2 - t) / ds};
                const Vec2 d = detail::segment_offset(seg, ds);
                r += d.x();
                z += d.y();
                if (i + 1 < n && r <= 1e-6) ok = false;
            }
        }
        if (!ok) continue;
        // land the endpoint exactly on the axis (closure solved to ~1e-12)
        if (std::abs(curve.samples.back().r) > 1e-7) continue;
        curve.samples.back().r = 0.0;
        curve.total_length = 1.0;
        try {
            validate_profile(curve);
        } catch (const std::exception&) {
            continue;
        }
        return curve;
    }
    throw geometry_error("make_random_window_curve: no admissible draw in 200 attempts");
}

// --- revolution ----------------------------------------------------------

namespace detail {

// Revolve (r_i, z_i) rings about the z-axis. Open chains can end in cone
// fans (the sample there must sit on the axis) or in open boundary rings.
// The winding follows the inner-normal convention for a profile traversed
// with the enclosed region on its left.
inline TriangleMesh revolve_samples(const std::vector<Vec2>& rz, int n_phi, bool closed_loop,
                                    bool cap_start = true, bool cap_end = true) {
    if (n_phi < 8) throw precondition_error("revolve: need n_phi >= 8");
    TriangleMesh mesh;
    const int n = static_cast<int>(rz.size());
    const int first_ring = (!closed_loop && cap_start) ? 1 : 0;
    const int last_ring = (!closed_loop && cap_end) ? n - 2 : n - 1;
    const int rings = last_ring - first_ring + 1;
    if (rings < 2) throw precondition_error("revolve: too few rings");

    std::vector<int> ring_base(n, -1);
    for (int i = first_ring; i <= last_ring; ++i) {
        ring_base[i] = mesh.vertex_count();
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * j / n_phi;
            mesh.vertices.push_back(
                {rz[i].x() * std::cos(phi), rz[i].x() * std::sin(phi), rz[i].y()});
        }
    }
    auto vid = [&](int i, int j) { return ring_base[i] + (j % n_phi); };
    auto strip = [&](int i0, int i1) {
        for (int j = 0; j < n_phi; ++j) {
            const int a = vid(i0, j), b = vid(i1, j), c = vid(i1, j + 1), d = vid(i0, j + 1);
            mesh.faces.push_back({a, b, d});
            mesh.faces.push_back({b, c, d});
        }
    };
    for (int i = first_ring; i < last_ring; ++i) strip(i, i + 1);
    if (closed_loop) {
        strip(last_ring, first_ring);
    } else {
        if (cap_start) {
            const int south = mesh.vertex_count();
            mesh.vertices.push_back({0.0, 0.0, rz.front().y()});
            for (int j = 0; j < n_phi; ++j)
                mesh.faces.push_back({south, vid(first_ring, j), vid(first_ring, j + 1)});
        }
        if (cap_end) {
            const int north = mesh.vertex_count();
            mesh.vertices.push_back({0.0, 0.0, rz.back().y()});
            for (int j = 0; j < n_phi; ++j)
                mesh.faces.push_back({north, vid(last_ring, j + 1), vid(last_ring, j)});
        }
    }
    return mesh;
}

}  // namespace detail

// Mesh of the surface of revolution of a profile curve. The two axis points
// become cone vertices.
inline TriangleMesh revolve_profile(const ProfileCurve& curve, int n_phi) {
    validate_profile(curve);
    std::vector<Vec2> rz;
    rz.reserve(curve.samples.size());
    for (const auto& p : curve.samples) rz.push_back({p.r, p.z});
    TriangleMesh mesh = detail::revolve_samples(rz, n_phi, /*closed_loop=*/false);
    mesh.genus_hint = 0;
    return mesh;
}

// --- CSV round trip -------------------------------------------------------

inline void write_profile_csv(std::ostream& out, const ProfileCurve& curve) {
    out << "s,gamma1,gamma2,theta\n";
    for (const auto& p : curve.samples)
        out << format_g12(p.s) << ',' << format_g12(p.r) << ',' << format_g12(p.z) << ','
            << format_g12(p.theta) << '\n';
}

inline ProfileCurve read_profile_csv(std::istream& in) {
    ProfileCurve curve;
    std::string line;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        ProfileSample p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p.s, &p.r, &p.z, &p.theta) != 4)
            throw parse_error("profile csv line " + std::to_string(lineno) + ": expected 4 columns");
        curve.samples.push_back(p);
    }
    if (curve.samples.size() < 4) throw parse_error("profile csv: too few samples");
    curve.total_length = curve.samples.back().s;
    return curve;
}

}  // namespace tmc
