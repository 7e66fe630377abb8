#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "tmc/axisym.hpp"
#include "tmc/functionals.hpp"

using namespace tmc;

TEST_CASE("unit sphere profile: intH = 8pi, A = 4pi, W = 4pi") {
    const ProfileCurve curve = make_sphere_profile(1.0, 10000);
    const AxisymReport rep = axisym_functionals(curve);
    CHECK(rep.int_h == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(rep.area == doctest::Approx(4.0 * kPi).epsilon(1e-6));
    CHECK(rep.willmore == doctest::Approx(4.0 * kPi).epsilon(1e-6));
    CHECK(rep.willmore >= rep.int_h * rep.int_h / (4.0 * rep.area) - 1e-8);
}

TEST_CASE("sphere scaling: intH and A scale, W does not") {
    const AxisymReport rep = axisym_functionals(make_sphere_profile(2.0, 20000));
    CHECK(rep.int_h == doctest::Approx(16.0 * kPi).epsilon(1e-6));
    CHECK(rep.area == doctest::Approx(16.0 * kPi).epsilon(1e-6));
    CHECK(rep.willmore == doctest::Approx(4.0 * kPi).epsilon(1e-6));
}

TEST_CASE("capsule against the closed form") {
    // hemispheres radius 1 joined by a length-2 cylinder:
    // A = 4pi + 4pi, intH = 8pi + 4pi, W = 4pi + pi
    const ProfileCurve curve = make_capsule_profile(1.0, 2.0, 4000);
    const AxisymReport rep = axisym_functionals(curve);
    CHECK(rep.area == doctest::Approx(8.0 * kPi).epsilon(1e-6));
    CHECK(rep.int_h == doctest::Approx(12.0 * kPi).epsilon(1e-6));
    CHECK(rep.willmore == doctest::Approx(5.0 * kPi).epsilon(1e-6));
}

TEST_CASE("integration-by-parts identity and closure constraints") {
    SUBCASE("sphere") {
        const IntegralIdentity id = both_integral_identities(make_sphere_profile(1.0, 20000));
        CHECK(id.lhs == doctest::Approx(8.0 * kPi).epsilon(1e-6));
        CHECK(id.rhs == doctest::Approx(8.0 * kPi).epsilon(1e-6));
        CHECK(std::abs(id.closure_cos) < 1e-8);
        CHECK(id.closure_sin == doctest::Approx(2.0).epsilon(1e-8));
    }
    SUBCASE("slope counterexample at high sampling") {
        const ProfileCurve curve = make_slope_counterexample_curve(0.3, 0.01, 8192);
        const IntegralIdentity id = both_integral_identities(curve);
        CHECK(id.gap <= 1e-6 * std::max(1.0, std::abs(id.lhs)));
        CHECK(std::abs(id.closure_cos) < 1e-9);
        CHECK(id.closure_sin > 0.0);
    }
}

TEST_CASE("slope counterexample: negative total mean curvature, trend -2 eps") {
    const AxisymReport rep1 = axisym_functionals(make_slope_counterexample_curve(0.3, 0.01));
    CHECK(rep1.int_h < 0.0);
    // intH/(2 pi eps) -> -2: the smaller parameters sit closer to the limit
    const AxisymReport rep2 = axisym_functionals(make_slope_counterexample_curve(0.15, 0.005));
    const double ratio1 = rep1.int_h / (2.0 * kPi * 0.3);
    const double ratio2 = rep2.int_h / (2.0 * kPi * 0.15);
    CHECK(std::abs(ratio2 - (-2.0)) < std::abs(ratio1 - (-2.0)));
    CHECK(ratio2 == doctest::Approx(-2.0).epsilon(0.25));

    CHECK_THROWS_AS(make_slope_counterexample_curve(0.0, 0.01), precondition_error);
    CHECK_THROWS_AS(make_slope_counterexample_curve(0.3, 0.2), precondition_error);
}

TEST_CASE("slope counterexample leaves the theta window and still has W >= 6pi") {
    const ProfileCurve curve = make_slope_counterexample_curve(0.3, 0.01);
    const WindowVerdict wv = check_theta_window_theorem(curve);
    CHECK(!wv.window_holds);
    CHECK(wv.min_theta == doctest::Approx(-0.5 * kPi - 0.3).epsilon(1e-9));
    CHECK(wv.max_theta == doctest::Approx(1.5 * kPi + 0.3).epsilon(1e-9));

    const SixPiVerdict sv = check_sixpi_bound(curve);
    CHECK(sv.applicable);
    CHECK(sv.bound_holds);
    CHECK(sv.willmore >= 6.0 * kPi - 1e-3);
    CHECK(sv.total_variation_bound >= 2.0 * kPi);
}

TEST_CASE("hump stack: negative intH, slope of the n-fit near -R pi") {
    {
        const AxisymReport rep = axisym_functionals(make_hump_stack_curve(20, 8.0));
        CHECK(rep.int_h < 0.0);
        const SixPiVerdict sv = check_sixpi_bound(make_hump_stack_curve(20, 8.0));
        CHECK(sv.applicable);
        CHECK(sv.bound_holds);
    }
    // linear fit of intH/(2 pi) against n; the -R n pi leading term of the
    // construction carries O(1)-per-hump corrections, so the fit runs at a
    // large shell radius
    const double R = 20.0;
    std::vector<double> ns, vals;
    for (int n : {10, 20, 30, 40}) {
        ns.push_back(n);
        vals.push_back(axisym_functionals(make_hump_stack_curve(n, R)).int_h / (2.0 * kPi));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sx += ns[i];
        sy += vals[i];
        sxx += ns[i] * ns[i];
        sxy += ns[i] * vals[i];
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    CHECK(std::abs(slope - (-R * kPi)) / (R * kPi) <= 0.10);

    CHECK_THROWS_AS(make_hump_stack_curve(10, 1.5), geometry_error);
    CHECK_THROWS_AS(make_hump_stack_curve(0, 8.0), precondition_error);
}

TEST_CASE("hump stack n = 1 revolves to a valid genus-0 mesh") {
    const TriangleMesh mesh = revolve_profile(make_hump_stack_curve(1, 8.0, 24), 32);
    const MeshDiagnostics d = validate(mesh);
    CHECK(d.valid());
    CHECK(d.euler_characteristic == 2);
}

TEST_CASE("window theorem property suite: 1000 random admissible curves") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const ProfileCurve curve = make_random_window_curve(rng);
        const WindowVerdict v = check_theta_window_theorem(curve);
        CAPTURE(trial);
        CAPTURE(v.int_h);
        REQUIRE(v.window_holds);
        REQUIRE(v.inequality_holds);
    }
}

TEST_CASE("sixpi property: generated curves with intH <= 0 have W >= 6pi") {
    for (double eps : {0.15, 0.25, 0.35, 0.45}) {
        const SixPiVerdict v = check_sixpi_bound(make_slope_counterexample_curve(eps, 0.01));
        if (v.applicable) CHECK(v.bound_holds);
    }
    for (int n : {5, 10, 20}) {
        const SixPiVerdict v = check_sixpi_bound(make_hump_stack_curve(n, 8.0));
        if (v.applicable) CHECK(v.bound_holds);
    }
}

TEST_CASE("revolve vs quadrature consistency within 1 percent") {
    SUBCASE("sphere") {
        const ProfileCurve curve = make_sphere_profile(1.0, 1500);
        const AxisymReport quad = axisym_functionals(curve);
        const FunctionalReport mesh_rep = functional_report(revolve_profile(curve, 64));
        CHECK(mesh_rep.area == doctest::Approx(quad.area).epsilon(0.01));
        CHECK(mesh_rep.willmore == doctest::Approx(quad.willmore).epsilon(0.01));
        CHECK(mesh_rep.total_mean_curvature == doctest::Approx(quad.int_h).epsilon(0.01));
    }
    SUBCASE("capsule") {
        const ProfileCurve curve = make_capsule_profile(1.0, 2.0, 400);
        const AxisymReport quad = axisym_functionals(curve);
        const FunctionalReport mesh_rep = functional_report(revolve_profile(curve, 64));
        CHECK(mesh_rep.area == doctest::Approx(quad.area).epsilon(0.01));
        CHECK(mesh_rep.willmore == doctest::Approx(quad.willmore).epsilon(0.01));
        CHECK(mesh_rep.total_mean_curvature == doctest::Approx(quad.int_h).epsilon(0.01));
    }
}

TEST_CASE("figure-4 curve revolves to a valid genus-0 mesh") {
    const TriangleMesh mesh = revolve_profile(make_slope_counterexample_curve(0.3, 0.01, 96), 48);
    const MeshDiagnostics d = validate(mesh);
    CHECK(d.valid());
    CHECK(d.euler_characteristic == 2);
}

TEST_CASE("profiles reject pinched and off-axis data") {
    ProfileCurve bad;
    for (int i = 0; i <= 32; ++i) {
        const double s = kPi * i / 32;
        bad.samples.push_back({s, std::sin(s), -std::cos(s), s});
    }
    bad.total_length = kPi;
    bad.samples[16].r = 0.0;  // pinch the equator
    CHECK_THROWS_AS(validate_profile(bad), geometry_error);

    ProfileCurve open = make_sphere_profile(1.0, 256);
    open.samples.back().r = 0.05;  // end off the axis
    CHECK_THROWS_AS(validate_profile(open), geometry_error);
}

TEST_CASE("profile CSV round trip") {
    const ProfileCurve curve = make_capsule_profile(1.0, 2.0, 200);
    std::stringstream ss;
    write_profile_csv(ss, curve);
    const ProfileCurve back = read_profile_csv(ss);
    REQUIRE(back.samples.size() == curve.samples.size());
    const AxisymReport a = axisym_functionals(curve);
    const AxisymReport b = axisym_functionals(back);
    CHECK(b.area == doctest::Approx(a.area).epsilon(1e-9));
    CHECK(b.int_h == doctest::Approx(a.int_h).epsilon(1e-4));  // theta' refit by differences
    CHECK(b.willmore == doctest::Approx(a.willmore).epsilon(1e-3));
}
