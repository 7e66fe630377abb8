#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_helpers.hpp"
#include "tmc/functionals.hpp"
#include "tmc/variations.hpp"

using namespace tmc;

namespace {
const double kTSphere = 4.0 * std::sqrt(kPi);
}

TEST_CASE("sphere baselines: W, T, A, V, iso") {
    const TriangleMesh m = build_icosphere(5, 1.0);
    const DiscreteCurvatures c = compute_curvatures(m);
    CHECK(willmore_energy(c) == doctest::Approx(4.0 * kPi).epsilon(0.005));
    CHECK(total_mean_curvature_ratio(c) == doctest::Approx(kTSphere).epsilon(0.005));
    CHECK(area(m) == doctest::Approx(4.0 * kPi).epsilon(0.003));
    CHECK(enclosed_volume(m) == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.005));
    CHECK(isoperimetric_ratio(m) == doctest::Approx(std::cbrt(36.0 * kPi)).epsilon(0.01));
}

TEST_CASE("Clifford torus: W near 2 pi^2 and Pappus volume") {
    const TriangleMesh m = build_torus(std::sqrt(2.0), 1.0, 128, 128);
    const DiscreteCurvatures c = compute_curvatures(m);
    CHECK(willmore_energy(c) == doctest::Approx(2.0 * kPi * kPi).epsilon(0.01));
    // solid torus volume 2 pi^2 R r^2
    CHECK(enclosed_volume(m) ==
          doctest::Approx(2.0 * kPi * kPi * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("scale invariance of W, T and scaling laws of A, V, iso") {
    const TriangleMesh m = build_icosphere(3, 1.0);
    const DiscreteCurvatures c = compute_curvatures(m);
    const TriangleMesh big = scaled(m, 7.3);
    const DiscreteCurvatures cb = compute_curvatures(big);
    CHECK(willmore_energy(cb) == doctest::Approx(willmore_energy(c)).epsilon(1e-10));
    CHECK(total_mean_curvature_ratio(cb) ==
          doctest::Approx(total_mean_curvature_ratio(c)).epsilon(1e-10));

    const TriangleMesh twice = scaled(m, 2.0);
    CHECK(area(twice) == doctest::Approx(4.0 * area(m)).epsilon(1e-12));
    CHECK(enclosed_volume(twice) == doctest::Approx(8.0 * enclosed_volume(m)).epsilon(1e-12));
    CHECK(isoperimetric_ratio(twice) == doctest::Approx(isoperimetric_ratio(m)).epsilon(1e-10));
}

TEST_CASE("orientation flip negates T and int H, fixes W and A") {
    const TriangleMesh m = build_icosphere(3, 1.0);
    const TriangleMesh f = flipped_orientation(m);
    const DiscreteCurvatures c = compute_curvatures(m);
    const DiscreteCurvatures cf = compute_curvatures(f);
    CHECK(total_mean_curvature(cf) == doctest::Approx(-total_mean_curvature(c)).epsilon(1e-12));
    CHECK(total_mean_curvature_ratio(cf) == doctest::Approx(-kTSphere).epsilon(0.005));
    CHECK(willmore_energy(cf) == doctest::Approx(willmore_energy(c)).epsilon(1e-12));
    CHECK(cf.total_area == doctest::Approx(c.total_area).epsilon(1e-12));
    CHECK_THROWS_AS(isoperimetric_ratio(f), geometry_error);
}

TEST_CASE("Cauchy-Schwarz chain T^2 <= 4W on assorted meshes") {
    std::mt19937 rng(7);
    const TriangleMesh meshes[] = {
        build_icosphere(3, 1.0),
        build_torus(2.0, 0.6, 32, 32),
        tmc_test::perturbed_icosphere(3, 1.0, 0.05, 11),
    };
    for (const auto& m : meshes) {
        const DiscreteCurvatures c = compute_curvatures(m);
        const double t = total_mean_curvature_ratio(c);
        CHECK(t * t <= 4.0 * willmore_energy(c) + 1e-8);
        CHECK(willmore_energy(c) >= 4.0 * kPi - 0.2);
    }
}

TEST_CASE("helfrich energy reductions on the unit sphere") {
    const DiscreteCurvatures c = compute_curvatures(build_icosphere(5, 1.0));
    CHECK(helfrich_energy(c, 0.0) == doctest::Approx(4.0 * kPi).epsilon(0.005));
    CHECK(helfrich_energy(c, 1.0) == doctest::Approx(0.0).epsilon(1.0).scale(0.0628));
    CHECK(helfrich_energy(c, 2.0) == doctest::Approx(4.0 * kPi).epsilon(0.01));
    CHECK(helfrich_energy(c, 0.0) == doctest::Approx(willmore_energy(c)).epsilon(1e-12));
}

TEST_CASE("optimal spontaneous curvature minimizes the helfrich energy") {
    SUBCASE("sphere") {
        const DiscreteCurvatures c = compute_curvatures(build_icosphere(5, 1.0));
        const auto [c0, inf_h] = optimal_spontaneous_curvature(c);
        CHECK(c0 == doctest::Approx(1.0).epsilon(0.01));
        CHECK(inf_h == doctest::Approx(0.0).epsilon(1.0).scale(0.05));
    }
    SUBCASE("clifford torus: inf = W - T^2/4 and beats nearby c0") {
        const DiscreteCurvatures c = compute_curvatures(build_torus(std::sqrt(2.0), 1.0, 64, 64));
        const auto [c0, inf_h] = optimal_spontaneous_curvature(c);
        const double t = total_mean_curvature_ratio(c);
        CHECK(inf_h ==
              doctest::Approx(willmore_energy(c) - 0.25 * t * t).epsilon(1e-10));
        CHECK(helfrich_energy(c, c0) == doctest::Approx(inf_h).epsilon(1e-10));
        CHECK(helfrich_energy(c, c0 + 0.05) > inf_h);
        CHECK(helfrich_energy(c, c0 - 0.05) > inf_h);
    }
    SUBCASE("scaling: c0 ~ 1/lambda, inf invariant") {
        const TriangleMesh m = build_torus(2.0, 0.8, 32, 32);
        const auto [c0, inf_h] = optimal_spontaneous_curvature(compute_curvatures(m));
        const auto [c0s, inf_s] = optimal_spontaneous_curvature(compute_curvatures(scaled(m, 4.0)));
        CHECK(c0s == doctest::Approx(c0 / 4.0).epsilon(1e-10));
        CHECK(inf_s == doctest::Approx(inf_h).epsilon(1e-10));
    }
}

TEST_CASE("gradient of T vanishes on round spheres and not on the torus") {
    const DiscreteCurvatures cs = compute_curvatures(build_icosphere(5, 1.0));
    const VertexField gs = gradient_T(cs);
    double max_abs = 0.0;
    for (double v : gs) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs <= 0.05);

    const DiscreteCurvatures ct = compute_curvatures(build_torus(std::sqrt(2.0), 1.0, 64, 64));
    const VertexField gt = gradient_T(ct);
    max_abs = 0.0;
    for (double v : gt) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs > 0.1);
}

TEST_CASE("gradient of W vanishes on round spheres, scales as 1/lambda^3") {
    const TriangleMesh m = build_icosphere(5, 1.0);
    const DiscreteCurvatures c = compute_curvatures(m);
    const VertexField g = gradient_W(m, c);
    double max_abs = 0.0;
    for (double v : g) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs <= 0.1);

    const TriangleMesh torus = build_torus(2.0, 0.8, 48, 48);
    const VertexField g1 = gradient_W(torus, compute_curvatures(torus));
    const TriangleMesh torus2 = scaled(torus, 2.0);
    const VertexField g2 = gradient_W(torus2, compute_curvatures(torus2));
    for (std::size_t i = 0; i < g1.size(); i += 97)
        CHECK(g2[i] == doctest::Approx(g1[i] / 8.0).epsilon(1e-9));
}

TEST_CASE("gradients match central finite differences on the torus") {
    // structured fine mesh, chosen away from the Willmore minimizer so that
    // grad W is of order one; the gradient formulas are the continuous L2
    // gradients evaluated discretely, so the agreement is discretization
    // limited rather than exact
    const TriangleMesh m = build_torus(2.0, 0.7, 192, 192);
    const DiscreteCurvatures c = compute_curvatures(m);
    std::mt19937 rng(3);
    const VertexField xi = tmc_test::random_smooth_field(m, rng, 4, 1.0);

    SUBCASE("T") {
        const VertexField g = gradient_T(c);
        const double predicted = l2_inner(g, xi, c);
        const double fd = tmc_test::central_difference(
            m, c, xi, 1e-5,
            [](const TriangleMesh& mm) { return total_mean_curvature_ratio(compute_curvatures(mm)); });
        CHECK(fd == doctest::Approx(predicted).epsilon(1e-4));
    }
    SUBCASE("W") {
        const VertexField g = gradient_W(m, c);
        const double predicted = l2_inner(g, xi, c);
        const double fd = tmc_test::central_difference(
            m, c, xi, 1e-5,
            [](const TriangleMesh& mm) { return willmore_energy(compute_curvatures(mm)); });
        CHECK(fd == doctest::Approx(predicted).epsilon(1e-3));
    }
}

TEST_CASE("total mean curvature: cotangent route vs dihedral route") {
    // two unrelated discretizations of int H dvol must agree on smooth meshes
    const TriangleMesh sphere = build_icosphere(4, 1.3);
    const double cot_sphere = total_mean_curvature(compute_curvatures(sphere));
    CHECK(edge_total_mean_curvature(sphere) == doctest::Approx(cot_sphere).epsilon(0.01));
    CHECK(cot_sphere == doctest::Approx(8.0 * kPi * 1.3).epsilon(0.01));

    const TriangleMesh torus = build_torus(std::sqrt(2.0), 1.0, 96, 96);
    const double cot_torus = total_mean_curvature(compute_curvatures(torus));
    CHECK(edge_total_mean_curvature(torus) == doctest::Approx(cot_torus).epsilon(0.01));
}

TEST_CASE("functional report serializes") {
    const FunctionalReport r = functional_report(build_icosphere(3, 1.0));
    CHECK(r.csv_header() == "W,T,A,V,iso,intH");
    CHECK(r.csv_row().find(',') != std::string::npos);
    CHECK(r.willmore == doctest::Approx(4.0 * kPi).epsilon(0.01));
}
