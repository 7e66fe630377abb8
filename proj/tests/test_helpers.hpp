#pragma once

#include <cmath>
#include <random>

#include "tmc/curvature.hpp"
#include "tmc/functionals.hpp"
#include "tmc/mesh.hpp"

namespace tmc_test {

// Smooth random field: low-frequency trigonometric polynomial of the ambient
// coordinates, so the finite-difference oracles see a mesh-resolved variation.
inline tmc::VertexField random_smooth_field(const tmc::TriangleMesh& mesh, std::mt19937& rng,
                                            int modes = 4, double amplitude = 1.0) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Eigen::Vector3d> wave(modes);
    std::vector<double> phase(modes), coeff(modes);
    for (int m = 0; m < modes; ++m) {
        wave[m] = Eigen::Vector3d(unif(rng), unif(rng), unif(rng));
        phase[m] = tmc::kPi * unif(rng);
        coeff[m] = unif(rng);
    }
    tmc::VertexField f(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        double v = 0.0;
        for (int m = 0; m < modes; ++m)
            v += coeff[m] * std::sin(wave[m].dot(mesh.vertices[i]) + phase[m]);
        f[i] = amplitude * v / modes;
    }
    return f;
}

// Central finite difference of a functional along a normal field.
template <typename Functional>
double central_difference(const tmc::TriangleMesh& mesh, const tmc::DiscreteCurvatures& curv,
                          const tmc::VertexField& xi, double step, Functional&& functional) {
    tmc::VertexField plus(xi.size()), minus(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        plus[i] = step * xi[i];
        minus[i] = -step * xi[i];
    }
    const double f_plus = functional(tmc::displaced_along_normals(mesh, curv, plus));
    const double f_minus = functional(tmc::displaced_along_normals(mesh, curv, minus));
    return (f_plus - f_minus) / (2.0 * step);
}

inline tmc::TriangleMesh perturbed_icosphere(int subdivisions, double radius, double noise,
                                             unsigned seed) {
    tmc::TriangleMesh mesh = tmc::build_icosphere(subdivisions, radius);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (auto& v : mesh.vertices) v *= 1.0 + noise * unif(rng);
    return mesh;
}

}  // namespace tmc_test
