#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "tmc/core.hpp"

namespace tmc {

// Boundary data of one Fourier mode on the annulus gamma < r < 1: value and
// radial derivative at both circles.
struct AnnulusBC {
    double value_inner = 0.0;
    double deriv_inner = 0.0;
    double value_outer = 0.0;
    double deriv_outer = 0.0;
};

// Closed-form solution of Delta^2 w = 0 on the annulus with Dirichlet data in
// the radial + cos(2 theta) + sin(2 theta) modes:
//   w = k(r) + g(r) cos(2t) + h(r) sin(2t)
//   k  in span{1, r^2/4, log r, r^2 (2 log r - 1)/4}
//   g,h in span{r^2, r^4, r^-2, 1}
// The radial basis is normalized so that Lap k = C2 + C4 (1 + 2 log r), which
// makes int_{D_1 \ D_gamma} Lap w = C2 pi (1 - gamma^2) - 2 C4 gamma^2 pi log gamma.
struct BiharmonicAnnulusSolution {
    double gamma = 0.0;
    Eigen::Vector4d radial = Eigen::Vector4d::Zero();     // C1..C4
    Eigen::Vector4d mode2_cos = Eigen::Vector4d::Zero();  // B1..B4
    Eigen::Vector4d mode2_sin = Eigen::Vector4d::Zero();

    static Eigen::Vector4d radial_basis(double r) {
        return {1.0, 0.25 * r * r, std::log(r), 0.25 * r * r * (2.0 * std::log(r) - 1.0)};
    }
    static Eigen::Vector4d radial_basis_deriv(double r) {
        return {0.0, 0.5 * r, 1.0 / r, r * std::log(r)};
    }
    static Eigen::Vector4d mode2_basis(double r) {
        return {r * r, r * r * r * r, 1.0 / (r * r), 1.0};
    }
    static Eigen::Vector4d mode2_basis_deriv(double r) {
        return {2.0 * r, 4.0 * r * r * r, -2.0 / (r * r * r), 0.0};
    }

    double value(double r, double theta) const {
        return radial.dot(radial_basis(r)) + mode2_cos.dot(mode2_basis(r)) * std::cos(2.0 * theta) +
               mode2_sin.dot(mode2_basis(r)) * std::sin(2.0 * theta);
    }
    double radial_derivative(double r, double theta) const {
        return radial.dot(radial_basis_deriv(r)) +
               mode2_cos.dot(mode2_basis_deriv(r)) * std::cos(2.0 * theta) +
               mode2_sin.dot(mode2_basis_deriv(r)) * std::sin(2.0 * theta);
    }
    // analytic Laplacian: Lap k = C2 + C4 (1 + 2 log r);
    // Lap[(B1 r^2 + B2 r^4 + B3 r^-2 + B4) cos 2t] = (12 B2 r^2 - 4 B4 / r^2) cos 2t
    double laplacian(double r, double theta) const {
        const double rad = radial(1) + radial(3) * (1.0 + 2.0 * std::log(r));
        const double m2c = 12.0 * mode2_cos(1) * r * r - 4.0 * mode2_cos(3) / (r * r);
        const double m2s = 12.0 * mode2_sin(1) * r * r - 4.0 * mode2_sin(3) / (r * r);
        return rad + m2c * std::cos(2.0 * theta) + m2s * std::sin(2.0 * theta);
    }

    // int over the annulus of Lap w (mode-2 parts integrate to zero):
    double annulus_laplacian_integral() const {
        return radial(1) * kPi * (1.0 - gamma * gamma) -
               2.0 * radial(3) * gamma * gamma * kPi * std::log(gamma);
    }
};

inline BiharmonicAnnulusSolution biharmonic_annulus(double gamma, const AnnulusBC& radial,
                                                    const AnnulusBC& cos2, const AnnulusBC& sin2) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw precondition_error("biharmonic_annulus: need 0 < gamma < 1");
    BiharmonicAnnulusSolution sol;
    sol.gamma = gamma;

    auto solve_mode = [&](const AnnulusBC& bc, bool is_radial) {
        Eigen::Matrix4d A;
        A.row(0) = is_radial ? BiharmonicAnnulusSolution::radial_basis(gamma).transpose()
                             : BiharmonicAnnulusSolution::mode2_basis(gamma).transpose();
        A.row(1) = is_radial ? BiharmonicAnnulusSolution::radial_basis_deriv(gamma).transpose()
                             : BiharmonicAnnulusSolution::mode2_basis_deriv(gamma).transpose();
        A.row(2) = is_radial ? BiharmonicAnnulusSolution::radial_basis(1.0).transpose()
                             : BiharmonicAnnulusSolution::mode2_basis(1.0).transpose();
        A.row(3) = is_radial ? BiharmonicAnnulusSolution::radial_basis_deriv(1.0).transpose()
                             : BiharmonicAnnulusSolution::mode2_basis_deriv(1.0).transpose();
        const Eigen::Vector4d b(bc.value_inner, bc.deriv_inner, bc.value_outer, bc.deriv_outer);
        const Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double cond =
            svd.singularValues()(0) / std::max(svd.singularValues()(3), 1e-300);
        if (cond > 1e14)
            throw geometry_error("biharmonic_annulus: mode system ill-conditioned");
        return svd.solve(b).eval();
    };
    sol.radial = solve_mode(radial, true);
    sol.mode2_cos = solve_mode(cos2, false);
    sol.mode2_sin = solve_mode(sin2, false);
    return sol;
}

// Numerical biharmonic residual: a polar finite-difference Laplacian applied
// to the analytic Laplacian, normalized by the raw magnitude of the stencil
// so the cancellation itself is measured (the closed form must cancel to
// machine precision; a wrong basis function shows up at order one).
inline double biharmonic_residual(const BiharmonicAnnulusSolution& sol, double r, double theta) {
    const double hr = 1e-3 * r, ht = 1e-3;
    const double f0 = sol.laplacian(r, theta);
    const double fp = sol.laplacian(r + hr, theta), fm = sol.laplacian(r - hr, theta);
    const double gp = sol.laplacian(r, theta + ht), gm = sol.laplacian(r, theta - ht);
    const double lap = (fp - 2.0 * f0 + fm) / (hr * hr) + (fp - fm) / (2.0 * hr * r) +
                       (gp - 2.0 * f0 + gm) / (ht * ht * r * r);
    const double scale = (std::abs(fp) + 2.0 * std::abs(f0) + std::abs(fm)) / (hr * hr) +
                         (std::abs(fp) + std::abs(fm)) / (2.0 * hr * r) +
                         (std::abs(gp) + 2.0 * std::abs(f0) + std::abs(gm)) / (ht * ht * r * r);
    return std::abs(lap) / std::max(scale, 1e-300);
}

// --- the glued graph region (connected-sum gluing at graph level) -----------

// Second-fundamental-form data and scales of the gluing. P belongs to the
// inverted surface, Q to the host; beta = t_ratio * alpha.
struct ConnectedSumParams {
    Mat2 P = Mat2::Zero();
    Mat2 Q = Mat2::Zero();
    double alpha = 0.0;
    double t_ratio = 0.0;  // t = beta/alpha
    double gamma = 0.0;    // intermediate scale, alpha << gamma << 1
    Mat2 P0 = Mat2::Zero();  // trace-free parts
    Mat2 Q0 = Mat2::Zero();
    double e = 0.0;          // (Q11 + Q22)/2

    double beta() const { return t_ratio * alpha; }
};

inline Mat2 trace_free_part(const Mat2& m) {
    Mat2 out = m;
    const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
    out(0, 0) -= half_tr;
    out(1, 1) -= half_tr;
    return out;
}

inline double frobenius(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

inline ConnectedSumParams make_connected_sum_params(const Mat2& P, const Mat2& Q, double alpha,
                                                    double t_ratio, double gamma) {
    ConnectedSumParams p;
    p.P = P;
    p.Q = Q;
    p.alpha = alpha;
    p.t_ratio = t_ratio;
    p.gamma = gamma;
    p.P0 = trace_free_part(P);
    p.Q0 = trace_free_part(Q);
    p.e = 0.5 * (Q(0, 0) + Q(1, 1));
    return p;
}

inline void validate_connected_sum_params(const ConnectedSumParams& p) {
    if (!(frobenius(p.P0, p.Q0) > 0.0))
        throw precondition_error(
            "connected sum: <P0, Q0> must be positive (rotate the surfaces first)");
    if (!(p.alpha > 0.0 && p.alpha < p.gamma && p.gamma < 1.0))
        throw precondition_error("connected sum: need 0 < alpha < gamma < 1");
    if (p.alpha / p.gamma > 0.1)
        throw precondition_error("connected sum: scale separation alpha/gamma <= 0.1 required");
    if (std::abs(p.e - 0.5 * (p.Q(0, 0) + p.Q(1, 1))) > 1e-14)
        throw precondition_error("connected sum: stored e is stale");
    if (!(p.t_ratio > 0.0)) throw precondition_error("connected sum: t_ratio must be positive");
}

// Error graphs with the Taylor decay of the construction; the Laplacian is
// analytic when available and finite-differenced otherwise.
struct GraphFn {
    std::function<double(const Vec2&)> value;
    std::function<double(const Vec2&)> laplacian;  // optional

    double lap(const Vec2& z, double h) const {
        if (laplacian) return laplacian(z);
        return (value({z.x() + h, z.y()}) + value({z.x() - h, z.y()}) +
                value({z.x(), z.y() + h}) + value({z.x(), z.y() - h}) - 4.0 * value(z)) /
               (h * h);
    }
};

// phi:  decays like 1/|zeta| at infinity (graph error of the inverted surface)
inline GraphFn default_inverted_graph_error(double c = 0.05) {
    return {[c](const Vec2& z) { return c / z.norm(); },
            [c](const Vec2& z) { return c / (z.norm() * z.norm() * z.norm()); }};
}

// psi: cubic Taylor remainder of the host graph at the origin
inline GraphFn default_host_graph_error(double c = 0.05) {
    return {[c](const Vec2& z) { return c * z.x() * z.squaredNorm(); },
            [c](const Vec2& z) { return 8.0 * c * z.x(); }};
}

namespace detail {

// quintic ramp: 0 for s <= s0, 1 for s >= s1, with sqrt(alpha)|eta'| and
// alpha|eta''| bounded uniformly in alpha
inline double eta_ramp(double s, double s0, double s1) {
    if (s <= s0) return 0.0;
    if (s >= s1) return 1.0;
    const double u = (s - s0) / (s1 - s0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

}  // namespace detail

struct GluedGraphRegion {
    BiharmonicAnnulusSolution middle;   // biharmonic interpolation on gamma < r < 1
    double strip_integral_outer = 0.0;  // int_{D_{1+sqrt a} \ D_1} Lap w
    double strip_integral_inner = 0.0;  // int_{D_gamma \ D_{gamma - sqrt a}} Lap w
    double annulus_integral = 0.0;      // int_{D_1 \ D_gamma} Lap w, closed form
    double annulus_integral_quadrature = 0.0;
    double removed_disk_integral = 0.0; // int_{D_{1+sqrt a}} Lap v_{1/beta}
    double two_beta_pi_e = 0.0;
    double mean_curvature_vs_laplacian_max_ratio = 0.0;  // |H sqrt(det G) - Lap u|/(|Du||D2u|)
    double gluing_energy = 0.0;  // 1/4 int_{D_1\D_gamma} (Lap w)^2, the interpolation energy
};

// Assembles the piecewise graph w of the connected-sum gluing
//   w = p0_alpha + eta(gamma - r) phi_alpha   on alpha R < r < gamma,
//   biharmonic                                 on gamma <= r <= 1,
//   w = q_{1/beta} + eta(r - 1) psi_{1/beta}   on 1 < r < rho/beta,
// and evaluates the strip/annulus integrals of Lap w that control the total
// mean curvature transfer, plus the mean-curvature-versus-Laplacian bound.
inline GluedGraphRegion glued_graph_region(const ConnectedSumParams& params,
                                           const GraphFn& phi_err, const GraphFn& psi_err,
                                           int n_r = 96, int n_theta = 64) {
    validate_connected_sum_params(params);
    const double alpha = params.alpha, gamma = params.gamma, beta = params.beta();
    const double sqrt_a = std::sqrt(alpha);

    // p0_alpha(z) = (alpha/2) P0(z_hat, z_hat): pure mode-2, radially constant
    const double p_cos = 0.5 * alpha * params.P0(0, 0);
    const double p_sin = 0.5 * alpha * params.P0(0, 1);
    // q_{1/beta}(z) = (beta/2)(e r^2 + Q0(z, z))
    const double q_rad = 0.5 * beta * params.e;       // * r^2
    const double q_cos = 0.5 * beta * params.Q0(0, 0);  // * r^2
    const double q_sin = 0.5 * beta * params.Q0(0, 1);  // * r^2

    AnnulusBC rad_bc{0.0, 0.0, q_rad, 2.0 * q_rad};
    AnnulusBC cos_bc{p_cos, 0.0, q_cos, 2.0 * q_cos};
    AnnulusBC sin_bc{p_sin, 0.0, q_sin, 2.0 * q_sin};

    GluedGraphRegion region;
    region.middle = biharmonic_annulus(gamma, rad_bc, cos_bc, sin_bc);
    region.two_beta_pi_e = 2.0 * beta * kPi * params.e;
    region.annulus_integral = region.middle.annulus_laplacian_integral();

    // piecewise evaluation of w and of its analytic-or-FD Laplacian
    auto w_inner = [&](const Vec2& z) {  // alpha R < r < gamma
        const double r = z.norm();
        const double c2 = (z.x() * z.x() - z.y() * z.y()) / (r * r);
        const double s2 = 2.0 * z.x() * z.y() / (r * r);
        const double eta = detail::eta_ramp(gamma - r, 0.25 * sqrt_a, 0.75 * sqrt_a);
        return p_cos * c2 + p_sin * s2 + eta * alpha * phi_err.value(z / alpha);
    };
    auto w_outer = [&](const Vec2& z) {  // 1 < r < rho/beta
        const double r2 = z.squaredNorm();
        const double c2 = (z.x() * z.x() - z.y() * z.y());
        const double s2 = 2.0 * z.x() * z.y();
        const double eta = detail::eta_ramp(z.norm() - 1.0, 0.25 * sqrt_a, 0.75 * sqrt_a);
        return q_rad * r2 + q_cos * c2 + q_sin * s2 + eta * (1.0 / beta) * psi_err.value(beta * z);
    };
    auto w_any = [&](const Vec2& z) {
        const double r = z.norm();
        if (r < gamma) return w_inner(z);
        if (r <= 1.0) return region.middle.value(r, std::atan2(z.y(), z.x()));
        return w_outer(z);
    };

    auto fd_lap = [&](auto&& f, const Vec2& z, double h) {
        return (f(Vec2(z.x() + h, z.y())) + f(Vec2(z.x() - h, z.y())) +
                f(Vec2(z.x(), z.y() + h)) + f(Vec2(z.x(), z.y() - h)) - 4.0 * f(z)) /
               (h * h);
    };

    // outer strip integral and removed-disk integral over D_{1+sqrt a}
    {
        double strip = 0.0, disk = 0.0;
        const int nr = n_r, nt = n_theta;
        for (int i = 0; i < nr; ++i) {
            const double r = 1.0 + sqrt_a * (i + 0.5) / nr;
            for (int j = 0; j < nt; ++j) {
                const double th = 2.0 * kPi * (j + 0.5) / nt;
                const Vec2 z(r * std::cos(th), r * std::sin(th));
                const double lap = fd_lap(w_outer, z, 1e-4 * std::max(r - 1.0, sqrt_a * 0.05));
                strip += lap * r * (sqrt_a / nr) * (2.0 * kPi / nt);
            }
        }
        // v_{1/beta} = q_{1/beta} + psi_{1/beta} without the cutoff, over the
        // whole disk r < 1 + sqrt(alpha): Lap q = 2 beta e exactly
        disk = 2.0 * beta * params.e * kPi * (1.0 + sqrt_a) * (1.0 + sqrt_a);
        auto psi_scaled_lap = [&](const Vec2& z) {
            return beta * psi_err.lap(beta * z, 1e-5 * std::max(1.0, z.norm()) * beta);
        };
        const int nrd = 2 * n_r;
        for (int i = 0; i < nrd; ++i) {
            const double r = (1.0 + sqrt_a) * (i + 0.5) / nrd;
            for (int j = 0; j < nt; ++j) {
                const double th = 2.0 * kPi * (j + 0.5) / nt;
                const Vec2 z(r * std::cos(th), r * std::sin(th));
                disk += psi_scaled_lap(z) * r * ((1.0 + sqrt_a) / nrd) * (2.0 * kPi / nt);
            }
        }
        region.strip_integral_outer = strip;
        region.removed_disk_integral = disk;
    }

    // inner strip integral over D_gamma \ D_{gamma - sqrt a}
    {
        double strip = 0.0;
        const double r0 = gamma - sqrt_a;
        if (!(r0 > 2.0 * alpha))
            throw precondition_error("glued_graph_region: gamma - sqrt(alpha) too small");
        for (int i = 0; i < n_r; ++i) {
            const double r = r0 + sqrt_a * (i + 0.5) / n_r;
            for (int j = 0; j < n_theta; ++j) {
                const double th = 2.0 * kPi * (j + 0.5) / n_theta;
                const Vec2 z(r * std::cos(th), r * std::sin(th));
                const double lap = fd_lap(w_inner, z, 1e-4 * sqrt_a);
                strip += lap * r * (sqrt_a / n_r) * (2.0 * kPi / n_theta);
            }
        }
        region.strip_integral_inner = strip;
    }

    // middle annulus: closed form cross-checked by quadrature, plus the
    // interpolation energy (scales like alpha^2, the rate of the Willmore
    // defect; the strips carry curvature belonging to the two surfaces
    // themselves, not to the gluing)
    {
        double quad = 0.0, energy = 0.0;
        const int nr = 4 * n_r;
        for (int i = 0; i < nr; ++i) {
            const double r = gamma + (1.0 - gamma) * (i + 0.5) / nr;
            for (int j = 0; j < n_theta; ++j) {
                const double th = 2.0 * kPi * (j + 0.5) / n_theta;
                const double lap = region.middle.laplacian(r, th);
                const double da = r * ((1.0 - gamma) / nr) * (2.0 * kPi / n_theta);
                quad += lap * da;
                energy += 0.25 * lap * lap * da;
            }
        }
        region.annulus_integral_quadrature = quad;
        region.gluing_energy = energy;
    }

    // mean curvature versus Laplacian on the assembled graph: the ratio
    // |H sqrt(det G) - Lap u| / (|Du| |D^2 u|) stays bounded for gentle graphs
    {
        double max_ratio = 0.0;
        const double r_lo = gamma - 0.5 * sqrt_a, r_hi = 1.0 + 0.5 * sqrt_a;
        for (int i = 0; i < 24; ++i) {
            const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / 24;
            for (int j = 0; j < 16; ++j) {
                const double th = 2.0 * kPi * (j + 0.5) / 16;
                const Vec2 z(r * std::cos(th), r * std::sin(th));
                const double h = 1e-5;
                auto f = w_any;
                const double ux = (f(Vec2(z.x() + h, z.y())) - f(Vec2(z.x() - h, z.y()))) / (2 * h);
                const double uy = (f(Vec2(z.x(), z.y() + h)) - f(Vec2(z.x(), z.y() - h))) / (2 * h);
                const double uxx =
                    (f(Vec2(z.x() + h, z.y())) - 2 * f(z) + f(Vec2(z.x() - h, z.y()))) / (h * h);
                const double uyy =
                    (f(Vec2(z.x(), z.y() + h)) - 2 * f(z) + f(Vec2(z.x(), z.y() - h))) / (h * h);
                const double uxy = (f(Vec2(z.x() + h, z.y() + h)) - f(Vec2(z.x() + h, z.y() - h)) -
                                    f(Vec2(z.x() - h, z.y() + h)) + f(Vec2(z.x() - h, z.y() - h))) /
                                   (4 * h * h);
                const double w2 = 1.0 + ux * ux + uy * uy;
                const double h_det =  // H * sqrt(det G) for the graph (H = k1 + k2)
                    ((1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy + (1.0 + ux * ux) * uyy) / w2;
                const double du = std::sqrt(ux * ux + uy * uy);
                const double d2u = std::sqrt(uxx * uxx + 2.0 * uxy * uxy + uyy * uyy);
                if (du * d2u > 1e-14)
                    max_ratio = std::max(max_ratio,
                                         std::abs(h_det - (uxx + uyy)) / (du * d2u));
            }
        }
        region.mean_curvature_vs_laplacian_max_ratio = max_ratio;
    }
    return region;
}

struct ConnectedSumReport {
    double delta_T_leading = 0.0;   // alpha beta A(f2)^{-1/2} int H(f1 inverted)
    double delta_W_leading = 0.0;   // pi alpha^2 (|P0|^2 - t <P0, Q0>)
    double frobenius_P0Q0 = 0.0;
    double e = 0.0;
    bool delta_W_negative = false;
    double gluing_energy = 0.0;
};

// Leading-order predictions of the connected-sum estimates: the T transfer
// and the Willmore defect, with the gluing energy from the grid evaluation
// attached for scaling fits.
inline ConnectedSumReport connected_sum_report(const ConnectedSumParams& params,
                                               double inverted_surface_int_h,
                                               double area_f2 = 1.0) {
    validate_connected_sum_params(params);
    ConnectedSumReport rep;
    rep.frobenius_P0Q0 = frobenius(params.P0, params.Q0);
    rep.e = params.e;
    rep.delta_T_leading =
        params.alpha * params.beta() / std::sqrt(area_f2) * inverted_surface_int_h;
    const double p0_norm2 = frobenius(params.P0, params.P0);
    rep.delta_W_leading =
        kPi * params.alpha * params.alpha * (p0_norm2 - params.t_ratio * rep.frobenius_P0Q0);
    rep.delta_W_negative = rep.delta_W_leading < 0.0;
    rep.gluing_energy =
        glued_graph_region(params, default_inverted_graph_error(), default_host_graph_error())
            .gluing_energy;
    return rep;
}

}  // namespace tmc
