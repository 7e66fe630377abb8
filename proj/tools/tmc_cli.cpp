// Command-line front end: evaluates functionals of OBJ meshes, builds the
// explicit constructions, runs the constrained flow, and drives the
// inversion/profile sweeps. Exit codes: 0 ok, 2 parse error, 3 validation
// failure, 4 precondition violation, 5 non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "tmc/axisym.hpp"
#include "tmc/biharmonic.hpp"
#include "tmc/constructions.hpp"
#include "tmc/flow.hpp"
#include "tmc/functionals.hpp"
#include "tmc/mobius.hpp"
#include "tmc/obj_io.hpp"

using json = nlohmann::json;
using namespace tmc;

namespace {

constexpr const char* kVersion = "tmc 1.0.0";

enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kValidationError = 3,
    kPreconditionError = 4,
    kNoConvergence = 5,
};

std::string resolve_output(const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("TMC_OUTPUT_DIR"))
        return (std::filesystem::path(dir) / path).string();
    return path;
}

json diagnostics_json(const MeshDiagnostics& d) {
    return json{{"edge_manifold", d.edge_manifold},
                {"oriented", d.oriented},
                {"closed", d.closed},
                {"has_degenerate_faces", d.has_degenerate_faces},
                {"has_isolated_vertices", d.has_isolated_vertices},
                {"boundary_edges", d.boundary_edges},
                {"nonmanifold_edges", d.nonmanifold_edges},
                {"euler_characteristic", d.euler_characteristic},
                {"genus", d.genus},
                {"min_face_area", d.min_face_area},
                {"max_face_area", d.max_face_area},
                {"min_edge_length", d.min_edge_length},
                {"max_edge_length", d.max_edge_length}};
}

TriangleMesh load_validated_obj(const std::string& path) {
    const TriangleMesh mesh = read_obj(path);  // throws parse_error
    const MeshDiagnostics d = validate(mesh);
    if (!d.valid()) {
        std::cerr << diagnostics_json(d).dump(2) << "\n";
        throw std::domain_error("mesh failed validation");  // mapped to exit 3
    }
    return mesh;
}

void print_report(const FunctionalReport& rep) {
    std::cout << "W    = " << format_g12(rep.willmore) << "\n"
              << "T    = " << format_g12(rep.tmc_ratio) << "\n"
              << "A    = " << format_g12(rep.area) << "\n"
              << "V    = " << format_g12(rep.volume) << "\n"
              << "iso  = " << format_g12(rep.iso) << "\n"
              << "intH = " << format_g12(rep.total_mean_curvature) << "\n";
}

std::vector<double> parse_radii(const std::string& spec) {
    // "a:b:geom", "a:b:<count>" (linear), or a comma list
    std::vector<double> out;
    if (spec.find(':') == std::string::npos) {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    }
    std::stringstream ss(spec);
    std::string a, b, mode;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, mode, ':');
    const double lo = std::stod(a), hi = std::stod(b);
    if (mode == "geom" || mode.empty()) {
        for (double r = lo; r <= hi * (1.0 + 1e-12); r *= 2.0) out.push_back(r);
    } else {
        const int n = std::max(2, std::stoi(mode));
        for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    }
    return out;
}

int cmd_eval(const std::string& mesh_path, const std::string& csv_path) {
    const TriangleMesh mesh = load_validated_obj(mesh_path);
    const FunctionalReport rep = functional_report(mesh);
    print_report(rep);
    if (!csv_path.empty()) {
        std::ofstream out(resolve_output(csv_path));
        out << "# " << kVersion << " eval " << mesh_path << "\n";
        out << rep.csv_header() << "\n" << rep.csv_row() << "\n";
    }
    return kOk;
}

int cmd_construct(const std::string& kind, double t, int genus, int variant, int n_humps,
                  double shell_R, double eps, double delta, int samples, int n_phi,
                  const std::string& out_obj, const std::string& out_report,
                  const std::string& out_profile) {
    TriangleMesh mesh;
    json report;
    report["version"] = kVersion;
    report["kind"] = kind;

    std::optional<ProfileCurve> profile;
    if (kind == "bridge") {
        mesh = build_gamma_t(t, samples, n_phi);
        profile = make_bridge_profile(t, samples);
        report["t"] = t;
        report["predicted_W"] = bridge_willmore_prediction(t);
        const CatenoidBridgeParams p = catenoid_bridge_params(t);
        report["sigma"] = p.sigma_t;
        report["lambda"] = p.lambda_t;
        report["sphere_radius"] = p.r_t;
    } else if (kind == "sigma") {
        SigmaConfig cfg;
        cfg.n_phi = n_phi;
        mesh = build_sigma_g(t, genus, variant, cfg);
        report["t"] = t;
        report["genus"] = genus;
        report["variant"] = variant;
        report["predicted_W"] = 8.0 * kPi - 4.0 * kPi * (genus + 1) * (1.0 - std::tanh(t));
        if (variant == 2) {
            report["limit_T"] = std::sqrt(32.0 * kPi);
            report["limit_iso"] = std::cbrt(72.0 * kPi);
        }
    } else if (kind == "humps") {
        profile = make_hump_stack_curve(n_humps, shell_R, std::max(8, samples / 8));
        mesh = revolve_profile(*profile, n_phi);
        report["n"] = n_humps;
        report["R"] = shell_R;
        const AxisymReport rep = axisym_functionals(*profile);
        report["quadrature_intH"] = rep.int_h;
        report["quadrature_W"] = rep.willmore;
        report["predicted_intH_over_2pi_leading"] = -shell_R * n_humps * kPi + kPi * shell_R;
    } else if (kind == "slope") {
        profile = make_slope_counterexample_curve(eps, delta, samples);
        mesh = revolve_profile(*profile, n_phi);
        report["eps"] = eps;
        report["delta"] = delta;
        const AxisymReport rep = axisym_functionals(*profile);
        report["quadrature_intH"] = rep.int_h;
        report["quadrature_W"] = rep.willmore;
        report["predicted_intH_over_2pi_leading"] = -2.0 * eps;
    } else {
        throw precondition_error("construct: unknown kind " + kind);
    }

    const FunctionalReport rep = functional_report(mesh);
    report["W"] = rep.willmore;
    report["T"] = rep.tmc_ratio;
    report["A"] = rep.area;
    report["V"] = rep.volume;
    report["iso"] = rep.iso;
    report["intH"] = rep.total_mean_curvature;
    print_report(rep);

    if (!out_obj.empty()) write_obj(resolve_output(out_obj), mesh);
    if (!out_report.empty()) {
        std::ofstream out(resolve_output(out_report));
        out << report.dump(2) << "\n";
    }
    if (!out_profile.empty() && profile) {
        std::ofstream out(resolve_output(out_profile));
        write_profile_csv(out, *profile);
    }
    return kOk;
}

int cmd_flow(const std::string& mesh_path, const std::string& config_path,
             const std::string& out_obj, const std::string& out_trace) {
    const TriangleMesh mesh = load_validated_obj(mesh_path);
    FlowConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw parse_error("flow: cannot open config " + config_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw parse_error(std::string("flow config: ") + e.what());
        }
        config.target_R = j.value("target_R", config.target_R);
        config.step = j.value("step", config.step);
        config.max_iters = j.value("max_iters", config.max_iters);
        config.constraint_tolerance = j.value("constraint_tolerance", config.constraint_tolerance);
        config.residual_tolerance = j.value("residual_tolerance", config.residual_tolerance);
        config.tangential_smoothing_weight =
            j.value("tangential_smoothing_weight", config.tangential_smoothing_weight);
        config.smoothing_interval = j.value("smoothing_interval", config.smoothing_interval);
        config.area_renormalize = j.value("area_renormalize", config.area_renormalize);
        config.area_target = j.value("area_target", config.area_target);
    }
    config.require_valid();  // precondition_error -> exit 4

    const FlowResult res = run_flow(mesh, config);
    std::cout << "status   = " << to_string(res.status) << "\n"
              << "W        = " << format_g12(res.willmore) << "\n"
              << "T        = " << format_g12(res.tmc_ratio) << "\n"
              << "lambda   = " << format_g12(res.lambda) << "\n"
              << "residual = " << format_g12(res.residual) << "\n";
    if (!out_trace.empty()) {
        std::ofstream out(resolve_output(out_trace));
        res.trace.write_csv(
            out, std::string(kVersion) + " flow target_R=" + format_g12(config.target_R));
    }
    if (!out_obj.empty()) write_obj(resolve_output(out_obj), res.mesh);
    return res.status == FlowStatus::converged ? kOk : kNoConvergence;
}

int cmd_sweep(const std::string& kind, const std::string& mesh_path, const std::string& radii_spec,
              const std::string& grid_spec, int vertex_index, int seeds, int jobs,
              const std::string& out_csv) {
    std::ostringstream buffer;
    const std::string comment =
        std::string(kVersion) + " sweep " + kind + (mesh_path.empty() ? "" : " mesh=" + mesh_path) +
        (radii_spec.empty() ? "" : " radii=" + radii_spec) +
        (grid_spec.empty() ? "" : " grid=" + grid_spec) + " seeds=" + std::to_string(seeds);

    if (kind == "blowdown") {
        const TriangleMesh mesh = load_validated_obj(mesh_path);
        const SweepSeries series =
            blow_down_sweep(mesh, Vec3(1.0, 0.3, 0.2), parse_radii(radii_spec));
        series.write_csv(buffer,
                         comment + (series.fitted_decay_exponent
                                        ? " fitted_exponent=" +
                                              format_g12(*series.fitted_decay_exponent)
                                        : ""));
    } else if (kind == "blowup") {
        const TriangleMesh mesh = load_validated_obj(mesh_path);
        std::vector<double> ts = radii_spec.empty() ? std::vector<double>{0.5, 0.2, 0.08, 0.02}
                                                    : parse_radii(radii_spec);
        const SweepSeries series = blow_up_sweep(mesh, std::max(0, vertex_index), ts);
        series.write_csv(buffer, comment);
    } else if (kind == "beta0") {
        FlowConfig config;
        config.residual_tolerance = 0.25;
        std::vector<double> grid = parse_radii(grid_spec);
        std::vector<Beta0Row> rows;
        if (jobs > 1) {
            // rows are independent; buffered and emitted in grid order
            std::vector<std::future<std::vector<Beta0Row>>> futures;
            for (double r : grid)
                futures.push_back(std::async(std::launch::async, [r, seeds, config] {
                    return estimate_beta0({r}, seeds, config);
                }));
            for (auto& f : futures) {
                auto part = f.get();
                rows.insert(rows.end(), part.begin(), part.end());
            }
        } else {
            rows = estimate_beta0(grid, seeds, config);
        }
        buffer << "# " << comment << "\n";
        buffer << "R,best_W,lambda,converged_runs,total_runs,ok\n";
        for (const Beta0Row& row : rows)
            buffer << format_g12(row.target_R) << ',' << format_g12(row.best_willmore) << ','
                   << format_g12(row.lambda_at_best) << ',' << row.converged_runs << ','
                   << row.total_runs << ',' << int(row.ok) << "\n";
    } else if (kind == "strips") {
        // scaling of the gluing-strip integrals over a decade grid of alpha
        Mat2 P, Q;
        P << 0.8, 0.1, 0.1, -0.8;
        Q << 1.4, 0.2, 0.2, 0.6;
        buffer << "# " << comment << "\n";
        buffer << "alpha,strip_outer,strip_inner,annulus_minus_2bpe,disk_minus_2bpe,energy\n";
        for (double alpha : {1e-2, 1e-3, 1e-4}) {
            const ConnectedSumParams params = make_connected_sum_params(P, Q, alpha, 3.0, 0.2);
            const GluedGraphRegion region = glued_graph_region(
                params, default_inverted_graph_error(), default_host_graph_error());
            buffer << format_g12(alpha) << ',' << format_g12(region.strip_integral_outer) << ','
                   << format_g12(region.strip_integral_inner) << ','
                   << format_g12(region.annulus_integral - region.two_beta_pi_e) << ','
                   << format_g12(region.removed_disk_integral - region.two_beta_pi_e) << ','
                   << format_g12(region.gluing_energy) << "\n";
        }
    } else {
        throw precondition_error("sweep: unknown kind " + kind);
    }

    if (out_csv.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream out(resolve_output(out_csv));
        out << buffer.str();
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Willmore energies and total mean curvature on closed surfaces"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "functionals of an OBJ mesh");
    std::string eval_mesh, eval_csv;
    eval->add_option("mesh", eval_mesh, "input OBJ path")->required();
    eval->add_option("--csv", eval_csv, "write the report as a one-line CSV");

    auto* construct = app.add_subcommand("construct", "build one of the explicit surfaces");
    std::string kind, out_obj, out_report, out_profile;
    double t = 2.0, shell_R = 8.0, eps = 0.3, delta = 0.01;
    int genus = 0, variant = 1, n_humps = 20, samples = 400, n_phi = 64;
    construct->add_option("kind", kind, "bridge | sigma | humps | slope")->required();
    construct->add_option("--t", t, "bridge parameter");
    construct->add_option("--genus", genus, "genus of the sigma surface");
    construct->add_option("--variant", variant, "sigma variant, 1 or 2");
    construct->add_option("--n", n_humps, "hump count");
    construct->add_option("--R", shell_R, "hump shell radius");
    construct->add_option("--eps", eps, "slope angle excess");
    construct->add_option("--delta", delta, "slope joint radius");
    construct->add_option("--samples", samples, "profile samples");
    construct->add_option("--nphi", n_phi, "azimuthal resolution");
    construct->add_option("--out", out_obj, "output OBJ path");
    construct->add_option("--report", out_report, "output JSON report path");
    construct->add_option("--profile-csv", out_profile, "output profile CSV path");

    auto* flow = app.add_subcommand("flow", "constrained Willmore minimization");
    std::string flow_mesh, flow_config, flow_obj, flow_trace;
    flow->add_option("mesh", flow_mesh, "input OBJ path")->required();
    flow->add_option("--config", flow_config, "JSON flow config");
    flow->add_option("--out", flow_obj, "final mesh OBJ path");
    flow->add_option("--trace", flow_trace, "trace CSV path");

    auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
    std::string sweep_kind, sweep_mesh, radii_spec, grid_spec, sweep_csv;
    int vertex_index = 0, seeds = 2, jobs = 1;
    sweep->add_option("kind", sweep_kind, "blowdown | blowup | beta0 | strips")->required();
    sweep->add_option("--mesh", sweep_mesh, "input OBJ path");
    sweep->add_option("--radii", radii_spec, "a:b:geom, a:b:<count> or a comma list");
    sweep->add_option("--grid", grid_spec, "target ratios, comma separated");
    sweep->add_option("--vertex", vertex_index, "foot vertex of the blow-up ray");
    sweep->add_option("--seeds", seeds, "flow seeds per grid cell");
    sweep->add_option("--jobs", jobs, "parallel rows");
    sweep->add_option("--out", sweep_csv, "output CSV path (stdout otherwise)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eval) return cmd_eval(eval_mesh, eval_csv);
        if (*construct)
            return cmd_construct(kind, t, genus, variant, n_humps, shell_R, eps, delta, samples,
                                 n_phi, out_obj, out_report, out_profile);
        if (*flow) return cmd_flow(flow_mesh, flow_config, flow_obj, flow_trace);
        if (*sweep)
            return cmd_sweep(sweep_kind, sweep_mesh, radii_spec, grid_spec, vertex_index, seeds,
                             jobs, sweep_csv);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPreconditionError;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPreconditionError;
    } catch (const geometry_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPreconditionError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
