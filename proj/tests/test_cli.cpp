#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tmc/functionals.hpp"
#include "tmc/obj_io.hpp"

// Exercises the installed binary end to end: exit codes, file outputs and
// deterministic CSV bytes.

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tmc_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd = std::string(TMC_CLI_PATH) + " " + args + " > " + stdout_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("eval: sphere and torus baselines through the binary") {
    TempDir dir;
    tmc::write_obj(dir.file("sphere.obj"), tmc::build_icosphere(4, 1.0));
    tmc::write_obj(dir.file("torus.obj"), tmc::build_torus(std::sqrt(2.0), 1.0, 96, 96));

    REQUIRE(run("eval " + dir.file("sphere.obj"), dir.file("sphere.txt")) == 0);
    const std::string sphere_out = slurp(dir.file("sphere.txt"));
    CHECK(sphere_out.find("W    = 12.5") != std::string::npos);

    REQUIRE(run("eval " + dir.file("torus.obj") + " --csv " + dir.file("torus.csv"),
                dir.file("torus.txt")) == 0);
    const std::string torus_out = slurp(dir.file("torus.txt"));
    CHECK(torus_out.find("W    = 19.7") != std::string::npos);  // 2 pi^2
    const std::string csv = slurp(dir.file("torus.csv"));
    CHECK(csv.find("W,T,A,V,iso,intH") != std::string::npos);
}

TEST_CASE("eval error paths: parse failure exit 2, validation failure exit 3") {
    TempDir dir;
    {
        std::ofstream bad(dir.file("truncated.obj"));
        bad << "v 0 0 0\nv 1 0 0\nf 1 2\n";
    }
    CHECK(run("eval " + dir.file("truncated.obj")) == 2);

    tmc::TriangleMesh open_mesh = tmc::build_icosphere(1, 1.0);
    open_mesh.faces.pop_back();
    tmc::write_obj(dir.file("open.obj"), open_mesh);
    CHECK(run("eval " + dir.file("open.obj")) == 3);

    CHECK(run("eval " + dir.file("missing.obj")) == 2);
}

TEST_CASE("construct: bridge, sigma, humps, slope, and precondition exits") {
    TempDir dir;
    REQUIRE(run("construct bridge --t 2 --samples 250 --nphi 48 --out " + dir.file("b.obj") +
                " --report " + dir.file("b.json")) == 0);
    const tmc::TriangleMesh bridge = tmc::read_obj(dir.file("b.obj"));
    CHECK(tmc::validate(bridge).valid());
    const std::string rep = slurp(dir.file("b.json"));
    CHECK(rep.find("predicted_W") != std::string::npos);

    REQUIRE(run("construct sigma --t 3 --genus 1 --variant 1 --nphi 48 --out " +
                dir.file("s.obj")) == 0);
    CHECK(tmc::validate(tmc::read_obj(dir.file("s.obj"))).genus == 1);

    REQUIRE(run("construct humps --n 5 --R 8 --nphi 32 --samples 200 --out " + dir.file("h.obj") +
                " --profile-csv " + dir.file("h.csv")) == 0);
    CHECK(slurp(dir.file("h.csv")).find("s,gamma1,gamma2,theta") != std::string::npos);

    REQUIRE(run("construct slope --eps 0.3 --delta 0.01 --nphi 32 --samples 96 --report " +
                dir.file("sl.json")) == 0);
    CHECK(slurp(dir.file("sl.json")).find("quadrature_intH") != std::string::npos);

    CHECK(run("construct bridge --t 0.1") == 4);   // spheres intersect
    CHECK(run("construct humps --n 5 --R 1.5") == 4);
    CHECK(run("construct nothing") == 4);
}

TEST_CASE("flow through the binary: convergence exit 0, bad config exit 4") {
    TempDir dir;
    tmc::write_obj(dir.file("start.obj"), tmc::build_icosphere(3, 1.0));
    {
        std::ofstream cfg(dir.file("flow.json"));
        cfg << "{\"target_R\": 7.16, \"residual_tolerance\": 0.3, \"max_iters\": 300}\n";
    }
    REQUIRE(run("flow " + dir.file("start.obj") + " --config " + dir.file("flow.json") +
                " --out " + dir.file("final.obj") + " --trace " + dir.file("trace.csv")) == 0);
    CHECK(slurp(dir.file("trace.csv")).find("iter,W,T,A,lambda,residual,accepted") !=
          std::string::npos);
    CHECK(tmc::validate(tmc::read_obj(dir.file("final.obj"))).valid());

    {
        std::ofstream cfg(dir.file("bad.json"));
        cfg << "{\"step\": 0.0}\n";
    }
    CHECK(run("flow " + dir.file("start.obj") + " --config " + dir.file("bad.json")) == 4);

    // unreachable tolerance: exit 5 with the trace still written
    {
        std::ofstream cfg(dir.file("strict.json"));
        cfg << "{\"target_R\": 7.16, \"residual_tolerance\": 1e-12, \"max_iters\": 40}\n";
    }
    CHECK(run("flow " + dir.file("start.obj") + " --config " + dir.file("strict.json") +
              " --trace " + dir.file("strict_trace.csv")) == 5);
    CHECK(!slurp(dir.file("strict_trace.csv")).empty());
}

TEST_CASE("sweep: blowdown CSV is deterministic, strips run standalone") {
    TempDir dir;
    tmc::write_obj(dir.file("egg.obj"),
                   tmc::build_torus(std::sqrt(2.0), 1.0, 48, 48));
    REQUIRE(run("sweep blowdown --mesh " + dir.file("egg.obj") + " --radii 8,16,32 --out " +
                dir.file("a.csv")) == 0);
    REQUIRE(run("sweep blowdown --mesh " + dir.file("egg.obj") + " --radii 8,16,32 --out " +
                dir.file("b.csv")) == 0);
    const std::string a = slurp(dir.file("a.csv")), b = slurp(dir.file("b.csv"));
    CHECK(a == b);  // byte-identical outputs for identical configs
    CHECK(a.find("param,T,W,error_flag") != std::string::npos);

    REQUIRE(run("sweep strips --out " + dir.file("strips.csv")) == 0);
    CHECK(slurp(dir.file("strips.csv")).find("alpha,") != std::string::npos);

    CHECK(run("sweep unknown") == 4);
}
