#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quasisym/io.hpp"
#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

using namespace quasisym;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("quasisym_io_" + std::to_string(::getpid() + std::rand() % 1000));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string &name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("fixed-width float formatting") {
    CHECK(io::fmt12(1.0) == "1.00000000000e+00");
    CHECK(io::fmt12(-2.5) == "-2.50000000000e+00");
    CHECK(io::fmt12(0.0) == "0.00000000000e+00");
    CHECK(io::fmt12(-0.0) == "0.00000000000e+00"); // negative zero is normalized
    CHECK(io::fmt12(3.14159265358979) == "3.14159265359e+00");
    CHECK(io::fmt12(1.0e-12) == "1.00000000000e-12");
    CHECK(io::fmt12(-6.02e23) == "-6.02000000000e+23");
}

TEST_CASE("atomic text write leaves no temporary behind and round-trips") {
    TempDir tmp;
    auto p = tmp.file("note.txt");
    io::write_text_atomic(p, "alpha\nbeta\n");
    CHECK(io::read_text(p) == "alpha\nbeta\n");
    io::write_text_atomic(p, "gamma\n");
    CHECK(io::read_text(p) == "gamma\n");
    CHECK_FALSE(fs::exists(p + ".tmp"));

    CHECK_THROWS_AS(io::read_text(tmp.file("missing.txt")), io_error);
    CHECK_THROWS_AS(io::write_text_atomic(tmp.file("no/such/dir/f.txt"), "x"), io_error);
}

TEST_CASE("radial solution round-trips through CSV") {
    RadialSolution sol;
    sol.domain = RadialDomain::ball(2.0);
    sol.dim = 4;
    sol.target_nodes = 1;
    sol.shoot_param = 3.25;
    sol.scheme_residual = 1.5e-11;
    sol.node_count = 1;
    sol.newton_iters = 7;
    sol.bisections = 41;
    sol.polished = true;
    const int M = 16;
    for (int i = 0; i <= M; ++i) {
        double r = 2.0 * i / M;
        sol.r.push_back(r);
        sol.v.push_back(std::cos(r) - std::cos(2.0));
        sol.u.push_back(0.5 * sol.v.back());
        sol.dv.push_back(-std::sin(r));
    }

    TempDir tmp;
    auto p = tmp.file("sol.csv");
    io::write_solution_csv(p, sol);
    auto back = io::read_solution_csv(p);

    CHECK(back.domain.is_ball == sol.domain.is_ball);
    CHECK(back.domain.outer == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(back.dim == 4);
    CHECK(back.target_nodes == 1);
    CHECK(back.node_count == 1);
    CHECK(back.polished == sol.polished);
    CHECK(back.shoot_param == doctest::Approx(3.25).epsilon(1e-11));
    REQUIRE(back.r.size() == sol.r.size());
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        CHECK(back.r[i] == doctest::Approx(sol.r[i]).epsilon(1e-11));
        CHECK(back.v[i] == doctest::Approx(sol.v[i]).epsilon(1e-11));
        CHECK(back.u[i] == doctest::Approx(sol.u[i]).epsilon(1e-11));
        CHECK(back.dv[i] == doctest::Approx(sol.dv[i]).epsilon(1e-11));
    }
}

TEST_CASE("planar field round-trips through CSV") {
    PlanarField f;
    f.L = 1.5;
    f.H = 0.75;
    f.n1 = 8;
    f.n2 = 4;
    f.residual = 2.0e-10;
    f.newton_iters = 5;
    f.converged = true;
    f.v.resize((f.n1 + 1) * (f.n2 + 1));
    f.u.resize(f.v.size());
    for (int i = 0; i <= f.n1; ++i)
        for (int j = 0; j <= f.n2; ++j) {
            f.v[f.idx(i, j)] = std::sin(0.3 * i) * j;
            f.u[f.idx(i, j)] = 0.25 * f.v[f.idx(i, j)];
        }

    TempDir tmp;
    auto p = tmp.file("field.csv");
    io::write_field_csv(p, f);
    auto back = io::read_field_csv(p);
    CHECK(back.n1 == f.n1);
    CHECK(back.n2 == f.n2);
    CHECK(back.L == doctest::Approx(f.L).epsilon(1e-11));
    CHECK(back.H == doctest::Approx(f.H).epsilon(1e-11));
    CHECK(back.converged == f.converged);
    REQUIRE(back.v.size() == f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        CHECK(back.v[i] == doctest::Approx(f.v[i]).epsilon(1e-11));
        CHECK(back.u[i] == doctest::Approx(f.u[i]).epsilon(1e-11));
    }
}

TEST_CASE("profile and transform tables carry their summaries in the header") {
    TempDir tmp;
    ProfileTable t;
    t.order = 3;
    t.s = {0.5, 1.0, 1.5};
    t.value = {2.0, -1.0, 4.0};
    t.min_value = -1.0;
    t.arg_min = 1.0;
    auto p = tmp.file("profile.csv");
    io::write_profile_csv(p, t);
    auto text = io::read_text(p);
    CHECK(text.find("order=3") != std::string::npos);
    CHECK(text.find("min_value=") != std::string::npos);
    CHECK(text.find("s,value") != std::string::npos);

    auto spec = testsupport::power_spec(2.0, 5.0);
    GFunction g = solve_g(spec, 5.0);
    auto pg = tmp.file("g.csv");
    io::write_g_table_csv(pg, g);
    auto gtext = io::read_text(pg);
    CHECK(gtext.find("s_max=") != std::string::npos);
    CHECK(gtext.find("s,g,slope") != std::string::npos);
}

TEST_CASE("corrupt solution files are rejected") {
    TempDir tmp;
    CHECK_THROWS_AS(io::read_solution_csv(tmp.file("absent.csv")), io_error);

    auto bad = tmp.file("bad.csv");
    io::write_text_atomic(bad, "# domain=ball\nr,v,u,dv\n1.0,2.0,zzz,0.0\n");
    CHECK_THROWS_AS(io::read_solution_csv(bad), io_error);

    auto ragged = tmp.file("ragged.csv");
    io::write_text_atomic(ragged, "# domain=ball\nr,v,u,dv\n0.0,1.0\n");
    CHECK_THROWS_AS(io::read_solution_csv(ragged), io_error);
}

TEST_CASE("written files are byte-identical across repeated writes") {
    TempDir tmp;
    auto spec = testsupport::power_spec(2.0, 5.0);
    GFunction g = solve_g(spec, 5.0);
    auto p1 = tmp.file("g1.csv");
    auto p2 = tmp.file("g2.csv");
    io::write_g_table_csv(p1, g);
    io::write_g_table_csv(p2, g);
    CHECK(io::read_text(p1) == io::read_text(p2));
}
