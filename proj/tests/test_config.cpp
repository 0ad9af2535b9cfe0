#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "choquard/config.hpp"
#include "choquard/io.hpp"

using namespace choquard;

TEST_CASE("config parsing: values, comments, unknown keys") {
    auto cfg = RunConfig::from_string(R"(
# basic run
problem.N = 3
problem.lambda = 2.0
grid.n = 64
eps.list = 1e-3, 2e-3
potential.a0 = 1.5
potential.bumps = gaussian(amp=0.5,width=1.2,center=0.5 0 0); ring(amp=0.25,r0=1.4,width=0.9)
box.mu_min = 0.6
box.mu_max = 1.8
jobs = 2
)");
    CHECK(cfg.N == 3);
    CHECK(cfg.lambda == 2.0);
    CHECK(cfg.grid_n == 64);
    CHECK(cfg.eps_list == std::vector<double>{1e-3, 2e-3});
    CHECK(cfg.potential.a0 == 1.5);
    REQUIRE(cfg.potential.bumps.size() == 2);
    CHECK(cfg.potential.bumps[0].kind == kcheck::BumpKind::gaussian);
    CHECK(cfg.potential.bumps[0].center == std::vector<double>{0.5, 0.0, 0.0});
    CHECK(cfg.potential.bumps[1].kind == kcheck::BumpKind::ring);
    CHECK(cfg.potential.bumps[1].radius == 1.4);
    CHECK(cfg.jobs == 2);

    CHECK_THROWS_AS(RunConfig::from_string("problem.M = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_string("problem.N = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_string("problem.lambda = 9\n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_string("grid.n = -4\n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_string("potential.bumps = blob(amp=1)\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_string("potential.bumps = gaussian(amp=1,q=2)\n"),
                    std::invalid_argument);
}

TEST_CASE("field dump round trip") {
    namespace fs = std::filesystem;
    auto g = RadialGrid::make(32);
    auto f = GridFunction::sample(g, [](double r) { return 1.0 / (1.0 + r * r); }, 2.0);
    fs::path dir = fs::temp_directory_path() / "choquard-io-test";
    fs::create_directories(dir);
    auto p = (dir / "f.brfd").string();
    io::write_field(p, f);
    auto back = io::read_field(p, g);
    for (int i = 0; i < f.size(); ++i) CHECK(back.values[i] == f.values[i]);
    auto other = RadialGrid::make(33);
    CHECK_THROWS_AS(io::read_field(p, other), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("csv writer is deterministic") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "choquard-io-test2";
    fs::create_directories(dir);
    auto p = (dir / "scan.csv").string();
    io::write_csv(p, {"a", "b"}, {{1.0, 2.5}, {0.1, -3.75e-9}});
    std::ifstream in(p);
    std::string s1((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    io::write_csv(p, {"a", "b"}, {{1.0, 2.5}, {0.1, -3.75e-9}});
    std::ifstream in2(p);
    std::string s2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.substr(0, 4) == "a,b\n");
    fs::remove_all(dir);
}
