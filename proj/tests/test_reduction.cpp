#include <doctest.h>

#include <cmath>

#include "choquard/bubble.hpp"
#include "choquard/reduction.hpp"
#include "oracles.hpp"

using namespace choquard;
namespace rd = choquard::reduction;
namespace nl = choquard::nonlinear;
namespace lo = choquard::linop;
namespace kc = choquard::kcheck;

namespace {

const ProblemParams pp3 = ProblemParams::make(3, 1.0);

const lo::RadialContext& ctx256() {
    static auto ctx = lo::RadialContext::make(pp3, 256, 1.0, "", 2);
    return ctx;
}

kc::PotentialSpec ring_bump() {
    kc::PotentialSpec s;
    s.N = 3;
    s.a0 = 1.0;
    s.bumps.push_back({kc::BumpKind::ring, 0.5, {}, 1.0, 0.0, 1.3});
    return s;
}

kc::PotentialSpec flat_k(double c = 1.0) {
    kc::PotentialSpec s;
    s.N = 3;
    s.a0 = c;
    return s;
}

const rd::Upsilon& ups_ring() {
    static rd::Upsilon u(pp3, ring_bump());
    return u;
}

}  // namespace

TEST_CASE("jbar0 equals 3 pi^2 / 10 for (N, lambda) = (3, 1)") {
    CHECK(std::fabs(rd::jbar0(ctx256()) / (0.3 * M_PI * M_PI) - 1.0) <= 1e-8);
}

TEST_CASE("energy: scaling invariance of J_0 and the zero field") {
    for (double mu : {0.5, 1.0, 2.0}) {
        lo::ProjectedSystem S(ctx256(), BubbleParams::origin(mu));
        auto sol = nl::contraction_solve(S, 0.0, ring_bump());
        double j = rd::energy(S, sol, ring_bump());
        CHECK(std::fabs(j / rd::jbar0(ctx256()) - 1.0) <= 1e-8);
    }
}

TEST_CASE("upsilon: constants, symmetry, gradient oracle") {
    // k constant: Upsilon is mu-independent, gradient vanishes
    rd::Upsilon uc(pp3, flat_k(2.0));
    double base = uc.value_mu(1.0);
    CHECK(std::fabs(uc.value_mu(0.7) / base - 1.0) <= 1e-12);
    CHECK(std::fabs(uc.value_mu(1.9) / base - 1.0) <= 1e-12);
    CHECK(std::fabs(uc.dmu(1.0)) <= 1e-12 * std::fabs(base));
    // the constant-k value is c (N-2)/(2N) int U^{2N/(N-2)} = c (N-2)/(2N) pi^2/4
    CHECK(base == doctest::Approx(2.0 * (1.0 / 6.0) * M_PI * M_PI / 4.0).epsilon(1e-10));

    // gradient against FD of the value, radial and full paths
    const auto& ur = ups_ring();
    for (double mu : {0.8, 1.2, 1.9}) {
        double fd = (ur.value_mu(mu + 1e-5) - ur.value_mu(mu - 1e-5)) / 2e-5;
        CHECK(std::fabs(ur.dmu(mu) - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
    }
    // full-path gradient vs FD at an off-center point with an off-center k
    kc::PotentialSpec two;
    two.N = 3;
    two.a0 = 1.0;
    two.bumps.push_back({kc::BumpKind::gaussian, 0.8, {1.1, 0.0, 0.0}, 1.0, 0.0, 0.0});
    two.bumps.push_back({kc::BumpKind::gaussian, 0.8, {-1.1, 0.0, 0.0}, 1.0, 0.0, 0.0});
    rd::Upsilon u2(pp3, two);
    BubbleParams b{1.1, {0.2, -0.1, 0.3}};
    auto g = u2.grad(b);
    for (int q = 0; q <= 3; ++q) {
        BubbleParams bp = b, bm = b;
        double h = 1e-5;
        if (q == 0) { bp.mu += h; bm.mu -= h; }
        else { bp.xi[q - 1] += h; bm.xi[q - 1] -= h; }
        double fd = (u2.value(bp) - u2.value(bm)) / (2.0 * h);
        CHECK(std::fabs(g[q] - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
    }
    // radial k at xi = 0: the xi-gradient vanishes by symmetry
    auto gr = ups_ring().grad(BubbleParams::origin(1.2));
    for (int c = 1; c <= 3; ++c) CHECK(std::fabs(gr[c]) <= 1e-12);
}

TEST_CASE("radial critical point of the ring-bump Upsilon") {
    rd::Box box{0.5, 2.5, 0.0};
    auto zeros = rd::find_critical_points(ups_ring(), box);
    REQUIRE(zeros.size() >= 1);
    bool found = false;
    for (const auto& z : zeros) {
        CHECK(std::fabs(z.grad[0]) <= 1e-10);
        if (z.classification != "degenerate") found = true;
    }
    CHECK(found);
    // 1-D sign-change oracle: the scan of dmu flips sign inside the box
    int flips = 0;
    double prev = ups_ring().dmu(box.mu_min);
    for (int s = 1; s <= 100; ++s) {
        double mu = box.mu_min + (box.mu_max - box.mu_min) * s / 100.0;
        double d = ups_ring().dmu(mu);
        if (prev * d < 0) ++flips;
        prev = d;
    }
    CHECK((int)zeros.size() == flips);
}

TEST_CASE("degree: ring bump is +-1, flat k errors out, enlargement invariance") {
    rd::Box box{0.5, 2.5, 0.0};
    auto zeros = rd::find_critical_points(ups_ring(), box);
    auto deg = rd::degree(ups_ring(), box, zeros);
    CHECK(std::abs(deg.degree) == 1);
    CHECK(deg.boundary_infimum > 0.0);
    // the degree matches the curvature sign at the unique zero
    CHECK(deg.degree == zeros[0].index);

    // enlargement leaves it unchanged
    rd::Box big{0.35, 3.4, 0.0};
    auto zeros2 = rd::find_critical_points(ups_ring(), big);
    auto deg2 = rd::degree(ups_ring(), big, zeros2);
    CHECK(deg2.degree == deg.degree);

    // constant k: no isolated zeros, degree undefined
    rd::Upsilon uc(pp3, flat_k());
    auto zc = rd::find_critical_points(uc, box);
    CHECK(zc.empty());
    CHECK_THROWS_AS(rd::degree(uc, box, zc), std::runtime_error);
}

TEST_CASE("reduced energy expansion: j_eps = jbar0 - eps Upsilon + O(eps^2)") {
    auto zeros = rd::find_critical_points(ups_ring(), rd::Box{0.5, 2.5, 0.0});
    REQUIRE(!zeros.empty());
    const double mu0 = 1.1;  // probe away from the critical point too
    std::vector<double> eps_list = {1e-3, 2e-3, 4e-3, 8e-3}, errs, derrs;
    double j0 = rd::jbar0(ctx256());
    for (double eps : eps_list) {
        auto rp = rd::reduced_energy(ctx256(), ups_ring(), BubbleParams::origin(mu0), eps);
        errs.push_back(std::fabs(rp.j_eps - j0 + eps * ups_ring().value_mu(mu0)));
        // derivative expansion via FD of j_eps in mu
        const double h = 2e-3;
        auto rp_p = rd::reduced_energy(ctx256(), ups_ring(), BubbleParams::origin(mu0 + h), eps);
        auto rp_m = rd::reduced_energy(ctx256(), ups_ring(), BubbleParams::origin(mu0 - h), eps);
        double dj = (rp_p.j_eps - rp_m.j_eps) / (2.0 * h);
        derrs.push_back(std::fabs(dj + eps * ups_ring().dmu(mu0)));
    }
    CHECK(oracles::loglog_slope(eps_list, errs) == doctest::Approx(2.0).epsilon(0.075));
    CHECK(oracles::loglog_slope(eps_list, derrs) == doctest::Approx(2.0).epsilon(0.1));

    // eps = 0 reproduces jbar0 exactly (phi = 0)
    auto rp0 = rd::reduced_energy(ctx256(), ups_ring(), BubbleParams::origin(mu0), 0.0);
    CHECK(std::fabs(rp0.j_eps - j0) <= 1e-12 * std::fabs(j0));
}

TEST_CASE("solve_full: solution pipeline at one eps") {
    auto zeros = rd::find_critical_points(ups_ring(), rd::Box{0.5, 2.5, 0.0});
    REQUIRE(!zeros.empty());
    double mu_star = zeros[0].b.mu;
    auto res = rd::solve_full(ctx256(), ups_ring(), 5e-3, mu_star);
    CHECK(res.c_norm <= 1e-10);
    CHECK(res.residual_y <= 1e-5);
    CHECK(res.sol.omega_min_ratio > 0.0);
    CHECK(res.phi_over_u <= 0.05);
    CHECK(res.grad_j_fd <= 1e-8);
    CHECK(std::fabs(res.b.mu - mu_star) <= 0.2);
}

TEST_CASE("solve_full: eps sweep rates") {
    auto zeros = rd::find_critical_points(ups_ring(), rd::Box{0.5, 2.5, 0.0});
    REQUIRE(!zeros.empty());
    double mu_star = zeros[0].b.mu;
    std::vector<double> eps_list = {1e-3, 2e-3, 4e-3, 8e-3}, mu_errs, phi_ratios;
    for (double eps : eps_list) {
        auto res = rd::solve_full(ctx256(), ups_ring(), eps, mu_star);
        mu_errs.push_back(std::fabs(res.b.mu - mu_star));
        phi_ratios.push_back(res.phi_over_u);
    }
    CHECK(oracles::loglog_slope(eps_list, mu_errs) >= 0.8);
    double slope_phi = oracles::loglog_slope(eps_list, phi_ratios);
    CHECK(slope_phi == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("two-bump potential: full-mode critical points and degree") {
    kc::PotentialSpec two;
    two.N = 3;
    two.a0 = 1.0;
    two.bumps.push_back({kc::BumpKind::gaussian, 1.0, {1.5, 0.0, 0.0}, 1.0, 0.0, 0.0});
    two.bumps.push_back({kc::BumpKind::gaussian, 1.0, {-1.5, 0.0, 0.0}, 1.0, 0.0, 0.0});
    rd::Upsilon u2(pp3, two, 64, 9);
    rd::Box box{0.4, 3.0, 2.5};
    auto zeros = rd::find_critical_points(u2, box, 16, 99);
    // the mirror-symmetric pair of bumps carries exactly one self-symmetric
    // zero: the dilation mode pins it to the k-saddle on the axis
    REQUIRE(zeros.size() == 1);
    CHECK(zeros[0].b.mu == doctest::Approx(0.5256).epsilon(0.02));
    CHECK(zeros[0].classification == "saddle");
    // the zero set is invariant under the k-mirror
    for (const auto& z : zeros) {
        BubbleParams mirror = z.b;
        for (auto& c : mirror.xi) c = -c;
        auto g = u2.grad(mirror);
        double gn = 0.0;
        for (double v : g) gn = std::max(gn, std::fabs(v));
        CHECK(gn <= 1e-8);
        for (std::size_t c = 0; c < z.b.xi.size(); ++c)
            CHECK(std::fabs(z.b.xi[c]) <= 1e-6);
    }
    auto deg = rd::degree(u2, box, zeros);
    CHECK(deg.boundary_infimum > 0.0);
    CHECK(std::abs(deg.degree) == 1);
}

TEST_CASE("solve_full: converged point is seed independent within the basin") {
    auto zeros = rd::find_critical_points(ups_ring(), rd::Box{0.5, 2.5, 0.0});
    REQUIRE(!zeros.empty());
    double mu_star = zeros[0].b.mu;
    auto a = rd::solve_full(ctx256(), ups_ring(), 5e-3, mu_star - 0.12);
    auto b = rd::solve_full(ctx256(), ups_ring(), 5e-3, mu_star + 0.12);
    CHECK(std::fabs(a.b.mu - b.b.mu) <= 1e-8);
}
