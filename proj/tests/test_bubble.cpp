#include <doctest.h>

#include <cmath>
#include <vector>

#include "choquard/bubble.hpp"
#include "choquard/grid.hpp"
#include "oracles.hpp"

using namespace choquard;
namespace bb = choquard::bubble;

namespace {

const ProblemParams pp3 = ProblemParams::make(3, 1.0);

std::vector<double> pt3(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

}  // namespace

TEST_CASE("problem constants: alpha * A = N(N-2) for all certified pairs") {
    for (auto [N, lam] : std::vector<std::pair<int, double>>{
             {3, 1.0}, {3, 2.0}, {4, 2.0}, {5, 3.0}, {5, 4.0}}) {
        auto pp = ProblemParams::make(N, lam);
        CHECK(std::fabs(pp.alpha * pp.A / (N * (N - 2.0)) - 1.0) <= 1e-12);
        CHECK(pp.p == doctest::Approx((2.0 * N - lam) / (N - 2.0)).epsilon(1e-15));
    }
    CHECK(ProblemParams::make(5, 4.5).beyond_certified_lambda);
    CHECK_FALSE(ProblemParams::make(5, 4.0).beyond_certified_lambda);
}

TEST_CASE("certified-lambda flag uses lambda > min(N,4)") {
    CHECK_FALSE(ProblemParams::make(3, 2.5).beyond_certified_lambda);
    CHECK(ProblemParams::make(6, 4.7).beyond_certified_lambda);
    CHECK_THROWS_AS(ProblemParams::make(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams::make(3, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams::make(3, 0.0), std::invalid_argument);
}

TEST_CASE("bubble values") {
    CHECK(bb::value(pp3, BubbleParams::origin(1.0), pt3(0)) == doctest::Approx(1.0));
    CHECK(bb::value(pp3, BubbleParams::origin(4.0), pt3(0)) == doctest::Approx(0.5));
    CHECK(bb::value(pp3, BubbleParams::origin(1.0), pt3(1)) ==
          doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(bb::value(pp3, BubbleParams{-1.0, {}}, pt3(0)), std::domain_error);
    // positivity and bound by mu^{-(N-2)/2}
    oracles::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        double mu = rng.uniform(0.3, 3.0);
        std::vector<double> x = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        double v = bb::value(pp3, BubbleParams{mu, {0.3, -0.2, 0.0}}, x);
        CHECK(v > 0.0);
        CHECK(v <= std::pow(mu, -0.5) * (1.0 + 1e-15));
    }
}

TEST_CASE("z modes: values and FD consistency") {
    CHECK(bb::z_mode(pp3, 0, BubbleParams::origin(), pt3(0)) == doctest::Approx(-0.5));
    CHECK(bb::z_mode(pp3, 1, BubbleParams::origin(), pt3(0)) == doctest::Approx(0.0));
    CHECK(bb::z_mode(pp3, 0, BubbleParams::origin(), pt3(1)) == doctest::Approx(0.0));

    // Z_j = d/d(mu,xi_j) U at 100 random points, h = 1e-4, tol 1e-6
    oracles::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        double h = 1e-4;
        double fd_mu = (bb::value(pp3, BubbleParams::origin(1 + h), x) -
                        bb::value(pp3, BubbleParams::origin(1 - h), x)) /
                       (2 * h);
        CHECK(std::fabs(fd_mu - bb::z_mode(pp3, 0, BubbleParams::origin(), x)) <= 1e-6);
        int j = 1 + (i % 3);
        BubbleParams bp{1.0, {0, 0, 0}}, bm{1.0, {0, 0, 0}};
        bp.xi[j - 1] = h;
        bm.xi[j - 1] = -h;
        double fd_xi = (bb::value(pp3, bp, x) - bb::value(pp3, bm, x)) / (2 * h);
        CHECK(std::fabs(fd_xi - bb::z_mode(pp3, j, BubbleParams::origin(), x)) <= 1e-6);
    }
}

TEST_CASE("h modes") {
    CHECK(bb::h_mode(pp3, 0, BubbleParams::origin(), pt3(0)) == doctest::Approx(-0.5));
    CHECK(bb::h_mode(pp3, 2, BubbleParams::origin(), pt3(0)) == doctest::Approx(0.0));
    CHECK(bb::h_mode(pp3, 0, BubbleParams::origin(), pt3(1)) == doctest::Approx(0.0));
    // H = U^{4/(N-2)} Z pointwise
    oracles::Rng rng(13);
    for (int i = 0; i < 40; ++i) {
        std::vector<double> x = {rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
        for (int m = 0; m <= 3; ++m) {
            double u = bb::value(pp3, BubbleParams::origin(), x);
            CHECK(bb::h_mode(pp3, m, BubbleParams::origin(), x) ==
                  doctest::Approx(std::pow(u, 4.0) * bb::z_mode(pp3, m, BubbleParams::origin(), x))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("zbar: closed forms against FD of scaled Z") {
    // value at the origin: the closed form gives (3/4) - (1/2) = 1/4 for N = 3
    CHECK(bb::zbar_mode(pp3, 0, 0, BubbleParams::origin(), pt3(0)) == doctest::Approx(0.25));
    CHECK(bb::zbar_mode(pp3, 1, 2, BubbleParams::origin(), pt3(0)) == doctest::Approx(0.0));
    CHECK(bb::zbar_mode(pp3, 2, 1, BubbleParams::origin(), pt3(0.3, 0.4, -0.1)) ==
          doctest::Approx(bb::zbar_mode(pp3, 1, 2, BubbleParams::origin(), pt3(0.3, 0.4, -0.1)))
              .epsilon(1e-12));

    oracles::Rng rng(17);
    const double h = 1e-5;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        int m = i % 4, j = (i / 4) % 4;
        double fd;
        if (j == 0) {
            fd = (bb::z_mode(pp3, m, BubbleParams::origin(1 + h), x) -
                  bb::z_mode(pp3, m, BubbleParams::origin(1 - h), x)) /
                 (2 * h);
        } else {
            BubbleParams bp{1.0, {0, 0, 0}}, bm{1.0, {0, 0, 0}};
            bp.xi[j - 1] = h;
            bm.xi[j - 1] = -h;
            fd = (bb::z_mode(pp3, m, bp, x) - bb::z_mode(pp3, m, bm, x)) / (2 * h);
        }
        CHECK(std::fabs(fd - bb::zbar_mode(pp3, m, j, BubbleParams::origin(), x)) <= 1e-7);
    }
}

TEST_CASE("htilde: analytic gradients against FD of scaled H, tol 1e-6") {
    oracles::Rng rng(19);
    const double h = 1e-4;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        int m = i % 4, j = (i / 4) % 4;
        double fd;
        if (j == 0) {
            fd = (bb::h_mode(pp3, m, BubbleParams::origin(1 + h), x) -
                  bb::h_mode(pp3, m, BubbleParams::origin(1 - h), x)) /
                 (2 * h);
        } else {
            BubbleParams bp{1.0, {0, 0, 0}}, bm{1.0, {0, 0, 0}};
            bp.xi[j - 1] = h;
            bm.xi[j - 1] = -h;
            fd = (bb::h_mode(pp3, m, bp, x) - bb::h_mode(pp3, m, bm, x)) / (2 * h);
        }
        CHECK(std::fabs(fd - bb::htilde_mode(pp3, m, j, BubbleParams::origin(), x)) <= 1e-6);
    }
}

TEST_CASE("riesz closed form values") {
    CHECK(bb::riesz_closed_form(pp3, BubbleParams::origin(), pt3(0)) ==
          doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
    auto pp32 = ProblemParams::make(3, 2.0);
    CHECK(bb::riesz_closed_form(pp32, BubbleParams::origin(), pt3(0)) ==
          doctest::Approx(M_PI * M_PI).epsilon(1e-13));
    oracles::Rng rng(23);
    for (int i = 0; i < 30; ++i) {
        std::vector<double> x = {rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
        BubbleParams b{rng.uniform(0.5, 2.0), {0.1, -0.7, 0.2}};
        CHECK(bb::riesz_closed_form(pp3, b, x) ==
              doctest::Approx(pp3.A * std::pow(bb::value(pp3, b, x), pp3.lambda / (pp3.N - 2.0)))
                  .epsilon(1e-14));
    }
}

TEST_CASE("mode pairings against the Beta oracle") {
    // N=3: both pairings equal pi^2/64
    CHECK(std::fabs(bb::mode_pairing(pp3, 0) / (M_PI * M_PI / 64.0) - 1.0) <= 1e-12);
    CHECK(std::fabs(bb::mode_pairing(pp3, 1) / (M_PI * M_PI / 64.0) - 1.0) <= 1e-12);
    // general N via the Beta oracle
    for (int N : {4, 5}) {
        auto pp = ProblemParams::make(N, 2.0);
        double i0 = oracles::radial_power_integral(N + 3.0, N + 2.0) -
                    2.0 * oracles::radial_power_integral(N + 1.0, N + 2.0) +
                    oracles::radial_power_integral(N - 1.0, N + 2.0);
        double t0 = 0.25 * (N - 2.0) * (N - 2.0) * pp.sphere_area() * i0;
        CHECK(std::fabs(bb::mode_pairing(pp, 0) / t0 - 1.0) <= 1e-12);
        double i1 = oracles::radial_power_integral(N + 1.0, N + 2.0);
        double t1 = (N - 2.0) * (N - 2.0) / N * pp.sphere_area() * i1;
        CHECK(std::fabs(bb::mode_pairing(pp, 1) / t1 - 1.0) <= 1e-12);
    }
}

TEST_CASE("mode orthogonality under full quadrature") {
    auto g = RadialGrid::make(64);
    auto s = std::make_shared<SphereRule>(SphereRule::make(3, 9));
    double ref = bb::mode_pairing(pp3, 0);
    for (int j = 0; j <= 3; ++j) {
        for (int m = 0; m <= 3; ++m) {
            auto f = FullGridFunction::sample(
                g, s,
                [&](const std::vector<double>& x) {
                    return bb::z_mode(pp3, j, BubbleParams::origin(), x) *
                           bb::h_mode(pp3, m, BubbleParams::origin(), x);
                },
                2.0 * pp3.N);
            double v = integrate_full(pp3, f);
            if (j == m) {
                CHECK(std::fabs(v / bb::mode_pairing(pp3, j) - 1.0) <= 1e-9);
            } else {
                CHECK(std::fabs(v) <= 1e-10 * ref);
            }
        }
    }
}

TEST_CASE("laplacian of Z against FD, and H2Z pin values") {
    CHECK(bb::laplacian_z(pp3, 0, BubbleParams::origin(), pt3(0)) == doctest::Approx(7.5));
    CHECK(bb::laplacian_z(pp3, 1, BubbleParams::origin(), pt3(0)) == doctest::Approx(0.0));
    oracles::Rng rng(29);
    for (int i = 0; i < 25; ++i) {
        std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        int j = i % 4;
        double lap_fd = oracles::fd_laplacian(
            [&](const std::vector<double>& y) {
                return bb::z_mode(pp3, j, BubbleParams::origin(), y);
            },
            x, 1e-3);
        CHECK(std::fabs(lap_fd - bb::laplacian_z(pp3, j, BubbleParams::origin(), x)) <= 1e-5);
    }
}

TEST_CASE("tHbZ identity: int Htilde_{m,j} Z_m = - int H_m Zbar_{m,j}") {
    auto g = RadialGrid::make(96);
    auto s = std::make_shared<SphereRule>(SphereRule::make(3, 21));
    for (const BubbleParams& b :
         {BubbleParams::origin(1.0), BubbleParams{1.4, {0.3, -0.2, 0.1}}}) {
        for (int m = 0; m <= 3; ++m) {
            for (int j = 0; j <= 3; ++j) {
                auto lhsf = FullGridFunction::sample(
                    g, s,
                    [&](const std::vector<double>& x) {
                        return bb::htilde_mode(pp3, m, j, b, x) * bb::z_mode(pp3, m, b, x);
                    },
                    2.0 * pp3.N);
                auto rhsf = FullGridFunction::sample(
                    g, s,
                    [&](const std::vector<double>& x) {
                        return bb::h_mode(pp3, m, b, x) * bb::zbar_mode(pp3, m, j, b, x);
                    },
                    2.0 * pp3.N);
                double lhs = integrate_full(pp3, lhsf), rhs = -integrate_full(pp3, rhsf);
                double scale = std::max({std::fabs(lhs), std::fabs(rhs),
                                         bb::mode_pairing(pp3, 0)});
                CHECK(std::fabs(lhs - rhs) <= 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("expansion error: zero at base point, slope 2 order fit") {
    BubbleParams b0 = BubbleParams::origin(1.0);
    CHECK(bb::expansion_error(pp3, b0, b0, bb::ExpandField::U, 0) == doctest::Approx(0.0));
    std::vector<double> deltas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    for (auto which : {bb::ExpandField::U, bb::ExpandField::Z, bb::ExpandField::H}) {
        for (int idx : {0, 1}) {
            std::vector<double> errs;
            for (double d : deltas) {
                BubbleParams b{1.0 + d, {0.6 * d, -0.4 * d, 0.0}};
                errs.push_back(bb::expansion_error(pp3, b0, b, which, idx));
            }
            double slope = oracles::loglog_slope(deltas, errs);
            CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
            if (which == bb::ExpandField::U) break;  // U has no mode index
        }
    }
}

TEST_CASE("scalar Taylor residual slopes") {
    // (1+a)^theta - 1 - theta a = O(a^2)
    std::vector<double> as = {1e-1, 3e-2, 1e-2, 3e-3};
    for (double theta : {2.5, -0.5, 5.0}) {
        std::vector<double> errs;
        for (double a : as)
            errs.push_back(std::fabs(std::pow(1.0 + a, theta) - 1.0 - theta * a));
        CHECK(oracles::loglog_slope(as, errs) == doctest::Approx(2.0).epsilon(0.03));
    }
}
