#include "choquard/bubble.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/special.hpp"

namespace choquard {

ProblemParams ProblemParams::make(int N, double lambda) {
    if (N < 3) throw std::invalid_argument("ProblemParams: N >= 3 required");
    if (!(lambda > 0.0) || !(lambda < N))
        throw std::invalid_argument("ProblemParams: lambda in (0, N) required");
    ProblemParams pp;
    pp.N = N;
    pp.lambda = lambda;
    pp.p = (2.0 * N - lambda) / (N - 2.0);
    const double piN2 = std::pow(M_PI, 0.5 * N);
    pp.alpha = N * (N - 2.0) * gamma_fn(N - 0.5 * lambda) /
               (piN2 * gamma_fn(0.5 * (N - lambda)));
    pp.A = piN2 * gamma_fn(0.5 * (N - lambda)) / gamma_fn(0.5 * (2.0 * N - lambda));
    pp.omega_N = 2.0 * piN2 / (N * gamma_fn(0.5 * N));
    pp.beyond_certified_lambda = lambda > std::min<double>(N, 4.0);
    return pp;
}

bool BubbleParams::centered() const {
    for (double c : xi)
        if (c != 0.0) return false;
    return true;
}

void BubbleParams::validate(int N) const {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::domain_error("BubbleParams: mu must be positive and finite");
    if (!xi.empty() && (int)xi.size() != N)
        throw std::invalid_argument("BubbleParams: xi must have length N (or be empty)");
    for (double c : xi)
        if (!std::isfinite(c)) throw std::domain_error("BubbleParams: xi must be finite");
}

void ModeIndex::validate(int N) const {
    if (j < 0 || j > N) throw std::out_of_range("ModeIndex: j in {0,...,N}");
}

namespace bubble {

namespace {

struct Local {
    std::vector<double> y;  // (x - xi)/mu
    double r2 = 0.0;        // |y|^2
    double jp2 = 0.0;       // 1 + |y|^2
    double jp = 1.0;        // <y>
};

Local to_local(const ProblemParams& pp, const BubbleParams& b, std::span<const double> x) {
    b.validate(pp.N);
    if ((int)x.size() != pp.N) throw std::invalid_argument("bubble: point must have length N");
    Local L;
    L.y.resize(pp.N);
    for (int c = 0; c < pp.N; ++c) {
        double xc = b.xi.empty() ? 0.0 : b.xi[c];
        L.y[c] = (x[c] - xc) / b.mu;
        L.r2 += L.y[c] * L.y[c];
    }
    L.jp2 = 1.0 + L.r2;
    L.jp = std::sqrt(L.jp2);
    return L;
}

// base profiles at (1,0) as functions of y
double U0(int N, const Local& L) { return std::pow(L.jp, 2.0 - N); }

double Z0_base(int N, const Local& L) {
    return 0.5 * (N - 2.0) * (L.r2 - 1.0) * std::pow(L.jp, -(double)N);
}

double Zj_base(int N, const Local& L, int j) {
    return (N - 2.0) * L.y[j - 1] * std::pow(L.jp, -(double)N);
}

double Zm(int N, const Local& L, int m) {
    return m == 0 ? Z0_base(N, L) : Zj_base(N, L, m);
}

double Hm(int N, const Local& L, int m) { return Zm(N, L, m) * std::pow(L.jp, -4.0); }

// gradient of H_m at (1,0); H_0 = (N-2)/2 (|y|^2-1)<y>^{-(N+4)},
// H_j = (N-2) y_j <y>^{-(N+4)}
void grad_Hm(int N, const Local& L, int m, std::vector<double>& g) {
    g.assign(N, 0.0);
    double a = std::pow(L.jp, -(double)(N + 4));
    double b = std::pow(L.jp, -(double)(N + 6));
    if (m == 0) {
        for (int c = 0; c < N; ++c)
            g[c] = 0.5 * (N - 2.0) * (2.0 * L.y[c] * a - (N + 4.0) * (L.r2 - 1.0) * L.y[c] * b);
    } else {
        for (int c = 0; c < N; ++c) {
            g[c] = -(N - 2.0) * (N + 4.0) * L.y[m - 1] * L.y[c] * b;
            if (c == m - 1) g[c] += (N - 2.0) * a;
        }
    }
}

// Zbar_{m,j} at (1,0). The m,j >= 1 entry is the derivative of the definition;
// it is FD-verified in the test-suite.
double Zbar_base(int N, const Local& L, int m, int j) {
    double jpN = std::pow(L.jp, -(double)N);
    double jpN2 = std::pow(L.jp, -(double)(N + 2));
    if (m == 0 && j == 0)
        return 0.25 * N * (N - 2.0) * (L.r2 - 1.0) * (L.r2 - 1.0) * jpN2 -
               0.5 * (N - 2.0) * std::pow(L.jp, 2.0 - N);
    if (m == 0)
        return 0.5 * N * (N - 2.0) * (L.r2 - 1.0) * L.y[j - 1] * jpN2 -
               (N - 2.0) * L.y[j - 1] * jpN;
    if (j == 0)
        return 0.5 * N * (N - 2.0) * (L.r2 - 1.0) * L.y[m - 1] * jpN2;
    double v = N * (N - 2.0) * L.y[m - 1] * L.y[j - 1] * jpN2;
    if (m == j) v -= (N - 2.0) * jpN;
    return v;
}

double Htilde_base(int N, const Local& L, int m, int j) {
    std::vector<double> g;
    grad_Hm(N, L, m, g);
    if (j == 0) {
        double ydotg = 0.0;
        for (int c = 0; c < N; ++c) ydotg += L.y[c] * g[c];
        return -0.5 * (N + 2.0) * Hm(N, L, m) - ydotg;
    }
    return -g[j - 1];
}

void check_mode(const ProblemParams& pp, int m) { ModeIndex{m}.validate(pp.N); }

}  // namespace

double value(const ProblemParams& pp, const BubbleParams& b, std::span<const double> x) {
    Local L = to_local(pp, b, x);
    return std::pow(b.mu, -0.5 * (pp.N - 2)) * U0(pp.N, L);
}

double value_radial(const ProblemParams& pp, double mu, double r) {
    if (!(mu > 0.0)) throw std::domain_error("bubble: mu > 0 required");
    return std::pow(mu, -0.5 * (pp.N - 2)) * std::pow(jp(r / mu), 2.0 - pp.N);
}

double z_mode(const ProblemParams& pp, int j, const BubbleParams& b, std::span<const double> x) {
    check_mode(pp, j);
    Local L = to_local(pp, b, x);
    return std::pow(b.mu, -0.5 * (pp.N - 2)) * Zm(pp.N, L, j);
}

double z0_radial(const ProblemParams& pp, double mu, double r) {
    double s = r / mu;
    return std::pow(mu, -0.5 * (pp.N - 2)) * 0.5 * (pp.N - 2.0) * (s * s - 1.0) *
           std::pow(jp(s), -(double)pp.N);
}

double h_mode(const ProblemParams& pp, int m, const BubbleParams& b, std::span<const double> x) {
    check_mode(pp, m);
    Local L = to_local(pp, b, x);
    return std::pow(b.mu, -0.5 * (pp.N + 2)) * Hm(pp.N, L, m);
}

double h0_radial(const ProblemParams& pp, double mu, double r) {
    double s = r / mu;
    return std::pow(mu, -0.5 * (pp.N + 2)) * 0.5 * (pp.N - 2.0) * (s * s - 1.0) *
           std::pow(jp(s), -(double)(pp.N + 4));
}

double zbar_mode(const ProblemParams& pp, int m, int j, const BubbleParams& b,
                 std::span<const double> x) {
    check_mode(pp, m);
    check_mode(pp, j);
    Local L = to_local(pp, b, x);
    return std::pow(b.mu, -0.5 * (pp.N - 2)) * Zbar_base(pp.N, L, m, j);
}

double zbar00_radial(const ProblemParams& pp, double mu, double r) {
    double s = r / mu;
    Local L;
    L.y.assign(pp.N, 0.0);
    L.y[0] = s;
    L.r2 = s * s;
    L.jp2 = 1 + L.r2;
    L.jp = std::sqrt(L.jp2);
    return std::pow(mu, -0.5 * (pp.N - 2)) * Zbar_base(pp.N, L, 0, 0);
}

double htilde_mode(const ProblemParams& pp, int m, int j, const BubbleParams& b,
                   std::span<const double> x) {
    check_mode(pp, m);
    check_mode(pp, j);
    Local L = to_local(pp, b, x);
    return std::pow(b.mu, -0.5 * (pp.N + 2)) * Htilde_base(pp.N, L, m, j);
}

double htilde00_radial(const ProblemParams& pp, double mu, double r) {
    double s = r / mu;
    Local L;
    L.y.assign(pp.N, 0.0);
    L.y[0] = s;
    L.r2 = s * s;
    L.jp2 = 1 + L.r2;
    L.jp = std::sqrt(L.jp2);
    return std::pow(mu, -0.5 * (pp.N + 2)) * Htilde_base(pp.N, L, 0, 0);
}

double riesz_closed_form(const ProblemParams& pp, const BubbleParams& b,
                         std::span<const double> x) {
    return pp.A * std::pow(value(pp, b, x), pp.lambda / (pp.N - 2.0));
}

double riesz_closed_radial(const ProblemParams& pp, double mu, double r) {
    return pp.A * std::pow(value_radial(pp, mu, r), pp.lambda / (pp.N - 2.0));
}

double mode_pairing(const ProblemParams& pp, int j) {
    check_mode(pp, j);
    // 1-D Beta-type integral; n = 200 resolves it far past 1e-12
    static thread_local Quadrature1D q = gauss_legendre(200);
    const int N = pp.N;
    double acc = 0.0;
    for (int i = 0; i < 200; ++i) {
        double t = 0.5 * (q.nodes[i] + 1.0);
        double w = 0.5 * q.weights[i];
        double r = t / (1.0 - t);
        double jac = 1.0 / ((1.0 - t) * (1.0 - t));
        double core = std::pow(jp(r), -(double)(2 * N + 4)) * std::pow(r, N - 1.0);
        double shape = (j == 0) ? 0.25 * (r * r - 1.0) * (r * r - 1.0) : (r * r) / N;
        acc += w * jac * core * shape;
    }
    return (N - 2.0) * (N - 2.0) * pp.sphere_area() * acc;
}

double laplacian_z(const ProblemParams& pp, int j, const BubbleParams& b,
                   std::span<const double> x) {
    return -pp.N * (pp.N + 2.0) * h_mode(pp, j, b, x);
}

double neg_laplacian_u(const ProblemParams& pp, const BubbleParams& b,
                       std::span<const double> x) {
    return pp.N * (pp.N - 2.0) * std::pow(value(pp, b, x), pp.crit_exp());
}

double neg_laplacian_u_radial(const ProblemParams& pp, double mu, double r) {
    return pp.N * (pp.N - 2.0) * std::pow(value_radial(pp, mu, r), pp.crit_exp());
}

double expansion_error(const ProblemParams& pp, const BubbleParams& b0,
                       const BubbleParams& b, ExpandField which, int index) {
    b0.validate(pp.N);
    b.validate(pp.N);
    const double dmu = (b.mu - b0.mu) / b0.mu;
    std::vector<double> dxi(pp.N, 0.0);
    for (int c = 0; c < pp.N; ++c) {
        double a = b.xi.empty() ? 0.0 : b.xi[c];
        double a0 = b0.xi.empty() ? 0.0 : b0.xi[c];
        dxi[c] = (a - a0) / b0.mu;
    }
    // fixed probe set: shells x directions spanning every coordinate
    static const double shells[] = {0.0, 0.31, 0.72, 1.0, 1.47, 2.6, 5.3, 11.0};
    std::vector<std::vector<double>> dirs;
    for (int c = 0; c < pp.N; ++c) {
        std::vector<double> e(pp.N, 0.0);
        e[c] = 1.0;
        dirs.push_back(e);
        e[c] = -1.0;
        dirs.push_back(std::move(e));
    }
    dirs.emplace_back(pp.N, 1.0 / std::sqrt((double)pp.N));
    double worst = 0.0;
    std::vector<double> x(pp.N, 0.0);
    for (double s : shells) {
        for (const auto& d : dirs) {
            for (int c = 0; c < pp.N; ++c) {
                double a0 = b0.xi.empty() ? 0.0 : b0.xi[c];
                x[c] = a0 + s * b0.mu * d[c];
            }
            double lhs, base, weight;
            if (which == ExpandField::U) {
                lhs = value(pp, b, x);
                base = value(pp, b0, x) + z_mode(pp, 0, b0, x) * dmu;
                for (int c = 0; c < pp.N; ++c)
                    base += z_mode(pp, c + 1, b0, x) * dxi[c];
                weight = value(pp, b0, x);
            } else if (which == ExpandField::Z) {
                lhs = z_mode(pp, index, b, x);
                base = z_mode(pp, index, b0, x) + zbar_mode(pp, index, 0, b0, x) * dmu;
                for (int c = 0; c < pp.N; ++c)
                    base += zbar_mode(pp, index, c + 1, b0, x) * dxi[c];
                weight = value(pp, b0, x);
            } else {
                lhs = h_mode(pp, index, b, x);
                base = h_mode(pp, index, b0, x) + htilde_mode(pp, index, 0, b0, x) * dmu;
                for (int c = 0; c < pp.N; ++c)
                    base += htilde_mode(pp, index, c + 1, b0, x) * dxi[c];
                weight = std::pow(value(pp, b0, x), pp.crit_exp());
            }
            double e = std::fabs(lhs - base) / weight;
            if (e > worst) worst = e;
        }
    }
    return worst;
}

}  // namespace bubble
}  // namespace choquard
