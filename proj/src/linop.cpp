#include "choquard/linop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "choquard/bubble.hpp"

namespace choquard::linop {

RadialContext RadialContext::make(const ProblemParams& pp, int n, double scale,
                                  const std::string& cache_dir, int jobs) {
    RadialContext ctx;
    ctx.pp = pp;
    ctx.grid = RadialGrid::make(n, scale);
    auto klam = std::make_shared<riesz::RadialKernel>(
        riesz::RadialKernel::load_or_assemble(pp, pp.lambda, ctx.grid, cache_dir, jobs));
    ctx.k_lambda = klam;
    if (pp.lambda == pp.N - 2.0) {
        ctx.k_newton = klam;
    } else {
        ctx.k_newton = std::make_shared<riesz::RadialKernel>(
            riesz::RadialKernel::load_or_assemble(pp, pp.N - 2.0, ctx.grid, cache_dir, jobs));
    }
    return ctx;
}

std::vector<double> RadialContext::int_weights() const {
    const int n = grid->size();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = pp.sphere_area() * grid->weights()[i] * std::pow(grid->r()[i], pp.N - 1.0);
    return w;
}

double RadialContext::integrate(const std::vector<double>& f) const {
    auto w = int_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i];
    return acc;
}

namespace {

std::vector<double> newton_apply(const RadialContext& ctx, const std::vector<double>& f) {
    auto out = ctx.k_newton->apply(f);
    const double c = 1.0 / ctx.pp.newton_normalizer();
    for (double& v : out) v *= c;
    return out;
}

}  // namespace

ProjectedSystem::ProjectedSystem(RadialContext ctx, const BubbleParams& b)
    : ctx_(std::move(ctx)), b_(b) {
    b_.validate(ctx_.pp.N);
    if (!b_.centered())
        throw std::invalid_argument("ProjectedSystem: the radial sector requires xi = 0");
    const ProblemParams& pp = ctx_.pp;
    const int n = ctx_.grid->size();
    const auto& r = ctx_.grid->r();
    U_.resize(n);
    Up1_.resize(n);
    IlamUp_.resize(n);
    Z0_.resize(n);
    H0_.resize(n);
    for (int i = 0; i < n; ++i) {
        U_[i] = bubble::value_radial(pp, b_.mu, r[i]);
        Up1_[i] = std::pow(U_[i], pp.p - 1.0);
        IlamUp_[i] = bubble::riesz_closed_radial(pp, b_.mu, r[i]);
        Z0_[i] = bubble::z0_radial(pp, b_.mu, r[i]);
        H0_[i] = bubble::h0_radial(pp, b_.mu, r[i]);
    }
    pairing00_ = bubble::mode_pairing(pp, 0);

    // A = alpha p N D1 R D1 + alpha (p-1) N D2, with the quadrature weights
    // folded into the kernel columns
    std::vector<double> colw(n);
    for (int j = 0; j < n; ++j)
        colw[j] = std::pow(r[j], pp.N - 1.0) * ctx_.grid->weights()[j];
    const Matrix& Knwt = ctx_.k_newton->rows();
    const Matrix& Klam = ctx_.k_lambda->rows();
    const double cn = 1.0 / pp.newton_normalizer();

    Matrix M1(n, n);  // R D1 with weights: M1[i][j] = Klam[i][j] colw_j U^{p-1}_j
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M1(i, j) = Klam(i, j) * colw[j] * Up1_[j];
    Matrix NW(n, n);  // Newton with weights
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) NW(i, j) = cn * Knwt(i, j) * colw[j];
    // rows of NW scaled by D1 on the left of M1: A1 = NW * diag(U^{p-1}) * M1
    Matrix D1M1(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D1M1(i, j) = Up1_[i] * M1(i, j);
    Matrix A1 = matmul(NW, D1M1);
    ImA_ = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double a = pp.alpha * pp.p * A1(i, j) +
                       pp.alpha * (pp.p - 1.0) * NW(i, j) * IlamUp_[j] *
                           std::pow(U_[j], pp.p - 2.0);
            ImA_(i, j) = (i == j ? 1.0 : 0.0) - a;
        }
    }

    bordered_ = Matrix(n + 1, n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bordered_(i, j) = ImA_(i, j);
    std::vector<double> nh0 = newton_apply(ctx_, [&] {
        std::vector<double> h(n);
        for (int j = 0; j < n; ++j) h[j] = H0_[j];
        return h;
    }());
    for (int i = 0; i < n; ++i) bordered_(i, n) = nh0[i];
    for (int j = 0; j < n; ++j) bordered_(n, j) = pp.sphere_area() * colw[j] * H0_[j];
    bordered_(n, n) = 0.0;
    try {
        lu_ = std::make_unique<LuFactor>(bordered_);
    } catch (const std::exception&) {
        throw std::runtime_error(
            "ProjectedSystem: bordered system is singular (kernel not removed)");
    }
}

GridFunction ProjectedSystem::solve(const GridFunction& g, SolveInfo* info) const {
    const ProblemParams& pp = ctx_.pp;
    if (g.decay_exponent <= pp.N)
        throw std::domain_error("ProjectedSystem::solve: g must decay faster than <x>^{-N}");
    if (g.grid->hash() != ctx_.grid->hash())
        throw std::invalid_argument("ProjectedSystem::solve: grid mismatch");
    const int n = ctx_.grid->size();
    std::vector<double> rhs(n + 1, 0.0);
    auto ng = newton_apply(ctx_, g.values);
    for (int i = 0; i < n; ++i) rhs[i] = ng[i];
    auto sol = lu_->solve(rhs);
    GridFunction phi;
    phi.grid = ctx_.grid;
    phi.values.assign(sol.begin(), sol.begin() + n);
    phi.decay_exponent = pp.N - 2.0;
    if (info) {
        info->multiplier = sol[n];
        double xn = weighted_sup_norm(pp, phi, b_, NormKind::X);
        double yn = weighted_sup_norm(pp, g, b_, NormKind::Y);
        info->c0_ratio = yn > 0 ? xn / yn : 0.0;
    }
    return phi;
}

std::vector<double> ProjectedSystem::apply_W(const std::vector<double>& phi) const {
    const ProblemParams& pp = ctx_.pp;
    const int n = ctx_.grid->size();
    std::vector<double> u1phi(n);
    for (int i = 0; i < n; ++i) u1phi[i] = Up1_[i] * phi[i];
    auto conv = ctx_.k_lambda->apply(u1phi);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = pp.alpha * pp.p * conv[i] * Up1_[i] +
                 pp.alpha * (pp.p - 1.0) * IlamUp_[i] * std::pow(U_[i], pp.p - 2.0) * phi[i];
    }
    return out;
}

GridFunction ProjectedSystem::apply_L(const GridFunction& phi,
                                      const GridFunction* neg_laplacian) const {
    const ProblemParams& pp = ctx_.pp;
    if (phi.grid->hash() != ctx_.grid->hash())
        throw std::invalid_argument("apply_L: grid mismatch");
    const int n = ctx_.grid->size();
    std::vector<double> nl(n);
    if (neg_laplacian) {
        nl = neg_laplacian->values;
    } else {
        // differentiate the interpolant; oracle quality only
        const auto& r = ctx_.grid->r();
        for (int i = 0; i < n; ++i) {
            double h = 1e-4 * (1.0 + r[i]);
            double c = phi.eval(r[i]);
            double fp = phi.eval(r[i] + h), fm = phi.eval(std::max(r[i] - h, 1e-12));
            double d2 = (fp - 2.0 * c + fm) / (h * h);
            double d1 = (fp - fm) / (2.0 * h);
            nl[i] = -(d2 + (pp.N - 1.0) * d1 / r[i]);
        }
    }
    auto w = apply_W(phi.values);
    GridFunction out;
    out.grid = ctx_.grid;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = nl[i] - w[i];
    out.decay_exponent = std::min(neg_laplacian ? neg_laplacian->decay_exponent
                                                : phi.decay_exponent + 2.0,
                                  pp.N + 2.0);
    return out;
}

ProjectedSystem::KernelDiagnostic ProjectedSystem::kernel_diagnostic() const {
    KernelDiagnostic d;
    d.sigma_max = largest_singular_value(ImA_);
    auto pairs = smallest_singular_pairs(ImA_, 5);
    d.smallest = pairs.sigma;
    for (double s : pairs.sigma)
        if (s < 1e-4 * d.sigma_max) ++d.near_null_count;
    // angle of the most-null direction against the discrete Z_0
    double nz = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < Z0_.size(); ++i) nz += Z0_[i] * Z0_[i];
    nz = std::sqrt(nz);
    for (std::size_t i = 0; i < Z0_.size(); ++i)
        dot += pairs.right_vectors[0][i] * Z0_[i] / nz;
    d.cos_angle_z0 = std::fabs(dot);
    double bmax = largest_singular_value(bordered_);
    auto bsm = smallest_singular_pairs(bordered_, 1);
    d.constrained_ratio = bsm.sigma[0] / bmax;
    return d;
}

GridFunction ProjectedSystem::solver_derivative(const GridFunction& g, int m) const {
    const ProblemParams& pp = ctx_.pp;
    if (m != 0)
        throw std::invalid_argument(
            "solver_derivative: the radial sector carries the dilation mode only");
    const int n = ctx_.grid->size();
    const auto& r = ctx_.grid->r();
    const double mu = b_.mu;

    GridFunction phi = solve(g);

    std::vector<double> zbar(n), htld(n);
    for (int i = 0; i < n; ++i) {
        zbar[i] = bubble::zbar00_radial(pp, mu, r[i]);
        htld[i] = bubble::htilde00_radial(pp, mu, r[i]);
    }

    // l_0(phi): the four Riesz-coupled terms of the mu-differentiated operator
    std::vector<double> a1(n), a2(n);
    for (int i = 0; i < n; ++i) {
        a1[i] = Up1_[i] * phi.values[i];
        a2[i] = std::pow(U_[i], pp.p - 2.0) * Z0_[i] * phi.values[i];
    }
    auto c1 = ctx_.k_lambda->apply(a1);
    auto c2 = ctx_.k_lambda->apply(a2);
    std::vector<double> uz(n);
    for (int i = 0; i < n; ++i) uz[i] = Up1_[i] * Z0_[i];
    auto c3 = ctx_.k_lambda->apply(uz);

    const double app1 = pp.alpha * pp.p * (pp.p - 1.0);
    const double a12 = pp.alpha * (pp.p - 1.0) * (pp.p - 2.0);
    std::vector<double> l0(n);
    for (int i = 0; i < n; ++i) {
        double up2 = std::pow(U_[i], pp.p - 2.0);
        l0[i] = app1 * c1[i] * up2 * Z0_[i] + app1 * c2[i] * Up1_[i] +
                app1 * c3[i] * up2 * phi.values[i] +
                a12 * IlamUp_[i] * std::pow(U_[i], pp.p - 3.0) * Z0_[i] * phi.values[i];
    }

    auto w = ctx_.int_weights();
    double gz = 0.0, gzbar = 0.0, phih = 0.0;
    for (int i = 0; i < n; ++i) {
        gz += w[i] * g.values[i] * Z0_[i];
        gzbar += w[i] * g.values[i] * zbar[i];
        phih += w[i] * phi.values[i] * htld[i];
    }

    GridFunction rhs;
    rhs.grid = ctx_.grid;
    rhs.values.resize(n);
    for (int i = 0; i < n; ++i) {
        double r0 = (gz / pairing00_) * htld[i];
        double t0 = -(gzbar / pairing00_) * H0_[i];
        rhs.values[i] = (l0[i] - r0 + t0) / mu;
    }
    rhs.decay_exponent = pp.N + 2.0;

    GridFunction psit = solve(rhs);
    GridFunction psi;
    psi.grid = ctx_.grid;
    psi.values.resize(n);
    for (int i = 0; i < n; ++i)
        psi.values[i] = psit.values[i] - (phih / pairing00_) * Z0_[i] / mu;
    psi.decay_exponent = pp.N - 2.0;
    return psi;
}

GridFunction scaling_transport(const ProblemParams& pp, const GridFunction& f,
                               const BubbleParams& from, const BubbleParams& to,
                               NormKind kind) {
    from.validate(pp.N);
    to.validate(pp.N);
    if (!from.centered() || !to.centered())
        throw std::invalid_argument("scaling_transport: radial transport requires xi = 0");
    const double e = (kind == NormKind::X) ? 0.5 * (pp.N - 2.0) : 0.5 * (pp.N + 2.0);
    const double ratio = from.mu / to.mu;
    GridFunction out;
    out.grid = f.grid;
    out.decay_exponent = f.decay_exponent;
    out.values.resize(f.size());
    for (int i = 0; i < f.size(); ++i)
        out.values[i] = std::pow(ratio, e) * f.eval(ratio * f.grid->r()[i]);
    return out;
}

// ---------------------------------------------------------------------------

FullProjectedSystem::FullProjectedSystem(const ProblemParams& pp, const BubbleParams& b,
                                         std::shared_ptr<const RadialGrid> grid,
                                         std::shared_ptr<const SphereRule> sphere)
    : pp_(pp), b_(b), grid_(std::move(grid)), sphere_(std::move(sphere)) {
    b_.validate(pp.N);
    const int nr = grid_->size(), nd = (int)sphere_->directions.size();
    const std::size_t P = (std::size_t)nr * nd;
    if (P > 2200)
        throw std::invalid_argument("FullProjectedSystem: demonstration resolutions only");
    w_ = riesz::full_weights(pp, *grid_, *sphere_);

    std::vector<double> U(P), Up1(P), D2(P);
    std::vector<double> x(pp.N);
    Zmodes_.assign(pp.N + 1, std::vector<double>(P));
    Hmodes_.assign(pp.N + 1, std::vector<double>(P));
    for (int i = 0; i < nr; ++i) {
        for (int d = 0; d < nd; ++d) {
            std::size_t a = (std::size_t)i * nd + d;
            for (int c = 0; c < pp.N; ++c) x[c] = grid_->r()[i] * sphere_->directions[d][c];
            U[a] = bubble::value(pp, b_, x);
            Up1[a] = std::pow(U[a], pp.p - 1.0);
            D2[a] = bubble::riesz_closed_form(pp, b_, x) * std::pow(U[a], pp.p - 2.0);
            for (int j = 0; j <= pp.N; ++j) {
                Zmodes_[j][a] = bubble::z_mode(pp, j, b_, x);
                Hmodes_[j][a] = bubble::h_mode(pp, j, b_, x);
            }
        }
    }

    Matrix Klam = riesz::full_kernel_matrix(pp, *grid_, *sphere_, pp.lambda);
    Matrix Knwt = (pp.lambda == pp.N - 2.0)
                      ? Klam
                      : riesz::full_kernel_matrix(pp, *grid_, *sphere_, pp.N - 2.0);
    const double cn = 1.0 / pp.newton_normalizer();
    // fold weights and diagonals
    Matrix M1(P, P), NW(P, P);
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            M1(i, j) = Up1[i] * Klam(i, j) * w_[j] * Up1[j];
            NW(i, j) = cn * Knwt(i, j) * w_[j];
        }
    Matrix A1 = matmul(NW, M1);
    ImA_ = Matrix(P, P);
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            double a = pp.alpha * pp.p * A1(i, j) +
                       pp.alpha * (pp.p - 1.0) * NW(i, j) * D2[j];
            ImA_(i, j) = (i == j ? 1.0 : 0.0) - a;
        }

    const int m = pp.N + 1;
    bordered_ = Matrix(P + m, P + m);
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) bordered_(i, j) = ImA_(i, j);
    for (int q = 0; q < m; ++q) {
        auto col = matvec(NW, Hmodes_[q]);
        for (std::size_t i = 0; i < P; ++i) bordered_(i, P + q) = col[i];
        for (std::size_t j = 0; j < P; ++j) bordered_(P + q, j) = w_[j] * Hmodes_[q][j];
    }
    lu_ = std::make_unique<LuFactor>(bordered_);
}

FullGridFunction FullProjectedSystem::solve(const FullGridFunction& g,
                                            std::vector<double>* multipliers) const {
    const std::size_t P = w_.size();
    const int m = pp_.N + 1;
    if (g.values.size() != P)
        throw std::invalid_argument("FullProjectedSystem::solve: grid mismatch");
    const double cn = 1.0 / pp_.newton_normalizer();
    // Newton potential of g by the direct kernel
    Matrix Knwt = (pp_.lambda == pp_.N - 2.0)
                      ? riesz::full_kernel_matrix(pp_, *grid_, *sphere_, pp_.lambda)
                      : riesz::full_kernel_matrix(pp_, *grid_, *sphere_, pp_.N - 2.0);
    std::vector<double> rhs(P + m, 0.0);
    for (std::size_t i = 0; i < P; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < P; ++j) acc += Knwt(i, j) * w_[j] * g.values[j];
        rhs[i] = cn * acc;
    }
    auto sol = lu_->solve(rhs);
    FullGridFunction phi;
    phi.grid = g.grid;
    phi.sphere = g.sphere;
    phi.decay_exponent = pp_.N - 2.0;
    phi.values.assign(sol.begin(), sol.begin() + P);
    if (multipliers) multipliers->assign(sol.begin() + P, sol.end());
    return phi;
}

FullProjectedSystem::Diagnostic FullProjectedSystem::kernel_diagnostic() const {
    Diagnostic d;
    d.sigma_max = largest_singular_value(ImA_);
    const int m = pp_.N + 1;
    auto pairs = smallest_singular_pairs(ImA_, m + 3);
    d.smallest = pairs.sigma;
    // count by the largest spectral gap within the computed tail
    int cut = 0;
    double best = 0.0;
    for (int i = 0; i + 1 < (int)pairs.sigma.size(); ++i) {
        double ratio = pairs.sigma[i + 1] / std::max(pairs.sigma[i], 1e-300);
        if (ratio > best) {
            best = ratio;
            cut = i + 1;
        }
    }
    d.near_null_count = cut;
    d.threshold = cut < (int)pairs.sigma.size()
                      ? std::sqrt(pairs.sigma[cut] * std::max(pairs.sigma[cut - 1], 1e-300))
                      : 0.0;
    // orthonormal basis of span{Z_j} in plain l2 on node values
    std::vector<std::vector<double>> basis;
    for (const auto& z : Zmodes_) {
        std::vector<double> v = z;
        for (const auto& bvec : basis) {
            double c = 0.0;
            for (std::size_t q = 0; q < v.size(); ++q) c += v[q] * bvec[q];
            for (std::size_t q = 0; q < v.size(); ++q) v[q] -= c * bvec[q];
        }
        double nv = 0.0;
        for (double q : v) nv += q * q;
        nv = std::sqrt(nv);
        if (nv > 1e-12) {
            for (double& q : v) q /= nv;
            basis.push_back(std::move(v));
        }
    }
    double align = 0.0;
    for (int i = 0; i < d.near_null_count && i < (int)pairs.right_vectors.size(); ++i) {
        double proj = 0.0;
        for (const auto& bvec : basis) {
            double c = 0.0;
            for (std::size_t q = 0; q < bvec.size(); ++q)
                c += pairs.right_vectors[i][q] * bvec[q];
            proj += c * c;
        }
        align += std::sqrt(proj);
    }
    if (d.near_null_count > 0) align /= d.near_null_count;
    d.subspace_alignment = align;
    return d;
}

}  // namespace choquard::linop
