#include "choquard/nonlinear.hpp"

#include <cmath>
#include <stdexcept>

#include "choquard/bubble.hpp"

namespace choquard::nonlinear {

namespace {

double xnorm(const linop::ProjectedSystem& S, const GridFunction& f) {
    return weighted_sup_norm(S.ctx().pp, f, S.bubble(), NormKind::X);
}

double ynorm(const linop::ProjectedSystem& S, const GridFunction& f) {
    return weighted_sup_norm(S.ctx().pp, f, S.bubble(), NormKind::Y);
}

std::vector<double> k_values(const linop::ProjectedSystem& S, const kcheck::PotentialSpec& k) {
    if (k.N != S.ctx().pp.N)
        throw std::invalid_argument("perturbation potential dimension mismatch");
    if (!k.is_radial())
        throw std::invalid_argument("the radial path requires a radial potential");
    const auto& r = S.ctx().grid->r();
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = kcheck::eval_k_radial(k, r[i]);
    return out;
}

}  // namespace

GridFunction nonlinear_remainder(const linop::ProjectedSystem& S, const GridFunction& phi) {
    const ProblemParams& pp = S.ctx().pp;
    if (phi.grid->hash() != S.ctx().grid->hash())
        throw std::invalid_argument("nonlinear_remainder: grid mismatch");
    if (xnorm(S, phi) > 0.5)
        throw std::domain_error("nonlinear_remainder: ||phi||_X exceeds the 1/2 ball");
    const int n = phi.size();
    const double p = pp.p;
    std::vector<double> q2u(n), u1phi(n), e(n), q1(n);
    for (int i = 0; i < n; ++i) {
        double z = phi.values[i] / S.U()[i];
        double plus = std::max(1.0 + z, 0.0);
        double ppow = std::pow(plus, p);         // (1+z)_+^p
        double ppow1 = std::pow(plus, p - 1.0);  // (1+z)_+^{p-1}
        q1[i] = ppow1 - 1.0 - (p - 1.0) * z;
        e[i] = ppow1 - 1.0;
        q2u[i] = std::pow(S.U()[i], p) * (ppow - 1.0 - p * z);
        u1phi[i] = std::pow(S.U()[i], p - 1.0) * phi.values[i];
    }
    auto conv_q2 = S.ctx().k_lambda->apply(q2u);
    auto conv_u1 = S.ctx().k_lambda->apply(u1phi);
    GridFunction out;
    out.grid = phi.grid;
    out.decay_exponent = pp.N + 2.0;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) {
        double up1 = std::pow(S.U()[i], p - 1.0);
        double t1 = S.IlamUp()[i] * up1 * q1[i];
        double t2 = conv_q2[i] * up1 * (1.0 + e[i]);
        double t3 = p * conv_u1[i] * up1 * e[i];
        out.values[i] = pp.alpha * (t1 + t2 + t3);
    }
    return out;
}

GridFunction perturbation_term(const linop::ProjectedSystem& S, const GridFunction& phi,
                               const kcheck::PotentialSpec& k) {
    const ProblemParams& pp = S.ctx().pp;
    if (phi.grid->hash() != S.ctx().grid->hash())
        throw std::invalid_argument("perturbation_term: grid mismatch");
    auto kv = k_values(S, k);
    const int n = phi.size();
    GridFunction out;
    out.grid = phi.grid;
    out.decay_exponent = pp.N + 2.0;
    out.values.resize(n);
    const double q = pp.crit_exp();
    for (int i = 0; i < n; ++i) {
        double w = std::max(S.U()[i] + phi.values[i], 0.0);
        out.values[i] = kv[i] * std::pow(w, q);
    }
    return out;
}

std::vector<double> c_coefficients(const linop::ProjectedSystem& S,
                                   const PerturbedSolution& sol,
                                   const kcheck::PotentialSpec& k) {
    const ProblemParams& pp = S.ctx().pp;
    std::vector<double> c(pp.N + 1, 0.0);
    auto Nr = nonlinear_remainder(S, sol.phi);
    auto E = perturbation_term(S, sol.phi, k);
    auto w = S.ctx().int_weights();
    double acc = 0.0;
    for (int i = 0; i < sol.phi.size(); ++i)
        acc += w[i] * (Nr.values[i] + sol.eps * E.values[i]) * S.Z0()[i];
    c[0] = acc / S.pairing00();
    // translation modes vanish on the radial sector by parity
    return c;
}

PerturbedSolution contraction_solve(const linop::ProjectedSystem& S, double eps,
                                    const kcheck::PotentialSpec& k, const Options& opt) {
    const ProblemParams& pp = S.ctx().pp;
    if (eps < 0.0) throw std::invalid_argument("contraction_solve: eps >= 0 required");
    if (eps > opt.eps_max)
        throw std::invalid_argument("contraction_solve: eps exceeds the configured eps_max");
    {
        auto kv = k_values(S, k);
        double kmin = k.a0;  // tail value
        for (double v : kv) kmin = std::min(kmin, v);
        if (!(kmin > 0.0))
            throw std::invalid_argument("contraction_solve: potential fails positivity");
    }

    PerturbedSolution sol;
    sol.b = S.bubble();
    sol.eps = eps;
    sol.phi = GridFunction::zeros(S.ctx().grid, pp.N - 2.0);
    sol.c.assign(pp.N + 1, 0.0);

    int grow_streak = 0;
    double prev_step = -1.0;
    for (int it = 0; it < opt.max_iter; ++it) {
        GridFunction rhs;
        try {
            rhs = nonlinear_remainder(S, sol.phi);
        } catch (const std::domain_error&) {
            sol.failure = "iterate left the contraction ball";
            break;
        }
        if (eps > 0.0) {
            auto E = perturbation_term(S, sol.phi, k);
            for (int i = 0; i < rhs.size(); ++i) rhs.values[i] += eps * E.values[i];
        }
        auto next = S.solve(rhs);
        GridFunction diff = next;
        for (int i = 0; i < diff.size(); ++i) diff.values[i] -= sol.phi.values[i];
        double step = xnorm(S, diff);
        sol.step_history.push_back(step);
        sol.phi = next;
        sol.iterations = it + 1;
        sol.final_step = step;
        if (step <= opt.tol) {
            sol.converged = true;
            break;
        }
        if (prev_step >= 0.0 && step > prev_step) {
            if (++grow_streak >= 3) {
                sol.failure = "contraction lost: step grew over three consecutive iterations";
                break;
            }
        } else {
            grow_streak = 0;
        }
        prev_step = step;
    }
    if (!sol.converged && sol.failure.empty())
        sol.failure = "iteration budget exhausted before reaching tolerance";

    sol.phi_norm = xnorm(S, sol.phi);
    sol.omega_min_ratio = 1e300;
    sol.clamp_active = false;
    for (int i = 0; i < sol.phi.size(); ++i) {
        double ratio = (S.U()[i] + sol.phi.values[i]) / S.U()[i];
        sol.omega_min_ratio = std::min(sol.omega_min_ratio, ratio);
        if (ratio <= 0.0) sol.clamp_active = true;
    }
    if (sol.converged) sol.c = c_coefficients(S, sol, k);
    return sol;
}

std::vector<double> neg_laplacian_phi(const linop::ProjectedSystem& S,
                                      const PerturbedSolution& sol,
                                      const kcheck::PotentialSpec& k) {
    auto Nr = nonlinear_remainder(S, sol.phi);
    auto E = perturbation_term(S, sol.phi, k);
    auto W = S.apply_W(sol.phi.values);
    std::vector<double> h(sol.phi.size());
    for (int i = 0; i < sol.phi.size(); ++i)
        h[i] = W[i] + Nr.values[i] + sol.eps * E.values[i] - sol.c[0] * S.H0()[i];
    return h;
}

ResidualReport residual_check(const linop::ProjectedSystem& S, const PerturbedSolution& sol,
                              const kcheck::PotentialSpec& k) {
    const ProblemParams& pp = S.ctx().pp;
    const int n = sol.phi.size();
    auto kv = k_values(S, k);
    auto h = neg_laplacian_phi(S, sol, k);

    // route 1: -Delta omega from the closed-form bubble part plus the
    // integral-representation right-hand side of phi
    // route 2: the convolution and perturbation terms evaluated directly at omega
    std::vector<double> omega(n), omega_p(n);
    const double q = pp.crit_exp();
    for (int i = 0; i < n; ++i) {
        omega[i] = std::max(S.U()[i] + sol.phi.values[i], 0.0);
        omega_p[i] = std::pow(omega[i], pp.p);
    }
    auto conv = S.ctx().k_lambda->apply(omega_p);
    GridFunction resid;
    resid.grid = sol.phi.grid;
    resid.decay_exponent = pp.N + 2.0;
    resid.values.resize(n);
    GridFunction cterm = resid;
    ResidualReport rep;
    rep.omega_min = 1e300;
    for (int i = 0; i < n; ++i) {
        double neg_lap_omega =
            pp.N * (pp.N - 2.0) * std::pow(S.U()[i], q) + h[i];
        double direct = pp.alpha * conv[i] * std::pow(omega[i], pp.p - 1.0) +
                        sol.eps * kv[i] * std::pow(omega[i], q);
        resid.values[i] = neg_lap_omega - direct + sol.c[0] * S.H0()[i];
        cterm.values[i] = sol.c[0] * S.H0()[i];
        rep.omega_min = std::min(rep.omega_min, omega[i]);
    }
    rep.residual_y = ynorm(S, resid);
    rep.c_term_y = ynorm(S, cterm);
    rep.positive = rep.omega_min > 0.0;
    rep.omega_above_half_u = true;
    for (int i = 0; i < n; ++i)
        if (omega[i] < 0.5 * S.U()[i]) rep.omega_above_half_u = false;
    return rep;
}

GridFunction phi_parameter_derivative(const linop::RadialContext& ctx, const BubbleParams& b,
                                      double eps, const kcheck::PotentialSpec& k, int m,
                                      const Options& opt, double step) {
    if (m != 0)
        throw std::invalid_argument(
            "phi_parameter_derivative: radial path carries the dilation mode only");
    if (!(step > 1e-8))
        throw std::invalid_argument("phi_parameter_derivative: FD step underflow");
    const double h = step * b.mu;
    linop::ProjectedSystem Sp(ctx, BubbleParams::origin(b.mu + h));
    linop::ProjectedSystem Sm(ctx, BubbleParams::origin(b.mu - h));
    auto up = contraction_solve(Sp, eps, k, opt);
    auto um = contraction_solve(Sm, eps, k, opt);
    if (!up.converged || !um.converged)
        throw std::runtime_error("phi_parameter_derivative: contraction failed at a stencil point");
    GridFunction out;
    out.grid = ctx.grid;
    out.decay_exponent = ctx.pp.N - 2.0;
    out.values.resize(up.phi.size());
    for (int i = 0; i < up.phi.size(); ++i)
        out.values[i] = (up.phi.values[i] - um.phi.values[i]) / (2.0 * h);
    return out;
}

ContractionConstants measure_constants(const linop::ProjectedSystem& S,
                                       const kcheck::PotentialSpec& k, double eps) {
    const ProblemParams& pp = S.ctx().pp;
    ContractionConstants c;
    // sup of k over the grid and the tail
    auto kv = k_values(S, k);
    c.k_sup = k.a0;
    for (double v : kv) c.k_sup = std::max(c.k_sup, v);

    // C0: stability of the projected solve on a transported reference profile
    auto gref = GridFunction::sample(
        S.ctx().grid, [&](double r) { return std::pow(jp(r / S.bubble().mu), -(pp.N + 2.0)); },
        pp.N + 2.0);
    linop::ProjectedSystem::SolveInfo info;
    S.solve(gref, &info);
    c.C0 = info.c0_ratio;

    // C2: ||E(0)||_Y per unit ||k||
    auto E0 = perturbation_term(S, GridFunction::zeros(S.ctx().grid, pp.N - 2.0), k);
    c.C2 = weighted_sup_norm(pp, E0, S.bubble(), NormKind::Y) / c.k_sup;

    // C1, C3, C4 from probing fields in the ball
    auto mk_phi = [&](double amp, double shift) {
        return GridFunction::sample(
            S.ctx().grid,
            [&](double r) {
                double s = r / S.bubble().mu;
                return amp * std::pow(S.bubble().mu, -0.5 * (pp.N - 2.0)) *
                       std::pow(jp(s), -(pp.N - 2.0)) / (1.0 + shift * s * s / (1.0 + s * s));
            },
            pp.N - 2.0);
    };
    c.C1 = 0.0;
    for (double amp : {0.05, 0.15, 0.3}) {
        auto phi = mk_phi(amp, 0.5);
        auto Nr = nonlinear_remainder(S, phi);
        double xn = weighted_sup_norm(pp, phi, S.bubble(), NormKind::X);
        c.C1 = std::max(c.C1, weighted_sup_norm(pp, Nr, S.bubble(), NormKind::Y) / (xn * xn));
    }
    c.C3 = 0.0;
    c.C4 = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        auto phi1 = mk_phi(0.08 + 0.05 * rep, 0.3);
        auto phi2 = mk_phi(0.21 - 0.04 * rep, 0.9);
        auto N1 = nonlinear_remainder(S, phi1);
        auto N2 = nonlinear_remainder(S, phi2);
        auto E1 = perturbation_term(S, phi1, k);
        auto E2 = perturbation_term(S, phi2, k);
        GridFunction dn = N1, de = E1, dphi = phi1;
        for (int i = 0; i < dn.size(); ++i) {
            dn.values[i] -= N2.values[i];
            de.values[i] -= E2.values[i];
            dphi.values[i] -= phi2.values[i];
        }
        double x1 = weighted_sup_norm(pp, phi1, S.bubble(), NormKind::X);
        double x2 = weighted_sup_norm(pp, phi2, S.bubble(), NormKind::X);
        double dx = weighted_sup_norm(pp, dphi, S.bubble(), NormKind::X);
        c.C3 = std::max(c.C3, weighted_sup_norm(pp, dn, S.bubble(), NormKind::Y) /
                                  ((x1 + x2) * dx));
        c.C4 = std::max(c.C4, weighted_sup_norm(pp, de, S.bubble(), NormKind::Y) /
                                  (c.k_sup * dx));
    }
    c.rho0_ball = 2.0 * c.C0 * c.C2 * eps * c.k_sup;
    c.rho0 = std::min(c.rho0_ball, (c.C4 / (2.0 * c.C3)) * eps * c.k_sup);
    return c;
}

}  // namespace choquard::nonlinear
