#include "choquard/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "choquard/bubble.hpp"

namespace choquard::reduction {

double energy(const linop::ProjectedSystem& S, const nonlinear::PerturbedSolution& sol,
              const kcheck::PotentialSpec& k) {
    const ProblemParams& pp = S.ctx().pp;
    const int n = sol.phi.size();
    const auto& r = S.ctx().grid->r();
    auto w = S.ctx().int_weights();
    const double q = pp.crit_exp();

    auto h = nonlinear::neg_laplacian_phi(S, sol, k);

    std::vector<double> omega(n), omega_p(n);
    for (int i = 0; i < n; ++i) {
        omega[i] = std::max(S.U()[i] + sol.phi.values[i], 0.0);
        omega_p[i] = std::pow(omega[i], pp.p);
    }
    // I_lambda[omega^p] = closed form + kernel on the difference
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = omega_p[i] - std::pow(S.U()[i], pp.p);
    auto conv = S.ctx().k_lambda->apply(diff);

    double grad2 = 0.0, riesz_term = 0.0, pert = 0.0;
    for (int i = 0; i < n; ++i) {
        double neg_lap_u = pp.N * (pp.N - 2.0) * std::pow(S.U()[i], q);
        grad2 += w[i] * omega[i] * (neg_lap_u + h[i]);
        riesz_term += w[i] * (S.IlamUp()[i] + conv[i]) * omega_p[i];
        double kv = kcheck::eval_k_radial(k, r[i]);
        pert += w[i] * kv * std::pow(omega[i], pp.sobolev_exp());
    }
    return 0.5 * grad2 - pp.alpha / (2.0 * pp.p) * riesz_term -
           (pp.N - 2.0) / (2.0 * pp.N) * sol.eps * pert;
}

double jbar0(const linop::RadialContext& ctx) {
    const ProblemParams& pp = ctx.pp;
    auto w = ctx.int_weights();
    const auto& r = ctx.grid->r();
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < ctx.grid->size(); ++i) {
        double U = bubble::value_radial(pp, 1.0, r[i]);
        t1 += w[i] * U * pp.N * (pp.N - 2.0) * std::pow(U, pp.crit_exp());
        t2 += w[i] * bubble::riesz_closed_radial(pp, 1.0, r[i]) * std::pow(U, pp.p);
    }
    return 0.5 * t1 - pp.alpha / (2.0 * pp.p) * t2;
}

// ---------------------------------------------------------------------------

Upsilon::Upsilon(const ProblemParams& pp, kcheck::PotentialSpec k, int n_radial,
                 int sphere_degree)
    : pp_(pp), k_(std::move(k)), sphere_(SphereRule::make(pp.N, sphere_degree)) {
    k_.validate();
    if (k_.N != pp.N) throw std::invalid_argument("Upsilon: potential dimension mismatch");
    grid_ = RadialGrid::make(n_radial);
    const int n = grid_->size();
    u_mass_.resize(n);
    z0_mass_.resize(n);
    const double pref = (pp.N - 2.0) / (2.0 * pp.N);
    for (int i = 0; i < n; ++i) {
        double r = grid_->r()[i];
        double wr = pp.sphere_area() * grid_->weights()[i] * std::pow(r, pp.N - 1.0);
        double U = bubble::value_radial(pp_, 1.0, r);
        u_mass_[i] = pref * wr * std::pow(U, pp.sobolev_exp());
        z0_mass_[i] = wr * std::pow(U, pp.crit_exp()) * bubble::z0_radial(pp_, 1.0, r);
    }
}

double Upsilon::value_mu(double mu) const {
    if (!k_.is_radial()) throw std::invalid_argument("Upsilon::value_mu: radial k only");
    double acc = 0.0;
    for (int i = 0; i < grid_->size(); ++i)
        acc += kcheck::eval_k_radial(k_, mu * grid_->r()[i]) * u_mass_[i];
    return acc;
}

double Upsilon::dmu(double mu) const {
    if (!k_.is_radial()) throw std::invalid_argument("Upsilon::dmu: radial k only");
    double acc = 0.0;
    for (int i = 0; i < grid_->size(); ++i)
        acc += kcheck::eval_k_radial(k_, mu * grid_->r()[i]) * z0_mass_[i];
    return acc / mu;
}

double Upsilon::d2mu(double mu, double step) const {
    return (dmu(mu + step) - dmu(mu - step)) / (2.0 * step);
}

double Upsilon::value(const BubbleParams& b) const {
    b.validate(pp_.N);
    if (k_.is_radial() && b.centered()) return value_mu(b.mu);
    const double pref = (pp_.N - 2.0) / (2.0 * pp_.N);
    std::vector<double> x(pp_.N);
    double acc = 0.0;
    for (int i = 0; i < grid_->size(); ++i) {
        double r = grid_->r()[i];
        double wr = grid_->weights()[i] * std::pow(r, pp_.N - 1.0);
        double U = std::pow(bubble::value_radial(pp_, 1.0, r), pp_.sobolev_exp());
        double shell = 0.0;
        for (std::size_t d = 0; d < sphere_.directions.size(); ++d) {
            for (int c = 0; c < pp_.N; ++c) {
                double xi = b.xi.empty() ? 0.0 : b.xi[c];
                x[c] = b.mu * r * sphere_.directions[d][c] + xi;
            }
            shell += sphere_.weights[d] * kcheck::eval_k_value(k_, x);
        }
        acc += wr * U * shell;
    }
    return pref * acc;
}

std::vector<double> Upsilon::grad(const BubbleParams& b) const {
    b.validate(pp_.N);
    std::vector<double> g(pp_.N + 1, 0.0);
    std::vector<double> x(pp_.N);
    for (int i = 0; i < grid_->size(); ++i) {
        double r = grid_->r()[i];
        double wr = grid_->weights()[i] * std::pow(r, pp_.N - 1.0);
        double Ucrit = std::pow(bubble::value_radial(pp_, 1.0, r), pp_.crit_exp());
        double z0 = bubble::z0_radial(pp_, 1.0, r);
        double znorm = (pp_.N - 2.0) * std::pow(jp(r), -(double)pp_.N);  // Z_j / y_j
        for (std::size_t d = 0; d < sphere_.directions.size(); ++d) {
            for (int c = 0; c < pp_.N; ++c) {
                double xi = b.xi.empty() ? 0.0 : b.xi[c];
                x[c] = b.mu * r * sphere_.directions[d][c] + xi;
            }
            double kv = kcheck::eval_k_value(k_, x);
            double base = wr * sphere_.weights[d] * kv * Ucrit;
            g[0] += base * z0;
            for (int c = 0; c < pp_.N; ++c)
                g[c + 1] += base * znorm * r * sphere_.directions[d][c];
        }
    }
    for (double& v : g) v /= b.mu;
    return g;
}

Matrix Upsilon::hessian(const BubbleParams& b, double step) const {
    const int m = pp_.N + 1;
    Matrix H(m, m);
    for (int q = 0; q < m; ++q) {
        BubbleParams bp = b, bm = b;
        if (bp.xi.empty()) {
            bp.xi.assign(pp_.N, 0.0);
            bm.xi.assign(pp_.N, 0.0);
        }
        if (q == 0) {
            bp.mu += step;
            bm.mu -= step;
        } else {
            bp.xi[q - 1] += step;
            bm.xi[q - 1] -= step;
        }
        auto gp = grad(bp), gm = grad(bm);
        for (int i = 0; i < m; ++i) H(i, q) = (gp[i] - gm[i]) / (2.0 * step);
    }
    // symmetrize the FD noise away
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double s = 0.5 * (H(i, j) + H(j, i));
            H(i, j) = H(j, i) = s;
        }
    return H;
}

// ---------------------------------------------------------------------------

namespace {

std::string classify(const std::vector<double>& eigs, double degen_tol = 1e-8) {
    bool deg = false, pos = false, neg = false;
    for (double e : eigs) {
        if (std::fabs(e) < degen_tol) deg = true;
        else if (e > 0) pos = true;
        else neg = true;
    }
    if (deg) return "degenerate";
    if (pos && neg) return "saddle";
    return pos ? "min" : "max";
}

double splitmix(unsigned long long& s) {
    s += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return (double)(z >> 11) / 9007199254740992.0;
}

std::vector<CriticalPoint> radial_zeros(const Upsilon& ups, const Box& box) {
    std::vector<CriticalPoint> out;
    const int scan = 161;
    double prev_mu = box.mu_min, prev_d = ups.dmu(prev_mu);
    double scale = std::fabs(prev_d);
    for (int s = 1; s < scan; ++s) {
        double mu = box.mu_min + (box.mu_max - box.mu_min) * s / (scan - 1.0);
        double d = ups.dmu(mu);
        scale = std::max(scale, std::fabs(d));
        if (prev_d == 0.0 || d == 0.0 || prev_d * d < 0.0) {
            if (prev_d == 0.0 && d == 0.0) {
                prev_mu = mu;
                prev_d = d;
                continue;  // flat stretch: no isolated zero to report
            }
            // bisect then polish with Newton
            double lo = prev_mu, hi = mu, dlo = prev_d;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double dm = ups.dmu(mid);
                if (dlo * dm <= 0.0) hi = mid;
                else { lo = mid; dlo = dm; }
            }
            double root = 0.5 * (lo + hi);
            for (int it = 0; it < 8; ++it) {
                double f = ups.dmu(root), fp = ups.d2mu(root);
                if (fp == 0.0) break;
                double nr = root - f / fp;
                if (nr > box.mu_min && nr < box.mu_max) root = nr;
            }
            CriticalPoint cp;
            cp.b = BubbleParams::origin(root);
            cp.upsilon = ups.value_mu(root);
            cp.grad = {ups.dmu(root)};
            double d2 = ups.d2mu(root);
            cp.hess_eigs = {d2};
            cp.classification = classify(cp.hess_eigs);
            cp.index = cp.classification == "degenerate" ? 0 : (d2 > 0 ? 1 : -1);
            bool dup = false;
            for (const auto& e : out)
                if (std::fabs(e.b.mu - root) < 1e-6) dup = true;
            if (!dup) out.push_back(std::move(cp));
        }
        prev_mu = mu;
        prev_d = d;
    }
    return out;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const Upsilon& ups, const Box& box,
                                                int multistart, unsigned seed) {
    if (box.radial()) {
        if (!ups.radial_potential())
            throw std::invalid_argument("find_critical_points: radial box needs radial k");
        return radial_zeros(ups, box);
    }
    const int N = ups.pp().N;
    std::vector<CriticalPoint> out;
    unsigned long long rng = seed;
    // lattice of gradient samples over the box; cells where every gradient
    // component straddles zero seed the Newton polish
    const int mu_pts = 7, xi_pts = 5;
    std::vector<int> dims(N + 1, xi_pts);
    dims[0] = mu_pts;
    auto coord = [&](int d, int i) {
        if (d == 0) return box.mu_min + (box.mu_max - box.mu_min) * i / (mu_pts - 1.0);
        return -box.xi_halfwidth + 2.0 * box.xi_halfwidth * i / (xi_pts - 1.0);
    };
    std::size_t total = mu_pts;
    for (int c = 0; c < N; ++c) total *= xi_pts;
    std::vector<std::vector<double>> lattice(total);
    double gscale = 0.0;
    {
        std::vector<int> idx(N + 1, 0);
        for (std::size_t q = 0; q < total; ++q) {
            BubbleParams b;
            b.mu = coord(0, idx[0]);
            b.xi.assign(N, 0.0);
            for (int c = 0; c < N; ++c) b.xi[c] = coord(c + 1, idx[c + 1]);
            lattice[q] = ups.grad(b);
            for (double v : lattice[q]) gscale = std::max(gscale, std::fabs(v));
            for (int c = 0; c <= N; ++c) {
                if (++idx[c] < dims[c]) break;
                idx[c] = 0;
            }
        }
    }
    auto flat_index = [&](const std::vector<int>& idx) {
        std::size_t q = 0, strd = 1;
        for (int c = 0; c <= N; ++c) {
            q += (std::size_t)idx[c] * strd;
            strd *= dims[c];
        }
        return q;
    };
    std::vector<BubbleParams> starts;
    {
        const double straddle_tol = 1e-9 * std::max(gscale, 1e-30);
        std::vector<int> cell(N + 1, 0);
        while (true) {
            // examine the 2^{N+1} corners of this cell
            bool candidate = true;
            for (int comp = 0; comp <= N && candidate; ++comp) {
                double lo = 1e300, hi = -1e300;
                for (int corner = 0; corner < (1 << (N + 1)); ++corner) {
                    std::vector<int> idx = cell;
                    for (int c = 0; c <= N; ++c)
                        if (corner & (1 << c)) ++idx[c];
                    double v = lattice[flat_index(idx)][comp];
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                candidate = lo <= straddle_tol && hi >= -straddle_tol;
            }
            if (candidate) {
                BubbleParams b;
                b.mu = 0.5 * (coord(0, cell[0]) + coord(0, cell[0] + 1));
                b.xi.assign(N, 0.0);
                for (int c = 0; c < N; ++c)
                    b.xi[c] = 0.5 * (coord(c + 1, cell[c + 1]) + coord(c + 1, cell[c + 1] + 1));
                starts.push_back(b);
                // cell corners too: symmetry planes run through corners, and
                // the on-plane Newton cannot drift off them
                for (int corner = 0; corner < (1 << (N + 1)); ++corner) {
                    BubbleParams bc;
                    bc.mu = coord(0, cell[0] + ((corner & 1) ? 1 : 0));
                    bc.xi.assign(N, 0.0);
                    for (int c = 0; c < N; ++c)
                        bc.xi[c] = coord(c + 1, cell[c + 1] + ((corner & (2 << c)) ? 1 : 0));
                    starts.push_back(std::move(bc));
                }
            }
            int c = 0;
            for (; c <= N; ++c) {
                if (++cell[c] < dims[c] - 1) break;
                cell[c] = 0;
            }
            if (c > N) break;
        }
    }
    const double gtol = std::max(1e-10, 1e-12 * gscale);
    for (int s = 0; s < multistart; ++s) {
        BubbleParams b;
        b.mu = box.mu_min + (box.mu_max - box.mu_min) * splitmix(rng);
        b.xi.assign(N, 0.0);
        for (int c = 0; c < N; ++c) b.xi[c] = (2.0 * splitmix(rng) - 1.0) * box.xi_halfwidth;
        starts.push_back(std::move(b));
    }
    {
        // drop duplicate seeds (cell corners shared between neighboring cells)
        std::vector<BubbleParams> unique_starts;
        for (const auto& s : starts) {
            bool dup = false;
            for (const auto& t : unique_starts) {
                double d2 = (s.mu - t.mu) * (s.mu - t.mu);
                for (int c = 0; c < N; ++c) d2 += (s.xi[c] - t.xi[c]) * (s.xi[c] - t.xi[c]);
                if (d2 < 1e-16) { dup = true; break; }
            }
            if (!dup) unique_starts.push_back(s);
        }
        starts.swap(unique_starts);
    }
    // iterates may not wander far outside the box: the flat far field pulls
    // |grad| down without any critical point out there
    auto within_walls = [&](const BubbleParams& b) {
        if (b.mu < 0.7 * box.mu_min || b.mu > 1.3 * box.mu_max) return false;
        for (int c = 0; c < N; ++c)
            if (std::fabs(b.xi[c]) > 1.2 * box.xi_halfwidth + 0.1) return false;
        return true;
    };
    for (const auto& start : starts) {
        BubbleParams b = start;
        bool ok = false;
        for (int it = 0; it < 80; ++it) {
            auto g = ups.grad(b);
            double gn = 0.0;
            for (double v : g) gn += v * v;
            gn = std::sqrt(gn);
            if (gn <= gtol) { ok = true; break; }
            std::vector<double> step;
            bool have_newton = true;
            try {
                step = LuFactor(ups.hessian(b)).solve(g);
            } catch (const std::exception&) { have_newton = false; }
            bool moved = false;
            if (have_newton) {
                double lambda = 1.0;
                for (int ls = 0; ls < 20; ++ls) {
                    BubbleParams bn = b;
                    bn.mu -= lambda * step[0];
                    for (int c = 0; c < N; ++c) bn.xi[c] -= lambda * step[c + 1];
                    if (bn.mu <= 0.05 || !within_walls(bn)) { lambda *= 0.5; continue; }
                    auto gv = ups.grad(bn);
                    double gn2 = 0.0;
                    for (double v : gv) gn2 += v * v;
                    if (std::sqrt(gn2) < gn) {
                        b = bn;
                        moved = true;
                        break;
                    }
                    lambda *= 0.5;
                }
            }
            if (!moved) {
                // descent fallback on |grad|^2
                double lambda = 0.5 / std::max(gn, 1e-8);
                for (int ls = 0; ls < 20 && !moved; ++ls) {
                    BubbleParams bn = b;
                    bn.mu -= lambda * g[0];
                    for (int c = 0; c < N; ++c) bn.xi[c] -= lambda * g[c + 1];
                    if (bn.mu > 0.05 && within_walls(bn)) {
                        auto gv = ups.grad(bn);
                        double gn2 = 0.0;
                        for (double v : gv) gn2 += v * v;
                        if (std::sqrt(gn2) < gn) {
                            b = bn;
                            moved = true;
                            break;
                        }
                    }
                    lambda *= 0.5;
                }
            }
            if (!moved) break;
        }
        if (!ok) continue;
        if (b.mu < box.mu_min || b.mu > box.mu_max) continue;
        bool inside = true;
        for (int c = 0; c < N; ++c)
            inside = inside && std::fabs(b.xi[c]) <= box.xi_halfwidth;
        if (!inside) continue;
        {
            // flat-tail escape artifacts have vanished second derivatives
            Matrix H = ups.hessian(b);
            double hmax = 0.0;
            for (std::size_t a = 0; a < H.rows(); ++a)
                for (std::size_t c = 0; c < H.cols(); ++c)
                    hmax = std::max(hmax, std::fabs(H(a, c)));
            double diam = (box.mu_max - box.mu_min) + 2.0 * box.xi_halfwidth;
            if (hmax < 1e-6 * gscale / std::max(diam, 1e-6)) continue;
        }
        bool dup = false;
        for (const auto& e : out) {
            double d2 = (e.b.mu - b.mu) * (e.b.mu - b.mu);
            for (int c = 0; c < N; ++c) {
                double exc = e.b.xi.empty() ? 0.0 : e.b.xi[c];
                d2 += (exc - b.xi[c]) * (exc - b.xi[c]);
            }
            if (std::sqrt(d2) < 1e-6) { dup = true; break; }
        }
        if (dup) continue;
        CriticalPoint cp;
        cp.b = b;
        cp.upsilon = ups.value(b);
        cp.grad = ups.grad(b);
        Matrix H = ups.hessian(b);
        Matrix evec;
        symmetric_eigen(H, cp.hess_eigs, evec);
        cp.classification = classify(cp.hess_eigs);
        if (cp.classification == "degenerate") {
            cp.index = 0;
        } else {
            double det = 1.0;
            for (double e : cp.hess_eigs) det *= e;
            cp.index = det > 0 ? 1 : -1;
        }
        out.push_back(std::move(cp));
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.b.mu < b.b.mu;
    });
    return out;
}

DegreeResult degree(const Upsilon& ups, const Box& box,
                    const std::vector<CriticalPoint>& zeros) {
    DegreeResult res;
    for (const auto& z : zeros)
        if (z.classification == "degenerate")
            throw std::runtime_error("degree: degenerate zero in the box, degree undefined");
    if (box.radial()) {
        double da = ups.dmu(box.mu_min), db = ups.dmu(box.mu_max);
        res.boundary_infimum = std::min(std::fabs(da), std::fabs(db));
        res.boundary_samples = 2;
        if (res.boundary_infimum <= 1e-12)
            throw std::runtime_error("degree: gradient vanishes on the box boundary");
        int sum = 0;
        for (const auto& z : zeros) sum += z.index;
        // 1-D consistency: the boundary signs must account for the zero count
        int crossing = (db > 0 ? 1 : -1) - (da > 0 ? 1 : -1);
        if (crossing != 2 * sum)
            throw std::runtime_error("degree: boundary signs inconsistent with the zero list");
        res.degree = sum;
        return res;
    }
    const int N = ups.pp().N;
    // sample all faces of the (mu, xi) box for the boundary infimum
    double m_inf = 1e300;
    int samples = 0;
    const int per_dim = 7;
    auto sample_face = [&](int fixed_dim, double fixed_val) {
        std::vector<int> idx(N + 1, 0);
        while (true) {
            BubbleParams b;
            b.xi.assign(N, 0.0);
            for (int dcoord = 0; dcoord <= N; ++dcoord) {
                double frac = per_dim == 1 ? 0.5 : (double)idx[dcoord] / (per_dim - 1);
                double v;
                if (dcoord == 0) v = box.mu_min + (box.mu_max - box.mu_min) * frac;
                else v = -box.xi_halfwidth + 2.0 * box.xi_halfwidth * frac;
                if (dcoord == fixed_dim) v = fixed_val;
                if (dcoord == 0) b.mu = v;
                else b.xi[dcoord - 1] = v;
            }
            auto g = ups.grad(b);
            double gn = 0.0;
            for (double v : g) gn += v * v;
            m_inf = std::min(m_inf, std::sqrt(gn));
            ++samples;
            int c = 0;
            for (; c <= N; ++c) {
                if (c == fixed_dim) continue;
                if (++idx[c] < per_dim) break;
                idx[c] = 0;
            }
            if (c > N) break;
        }
    };
    sample_face(0, box.mu_min);
    sample_face(0, box.mu_max);
    for (int c = 1; c <= N; ++c) {
        sample_face(c, -box.xi_halfwidth);
        sample_face(c, box.xi_halfwidth);
    }
    res.boundary_infimum = m_inf;
    res.boundary_samples = samples;
    if (m_inf <= 1e-10)
        throw std::runtime_error("degree: gradient vanishes on the box boundary");
    int sum = 0;
    for (const auto& z : zeros) sum += z.index;
    res.degree = sum;
    return res;
}

ReducedPoint reduced_energy(const linop::RadialContext& ctx, const Upsilon& ups,
                            const BubbleParams& b, double eps,
                            const nonlinear::Options& opt) {
    linop::ProjectedSystem S(ctx, b);
    auto sol = nonlinear::contraction_solve(S, eps, ups.potential(), opt);
    if (!sol.converged)
        throw std::runtime_error("reduced_energy: contraction failed: " + sol.failure);
    ReducedPoint rp;
    rp.b = b;
    rp.upsilon = ups.value(b);
    rp.grad_upsilon.assign(ctx.pp.N + 1, 0.0);
    if (ups.radial_potential() && b.centered()) {
        rp.grad_upsilon[0] = ups.dmu(b.mu);
    } else {
        rp.grad_upsilon = ups.grad(b);
    }
    rp.j_eps = energy(S, sol, ups.potential());
    rp.c = sol.c;
    rp.phi_norm = sol.phi_norm;
    double d2 = ups.d2mu(b.mu);
    rp.hess_eigs = {d2};
    rp.classification = std::fabs(d2) < 1e-8 ? "degenerate" : (d2 > 0 ? "min" : "max");
    return rp;
}

FullSolveResult solve_full(const linop::RadialContext& ctx, const Upsilon& ups, double eps,
                           double mu_seed, const nonlinear::Options& opt) {
    if (!ups.radial_potential())
        throw std::invalid_argument("solve_full: the certified path requires a radial potential");
    auto c_of_mu = [&](double mu) {
        linop::ProjectedSystem S(ctx, BubbleParams::origin(mu));
        auto sol = nonlinear::contraction_solve(S, eps, ups.potential(), opt);
        if (!sol.converged)
            throw std::runtime_error("solve_full: contraction failed at mu = " +
                                     std::to_string(mu) + ": " + sol.failure);
        return sol.c[0];
    };
    double mu = mu_seed;
    FullSolveResult res;
    const double h = 1e-3;
    for (int it = 0; it < 30; ++it) {
        double c0 = c_of_mu(mu);
        res.newton_iterations = it + 1;
        if (std::fabs(c0) <= 1e-10) break;
        double dc = (c_of_mu(mu + h) - c_of_mu(mu - h)) / (2.0 * h);
        if (dc == 0.0 || !std::isfinite(dc))
            throw std::runtime_error("solve_full: singular c-Jacobian");
        double step = c0 / dc;
        // keep the iterate in the positive-mu half line
        while (mu - step <= 0.05) step *= 0.5;
        mu -= step;
        if (it == 29)
            throw std::runtime_error("solve_full: Newton did not converge");
    }
    linop::ProjectedSystem S(ctx, BubbleParams::origin(mu));
    auto sol = nonlinear::contraction_solve(S, eps, ups.potential(), opt);
    if (!sol.converged) throw std::runtime_error("solve_full: final contraction failed");
    res.b = BubbleParams::origin(mu);
    res.c_norm = std::fabs(sol.c[0]);
    auto rrep = nonlinear::residual_check(S, sol, ups.potential());
    res.residual_y = rrep.residual_y;
    res.phi_over_u = sol.phi_norm;  // the X norm is exactly sup |phi|/U_b
    res.j_eps = energy(S, sol, ups.potential());
    // stationarity of the reduced energy at the converged point (Richardson FD)
    auto j_at = [&](double m) {
        linop::ProjectedSystem Sm(ctx, BubbleParams::origin(m));
        auto sm = nonlinear::contraction_solve(Sm, eps, ups.potential(), opt);
        if (!sm.converged) throw std::runtime_error("solve_full: FD stencil failed");
        return energy(Sm, sm, ups.potential());
    };
    const double hj = 3e-3;
    double d1 = (j_at(mu + hj) - j_at(mu - hj)) / (2.0 * hj);
    double d2 = (j_at(mu + 0.5 * hj) - j_at(mu - 0.5 * hj)) / hj;
    res.grad_j_fd = std::fabs((4.0 * d2 - d1) / 3.0);
    res.sol = std::move(sol);
    return res;
}

}  // namespace choquard::reduction
