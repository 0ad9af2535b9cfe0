#include "choquard/kcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "choquard/grid.hpp"
#include "choquard/special.hpp"

namespace choquard::kcheck {

void PotentialSpec::validate() const {
    if (N < 2) throw std::invalid_argument("PotentialSpec: N >= 2");
    if (!(a0 > 0.0)) throw std::invalid_argument("PotentialSpec: baseline a0 must be positive");
    for (const auto& b : bumps) {
        if (!(b.width > 0.0)) throw std::invalid_argument("PotentialSpec: bump width > 0");
        if (!b.center.empty() && (int)b.center.size() != N)
            throw std::invalid_argument("PotentialSpec: bump center must have length N");
        if (b.kind == BumpKind::rational && !(b.power > 0.5 * N))
            throw std::invalid_argument("PotentialSpec: rational power must exceed N/2");
        if (b.kind == BumpKind::ring && !(b.radius >= 0.0))
            throw std::invalid_argument("PotentialSpec: ring radius must be nonnegative");
        if (!std::isfinite(b.amplitude))
            throw std::invalid_argument("PotentialSpec: bump amplitude must be finite");
    }
}

bool PotentialSpec::is_radial() const {
    for (const auto& b : bumps)
        for (double c : b.center)
            if (c != 0.0) return false;
    return true;
}

double PotentialSpec::sup_bound() const {
    double s = a0;
    for (const auto& b : bumps) s += std::fabs(b.amplitude);
    return s;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

namespace {

struct Profile {  // value and derivatives of the radial profile f(rho)
    double f, df, d2f;
};

Profile ring_profile(const Bump& b, double rho) {
    double z = (rho - b.radius) / b.width;
    double e = b.amplitude * std::exp(-z * z);
    double fz = -2.0 * z / b.width;
    return {e, e * fz, e * (fz * fz - 2.0 / (b.width * b.width))};
}

}  // namespace

KEval eval_k(const PotentialSpec& spec, std::span<const double> x) {
    spec.validate();
    const int N = spec.N;
    if ((int)x.size() != N) throw std::invalid_argument("eval_k: point length != N");
    KEval out;
    out.value = spec.a0;
    out.grad.assign(N, 0.0);
    out.hess = Matrix(N, N);
    std::vector<double> d(N);
    for (const auto& b : spec.bumps) {
        double rho2 = 0.0;
        for (int c = 0; c < N; ++c) {
            d[c] = x[c] - (b.center.empty() ? 0.0 : b.center[c]);
            rho2 += d[c] * d[c];
        }
        const double s2 = b.width * b.width;
        if (b.kind == BumpKind::gaussian) {
            double e = b.amplitude * std::exp(-rho2 / s2);
            out.value += e;
            double g1 = -2.0 / s2 * e;  // d/d(rho^2) * 2
            for (int c = 0; c < N; ++c) out.grad[c] += g1 * d[c];
            for (int c = 0; c < N; ++c) {
                out.hess(c, c) += g1;
                for (int c2 = 0; c2 < N; ++c2)
                    out.hess(c, c2) += (4.0 / (s2 * s2)) * e * d[c] * d[c2];
            }
            out.lap += g1 * N + (4.0 / (s2 * s2)) * e * rho2;
        } else if (b.kind == BumpKind::rational) {
            double base = 1.0 + rho2 / s2;
            double g = b.amplitude * std::pow(base, -b.power);
            double gp = -(b.power / s2) * b.amplitude * std::pow(base, -b.power - 1.0);
            double gpp = (b.power * (b.power + 1.0) / (s2 * s2)) * b.amplitude *
                         std::pow(base, -b.power - 2.0);
            out.value += g;
            for (int c = 0; c < N; ++c) out.grad[c] += 2.0 * gp * d[c];
            for (int c = 0; c < N; ++c) {
                out.hess(c, c) += 2.0 * gp;
                for (int c2 = 0; c2 < N; ++c2) out.hess(c, c2) += 4.0 * gpp * d[c] * d[c2];
            }
            out.lap += 2.0 * N * gp + 4.0 * gpp * rho2;
        } else {
            double rho = std::sqrt(rho2);
            Profile pf = ring_profile(b, rho);
            out.value += pf.f;
            if (rho < 1e-14) {
                // the shell profile is not differentiable at its center
                if (std::fabs(pf.df) > 1e-300)
                    out.lap = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            for (int c = 0; c < N; ++c) out.grad[c] += pf.df * d[c] / rho;
            for (int c = 0; c < N; ++c) {
                out.hess(c, c) += pf.df / rho;
                for (int c2 = 0; c2 < N; ++c2)
                    out.hess(c, c2) += (pf.d2f - pf.df / rho) * d[c] * d[c2] / rho2;
            }
            out.lap += pf.d2f + (N - 1.0) * pf.df / rho;
        }
    }
    return out;
}

double eval_k_value(const PotentialSpec& spec, std::span<const double> x) {
    const int N = spec.N;
    double v = spec.a0;
    for (const auto& b : spec.bumps) {
        double rho2 = 0.0;
        for (int c = 0; c < N; ++c) {
            double dc = x[c] - (b.center.empty() ? 0.0 : b.center[c]);
            rho2 += dc * dc;
        }
        const double s2 = b.width * b.width;
        if (b.kind == BumpKind::gaussian) {
            v += b.amplitude * std::exp(-rho2 / s2);
        } else if (b.kind == BumpKind::rational) {
            v += b.amplitude * std::pow(1.0 + rho2 / s2, -b.power);
        } else {
            double z = (std::sqrt(rho2) - b.radius) / b.width;
            v += b.amplitude * std::exp(-z * z);
        }
    }
    return v;
}

double eval_k_radial(const PotentialSpec& spec, double r) {
    if (!spec.is_radial())
        throw std::invalid_argument("eval_k_radial: potential is not radial");
    std::vector<double> x(spec.N, 0.0);
    x[0] = r;
    return eval_k_value(spec, x);
}

namespace {

// Newton iteration on grad k from one start; returns true on convergence to a
// genuine critical point (flat tail regions are rejected by the caller's
// Hessian-scale filter).
bool newton_refine(const PotentialSpec& spec, std::vector<double>& x, double box,
                   double gtol) {
    for (int it = 0; it < 80; ++it) {
        KEval e = eval_k(spec, x);
        double gn = 0.0;
        for (double g : e.grad) gn += g * g;
        gn = std::sqrt(gn);
        if (gn <= gtol) return true;
        std::vector<double> step;
        try {
            step = LuFactor(e.hess).solve(e.grad);
        } catch (const std::exception&) {
            return false;
        }
        // line-search safeguard on |grad|
        double lambda = 1.0;
        for (int ls = 0; ls < 30; ++ls) {
            std::vector<double> xn(x.size());
            for (std::size_t c = 0; c < x.size(); ++c) xn[c] = x[c] - lambda * step[c];
            KEval en = eval_k(spec, xn);
            double gn2 = 0.0;
            for (double g : en.grad) gn2 += g * g;
            if (std::sqrt(gn2) < gn) {
                x = xn;
                break;
            }
            lambda *= 0.5;
            if (ls == 29) return false;
        }
        for (double c : x)
            if (std::fabs(c) > 4.0 * box) return false;
    }
    return false;
}

double splitmix(unsigned long long& s) {
    s += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return (double)(z >> 11) / 9007199254740992.0;
}

}  // namespace

bool AssumptionReport::all_pass() const {
    return k0 == Verdict::pass && k1 == Verdict::pass && k2 == Verdict::pass &&
           k3 == Verdict::pass && k4 == Verdict::pass;
}

AssumptionReport check_assumptions(const PotentialSpec& spec, double box_halfwidth,
                                   int multistart, unsigned seed) {
    spec.validate();
    const int N = spec.N;
    AssumptionReport rep;
    rep.parity = (N % 2 == 0) ? 1 : -1;

    // make sure the box clears every bump center
    for (const auto& b : spec.bumps)
        for (double c : b.center)
            box_halfwidth = std::max(box_halfwidth, 2.0 * std::fabs(c) + 4.0 * b.width);

    // ---- (k.1): structural regularity of the closed-form families ----
    rep.k1 = Verdict::pass;
    for (const auto& b : spec.bumps)
        if (b.kind == BumpKind::ring && b.radius > 0.0) {
            rep.k1 = Verdict::fail;
            rep.notes += "ring bump gradient is discontinuous at the shell center; ";
        }

    // ---- (k.0): positivity and boundedness ----
    unsigned long long rng = seed;
    double inf_k = spec.a0, sup_k = spec.a0;  // tail value
    std::vector<double> x(N), worst(N, 0.0);
    for (int trial = 0; trial < 4096; ++trial) {
        for (int c = 0; c < N; ++c) x[c] = (2.0 * splitmix(rng) - 1.0) * box_halfwidth;
        double v = eval_k_value(spec, x);
        if (v < inf_k) { inf_k = v; worst = x; }
        sup_k = std::max(sup_k, v);
    }
    // refine the sampled minimum with a few descent steps
    for (int it = 0; it < 200; ++it) {
        KEval e = eval_k(spec, worst);
        double gn = 0.0;
        for (double g : e.grad) gn += g * g;
        if (gn < 1e-26 || !std::isfinite(gn)) break;
        double step = 0.1 / std::sqrt(gn + 1.0);
        for (int c = 0; c < N; ++c) worst[c] -= step * e.grad[c];
        double v = eval_k_value(spec, worst);
        if (v < inf_k) inf_k = v;
    }
    rep.inf_k = inf_k;
    rep.sup_k = sup_k;
    rep.k0 = (inf_k > 0.0) ? Verdict::pass : Verdict::fail;

    // ---- (k.2): critical points, indices, index sum ----
    // constant potential: the critical set is all of R^N
    double grad_scale = 0.0, hess_scale = 0.0;
    for (int trial = 0; trial < 256; ++trial) {
        for (int c = 0; c < N; ++c) x[c] = (2.0 * splitmix(rng) - 1.0) * box_halfwidth;
        KEval e = eval_k(spec, x);
        for (double g : e.grad) grad_scale = std::max(grad_scale, std::fabs(g));
        for (int c = 0; c < N; ++c)
            for (int c2 = 0; c2 < N; ++c2)
                hess_scale = std::max(hess_scale, std::fabs(e.hess(c, c2)));
    }
    if (grad_scale <= 1e-14 * spec.sup_bound()) {
        rep.infinite_critical_set = true;
        rep.k2 = Verdict::fail;
        rep.notes += "gradient vanishes identically: Cr[k] is not finite; ";
    } else {
        const double gtol = 1e-11 * std::max(grad_scale, 1e-3);
        bool any_degenerate = false;
        // deterministic seeds first: bump centers and their pairwise midpoints,
        // then jitter around the centers, then uniform box samples
        std::vector<std::vector<double>> starts;
        auto center_of = [&](const Bump& b) {
            std::vector<double> c(N, 0.0);
            for (std::size_t q = 0; q < b.center.size(); ++q) c[q] = b.center[q];
            return c;
        };
        for (const auto& b : spec.bumps) starts.push_back(center_of(b));
        for (std::size_t a = 0; a < spec.bumps.size(); ++a)
            for (std::size_t b2 = a + 1; b2 < spec.bumps.size(); ++b2) {
                auto ca = center_of(spec.bumps[a]), cb = center_of(spec.bumps[b2]);
                for (int c = 0; c < N; ++c) ca[c] = 0.5 * (ca[c] + cb[c]);
                starts.push_back(ca);
            }
        for (int s = (int)starts.size(); s < multistart; ++s) {
            std::vector<double> xs(N);
            if (s % 2 == 0 && !spec.bumps.empty()) {
                const Bump& b = spec.bumps[(s / 2) % spec.bumps.size()];
                auto c = center_of(b);
                for (int q = 0; q < N; ++q)
                    xs[q] = c[q] + (2.0 * splitmix(rng) - 1.0) * 2.5 * b.width;
            } else {
                for (int q = 0; q < N; ++q)
                    xs[q] = (2.0 * splitmix(rng) - 1.0) * box_halfwidth;
            }
            starts.push_back(std::move(xs));
        }
        for (const auto& start : starts) {
            std::vector<double> xc = start;
            if (!newton_refine(spec, xc, box_halfwidth, gtol)) continue;
            {
                // reject flat-tail artifacts where every second derivative has
                // decayed away: no nondegenerate critical point lives there
                KEval e = eval_k(spec, xc);
                double h = 0.0;
                for (int c = 0; c < N; ++c)
                    for (int c2 = 0; c2 < N; ++c2) h = std::max(h, std::fabs(e.hess(c, c2)));
                if (h < 1e-6 * hess_scale) continue;
            }
            bool dup = false;
            for (const auto& cp : rep.critical_points) {
                double d2 = 0.0;
                for (int c = 0; c < N; ++c) d2 += (cp.x[c] - xc[c]) * (cp.x[c] - xc[c]);
                if (d2 < 1e-12) { dup = true; break; }
            }
            if (dup) continue;
            bool inside = true;
            for (double c : xc) inside = inside && std::fabs(c) <= box_halfwidth;
            if (!inside) continue;
            KEval e = eval_k(spec, xc);
            CriticalPoint cp;
            cp.x = xc;
            cp.lap = e.lap;
            Matrix evec;
            symmetric_eigen(e.hess, cp.hess_eigs, evec);
            double det = 1.0, scale = 0.0;
            for (double ev : cp.hess_eigs) {
                det *= ev;
                scale = std::max(scale, std::fabs(ev));
            }
            cp.degenerate = std::fabs(det) < 1e-10 * std::pow(std::max(scale, 1e-8), N);
            cp.index = cp.degenerate ? 0 : (det > 0 ? 1 : -1);
            cp.included = !cp.degenerate && cp.lap < 0.0;
            any_degenerate = any_degenerate || cp.degenerate;
            rep.critical_points.push_back(std::move(cp));
        }
        std::sort(rep.critical_points.begin(), rep.critical_points.end(),
                  [](const CriticalPoint& a, const CriticalPoint& b) {
                      return std::lexicographical_compare(a.x.begin(), a.x.end(),
                                                          b.x.begin(), b.x.end());
                  });
        rep.index_sum = 0;
        for (const auto& cp : rep.critical_points)
            if (cp.included) rep.index_sum += cp.index;
        if (any_degenerate) {
            rep.k2 = Verdict::inconclusive;
            rep.notes += "degenerate critical point found; ";
        } else if (rep.critical_points.empty()) {
            rep.k2 = Verdict::inconclusive;
            rep.notes += "no critical point found in the box; ";
        } else {
            rep.k2 = (rep.index_sum != rep.parity) ? Verdict::pass : Verdict::fail;
        }
    }

    // ---- (k.3): x . grad k < 0 outside a ball ----
    {
        SphereRule probe = SphereRule::make(N, 11);
        double rho = -1.0;
        for (double R = 0.25 * box_halfwidth; R <= 4.0 * box_halfwidth; R *= 1.3) {
            double worst_dir = -1e300, gmax = 0.0;
            for (const auto& dir : probe.directions) {
                for (int c = 0; c < N; ++c) x[c] = R * dir[c];
                KEval e = eval_k(spec, x);
                double xg = 0.0;
                for (int c = 0; c < N; ++c) {
                    xg += x[c] * e.grad[c];
                    gmax = std::max(gmax, std::fabs(e.grad[c]));
                }
                worst_dir = std::max(worst_dir, xg);
            }
            // a shell is "negative" when the sup is strictly below zero, or the
            // gradient has decayed past representable scale (analytic tail)
            bool negative_shell = (worst_dir < 0.0) || (gmax <= 1e-280);
            if (negative_shell) {
                if (rho < 0.0) rho = R;
            } else {
                rho = -1.0;  // reset: not yet past the last sign change
            }
        }
        rep.rho = rho;
        rep.k3 = rho > 0.0 ? Verdict::pass : Verdict::fail;
        if (spec.bumps.empty()) rep.k3 = Verdict::fail;  // constant: x.grad k = 0
    }

    // ---- (k.4): integral of x . grad k ----
    {
        // integrability is structural (gaussian/ring tails, rational with q > N/2
        // gives |x.grad k| ~ |x|^{-2q} in L^1); the sign comes from quadrature
        auto grid = RadialGrid::make(128, std::max(1.0, 0.25 * box_halfwidth));
        SphereRule sph = SphereRule::make(N, 11);
        double acc = 0.0;
        for (int i = 0; i < grid->size(); ++i) {
            double rshell = grid->r()[i];
            double shell = 0.0;
            for (std::size_t d = 0; d < sph.directions.size(); ++d) {
                for (int c = 0; c < N; ++c) x[c] = rshell * sph.directions[d][c];
                KEval e = eval_k(spec, x);
                double xg = 0.0;
                for (int c = 0; c < N; ++c) xg += x[c] * e.grad[c];
                shell += sph.weights[d] * xg;
            }
            acc += grid->weights()[i] * std::pow(rshell, N - 1.0) * shell;
        }
        rep.xgrad_integral = acc;
        if (spec.bumps.empty()) {
            rep.k4 = Verdict::fail;  // integral vanishes
        } else {
            rep.k4 = (acc < 0.0) ? Verdict::pass : Verdict::fail;
        }
    }

    return rep;
}

}  // namespace choquard::kcheck
