#include "choquard/riesz.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "choquard/special.hpp"

namespace choquard::riesz {

namespace {

double sphere_area_dim(int d) {  // |S^{d-1}|
    return 2.0 * std::pow(M_PI, 0.5 * d) / gamma_fn(0.5 * d);
}

struct AngularRules {
    Quadrature1D far;        // Gauss-Jacobi(g, g), 48 pts
    Quadrature1D left;       // Gauss-Jacobi(0, g), 24 pts, for t in (-1, 1-u_b)
    Quadrature1D panel;      // plain Gauss, 16 pts
    Quadrature1D end;        // Gauss-Jacobi(0, g), 16 pts, final u-panel
    double g = 0.0;
};

const AngularRules& rules_for(int N) {
    static thread_local int cached_N = -1;
    static thread_local AngularRules R;
    if (cached_N != N) {
        R.g = 0.5 * (N - 3);
        R.far = gauss_jacobi(64, R.g, R.g);
        R.left = gauss_jacobi(32, 0.0, R.g);
        R.panel = gauss_legendre(16);
        R.end = gauss_jacobi(16, 0.0, R.g);
        cached_N = N;
    }
    return R;
}

// int over u in (0, len) of (d2 + 2 rs u)^{-lam/2} (2-u)^g u^g with the u^g
// endpoint handled by a one-sided Jacobi rule
double end_panel(const Quadrature1D& q, double gexp, double len, double d2, double rs,
                 double lam, double g) {
    double acc = 0.0;
    double half = 0.5 * len;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        double u = half * (q.nodes[i] + 1.0);
        acc += q.weights[i] * std::pow(d2 + 2.0 * rs * u, -0.5 * lam) * std::pow(2.0 - u, g);
    }
    return acc * std::pow(half, 1.0 + gexp);
}

double angular_integral(int N, double lam, double r, double s) {
    const AngularRules& R = rules_for(N);
    const double g = R.g;
    const double d2 = (r - s) * (r - s);
    const double rs = r * s;
    if (d2 >= 0.25 * rs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < R.far.nodes.size(); ++i) {
            double q = r * r + s * s - 2.0 * rs * R.far.nodes[i];
            acc += R.far.weights[i] * std::pow(q, -0.5 * lam);
        }
        return acc;
    }
    const double u_b = 0.5;
    double tot = 0.0;
    // smooth part t in (-1, 1-u_b): the (1+t)^g endpoint sits in the rule,
    // (1-t)^g stays in the integrand
    {
        double half = 0.5 * (2.0 - u_b);
        double acc = 0.0;
        for (std::size_t i = 0; i < R.left.nodes.size(); ++i) {
            double t = -1.0 + half * (R.left.nodes[i] + 1.0);
            double q = d2 + 2.0 * rs * (1.0 - t);
            acc += R.left.weights[i] * std::pow(q, -0.5 * lam) * std::pow(1.0 - t, g);
        }
        tot += acc * std::pow(half, 1.0 + g);
    }
    if (r == s) {
        // single endpoint panel with combined exponent g - lam/2
        double ge = g - 0.5 * lam;
        if (ge <= -1.0)
            throw std::domain_error("radial_kernel_entry: diagonal diverges for lambda >= N-1");
        Quadrature1D q = gauss_jacobi(24, 0.0, ge);
        double half = 0.5 * u_b;
        double acc = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            double u = half * (q.nodes[i] + 1.0);
            acc += q.weights[i] * std::pow(2.0 * rs, -0.5 * lam) * std::pow(2.0 - u, g);
        }
        tot += acc * std::pow(half, 1.0 + ge);
        return tot;
    }
    // geometric panels from u_b down toward the scale where d2 dominates
    double u_last = std::min(0.3 * d2 / (2.0 * rs), u_b);
    double hi = u_b;
    while (hi * 0.15 > u_last) {
        double lo = hi * 0.15;
        double half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < R.panel.nodes.size(); ++i) {
            double u = lo + half * (R.panel.nodes[i] + 1.0);
            tot += half * R.panel.weights[i] * std::pow(d2 + 2.0 * rs * u, -0.5 * lam) *
                   std::pow(u * (2.0 - u), g);
        }
        hi = lo;
    }
    if (hi > u_last) {
        double half = 0.5 * (hi - u_last);
        for (std::size_t i = 0; i < R.panel.nodes.size(); ++i) {
            double u = u_last + half * (R.panel.nodes[i] + 1.0);
            tot += half * R.panel.weights[i] * std::pow(d2 + 2.0 * rs * u, -0.5 * lam) *
                   std::pow(u * (2.0 - u), g);
        }
    }
    tot += end_panel(R.end, g, u_last, d2, rs, lam, g);
    return tot;
}

}  // namespace

double radial_kernel_entry(const ProblemParams& pp, double lambda, double r, double s) {
    if (!(r > 0.0) || !(s > 0.0))
        throw std::domain_error("radial_kernel_entry: r, s > 0 required");
    if (!(lambda > 0.0) || !(lambda < pp.N))
        throw std::domain_error("radial_kernel_entry: lambda in (0, N) required");
    return sphere_area_dim(pp.N - 1) * angular_integral(pp.N, lambda, r, s);
}

double newton_kernel_closed(const ProblemParams& pp, double r, double s) {
    return pp.sphere_area() * std::pow(std::max(r, s), 2.0 - pp.N);
}

// ---------------------------------------------------------------------------

RadialKernel RadialKernel::assemble(const ProblemParams& pp, double lambda,
                                    std::shared_ptr<const RadialGrid> grid, int jobs) {
    if (!(lambda > 0.0) || !(lambda < pp.N))
        throw std::invalid_argument("RadialKernel: lambda in (0, N) required");
    RadialKernel K;
    K.N_ = pp.N;
    K.lambda_ = lambda;
    K.grid_ = grid;
    const int n = grid->size();
    K.rows_ = Matrix(n, n);
    const bool closed = (lambda == pp.N - 2.0);
    // Once lambda >= N-1 the kernel column near the origin spikes like
    // r^{-lambda}, and moments of that spike drown the synthesis in roundoff.
    // The symmetrized kernel K (rs)^{lambda/2} stays log-bounded; its
    // (rs)^{-lambda/2} factor moves into the effective weights.
    const bool symmetrized = lambda >= pp.N - 1.0;

    // Modes above ~160 carry nothing for smooth mapped fields (their Legendre
    // coefficients sit at the roundoff floor); truncating caps the panel order
    // needed to track P_k's oscillation in the moment integrals.
    const int kmax = std::min(n, 160);
    const int nq = 32;

    // Legendre basis values at the grid nodes
    std::vector<double> Pn((std::size_t)kmax * n);
    shifted_legendre(kmax, grid->t().data(), n, Pn.data());

    const auto panel_rule = gauss_legendre(nq);
    const double SN1 = pp.sphere_area();

    auto do_rows = [&](int lo, int hi) {
        std::vector<double> M(kmax), P((std::size_t)kmax * nq), xs(nq), ws(nq), kv(nq);
        for (int i = lo; i < hi; ++i) {
            std::fill(M.begin(), M.end(), 0.0);
            const double ti = grid->t()[i];
            const double ri = grid->r()[i];
            // panel edges graded toward t_i, width-capped everywhere else
            std::vector<double> edges = {0.0, 1.0};
            for (int side = -1; side <= 1; side += 2) {
                double d = (side < 0) ? ti : 1.0 - ti;
                for (double x = d; x > 1e-12; x *= 0.15) edges.push_back(ti + side * x);
            }
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            const double wmax = 0.125;
            std::vector<double> fine;
            fine.push_back(edges.front());
            for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                double a = edges[e], b = edges[e + 1];
                int parts = std::max(1, (int)std::ceil((b - a) / wmax));
                for (int s = 1; s <= parts; ++s) fine.push_back(a + (b - a) * s / parts);
            }
            for (std::size_t e = 0; e + 1 < fine.size(); ++e) {
                double a = fine[e], b = fine[e + 1];
                if (b - a < 1e-15) continue;
                double half = 0.5 * (b - a);
                for (int q = 0; q < nq; ++q) {
                    xs[q] = a + half * (panel_rule.nodes[q] + 1.0);
                    ws[q] = half * panel_rule.weights[q];
                    double s = grid->scale() * xs[q] / (1.0 - xs[q]);
                    kv[q] = closed ? SN1 * std::pow(std::max(ri, s), 2.0 - pp.N)
                                   : sphere_area_dim(pp.N - 1) *
                                         angular_integral(pp.N, lambda, ri, s);
                    if (symmetrized) kv[q] *= std::pow(ri * s, 0.5 * lambda);
                }
                shifted_legendre(kmax, xs.data(), nq, P.data());
                for (int k = 0; k < kmax; ++k) {
                    const double* Pk = P.data() + (std::size_t)k * nq;
                    double acc = 0.0;
                    for (int q = 0; q < nq; ++q) acc += ws[q] * kv[q] * Pk[q];
                    M[k] += acc;
                }
            }
            // synthesis: K[i][j] = sum_k (2k+1) M_k P_k(t_j), un-symmetrized
            double* rowi = K.rows_.row(i);
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < kmax; ++k)
                    acc += (2.0 * k + 1.0) * M[k] * Pn[(std::size_t)k * n + j];
                rowi[j] = symmetrized
                              ? acc * std::pow(ri * grid->r()[j], -0.5 * lambda)
                              : acc;
            }
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        do_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + jobs - 1) / jobs;
        for (int w = 0; w < jobs; ++w) {
            int lo = w * chunk, hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(do_rows, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    K.colw_.resize(n);
    for (int j = 0; j < n; ++j)
        K.colw_[j] = std::pow(grid->r()[j], pp.N - 1.0) * grid->weights()[j];
    return K;
}

std::vector<double> RadialKernel::apply(const std::vector<double>& f) const {
    const int n = (int)colw_.size();
    if ((int)f.size() != n) throw std::invalid_argument("RadialKernel::apply: size mismatch");
    std::vector<double> wf(n), out(n);
    for (int j = 0; j < n; ++j) wf[j] = f[j] * colw_[j];
    for (int i = 0; i < n; ++i) {
        const double* ri = rows_.row(i);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += ri[j] * wf[j];
        out[i] = acc;
    }
    return out;
}

// ---- cache format: "RKRN" | version u32 | N u32 | lambda f64 |
//      grid hash 32 bytes | n u32 | n*n f64 row-major (little endian) ----

namespace {

void hash32(const RadialGrid& g, unsigned char out[32]) {
    std::uint64_t h = g.hash();
    for (int k = 0; k < 4; ++k) {
        std::uint64_t v = h ^ (0x9e3779b97f4a7c15ULL * (k + 1));
        v ^= v >> 33;
        v *= 0xff51afd7ed558ccdULL;
        v ^= v >> 33;
        std::memcpy(out + 8 * k, &v, 8);
    }
}

}  // namespace

std::string RadialKernel::cache_name(const ProblemParams& pp, double lambda,
                                     const RadialGrid& grid) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "rkrn-N%d-lam%.17g-%016llx.rkrn", pp.N, lambda,
                  (unsigned long long)grid.hash());
    return buf;
}

void RadialKernel::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("RadialKernel::save: cannot open " + path);
    f.write("RKRN", 4);
    std::uint32_t ver = 1, n = (std::uint32_t)grid_->size(), N = (std::uint32_t)N_;
    f.write((const char*)&ver, 4);
    f.write((const char*)&N, 4);
    f.write((const char*)&lambda_, 8);
    unsigned char gh[32];
    hash32(*grid_, gh);
    f.write((const char*)gh, 32);
    f.write((const char*)&n, 4);
    f.write((const char*)rows_.data(), (std::streamsize)((std::size_t)n * n * 8));
    if (!f) throw std::runtime_error("RadialKernel::save: write failed");
}

RadialKernel RadialKernel::load(const std::string& path, const ProblemParams& pp,
                                std::shared_ptr<const RadialGrid> grid) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("RadialKernel::load: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (std::memcmp(magic, "RKRN", 4) != 0)
        throw std::runtime_error("RadialKernel::load: bad magic");
    std::uint32_t ver = 0, N = 0, n = 0;
    double lambda = 0.0;
    f.read((char*)&ver, 4);
    f.read((char*)&N, 4);
    f.read((char*)&lambda, 8);
    unsigned char gh[32], want[32];
    f.read((char*)gh, 32);
    f.read((char*)&n, 4);
    hash32(*grid, want);
    if (ver != 1 || (int)N != pp.N || (int)n != grid->size() ||
        std::memcmp(gh, want, 32) != 0)
        throw std::runtime_error("RadialKernel::load: cache/grid mismatch");
    RadialKernel K;
    K.N_ = pp.N;
    K.lambda_ = lambda;
    K.grid_ = grid;
    K.rows_ = Matrix(n, n);
    f.read((char*)K.rows_.data(), (std::streamsize)((std::size_t)n * n * 8));
    if (!f) throw std::runtime_error("RadialKernel::load: truncated file");
    K.colw_.resize(n);
    for (std::uint32_t j = 0; j < n; ++j)
        K.colw_[j] = std::pow(grid->r()[j], pp.N - 1.0) * grid->weights()[j];
    return K;
}

RadialKernel RadialKernel::load_or_assemble(const ProblemParams& pp, double lambda,
                                            std::shared_ptr<const RadialGrid> grid,
                                            const std::string& cache_dir, int jobs) {
    namespace fs = std::filesystem;
    if (cache_dir.empty()) return assemble(pp, lambda, grid, jobs);
    fs::create_directories(cache_dir);
    fs::path p = fs::path(cache_dir) / cache_name(pp, lambda, *grid);
    if (fs::exists(p)) {
        try {
            RadialKernel K = load(p.string(), pp, grid);
            if (K.lambda() == lambda) return K;
        } catch (const std::exception&) { /* stale cache: fall through */ }
    }
    RadialKernel K = assemble(pp, lambda, grid, jobs);
    fs::path tmp = p;
    tmp += ".tmp";
    K.save(tmp.string());
    fs::rename(tmp, p);
    return K;
}

// ---------------------------------------------------------------------------

GridFunction riesz_radial(const ProblemParams& pp, const RadialKernel& k,
                          const GridFunction& f) {
    if (f.decay_exponent <= pp.N)
        throw std::domain_error("riesz_radial: input decay must exceed N");
    if (f.grid->hash() != k.grid()->hash())
        throw std::invalid_argument("riesz_radial: function grid differs from kernel grid");
    GridFunction out;
    out.grid = f.grid;
    out.values = k.apply(f.values);
    out.decay_exponent = k.lambda();
    return out;
}

GridFunction newton_potential(const ProblemParams& pp, const RadialKernel& newton_k,
                              const GridFunction& g) {
    if (newton_k.lambda() != pp.N - 2.0)
        throw std::invalid_argument("newton_potential: kernel must carry lambda = N-2");
    if (g.decay_exponent <= pp.N)
        throw std::domain_error("newton_potential: input decay must exceed N");
    GridFunction out;
    out.grid = g.grid;
    out.values = newton_k.apply(g.values);
    const double c = 1.0 / pp.newton_normalizer();
    for (double& v : out.values) v *= c;
    out.decay_exponent = pp.N - 2.0;
    return out;
}

std::vector<double> riesz_full(const ProblemParams& pp, const FullGridFunction& f,
                               double lambda, const std::vector<std::vector<double>>& probes) {
    if (f.n_radial() > 32 || f.n_dir() > 128)
        throw std::invalid_argument(
            "riesz_full: direct convolution is restricted to grids of at most "
            "32 radial nodes x 128 directions; use riesz_radial for production work");
    const int nd = f.n_dir();
    std::vector<double> w = full_weights(pp, *f.grid, *f.sphere);
    // closed-form companion: int |z|^{-lambda} e^{-|z|^2} dz
    const double gauss_mass = 0.5 * pp.sphere_area() * gamma_fn(0.5 * (pp.N - lambda));
    std::vector<double> out;
    out.reserve(probes.size());
    for (const auto& x : probes) {
        if ((int)x.size() != pp.N) throw std::invalid_argument("riesz_full: probe length != N");
        // probes must sit on grid nodes so f(x) is available for the
        // singularity subtraction
        std::size_t at = (std::size_t)-1;
        double probe_r = 0.0;
        for (int c = 0; c < pp.N; ++c) probe_r += x[c] * x[c];
        probe_r = std::sqrt(probe_r);
        for (int i = 0; i < f.n_radial() && at == (std::size_t)-1; ++i) {
            if (std::fabs(f.grid->r()[i] - probe_r) > 1e-9 * (1.0 + probe_r)) continue;
            for (int d = 0; d < nd; ++d) {
                double dist2 = 0.0;
                for (int c = 0; c < pp.N; ++c) {
                    double dy = x[c] - f.grid->r()[i] * f.sphere->directions[d][c];
                    dist2 += dy * dy;
                }
                if (dist2 < 1e-18 * (1.0 + probe_r * probe_r)) {
                    at = (std::size_t)i * nd + d;
                    break;
                }
            }
        }
        if (at == (std::size_t)-1)
            throw std::invalid_argument("riesz_full: probes must coincide with grid nodes");
        const double fx = f.values[at];
        double acc = fx * gauss_mass;
        for (int i = 0; i < f.n_radial(); ++i) {
            double rv = f.grid->r()[i];
            for (int d = 0; d < nd; ++d) {
                std::size_t idx = (std::size_t)i * nd + d;
                if (idx == at) continue;
                double dist2 = 0.0;
                for (int c = 0; c < pp.N; ++c) {
                    double dy = rv * f.sphere->directions[d][c] - x[c];
                    dist2 += dy * dy;
                }
                acc += w[idx] * std::pow(dist2, -0.5 * lambda) *
                       (f.values[idx] - fx * std::exp(-dist2));
            }
        }
        out.push_back(acc);
    }
    return out;
}

Matrix full_kernel_matrix(const ProblemParams& pp, const RadialGrid& grid,
                          const SphereRule& sphere, double lambda) {
    const int nr = grid.size(), nd = (int)sphere.directions.size();
    const std::size_t P = (std::size_t)nr * nd;
    std::vector<double> w = full_weights(pp, grid, sphere);
    std::vector<std::vector<double>> pts(P, std::vector<double>(pp.N));
    for (int i = 0; i < nr; ++i)
        for (int d = 0; d < nd; ++d)
            for (int c = 0; c < pp.N; ++c)
                pts[(std::size_t)i * nd + d][c] = grid.r()[i] * sphere.directions[d][c];
    Matrix K(P, P);
    for (std::size_t a = 0; a < P; ++a) {
        for (std::size_t b = 0; b < P; ++b) {
            if (a == b) {
                double h = std::pow(w[a] / pp.omega_N, 1.0 / pp.N);
                K(a, b) = (pp.N / (pp.N - lambda)) * std::pow(h, -lambda);
                continue;
            }
            double dist2 = 0.0;
            for (int c = 0; c < pp.N; ++c) {
                double d = pts[a][c] - pts[b][c];
                dist2 += d * d;
            }
            K(a, b) = std::pow(dist2, -0.5 * lambda);
        }
    }
    return K;
}

std::vector<double> full_weights(const ProblemParams& pp, const RadialGrid& grid,
                                 const SphereRule& sphere) {
    const int nr = grid.size(), nd = (int)sphere.directions.size();
    std::vector<double> w((std::size_t)nr * nd);
    for (int i = 0; i < nr; ++i) {
        double shell = grid.weights()[i] * std::pow(grid.r()[i], pp.N - 1.0);
        for (int d = 0; d < nd; ++d) w[(std::size_t)i * nd + d] = shell * sphere.weights[d];
    }
    return w;
}

}  // namespace choquard::riesz
