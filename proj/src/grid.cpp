#include "choquard/grid.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "choquard/special.hpp"

namespace choquard {

double jp(double r) { return std::sqrt(1.0 + r * r); }

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
    const unsigned char* p = (const unsigned char*)data;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::shared_ptr<const RadialGrid> RadialGrid::make(int n, double scale,
                                                   const std::string& map_kind) {
    if (n < 8) throw std::invalid_argument("RadialGrid: n >= 8 required");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("RadialGrid: positive finite scale required");
    if (map_kind != "rational")
        throw std::invalid_argument("RadialGrid: unknown map '" + map_kind + "'");
    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    auto q = gauss_legendre(n);
    g->t_.resize(n);
    g->wt_.resize(n);
    g->r_.resize(n);
    g->wr_.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = 0.5 * (q.nodes[i] + 1.0);
        double w = 0.5 * q.weights[i];
        g->t_[i] = t;
        g->wt_[i] = w;
        g->r_[i] = scale * t / (1.0 - t);
        g->wr_[i] = w * scale / ((1.0 - t) * (1.0 - t));
    }
    g->scale_ = scale;
    g->map_kind_ = map_kind;
    std::uint64_t h = fnv1a(&n, sizeof n);
    h = fnv1a(&scale, sizeof scale, h);
    h = fnv1a(map_kind.data(), map_kind.size(), h);
    h = fnv1a(g->r_.data(), g->r_.size() * sizeof(double), h);
    g->hash_ = h;
    return g;
}

double RadialGrid::t_of_r(double r) const { return r / (scale_ + r); }

SphereRule SphereRule::make(int N, int degree) {
    if (N < 2) throw std::invalid_argument("SphereRule: N >= 2");
    if (degree < 1) throw std::invalid_argument("SphereRule: degree >= 1");
    SphereRule s;
    s.N = N;
    s.degree = degree;
    const int npolar = (degree + 2) / 2;
    const int naz = degree + 1;

    // polar rules: t_k = cos(theta_k), weight (1 - t^2)^{(N-2-k)/2}, k = 1..N-2
    std::vector<Quadrature1D> polar;
    for (int k = 1; k <= N - 2; ++k) {
        double g = 0.5 * (N - 2 - k);
        polar.push_back(gauss_jacobi(npolar, g, g));
    }

    std::vector<int> idx(polar.size(), 0);
    const double two_pi = 2.0 * M_PI;
    while (true) {
        double wpolar = 1.0;
        for (std::size_t k = 0; k < polar.size(); ++k) wpolar *= polar[k].weights[idx[k]];
        for (int a = 0; a < naz; ++a) {
            double phi = two_pi * (a + 0.5) / naz;
            std::vector<double> x(N);
            double sinprod = 1.0;
            for (std::size_t k = 0; k < polar.size(); ++k) {
                double c = polar[k].nodes[idx[k]];
                x[k] = sinprod * c;
                sinprod *= std::sqrt(std::max(0.0, 1.0 - c * c));
            }
            x[N - 2] = sinprod * std::cos(phi);
            x[N - 1] = sinprod * std::sin(phi);
            s.directions.push_back(std::move(x));
            s.weights.push_back(wpolar * two_pi / naz);
        }
        // advance the multi-index
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < (int)polar[k].nodes.size()) break;
            idx[k] = 0;
        }
        if (k == idx.size()) break;
        if (idx.empty()) break;
    }
    return s;
}

GridFunction GridFunction::zeros(std::shared_ptr<const RadialGrid> g, double decay) {
    GridFunction f;
    f.grid = std::move(g);
    f.decay_exponent = decay;
    f.values.assign(f.grid->size(), 0.0);
    return f;
}

double GridFunction::eval(double r) const {
    const auto& rs = grid->r();
    const auto& ts = grid->t();
    const int n = (int)rs.size();
    if (r >= rs[n - 1]) {
        // power-law tail using the declared decay exponent
        if (values[n - 1] == 0.0) return 0.0;
        double q = decay_exponent;
        return values[n - 1] * std::pow(jp(rs[n - 1]) / jp(r), q);
    }
    double t = grid->t_of_r(r);
    // locate bracketing node
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (ts[mid] <= t) lo = mid; else hi = mid;
    }
    // 6-point Lagrange in the mapped coordinate
    const int stencil = 6;
    int i0 = lo - stencil / 2 + 1;
    if (i0 < 0) i0 = 0;
    if (i0 + stencil > n) i0 = n - stencil;
    double acc = 0.0;
    for (int a = 0; a < stencil; ++a) {
        double lag = 1.0;
        for (int c = 0; c < stencil; ++c) {
            if (c == a) continue;
            lag *= (t - ts[i0 + c]) / (ts[i0 + a] - ts[i0 + c]);
        }
        acc += values[i0 + a] * lag;
    }
    return acc;
}

bool GridFunction::tail_consistent() const {
    const int n = size();
    if (n < 4) return true;
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::fabs(v));
    if (sup == 0.0) return true;
    for (int i = n - 3; i < n; ++i) {
        double bound = 10.0 * std::pow(jp(grid->r()[i]), -decay_exponent) * sup;
        if (std::fabs(values[i]) > bound) return false;
    }
    return true;
}

double integrate_radial(const ProblemParams& pp, const GridFunction& f) {
    if (f.decay_exponent <= pp.N)
        throw std::domain_error("integrate_radial: decay exponent must exceed N");
    const auto& r = f.grid->r();
    const auto& w = f.grid->weights();
    double acc = 0.0;
    for (int i = f.size() - 1; i >= 0; --i)
        acc += w[i] * std::pow(r[i], pp.N - 1) * f.values[i];
    return pp.sphere_area() * acc;
}

double integrate_full(const ProblemParams& pp, const FullGridFunction& f) {
    if (f.decay_exponent <= pp.N)
        throw std::domain_error("integrate_full: decay exponent must exceed N");
    const auto& r = f.grid->r();
    const auto& w = f.grid->weights();
    const int nd = f.n_dir();
    double acc = 0.0;
    for (int i = f.n_radial() - 1; i >= 0; --i) {
        double shell = 0.0;
        for (int d = 0; d < nd; ++d) shell += f.sphere->weights[d] * f.at(i, d);
        acc += w[i] * std::pow(r[i], pp.N - 1) * shell;
    }
    return acc;
}

namespace {

double norm_weight(const ProblemParams& pp, double dist, double mu, NormKind kind) {
    int e = (kind == NormKind::X) ? pp.N - 2 : pp.N + 2;
    double pre = std::pow(mu, 0.5 * e);
    return pre * std::pow(jp(dist / mu), e);
}

}  // namespace

double weighted_sup_norm(const ProblemParams& pp, const GridFunction& f,
                         const BubbleParams& b, NormKind kind) {
    b.validate(pp.N);
    double xin = 0.0;
    for (double c : b.xi) xin += c * c;
    xin = std::sqrt(xin);
    double best = 0.0;
    const auto& r = f.grid->r();
    for (int i = 0; i < f.size(); ++i) {
        // for a radial field the shell sup of the weight sits at distance r + |xi|
        double v = norm_weight(pp, r[i] + xin, b.mu, kind) * std::fabs(f.values[i]);
        if (v > best) best = v;
    }
    return best;
}

double weighted_sup_norm(const ProblemParams& pp, const FullGridFunction& f,
                         const BubbleParams& b, NormKind kind) {
    b.validate(pp.N);
    std::vector<double> xi(pp.N, 0.0);
    for (std::size_t c = 0; c < b.xi.size(); ++c) xi[c] = b.xi[c];
    double best = 0.0;
    const auto& r = f.grid->r();
    const int nd = f.n_dir();
    for (int i = 0; i < f.n_radial(); ++i) {
        for (int d = 0; d < nd; ++d) {
            double dist2 = 0.0;
            for (int c = 0; c < pp.N; ++c) {
                double dx = r[i] * f.sphere->directions[d][c] - xi[c];
                dist2 += dx * dx;
            }
            double v = norm_weight(pp, std::sqrt(dist2), b.mu, kind) * std::fabs(f.at(i, d));
            if (v > best) best = v;
        }
    }
    return best;
}

}  // namespace choquard
