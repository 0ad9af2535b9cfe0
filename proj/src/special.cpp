#include "choquard/special.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace choquard {

namespace {

// Spouge coefficients c_k = (-1)^{k-1}/(k-1)! (a-k)^{k-1/2} e^{a-k},
// accumulated in long double; a = 17 keeps the theoretical bound near 4e-15.
constexpr int kSpougeA = 17;

const std::vector<long double>& spouge_coeffs() {
    static std::vector<long double> c = [] {
        std::vector<long double> v(kSpougeA);
        v[0] = std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
        long double fact = 1.0L;
        for (int k = 1; k < kSpougeA; ++k) {
            if (k > 1) fact *= -(k - 1);
            v[k] = std::pow((long double)(kSpougeA - k), k - 0.5L) *
                   std::exp((long double)(kSpougeA - k)) / fact;
        }
        return v;
    }();
    return c;
}

// Eigenvalues + first eigenvector components of a symmetric tridiagonal
// matrix (diag d, offdiag e), QL with implicit shifts. z holds the first
// row of the accumulated rotations on exit.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>& z) {
    const int n = (int)d.size();
    z.assign(n, 0.0);
    if (n == 0) return;
    z[0] = 1.0;
    if (n == 1) return;
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter == 60) throw std::runtime_error("tridiag_eig: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    double zi = z[i], zi1 = z[i + 1];
                    z[i + 1] = s * zi + c * zi1;
                    z[i] = c * zi - s * zi1;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
    const auto& c = spouge_coeffs();
    // reflection-free shift into a well-conditioned range
    if (x < 0.5) return gamma_fn(x + 1.0) / x;
    long double z = (long double)x - 1.0L;
    long double acc = c[0];
    for (int k = 1; k < kSpougeA; ++k) acc += c[k] / (z + k);
    long double t = z + kSpougeA;
    long double r = std::pow(t, z + 0.5L) * std::exp(-t) * acc;
    return (double)r;
}

Quadrature1D gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

Quadrature1D gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n >= 1");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: weight exponents > -1");
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
    const double apb = a + b;
    d[0] = (b - a) / (apb + 2.0);
    for (int k = 1; k < n; ++k) {
        double den = (2.0 * k + apb) * (2.0 * k + apb + 2.0);
        d[k] = (b * b - a * a) / den;
        double bk;
        if (k == 1) {
            bk = 4.0 * (1.0 + a) * (1.0 + b) /
                 ((2.0 + apb) * (2.0 + apb) * (3.0 + apb));
        } else {
            double s = 2.0 * k + apb;
            bk = 4.0 * k * (k + a) * (k + b) * (k + apb) /
                 (s * s * (s + 1.0) * (s - 1.0));
        }
        e[k - 1] = std::sqrt(bk);
    }
    double mu0 = std::pow(2.0, apb + 1.0) * gamma_fn(a + 1.0) * gamma_fn(b + 1.0) /
                 gamma_fn(apb + 2.0);
    std::vector<double> z;
    tridiag_eig(d, e, z);
    // sort by node
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 1; i < n; ++i) {
        int j = i;
        while (j > 0 && d[idx[j - 1]] > d[idx[j]]) { std::swap(idx[j - 1], idx[j]); --j; }
    }
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = d[idx[i]];
        q.weights[i] = mu0 * z[idx[i]] * z[idx[i]];
    }
    return q;
}

void shifted_legendre(int count, const double* x, int npts, double* vals) {
    for (int i = 0; i < npts; ++i) {
        double y = 2.0 * x[i] - 1.0;
        double pm = 1.0, pc = y;
        vals[i] = 1.0;
        if (count > 1) vals[npts + i] = y;
        for (int k = 1; k + 1 < count; ++k) {
            double pn = ((2.0 * k + 1.0) * y * pc - k * pm) / (k + 1.0);
            vals[(k + 1) * (size_t)npts + i] = pn;
            pm = pc;
            pc = pn;
        }
    }
}

}  // namespace choquard
