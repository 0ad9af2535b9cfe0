#include "choquard/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace choquard {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += ai[j] * x[j];
        y[i] = acc;
    }
    return y;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)) {
    const std::size_t n = lu_.rows();
    if (n != lu_.cols()) throw std::invalid_argument("LuFactor: square matrix required");
    piv_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::fabs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::fabs(lu_(i, k));
            if (v > best) { best = v; p = i; }
        }
        piv_[k] = (int)p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            det_sign_ = -det_sign_;
        }
        double pivot = lu_(k, k);
        if (pivot == 0.0) throw std::runtime_error("LuFactor: singular matrix");
        det_sign_ *= (pivot > 0 ? 1.0 : -1.0);
        log_abs_det_ += std::log(std::fabs(pivot));
        for (std::size_t i = k + 1; i < n; ++i) {
            double m = lu_(i, k) / pivot;
            lu_(i, k) = m;
            if (m == 0.0) continue;
            const double* rk = lu_.row(k);
            double* ri = lu_.row(i);
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
        }
    }
}

std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("LuFactor::solve: size mismatch");
    std::vector<double> x = b;
    for (std::size_t k = 0; k < n; ++k) std::swap(x[k], x[(std::size_t)piv_[k]]);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu_(i, k) * x[k];
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) x[k] -= lu_(k, j) * x[j];
        x[k] /= lu_(k, k);
    }
    return x;
}

std::vector<double> LuFactor::solve_transposed(const std::vector<double>& b) const {
    // solves A^T x = b via (PA = LU  =>  A^T = U^T L^T P)
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("LuFactor::solve_transposed: size mismatch");
    std::vector<double> x = b;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j) x[k] -= lu_(j, k) * x[j];
        x[k] /= lu_(k, k);
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) x[k] -= lu_(j, k) * x[j];
    }
    for (std::size_t k = n; k-- > 0;) std::swap(x[k], x[(std::size_t)piv_[k]]);
    return x;
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// deterministic pseudo-random fill (splitmix64)
double unit_rand(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return (double)(z >> 11) * (1.0 / 9007199254740992.0) - 0.5;
}

}  // namespace

double largest_singular_value(const Matrix& a, int iters) {
    std::uint64_t rng = 12345;
    std::vector<double> v(a.cols());
    for (auto& x : v) x = unit_rand(rng);
    double s = norm2(v);
    for (auto& x : v) x /= s;
    Matrix at = a.transposed();
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        auto w = matvec(a, v);
        auto u = matvec(at, w);
        double nu = norm2(u);
        if (nu == 0.0) return 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i] / nu;
        double ns = std::sqrt(nu);
        if (std::fabs(ns - sigma) <= 1e-12 * ns) { sigma = ns; break; }
        sigma = ns;
    }
    return sigma;
}

SingularPairs smallest_singular_pairs(const Matrix& a, int k, int iters) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("smallest_singular_pairs: square only");
    k = std::min<std::size_t>((std::size_t)k, n);
    LuFactor lu(a);
    std::uint64_t rng = 987654321;
    std::vector<std::vector<double>> x((std::size_t)k, std::vector<double>(n));
    for (auto& col : x)
        for (auto& v : col) v = unit_rand(rng);
    for (int it = 0; it < iters; ++it) {
        // y = A^{-1} A^{-T} x   (inverse iteration on A^T A)
        for (auto& col : x) col = lu.solve(lu.solve_transposed(col));
        // modified Gram-Schmidt
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < i; ++j) {
                double c = dot(x[i], x[j]);
                for (std::size_t q = 0; q < n; ++q) x[i][q] -= c * x[j][q];
            }
            double s = norm2(x[i]);
            if (s == 0.0) s = 1.0;
            for (auto& v : x[i]) v /= s;
        }
    }
    // Rayleigh-Ritz on A^T A within span(x)
    std::vector<std::vector<double>> ax((std::size_t)k);
    for (int i = 0; i < k; ++i) ax[i] = matvec(a, x[i]);
    Matrix b((std::size_t)k, (std::size_t)k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) b(i, j) = dot(ax[i], ax[j]);
    std::vector<double> ev;
    Matrix vec;
    symmetric_eigen(b, ev, vec);
    SingularPairs out;
    out.sigma.resize(k);
    out.right_vectors.assign((std::size_t)k, std::vector<double>(n, 0.0));
    for (int i = 0; i < k; ++i) {
        out.sigma[i] = std::sqrt(std::max(0.0, ev[i]));
        for (int j = 0; j < k; ++j) {
            double c = vec(j, i);
            for (std::size_t q = 0; q < n; ++q) out.right_vectors[i][q] += c * x[j][q];
        }
        double s = norm2(out.right_vectors[i]);
        if (s > 0) for (auto& v : out.right_vectors[i]) v /= s;
    }
    return out;
}

void symmetric_eigen(const Matrix& a, std::vector<double>& eigvals, Matrix& eigvecs) {
    const std::size_t n = a.rows();
    Matrix m = a;
    eigvecs = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    double mpj = m(p, j), mqj = m(q, j);
                    m(p, j) = c * mpj - s * mqj;
                    m(q, j) = s * mpj + c * mqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = eigvecs(i, p), viq = eigvecs(i, q);
                    eigvecs(i, p) = c * vip - s * viq;
                    eigvecs(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    eigvals.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigvals[i] = m(i, i);
    // ascending order
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t j = i;
        while (j > 0 && eigvals[j - 1] > eigvals[j]) {
            std::swap(eigvals[j - 1], eigvals[j]);
            for (std::size_t q = 0; q < n; ++q) std::swap(eigvecs(q, j - 1), eigvecs(q, j));
            --j;
        }
    }
}

}  // namespace choquard
