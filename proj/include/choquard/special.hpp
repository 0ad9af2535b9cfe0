#pragma once

#include <vector>

namespace choquard {

// Gamma function for real x in (0, 34), relative error below 1e-13.
// Spouge's variant of the Lanczos series; every coefficient is computed
// at first use, nothing is tabulated.
double gamma_fn(double x);

struct Quadrature1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on (-1, 1).
Quadrature1D gauss_legendre(int n);

// Gauss-Jacobi rule on (-1, 1) for the weight (1-x)^a (1+x)^b, a, b > -1.
// Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
Quadrature1D gauss_jacobi(int n, double a, double b);

// Shifted Legendre polynomials P~_0..P~_{count-1} on [0,1] evaluated at x,
// returned as vals[k*npts + i].
void shifted_legendre(int count, const double* x, int npts, double* vals);

}  // namespace choquard
