#pragma once

#include <cstddef>
#include <vector>

namespace choquard {

// Global constants of the critical Hartree problem in dimension N with
// Riesz exponent lambda. Everything downstream reads them from here.
struct ProblemParams {
    int N = 3;
    double lambda = 1.0;
    double p = 0.0;        // critical Hartree exponent (2N - lambda)/(N - 2)
    double alpha = 0.0;    // normalizing constant of the convolution term
    double A = 0.0;        // Riesz eigen-constant: I_lambda[U^p] = A U^{lambda/(N-2)}
    double omega_N = 0.0;  // 2 pi^{N/2} / (N Gamma(N/2)); N(N-2) omega_N normalizes the Newton potential
    bool beyond_certified_lambda = false;  // lambda > min(N, 4): outside the range the
                                           // perturbation existence theory covers

    static ProblemParams make(int N, double lambda);

    double sphere_area() const { return N * omega_N; }          // |S^{N-1}|
    double newton_normalizer() const { return N * (N - 2) * omega_N; }
    double crit_exp() const { return (N + 2.0) / (N - 2.0); }   // local critical power
    double sobolev_exp() const { return 2.0 * N / (N - 2.0); }
};

// Reduction coordinates: concentration scale mu > 0 and center xi in R^N.
struct BubbleParams {
    double mu = 1.0;
    std::vector<double> xi;  // length N; empty means the origin

    static BubbleParams origin(double mu = 1.0) { return BubbleParams{mu, {}}; }
    bool centered() const;
    void validate(int N) const;
};

// 0 is the dilation mode, 1..N the translation modes.
struct ModeIndex {
    int j = 0;
    void validate(int N) const;
};

}  // namespace choquard
