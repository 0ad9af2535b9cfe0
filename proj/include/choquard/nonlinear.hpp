#pragma once

#include <string>
#include <vector>

#include "choquard/kcheck.hpp"
#include "choquard/linop.hpp"

namespace choquard::nonlinear {

struct Options {
    double tol = 1e-10;   // X-norm step tolerance
    int max_iter = 60;
    double eps_max = 0.1;
};

// One resolved fixed point of the projected problem at (b, eps).
struct PerturbedSolution {
    BubbleParams b;
    double eps = 0.0;
    GridFunction phi;
    std::vector<double> c;  // c_{eps,j}, j = 0..N (radial: entries j >= 1 vanish)
    int iterations = 0;
    double final_step = 0.0;
    double phi_norm = 0.0;  // ||phi||_{X_{mu,xi}}
    std::vector<double> step_history;
    bool converged = false;
    std::string failure;
    bool clamp_active = false;     // whether (U+phi)_+ ever clamped
    double omega_min_ratio = 0.0;  // min (U+phi)/U over the grid
};

// N(phi): the remainder of the convolution nonlinearity past its
// linearization, assembled from quadratically small pieces so tiny phi
// does not cancel catastrophically.
GridFunction nonlinear_remainder(const linop::ProjectedSystem& S, const GridFunction& phi);

// E(phi) = k (U+phi)_+^{(N+2)/(N-2)}; radial k only on this path.
GridFunction perturbation_term(const linop::ProjectedSystem& S, const GridFunction& phi,
                               const kcheck::PotentialSpec& k);

// Fixed-point iteration phi <- T(N(phi) + eps E(phi)) from phi = 0.
PerturbedSolution contraction_solve(const linop::ProjectedSystem& S, double eps,
                                    const kcheck::PotentialSpec& k, const Options& opt = {});

// c_{eps,j} = (int H_j Z_j)^{-1} int (N(phi) + eps E(phi)) Z_{j;mu,xi}
std::vector<double> c_coefficients(const linop::ProjectedSystem& S,
                                   const PerturbedSolution& sol,
                                   const kcheck::PotentialSpec& k);

// -Delta phi of the converged iterate, read off the integral representation.
std::vector<double> neg_laplacian_phi(const linop::ProjectedSystem& S,
                                      const PerturbedSolution& sol,
                                      const kcheck::PotentialSpec& k);

struct ResidualReport {
    double residual_y = 0.0;  // two-route residual of the full equation, Y norm
    double c_term_y = 0.0;    // Y norm of the multiplier term alone
    double omega_min = 0.0;
    bool positive = false;
    bool omega_above_half_u = false;
};

ResidualReport residual_check(const linop::ProjectedSystem& S, const PerturbedSolution& sol,
                              const kcheck::PotentialSpec& k);

// Central FD of the fixed point in mu (m=0); the radial path has no xi modes.
GridFunction phi_parameter_derivative(const linop::RadialContext& ctx, const BubbleParams& b,
                                      double eps, const kcheck::PotentialSpec& k, int m,
                                      const Options& opt = {}, double step = 1e-3);

// Discrete contraction constants and the certificate radius rho0 built from
// them; measured from the assembled operators, never assumed.
struct ContractionConstants {
    double C0 = 0.0;  // linear solve stability
    double C1 = 0.0;  // quadratic bound of N
    double C2 = 0.0;  // size of E(0) per unit ||k||
    double C3 = 0.0;  // Lipschitz constant of N per unit radius
    double C4 = 0.0;  // Lipschitz constant of E per unit ||k||
    double k_sup = 0.0;
    // the two-branch radius as displayed in the source derivation; its second
    // branch can undercut the invariant ball when C4/(2 C3) < C0 C2, so the
    // enforced certificate is rho0_ball
    double rho0 = 0.0;
    double rho0_ball = 0.0;  // 2 C0 C2 eps ||k||: the self-mapping ball radius
};
ContractionConstants measure_constants(const linop::ProjectedSystem& S,
                                       const kcheck::PotentialSpec& k, double eps);

}  // namespace choquard::nonlinear
