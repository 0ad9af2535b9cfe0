#pragma once

#include <span>

#include "choquard/problem.hpp"

namespace choquard::bubble {

// ---- bubble family and derivative modes -------------------------------
//
// Base profiles at (mu, xi) = (1, 0), <y> = sqrt(1+|y|^2):
//   U    = <y>^{2-N}
//   Z_0  = (N-2)/2 (|y|^2-1) <y>^{-N},   Z_j = (N-2) y_j <y>^{-N}
//   H_m  = U^{4/(N-2)} Z_m
// General parameters enter through the two rescalings
//   f_{;mu,xi}(x)  = mu^{-(N-2)/2} f((x-xi)/mu)     (U, Z, Zbar)
//   f^{mu}_{;xi}(x)= mu^{-(N+2)/2} f((x-xi)/mu)     (H, Htilde)

double value(const ProblemParams& pp, const BubbleParams& b, std::span<const double> x);
double value_radial(const ProblemParams& pp, double mu, double r);

double z_mode(const ProblemParams& pp, int j, const BubbleParams& b, std::span<const double> x);
double z0_radial(const ProblemParams& pp, double mu, double r);

double h_mode(const ProblemParams& pp, int m, const BubbleParams& b, std::span<const double> x);
double h0_radial(const ProblemParams& pp, double mu, double r);

// second-generation modes: Zbar_{m,j} = mu0-scaled derivative of Z_{m;mu,xi},
// Htilde_{m,j} likewise for H^{mu}_{m;xi}; both evaluated at base (mu, xi) = b.
// Htilde comes from the analytic gradient of H_m, never from nested FD.
double zbar_mode(const ProblemParams& pp, int m, int j, const BubbleParams& b,
                 std::span<const double> x);
double zbar00_radial(const ProblemParams& pp, double mu, double r);

double htilde_mode(const ProblemParams& pp, int m, int j, const BubbleParams& b,
                   std::span<const double> x);
double htilde00_radial(const ProblemParams& pp, double mu, double r);

// ---- closed-form identities -------------------------------------------

// I_lambda[U_{mu,xi}^p](x) = A * U_{mu,xi}^{lambda/(N-2)}(x)
double riesz_closed_form(const ProblemParams& pp, const BubbleParams& b,
                         std::span<const double> x);
double riesz_closed_radial(const ProblemParams& pp, double mu, double r);

// integral of Z_j H_j over R^N (scale invariant); Z_j H_m integrates to zero
// for j != m. One radial Beta-type integral under the module's own rule.
double mode_pairing(const ProblemParams& pp, int j);

// Laplacian of Z_{j;mu,xi}: equals -N(N+2) H^{mu}_{j;xi}
double laplacian_z(const ProblemParams& pp, int j, const BubbleParams& b,
                   std::span<const double> x);

// -Delta U_{mu,xi} = N(N-2) U_{mu,xi}^{(N+2)/(N-2)}
double neg_laplacian_u(const ProblemParams& pp, const BubbleParams& b,
                       std::span<const double> x);
double neg_laplacian_u_radial(const ProblemParams& pp, double mu, double r);

// ---- first-order expansion residuals ----------------------------------

enum class ExpandField { U, Z, H };

// sup over a fixed probe set of |field(b) - first-order expansion around b0|
// divided by the expansion weight (U_{b0}, or U_{b0}^{(N+2)/(N-2)} for H).
// Scales like |dmu|^2 + |dxi|^2.
double expansion_error(const ProblemParams& pp, const BubbleParams& b0,
                       const BubbleParams& b, ExpandField which, int index);

}  // namespace choquard::bubble
