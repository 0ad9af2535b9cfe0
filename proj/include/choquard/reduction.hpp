#pragma once

#include <optional>
#include <string>
#include <vector>

#include "choquard/kcheck.hpp"
#include "choquard/linalg.hpp"
#include "choquard/nonlinear.hpp"

namespace choquard::reduction {

// One record of the finite-dimensional layer.
struct ReducedPoint {
    BubbleParams b;
    double upsilon = 0.0;
    std::vector<double> grad_upsilon;  // (d/dmu, d/dxi_1..N)
    double j_eps = 0.0;
    std::vector<double> c;
    double phi_norm = 0.0;
    std::string classification;  // "max" | "min" | "saddle" | "degenerate"
    std::vector<double> hess_eigs;
};

// search region in (mu, xi); radial mode confines xi to the origin
struct Box {
    double mu_min = 0.5;
    double mu_max = 2.5;
    double xi_halfwidth = 0.0;  // 0 = radial (mu-line) reduction
    bool radial() const { return xi_halfwidth == 0.0; }
};

// J_eps(U_b + phi): gradient term through int u (-Delta u) with -Delta u taken
// from the closed bubble form plus the fixed-point representation of phi.
double energy(const linop::ProjectedSystem& S, const nonlinear::PerturbedSolution& sol,
              const kcheck::PotentialSpec& k);

// unperturbed bubble energy J_0(U) by quadrature (equals N(N-2)(1/2 - 1/(2p))
// times the U^{2N/(N-2)} mass)
double jbar0(const linop::RadialContext& ctx);

// The reduced-energy first-order coefficient and its parameter gradient.
class Upsilon {
  public:
    Upsilon(const ProblemParams& pp, kcheck::PotentialSpec k, int n_radial = 160,
            int sphere_degree = 15);

    double value(const BubbleParams& b) const;
    std::vector<double> grad(const BubbleParams& b) const;  // length N+1
    Matrix hessian(const BubbleParams& b, double step = 1e-4) const;  // FD of grad

    // radial fast path (radial k, xi = 0)
    double value_mu(double mu) const;
    double dmu(double mu) const;
    double d2mu(double mu, double step = 1e-4) const;

    const ProblemParams& pp() const { return pp_; }
    const kcheck::PotentialSpec& potential() const { return k_; }
    bool radial_potential() const { return k_.is_radial(); }

  private:
    ProblemParams pp_;
    kcheck::PotentialSpec k_;
    std::shared_ptr<const RadialGrid> grid_;
    SphereRule sphere_;
    std::vector<double> u_mass_, z0_mass_;  // radial profiles with weights folded in
};

struct CriticalPoint {
    BubbleParams b;
    double upsilon = 0.0;
    std::vector<double> grad;
    std::vector<double> hess_eigs;
    std::string classification;
    int index = 0;  // sign det Hessian (0 when degenerate)
};

std::vector<CriticalPoint> find_critical_points(const Upsilon& ups, const Box& box,
                                                int multistart = 48, unsigned seed = 2024);

struct DegreeResult {
    int degree = 0;
    double boundary_infimum = 0.0;
    int boundary_samples = 0;
};

// Brouwer degree of grad Upsilon over the box by signed Hessian determinants;
// refuses degenerate zeros and near-zero boundaries.
DegreeResult degree(const Upsilon& ups, const Box& box,
                    const std::vector<CriticalPoint>& zeros);

// contraction + energy + Upsilon bookkeeping at one (b, eps)
ReducedPoint reduced_energy(const linop::RadialContext& ctx, const Upsilon& ups,
                            const BubbleParams& b, double eps,
                            const nonlinear::Options& opt = {});

struct FullSolveResult {
    BubbleParams b;                       // converged (mu_eps, xi_eps)
    nonlinear::PerturbedSolution sol;
    double c_norm = 0.0;
    double residual_y = 0.0;
    double phi_over_u = 0.0;  // sup |phi| / U
    double j_eps = 0.0;
    double grad_j_fd = 0.0;   // FD stationarity check of the reduced energy
    int newton_iterations = 0;
};

// Newton (FD Jacobian) on mu -> c_{eps,0}(mu) seeded at a critical point of
// Upsilon; the radial certified path.
FullSolveResult solve_full(const linop::RadialContext& ctx, const Upsilon& ups, double eps,
                           double mu_seed, const nonlinear::Options& opt = {});

}  // namespace choquard::reduction
