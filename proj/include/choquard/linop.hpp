#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/linalg.hpp"
#include "choquard/problem.hpp"
#include "choquard/riesz.hpp"

namespace choquard::linop {

// Shared immutable state for the radial production path: grid + the two
// convolution kernels (I_lambda and the Newton potential).
struct RadialContext {
    ProblemParams pp;
    std::shared_ptr<const RadialGrid> grid;
    std::shared_ptr<const riesz::RadialKernel> k_lambda;
    std::shared_ptr<const riesz::RadialKernel> k_newton;

    static RadialContext make(const ProblemParams& pp, int n, double scale = 1.0,
                              const std::string& cache_dir = "", int jobs = 1);

    // full-space integral of a radial node vector
    double integrate(const std::vector<double>& f) const;
    std::vector<double> int_weights() const;  // |S^{N-1}| w_i r_i^{N-1}
};

// Discretization of the projected linear problem at a centered bubble (mu, 0):
// the Nystrom form phi = A phi + N(g - c H_0) with the single radial
// constraint int phi H_0 = 0, assembled as a bordered system with the
// multiplier column on N H_0. The -Delta never appears: the Newton kernel
// carries it.
class ProjectedSystem {
  public:
    ProjectedSystem(RadialContext ctx, const BubbleParams& b);

    struct SolveInfo {
        double multiplier = 0.0;        // discrete  int g Z_0 / int H_0 Z_0
        double c0_ratio = 0.0;          // ||phi||_{X_b} / ||g||_{Y_b}
    };

    // unique solution of the projected problem for g in the Y class
    GridFunction solve(const GridFunction& g, SolveInfo* info = nullptr) const;

    // the two convolution terms of the linearized operator (everything but -Delta)
    std::vector<double> apply_W(const std::vector<double>& phi) const;

    // L phi = -Delta phi - W phi. The caller supplies -Delta phi when it is
    // known in closed form; otherwise it is recovered by differentiating the
    // grid interpolant (coarse, test-oracle quality only).
    GridFunction apply_L(const GridFunction& phi,
                         const GridFunction* neg_laplacian = nullptr) const;

    struct KernelDiagnostic {
        double sigma_max = 0.0;
        std::vector<double> smallest;   // ascending few smallest of I - A
        int near_null_count = 0;        // sigma < 1e-4 sigma_max
        double cos_angle_z0 = 0.0;      // |cos| between near-null vector and Z_0
        double constrained_ratio = 0.0; // sigma_min/sigma_max of the bordered system
    };
    KernelDiagnostic kernel_diagnostic() const;

    // Derivative of the solution map g -> phi[mu, 0] in mode m (radial: m = 0
    // only), built from the mode-coupled right-hand side and the projected
    // solve; equals the parameter derivative of solve() for fixed g.
    GridFunction solver_derivative(const GridFunction& g, int m) const;

    const RadialContext& ctx() const { return ctx_; }
    const BubbleParams& bubble() const { return b_; }
    const Matrix& unconstrained() const { return ImA_; }
    const std::vector<double>& U() const { return U_; }
    const std::vector<double>& Z0() const { return Z0_; }
    const std::vector<double>& H0() const { return H0_; }
    const std::vector<double>& IlamUp() const { return IlamUp_; }
    double pairing00() const { return pairing00_; }

  private:
    RadialContext ctx_;
    BubbleParams b_;
    std::vector<double> U_, Up1_, IlamUp_, Z0_, H0_;
    double pairing00_ = 0.0;
    Matrix ImA_;
    Matrix bordered_;
    std::unique_ptr<LuFactor> lu_;
};

// Claim-1 rescaling transport of a radial field between centered bubbles:
// X-kind fields carry mu^{-(N-2)/2}, Y-kind mu^{-(N+2)/2}.
GridFunction scaling_transport(const ProblemParams& pp, const GridFunction& f,
                               const BubbleParams& from, const BubbleParams& to,
                               NormKind kind);

// Demonstration-resolution non-radial system with the full N+1 constraint set,
// dense point-kernel assembly on a radial x sphere tensor grid.
class FullProjectedSystem {
  public:
    FullProjectedSystem(const ProblemParams& pp, const BubbleParams& b,
                        std::shared_ptr<const RadialGrid> grid,
                        std::shared_ptr<const SphereRule> sphere);

    FullGridFunction solve(const FullGridFunction& g,
                           std::vector<double>* multipliers = nullptr) const;

    struct Diagnostic {
        double sigma_max = 0.0;
        std::vector<double> smallest;
        int near_null_count = 0;       // relative threshold reported alongside
        double threshold = 0.0;
        double subspace_alignment = 0.0;  // mean |cos| of near-null vectors vs span{Z_j}
    };
    Diagnostic kernel_diagnostic() const;

    const ProblemParams& pp() const { return pp_; }

  private:
    ProblemParams pp_;
    BubbleParams b_;
    std::shared_ptr<const RadialGrid> grid_;
    std::shared_ptr<const SphereRule> sphere_;
    std::vector<double> w_;
    Matrix ImA_;
    std::vector<std::vector<double>> Zmodes_, Hmodes_;
    Matrix bordered_;
    std::unique_ptr<LuFactor> lu_;
};

}  // namespace choquard::linop
