#pragma once

#include <memory>
#include <string>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/linalg.hpp"
#include "choquard/problem.hpp"

namespace choquard::riesz {

// Angular reduction of the Riesz kernel between shells of radius r and s:
//   K_lambda(r,s) = |S^{N-2}| int_0^pi (r^2+s^2-2rs cos a)^{-lambda/2} sin^{N-2}a da.
// Near-diagonal evaluations split the integral and grade panels toward a = 0;
// on the diagonal the value is finite iff lambda < N-1.
double radial_kernel_entry(const ProblemParams& pp, double lambda, double r, double s);

// lambda = N-2 closed form: |S^{N-1}| max(r,s)^{2-N}
double newton_kernel_closed(const ProblemParams& pp, double r, double s);

// Discrete radial convolution operator:
//   (I_lambda f)(r_i) = sum_j K[i][j] f(s_j) s_j^{N-1} w_j.
// K is assembled by product integration: per row, Legendre moments of the
// kernel in the mapped coordinate against graded panels, then synthesis back
// onto the nodes. This keeps full quadrature accuracy across the kernel's
// diagonal kink (and across the integrable diagonal singularity once
// lambda >= N-1), with no offset grid.
class RadialKernel {
  public:
    static RadialKernel assemble(const ProblemParams& pp, double lambda,
                                 std::shared_ptr<const RadialGrid> grid, int jobs = 1);
    // disk cache keyed by (N, lambda, grid hash); assembles and stores on miss
    static RadialKernel load_or_assemble(const ProblemParams& pp, double lambda,
                                         std::shared_ptr<const RadialGrid> grid,
                                         const std::string& cache_dir, int jobs = 1);

    double lambda() const { return lambda_; }
    int N() const { return N_; }
    const Matrix& rows() const { return rows_; }
    std::shared_ptr<const RadialGrid> grid() const { return grid_; }

    // plain application (no decay bookkeeping)
    std::vector<double> apply(const std::vector<double>& f) const;

    void save(const std::string& path) const;
    static RadialKernel load(const std::string& path, const ProblemParams& pp,
                             std::shared_ptr<const RadialGrid> grid);
    static std::string cache_name(const ProblemParams& pp, double lambda,
                                  const RadialGrid& grid);

  private:
    RadialKernel() = default;
    int N_ = 0;
    double lambda_ = 0.0;
    Matrix rows_;
    std::shared_ptr<const RadialGrid> grid_;
    std::vector<double> colw_;  // s_j^{N-1} w_j
};

// I_lambda[f] for radial f; requires decay_exponent > N, output decays like lambda.
GridFunction riesz_radial(const ProblemParams& pp, const RadialKernel& k, const GridFunction& f);

// Newton potential (1 / (N(N-2) omega_N)) int g(y) |x-y|^{2-N} dy; the kernel
// argument must be the lambda = N-2 one.
GridFunction newton_potential(const ProblemParams& pp, const RadialKernel& newton_k,
                              const GridFunction& g);

// Direct double-sum convolution at probe points; demonstration resolutions
// only (O(n^2 m^2) cost), refuses grids beyond 32 radial x 50 directions.
std::vector<double> riesz_full(const ProblemParams& pp, const FullGridFunction& f, double lambda,
                               const std::vector<std::vector<double>>& probes);

// Dense point-kernel matrix |x_i - y_j|^{-lambda} on the tensor grid, the
// diagonal replaced by the equal-volume ball average. No quadrature weights.
Matrix full_kernel_matrix(const ProblemParams& pp, const RadialGrid& grid,
                          const SphereRule& sphere, double lambda);
// matching quadrature weights (w_i r_i^{N-1} w_dir) in node-major order
std::vector<double> full_weights(const ProblemParams& pp, const RadialGrid& grid,
                                 const SphereRule& sphere);

}  // namespace choquard::riesz
