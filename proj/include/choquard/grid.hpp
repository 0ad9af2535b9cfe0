#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "choquard/problem.hpp"

namespace choquard {

// Decay-graded radial quadrature grid: Gauss-Legendre nodes t on (0,1)
// pushed through r = scale * t / (1 - t). weights integrate dr on (0, inf).
class RadialGrid {
  public:
    static std::shared_ptr<const RadialGrid> make(int n, double scale = 1.0,
                                                  const std::string& map_kind = "rational");

    int size() const { return (int)r_.size(); }
    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& t_weights() const { return wt_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& weights() const { return wr_; }  // for integral in dr
    double scale() const { return scale_; }
    const std::string& map_kind() const { return map_kind_; }
    std::uint64_t hash() const { return hash_; }

    double t_of_r(double r) const;  // inverse map

  private:
    RadialGrid() = default;
    std::vector<double> t_, wt_, r_, wr_;
    double scale_ = 1.0;
    std::string map_kind_;
    std::uint64_t hash_ = 0;
};

// Quadrature rule on S^{N-1}: product Gauss-Jacobi over the polar angles,
// uniform in the azimuth. Exact on spherical polynomials up to `degree`.
struct SphereRule {
    int N = 3;
    int degree = 0;
    std::vector<std::vector<double>> directions;  // unit vectors
    std::vector<double> weights;                  // sum to |S^{N-1}|

    static SphereRule make(int N, int degree);
};

// Scalar field sampled on a radial grid, with its declared tail power q
// (|f| <~ <r>^{-q}); q drives tail extrapolation and integrability checks.
struct GridFunction {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> values;
    double decay_exponent = 0.0;

    static GridFunction zeros(std::shared_ptr<const RadialGrid> g, double decay = 0.0);
    template <class F>
    static GridFunction sample(std::shared_ptr<const RadialGrid> g, F&& f, double decay) {
        GridFunction out;
        out.grid = std::move(g);
        out.decay_exponent = decay;
        out.values.reserve(out.grid->size());
        for (double rv : out.grid->r()) out.values.push_back(f(rv));
        return out;
    }

    int size() const { return (int)values.size(); }
    // interpolation in the mapped coordinate; power-law tail beyond the grid
    double eval(double r) const;
    // soft check that the outermost samples respect the declared tail power
    bool tail_consistent() const;
};

// Field on a radial x sphere tensor grid, node-major: values[i*ndir + d].
struct FullGridFunction {
    std::shared_ptr<const RadialGrid> grid;
    std::shared_ptr<const SphereRule> sphere;
    std::vector<double> values;
    double decay_exponent = 0.0;

    int n_radial() const { return grid->size(); }
    int n_dir() const { return (int)sphere->directions.size(); }
    double& at(int i, int d) { return values[(size_t)i * n_dir() + d]; }
    double at(int i, int d) const { return values[(size_t)i * n_dir() + d]; }

    template <class F>
    static FullGridFunction sample(std::shared_ptr<const RadialGrid> g,
                                   std::shared_ptr<const SphereRule> s, F&& f, double decay) {
        FullGridFunction out;
        out.grid = std::move(g);
        out.sphere = std::move(s);
        out.decay_exponent = decay;
        const int nd = (int)out.sphere->directions.size();
        out.values.resize((size_t)out.grid->size() * nd);
        std::vector<double> x(out.sphere->N);
        for (int i = 0; i < out.grid->size(); ++i) {
            double rv = out.grid->r()[i];
            for (int d = 0; d < nd; ++d) {
                for (int c = 0; c < out.sphere->N; ++c) x[c] = rv * out.sphere->directions[d][c];
                out.values[(size_t)i * nd + d] = f(x);
            }
        }
        return out;
    }
};

// integral over R^N of a radial field (angular factor |S^{N-1}|)
double integrate_radial(const ProblemParams& pp, const GridFunction& f);
// integral over R^N on the tensor grid
double integrate_full(const ProblemParams& pp, const FullGridFunction& f);

enum class NormKind { X, Y };

// Discrete weighted sup-norms over the grid nodes.
// X weight: mu^{(N-2)/2} <(x-xi)/mu>^{N-2};  Y weight: mu^{(N+2)/2} <(x-xi)/mu>^{N+2}.
// The printed X_{mu,xi} display carries exponent N+2; the N-2 here is what makes
// the (1,0) case reduce to the X-norm and the rescaling covariance exact.
double weighted_sup_norm(const ProblemParams& pp, const GridFunction& f,
                         const BubbleParams& b, NormKind kind);
double weighted_sup_norm(const ProblemParams& pp, const FullGridFunction& f,
                         const BubbleParams& b, NormKind kind);

double jp(double r);  // <r> = sqrt(1+r^2)

}  // namespace choquard
