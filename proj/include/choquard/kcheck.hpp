#pragma once

#include <span>
#include <string>
#include <vector>

#include "choquard/linalg.hpp"
#include "choquard/problem.hpp"

namespace choquard::kcheck {

enum class BumpKind { gaussian, rational, ring };

// One closed-form perturbation bump. gaussian: b e^{-|x-c|^2/s^2};
// rational: b (1+|x-c|^2/s^2)^{-q}, q > N/2; ring: b e^{-(|x-c|-r0)^2/s^2}
// (smooth away from the shell center; the ring profile is the radial test
// potential of the solver pipeline, not a C^2 candidate for the hypotheses).
struct Bump {
    BumpKind kind = BumpKind::gaussian;
    double amplitude = 1.0;
    std::vector<double> center;  // empty = origin
    double width = 1.0;
    double power = 0.0;   // rational only
    double radius = 0.0;  // ring only
};

struct PotentialSpec {
    int N = 3;
    double a0 = 1.0;  // positive baseline, also the tail value
    std::vector<Bump> bumps;

    void validate() const;
    bool is_radial() const;  // every bump centered at the origin
    double sup_bound() const;
};

struct KEval {
    double value = 0.0;
    std::vector<double> grad;
    Matrix hess;
    double lap = 0.0;
};

KEval eval_k(const PotentialSpec& spec, std::span<const double> x);
double eval_k_value(const PotentialSpec& spec, std::span<const double> x);
// radial specs only
double eval_k_radial(const PotentialSpec& spec, double r);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct CriticalPoint {
    std::vector<double> x;
    std::vector<double> hess_eigs;
    double lap = 0.0;
    int index = 0;  // sign det Hess at nondegenerate points
    bool degenerate = false;
    bool included = false;  // lap < 0: enters the index sum
};

struct AssumptionReport {
    Verdict k0 = Verdict::inconclusive;  // 0 < inf k <= sup k < inf
    Verdict k1 = Verdict::inconclusive;  // C^2 regularity (structural)
    Verdict k2 = Verdict::inconclusive;  // finite nondegenerate Cr[k], index sum != (-1)^N
    Verdict k3 = Verdict::inconclusive;  // x . grad k < 0 outside a ball
    Verdict k4 = Verdict::inconclusive;  // x . grad k integrable with negative integral
    double inf_k = 0.0, sup_k = 0.0;
    std::vector<CriticalPoint> critical_points;
    int index_sum = 0;
    int parity = 0;  // (-1)^N
    bool infinite_critical_set = false;
    double rho = 0.0;             // (k.3) radius certificate
    double xgrad_integral = 0.0;  // (k.4) quadrature value
    std::string notes;

    bool all_pass() const;
};

AssumptionReport check_assumptions(const PotentialSpec& spec, double box_halfwidth = 8.0,
                                   int multistart = 64, unsigned seed = 1234);

}  // namespace choquard::kcheck
