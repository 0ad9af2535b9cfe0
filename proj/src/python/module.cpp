// python bindings for the main operations: bubble closed forms, the radial
// solver stack, the hypothesis checker, and the reduced-energy pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "choquard/bubble.hpp"
#include "choquard/config.hpp"
#include "choquard/kcheck.hpp"
#include "choquard/linop.hpp"
#include "choquard/nonlinear.hpp"
#include "choquard/reduction.hpp"
#include "choquard/riesz.hpp"

namespace py = pybind11;
using namespace choquard;

namespace {

BubbleParams make_bubble(double mu, const std::vector<double>& xi) {
    return BubbleParams{mu, xi};
}

GridFunction to_grid_function(const linop::RadialContext& ctx, std::vector<double> values,
                              double decay) {
    GridFunction f;
    f.grid = ctx.grid;
    f.values = std::move(values);
    f.decay_exponent = decay;
    if (f.size() != ctx.grid->size())
        throw std::invalid_argument("values length must match the grid");
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "critical Hartree bubble reduction workbench";

    py::class_<ProblemParams>(m, "ProblemParams")
        .def_static("make", &ProblemParams::make, py::arg("N"), py::arg("lambda_"))
        .def_readonly("N", &ProblemParams::N)
        .def_readonly("lambda_", &ProblemParams::lambda)
        .def_readonly("p", &ProblemParams::p)
        .def_readonly("alpha", &ProblemParams::alpha)
        .def_readonly("A", &ProblemParams::A)
        .def_readonly("omega_N", &ProblemParams::omega_N)
        .def_readonly("beyond_certified_lambda", &ProblemParams::beyond_certified_lambda)
        .def("sphere_area", &ProblemParams::sphere_area);

    py::class_<BubbleParams>(m, "BubbleParams")
        .def(py::init(&make_bubble), py::arg("mu") = 1.0,
             py::arg("xi") = std::vector<double>{})
        .def_readwrite("mu", &BubbleParams::mu)
        .def_readwrite("xi", &BubbleParams::xi);

    using Vec = std::vector<double>;
    m.def("bubble_value", [](const ProblemParams& pp, const BubbleParams& b, const Vec& x) {
        return bubble::value(pp, b, x);
    });
    m.def("z_mode", [](const ProblemParams& pp, int j, const BubbleParams& b, const Vec& x) {
        return bubble::z_mode(pp, j, b, x);
    });
    m.def("h_mode", [](const ProblemParams& pp, int mm, const BubbleParams& b, const Vec& x) {
        return bubble::h_mode(pp, mm, b, x);
    });
    m.def("zbar_mode",
          [](const ProblemParams& pp, int mm, int j, const BubbleParams& b, const Vec& x) {
              return bubble::zbar_mode(pp, mm, j, b, x);
          });
    m.def("htilde_mode",
          [](const ProblemParams& pp, int mm, int j, const BubbleParams& b, const Vec& x) {
              return bubble::htilde_mode(pp, mm, j, b, x);
          });
    m.def("riesz_closed_form",
          [](const ProblemParams& pp, const BubbleParams& b, const Vec& x) {
              return bubble::riesz_closed_form(pp, b, x);
          });
    m.def("mode_pairing", &bubble::mode_pairing);
    m.def("laplacian_z", [](const ProblemParams& pp, int j, const BubbleParams& b, const Vec& x) {
        return bubble::laplacian_z(pp, j, b, x);
    });
    py::enum_<bubble::ExpandField>(m, "ExpandField")
        .value("U", bubble::ExpandField::U)
        .value("Z", bubble::ExpandField::Z)
        .value("H", bubble::ExpandField::H);
    m.def("expansion_error", &bubble::expansion_error);
    m.def("radial_kernel_entry", &riesz::radial_kernel_entry);

    py::enum_<kcheck::BumpKind>(m, "BumpKind")
        .value("gaussian", kcheck::BumpKind::gaussian)
        .value("rational", kcheck::BumpKind::rational)
        .value("ring", kcheck::BumpKind::ring);
    py::class_<kcheck::Bump>(m, "Bump")
        .def(py::init([](kcheck::BumpKind kind, double amplitude, std::vector<double> center,
                         double width, double power, double radius) {
                 return kcheck::Bump{kind, amplitude, std::move(center), width, power, radius};
             }),
             py::arg("kind"), py::arg("amplitude") = 1.0,
             py::arg("center") = std::vector<double>{}, py::arg("width") = 1.0,
             py::arg("power") = 0.0, py::arg("radius") = 0.0);
    py::class_<kcheck::PotentialSpec>(m, "PotentialSpec")
        .def(py::init([](int N, double a0, std::vector<kcheck::Bump> bumps) {
                 kcheck::PotentialSpec s;
                 s.N = N;
                 s.a0 = a0;
                 s.bumps = std::move(bumps);
                 s.validate();
                 return s;
             }),
             py::arg("N") = 3, py::arg("a0") = 1.0,
             py::arg("bumps") = std::vector<kcheck::Bump>{})
        .def_readonly("N", &kcheck::PotentialSpec::N)
        .def_readonly("a0", &kcheck::PotentialSpec::a0)
        .def("is_radial", &kcheck::PotentialSpec::is_radial);
    m.def("eval_k", [](const kcheck::PotentialSpec& s, const std::vector<double>& x) {
        auto e = kcheck::eval_k(s, x);
        py::dict d;
        d["value"] = e.value;
        d["grad"] = e.grad;
        d["laplacian"] = e.lap;
        return d;
    });
    m.def("check_assumptions",
          [](const kcheck::PotentialSpec& s, double box, int multistart, unsigned seed) {
              auto rep = kcheck::check_assumptions(s, box, multistart, seed);
              py::dict d;
              d["k0"] = kcheck::to_string(rep.k0);
              d["k1"] = kcheck::to_string(rep.k1);
              d["k2"] = kcheck::to_string(rep.k2);
              d["k3"] = kcheck::to_string(rep.k3);
              d["k4"] = kcheck::to_string(rep.k4);
              d["all_pass"] = rep.all_pass();
              d["index_sum"] = rep.index_sum;
              d["parity"] = rep.parity;
              d["inf_k"] = rep.inf_k;
              d["sup_k"] = rep.sup_k;
              d["rho"] = rep.rho;
              d["xgrad_integral"] = rep.xgrad_integral;
              py::list pts;
              for (const auto& cp : rep.critical_points) {
                  py::dict p;
                  p["x"] = cp.x;
                  p["index"] = cp.index;
                  p["laplacian"] = cp.lap;
                  p["degenerate"] = cp.degenerate;
                  p["included_in_sum"] = cp.included;
                  pts.append(std::move(p));
              }
              d["critical_points"] = std::move(pts);
              return d;
          },
          py::arg("spec"), py::arg("box") = 8.0, py::arg("multistart") = 64,
          py::arg("seed") = 1234);

    py::class_<linop::RadialContext>(m, "RadialContext")
        .def_static("make", &linop::RadialContext::make, py::arg("pp"), py::arg("n"),
                    py::arg("scale") = 1.0, py::arg("cache_dir") = std::string(),
                    py::arg("jobs") = 1)
        .def_property_readonly("r",
                               [](const linop::RadialContext& c) { return c.grid->r(); })
        .def_property_readonly("weights",
                               [](const linop::RadialContext& c) { return c.grid->weights(); })
        .def("integrate", &linop::RadialContext::integrate);

    py::class_<linop::ProjectedSystem>(m, "ProjectedSystem")
        .def(py::init<linop::RadialContext, const BubbleParams&>())
        .def("solve",
             [](const linop::ProjectedSystem& S, const std::vector<double>& g, double decay) {
                 linop::ProjectedSystem::SolveInfo info;
                 auto phi = S.solve(to_grid_function(S.ctx(), g, decay), &info);
                 py::dict d;
                 d["phi"] = phi.values;
                 d["multiplier"] = info.multiplier;
                 d["c0_ratio"] = info.c0_ratio;
                 return d;
             },
             py::arg("g"), py::arg("decay"))
        .def("solver_derivative",
             [](const linop::ProjectedSystem& S, const std::vector<double>& g, double decay,
                int mode) { return S.solver_derivative(to_grid_function(S.ctx(), g, decay), mode).values; },
             py::arg("g"), py::arg("decay"), py::arg("mode") = 0)
        .def("kernel_diagnostic", [](const linop::ProjectedSystem& S) {
            auto d = S.kernel_diagnostic();
            py::dict out;
            out["sigma_max"] = d.sigma_max;
            out["smallest"] = d.smallest;
            out["near_null_count"] = d.near_null_count;
            out["cos_angle_z0"] = d.cos_angle_z0;
            out["constrained_ratio"] = d.constrained_ratio;
            return out;
        })
        .def_property_readonly("U", &linop::ProjectedSystem::U)
        .def_property_readonly("Z0", &linop::ProjectedSystem::Z0)
        .def_property_readonly("H0", &linop::ProjectedSystem::H0);

    py::class_<nonlinear::PerturbedSolution>(m, "PerturbedSolution")
        .def_readonly("eps", &nonlinear::PerturbedSolution::eps)
        .def_readonly("c", &nonlinear::PerturbedSolution::c)
        .def_readonly("iterations", &nonlinear::PerturbedSolution::iterations)
        .def_readonly("final_step", &nonlinear::PerturbedSolution::final_step)
        .def_readonly("phi_norm", &nonlinear::PerturbedSolution::phi_norm)
        .def_readonly("converged", &nonlinear::PerturbedSolution::converged)
        .def_readonly("failure", &nonlinear::PerturbedSolution::failure)
        .def_readonly("step_history", &nonlinear::PerturbedSolution::step_history)
        .def_readonly("omega_min_ratio", &nonlinear::PerturbedSolution::omega_min_ratio)
        .def_property_readonly("phi", [](const nonlinear::PerturbedSolution& s) {
            return s.phi.values;
        });

    m.def("contraction_solve",
          [](const linop::ProjectedSystem& S, double eps, const kcheck::PotentialSpec& k,
             double tol, int max_iter, double eps_max) {
              nonlinear::Options opt{tol, max_iter, eps_max};
              return nonlinear::contraction_solve(S, eps, k, opt);
          },
          py::arg("system"), py::arg("eps"), py::arg("potential"), py::arg("tol") = 1e-10,
          py::arg("max_iter") = 60, py::arg("eps_max") = 0.1);
    m.def("residual_check",
          [](const linop::ProjectedSystem& S, const nonlinear::PerturbedSolution& sol,
             const kcheck::PotentialSpec& k) {
              auto rep = nonlinear::residual_check(S, sol, k);
              py::dict d;
              d["residual_y"] = rep.residual_y;
              d["c_term_y"] = rep.c_term_y;
              d["omega_min"] = rep.omega_min;
              d["positive"] = rep.positive;
              d["omega_above_half_u"] = rep.omega_above_half_u;
              return d;
          });

    py::class_<reduction::Upsilon>(m, "Upsilon")
        .def(py::init<const ProblemParams&, kcheck::PotentialSpec, int, int>(), py::arg("pp"),
             py::arg("potential"), py::arg("n_radial") = 160, py::arg("sphere_degree") = 15)
        .def("value", &reduction::Upsilon::value)
        .def("grad", &reduction::Upsilon::grad)
        .def("value_mu", &reduction::Upsilon::value_mu)
        .def("dmu", &reduction::Upsilon::dmu);
    py::class_<reduction::Box>(m, "Box")
        .def(py::init([](double mu_min, double mu_max, double xi_halfwidth) {
                 return reduction::Box{mu_min, mu_max, xi_halfwidth};
             }),
             py::arg("mu_min"), py::arg("mu_max"), py::arg("xi_halfwidth") = 0.0);
    m.def("find_critical_points",
          [](const reduction::Upsilon& ups, const reduction::Box& box, int multistart,
             unsigned seed) {
              py::list out;
              for (const auto& z : reduction::find_critical_points(ups, box, multistart, seed)) {
                  py::dict d;
                  d["mu"] = z.b.mu;
                  d["xi"] = z.b.xi;
                  d["upsilon"] = z.upsilon;
                  d["classification"] = z.classification;
                  d["index"] = z.index;
                  d["hess_eigs"] = z.hess_eigs;
                  out.append(std::move(d));
              }
              return out;
          },
          py::arg("upsilon"), py::arg("box"), py::arg("multistart") = 48,
          py::arg("seed") = 2024);
    m.def("degree",
          [](const reduction::Upsilon& ups, const reduction::Box& box, int multistart,
             unsigned seed) {
              auto zeros = reduction::find_critical_points(ups, box, multistart, seed);
              auto deg = reduction::degree(ups, box, zeros);
              py::dict d;
              d["degree"] = deg.degree;
              d["boundary_infimum"] = deg.boundary_infimum;
              d["zeros"] = (int)zeros.size();
              return d;
          },
          py::arg("upsilon"), py::arg("box"), py::arg("multistart") = 48,
          py::arg("seed") = 2024);
    m.def("jbar0", &reduction::jbar0);
    m.def("solve_full",
          [](const linop::RadialContext& ctx, const reduction::Upsilon& ups, double eps,
             double mu_seed) {
              auto res = reduction::solve_full(ctx, ups, eps, mu_seed);
              py::dict d;
              d["mu"] = res.b.mu;
              d["c_norm"] = res.c_norm;
              d["residual_y"] = res.residual_y;
              d["phi_over_u"] = res.phi_over_u;
              d["j_eps"] = res.j_eps;
              d["grad_j_fd"] = res.grad_j_fd;
              d["newton_iterations"] = res.newton_iterations;
              d["omega_min_ratio"] = res.sol.omega_min_ratio;
              return d;
          });

    m.attr("__version__") = "0.1.0";
}
