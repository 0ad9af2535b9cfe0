#pragma once

#include <string>
#include <vector>

#include "choquard/kcheck.hpp"
#include "choquard/problem.hpp"

namespace choquard {

// Flat key = value configuration with dotted sections; '#' starts a comment.
// Unknown keys are rejected.
struct RunConfig {
    int N = 3;
    double lambda = 1.0;

    int grid_n = 256;
    std::string grid_map = "rational";
    double grid_scale = 1.0;
    int sphere_degree = 15;

    kcheck::PotentialSpec potential;  // defaults to the radial ring bump

    std::vector<double> eps_list = {1e-3, 2e-3, 4e-3, 8e-3};

    double box_mu_min = 0.5;
    double box_mu_max = 2.5;
    double box_xi_halfwidth = 0.0;  // 0: radial (mu-line) reduction

    double tol_contraction = 1e-10;
    int max_iter = 60;
    double eps_max = 0.1;

    int upsilon_n = 160;
    int upsilon_degree = 15;
    int scan_points = 41;

    double kcheck_box = 8.0;
    int kcheck_multistart = 64;

    std::string out_dir = "out";
    std::string cache_dir = "";
    int jobs = 1;
    unsigned seed = 1234;

    static RunConfig defaults();
    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);
    void validate() const;
};

// bump list syntax: semicolon-separated "kind(key=value,...)" descriptors,
// e.g.  ring(amp=0.5,r0=1.3,width=1); gaussian(amp=1,width=1,center=0 0 0)
std::vector<kcheck::Bump> parse_bumps(const std::string& text, int N);

}  // namespace choquard
