#include "choquard/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace choquard {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number '" + s + "' for key " + key);
    }
}

int to_int(const std::string& s, const std::string& key) {
    double v = to_double(s, key);
    if (v != std::floor(v))
        throw std::invalid_argument("config: integer expected for key " + key);
    return (int)v;
}

}  // namespace

std::vector<kcheck::Bump> parse_bumps(const std::string& text, int N) {
    std::vector<kcheck::Bump> out;
    for (std::string item : split(text, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t lp = item.find('(');
        if (lp == std::string::npos || item.back() != ')')
            throw std::invalid_argument("config: bump descriptor must be kind(...): " + item);
        std::string kind = trim(item.substr(0, lp));
        std::string body = item.substr(lp + 1, item.size() - lp - 2);
        kcheck::Bump b;
        if (kind == "gaussian") b.kind = kcheck::BumpKind::gaussian;
        else if (kind == "rational") b.kind = kcheck::BumpKind::rational;
        else if (kind == "ring") b.kind = kcheck::BumpKind::ring;
        else throw std::invalid_argument("config: unknown bump kind '" + kind + "'");
        for (std::string kv : split(body, ',')) {
            kv = trim(kv);
            if (kv.empty()) continue;
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: bump option needs key=value: " + kv);
            std::string key = trim(kv.substr(0, eq)), val = trim(kv.substr(eq + 1));
            if (key == "amp") b.amplitude = to_double(val, "bump.amp");
            else if (key == "width") b.width = to_double(val, "bump.width");
            else if (key == "power") b.power = to_double(val, "bump.power");
            else if (key == "r0") b.radius = to_double(val, "bump.r0");
            else if (key == "center") {
                b.center.clear();
                std::istringstream iss(val);
                double c;
                while (iss >> c) b.center.push_back(c);
                if ((int)b.center.size() != N)
                    throw std::invalid_argument("config: bump center needs N coordinates");
            } else {
                throw std::invalid_argument("config: unknown bump option '" + key + "'");
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.potential.N = c.N;
    c.potential.a0 = 1.0;
    c.potential.bumps.push_back({kcheck::BumpKind::ring, 0.5, {}, 1.0, 0.0, 1.3});
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig c = defaults();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "problem.N") c.N = to_int(val, key);
        else if (key == "problem.lambda") c.lambda = to_double(val, key);
        else if (key == "grid.n") c.grid_n = to_int(val, key);
        else if (key == "grid.map") c.grid_map = val;
        else if (key == "grid.scale") c.grid_scale = to_double(val, key);
        else if (key == "sphere.degree") c.sphere_degree = to_int(val, key);
        else if (key == "potential.a0") c.potential.a0 = to_double(val, key);
        else if (key == "potential.bumps") {
            c.potential.bumps = parse_bumps(val, c.N);
        } else if (key == "eps.list") {
            c.eps_list.clear();
            for (const auto& s : split(val, ','))
                if (!trim(s).empty()) c.eps_list.push_back(to_double(trim(s), key));
        } else if (key == "box.mu_min") c.box_mu_min = to_double(val, key);
        else if (key == "box.mu_max") c.box_mu_max = to_double(val, key);
        else if (key == "box.xi_halfwidth") c.box_xi_halfwidth = to_double(val, key);
        else if (key == "tol.contraction") c.tol_contraction = to_double(val, key);
        else if (key == "tol.max_iter") c.max_iter = to_int(val, key);
        else if (key == "tol.eps_max") c.eps_max = to_double(val, key);
        else if (key == "upsilon.n") c.upsilon_n = to_int(val, key);
        else if (key == "upsilon.degree") c.upsilon_degree = to_int(val, key);
        else if (key == "scan.points") c.scan_points = to_int(val, key);
        else if (key == "kcheck.box") c.kcheck_box = to_double(val, key);
        else if (key == "kcheck.multistart") c.kcheck_multistart = to_int(val, key);
        else if (key == "out.dir") c.out_dir = val;
        else if (key == "cache.dir") c.cache_dir = val;
        else if (key == "jobs") c.jobs = to_int(val, key);
        else if (key == "seed") c.seed = (unsigned)to_int(val, key);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    c.potential.N = c.N;
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (N < 3) throw std::invalid_argument("config: problem.N >= 3");
    if (!(lambda > 0.0) || !(lambda < N))
        throw std::invalid_argument("config: problem.lambda in (0, N)");
    if (grid_n < 8) throw std::invalid_argument("config: grid.n >= 8");
    if (grid_map != "rational") throw std::invalid_argument("config: unknown grid.map");
    if (!(grid_scale > 0)) throw std::invalid_argument("config: grid.scale > 0");
    if (sphere_degree < 1) throw std::invalid_argument("config: sphere.degree >= 1");
    if (!(box_mu_min > 0) || !(box_mu_max > box_mu_min))
        throw std::invalid_argument("config: box.mu bounds invalid");
    if (box_xi_halfwidth < 0) throw std::invalid_argument("config: box.xi_halfwidth >= 0");
    if (!(tol_contraction > 0)) throw std::invalid_argument("config: tol.contraction > 0");
    if (max_iter < 1) throw std::invalid_argument("config: tol.max_iter >= 1");
    if (jobs < 1) throw std::invalid_argument("config: jobs >= 1");
    for (double e : eps_list)
        if (e < 0) throw std::invalid_argument("config: eps.list entries >= 0");
    potential.validate();
}

}  // namespace choquard
