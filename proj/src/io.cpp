#include "choquard/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace choquard::io {

json to_json(const kcheck::AssumptionReport& rep) {
    json j;
    j["k0"] = kcheck::to_string(rep.k0);
    j["k1"] = kcheck::to_string(rep.k1);
    j["k2"] = kcheck::to_string(rep.k2);
    j["k3"] = kcheck::to_string(rep.k3);
    j["k4"] = kcheck::to_string(rep.k4);
    j["all_pass"] = rep.all_pass();
    j["inf_k"] = rep.inf_k;
    j["sup_k"] = rep.sup_k;
    j["index_sum"] = rep.index_sum;
    j["parity"] = rep.parity;
    j["infinite_critical_set"] = rep.infinite_critical_set;
    j["rho"] = rep.rho;
    j["xgrad_integral"] = rep.xgrad_integral;
    json pts = json::array();
    for (const auto& cp : rep.critical_points) {
        json p;
        p["x"] = cp.x;
        p["hess_eigs"] = cp.hess_eigs;
        p["laplacian"] = cp.lap;
        p["index"] = cp.index;
        p["degenerate"] = cp.degenerate;
        p["included_in_sum"] = cp.included;
        pts.push_back(std::move(p));
    }
    j["critical_points"] = std::move(pts);
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

json to_json(const reduction::ReducedPoint& rp) {
    json j;
    j["mu"] = rp.b.mu;
    j["xi"] = rp.b.xi.empty() ? std::vector<double>{} : rp.b.xi;
    j["upsilon"] = rp.upsilon;
    j["grad_upsilon"] = rp.grad_upsilon;
    j["j_eps"] = rp.j_eps;
    j["c"] = rp.c;
    j["phi_norm"] = rp.phi_norm;
    j["classification"] = rp.classification;
    j["hess_eigs"] = rp.hess_eigs;
    return j;
}

json to_json(const reduction::CriticalPoint& cp) {
    json j;
    j["mu"] = cp.b.mu;
    j["xi"] = cp.b.xi.empty() ? std::vector<double>{} : cp.b.xi;
    j["upsilon"] = cp.upsilon;
    j["grad"] = cp.grad;
    j["hess_eigs"] = cp.hess_eigs;
    j["classification"] = cp.classification;
    j["index"] = cp.index;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open " + path);
    f << text;
    if (!f) throw std::runtime_error("io: write failed for " + path);
}

void write_json(const std::string& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += (i + 1 < header.size()) ? ',' : '\n';
    }
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += buf;
            out += (i + 1 < row.size()) ? ',' : '\n';
        }
    }
    write_text(path, out);
}

void write_field(const std::string& path, const GridFunction& f) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("io: cannot open " + path);
    o.write("BRFD", 4);
    std::uint32_t ver = 1, count = (std::uint32_t)f.values.size();
    std::uint64_t gh = f.grid->hash();
    o.write((const char*)&ver, 4);
    o.write((const char*)&gh, 8);
    o.write((const char*)&count, 4);
    o.write((const char*)f.values.data(), (std::streamsize)(count * 8));
    if (!o) throw std::runtime_error("io: write failed for " + path);
}

GridFunction read_field(const std::string& path, std::shared_ptr<const RadialGrid> grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, "BRFD", 4) != 0) throw std::runtime_error("io: bad field magic");
    std::uint32_t ver = 0, count = 0;
    std::uint64_t gh = 0;
    in.read((char*)&ver, 4);
    in.read((char*)&gh, 8);
    in.read((char*)&count, 4);
    if (ver != 1 || gh != grid->hash() || (int)count != grid->size())
        throw std::runtime_error("io: field/grid mismatch");
    GridFunction f;
    f.grid = std::move(grid);
    f.values.resize(count);
    in.read((char*)f.values.data(), (std::streamsize)(count * 8));
    if (!in) throw std::runtime_error("io: truncated field file");
    return f;
}

}  // namespace choquard::io
