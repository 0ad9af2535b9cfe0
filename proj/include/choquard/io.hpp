#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "choquard/kcheck.hpp"
#include "choquard/reduction.hpp"

namespace choquard::io {

using json = nlohmann::ordered_json;

json to_json(const kcheck::AssumptionReport& rep);
json to_json(const reduction::ReducedPoint& rp);
json to_json(const reduction::CriticalPoint& cp);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

// CSV scan table; header first, '%.17g' cells, deterministic layout
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Binary field dump: "BRFD" | version u32 | grid hash u64 | count u32 |
// count doubles, little endian.
void write_field(const std::string& path, const GridFunction& f);
GridFunction read_field(const std::string& path, std::shared_ptr<const RadialGrid> grid);

}  // namespace choquard::io
