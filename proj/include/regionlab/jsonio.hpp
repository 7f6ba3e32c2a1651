#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "regionlab/error.hpp"

namespace regionlab {

using json = nlohmann::ordered_json;

/// Rounds to 12 significant digits, the precision used in every emitted
/// JSON/CSV number. Keeps diffs stable without machine-epsilon noise.
inline double round12(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return std::strtod(buffer, nullptr);
}

inline std::string format12(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

inline json round12_array(const std::vector<double>& values) {
    json array = json::array();
    for (double v : values)
        array.push_back(round12(v));
    return array;
}

inline void write_json(const std::string& path, const json& value) {
    std::ofstream out(path);
    require(out.good(), "cannot open '", path, "' for writing");
    out << value.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open '", path, "'");
    json value;
    try {
        in >> value;
    } catch (const std::exception& e) {
        fail("malformed JSON in '", path, "': ", e.what());
    }
    return value;
}

} // namespace regionlab
