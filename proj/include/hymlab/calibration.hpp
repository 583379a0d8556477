#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hymlab/curvature.hpp"
#include "hymlab/errors.hpp"

namespace hymlab {

// One immutable calibration per process run. c_norm pins the energy unit
// (charge-1 instanton = 8 pi^2); the envelope constants turn the estimate
// forms into definite numbers: env_mean/env_curv (and the first-derivative
// constant env_mean_k1, which inherits the C^3 norm of the cutoff profile
// and is much larger) are 2x the empirical supremum of measured/bound over
// the region where the glued metric equals the ansatz metric. env_inner is
// fixed at 10 in the glue/core region where no exact computation exists.
struct Calibration {
    double c_norm = 4.0;
    double env_mean = 150.0;
    double env_mean_k1 = 8000.0;
    double env_curv = 150.0;
    double env_inner = 10.0;
    std::string source = "builtin";
    std::uint64_t file_hash = 0;

    NormConvention norm() const { return NormConvention{c_norm}; }
};

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string serialize(const Calibration& c) {
    std::ostringstream os;
    os.precision(17);
    os << "c_norm=" << c.c_norm << "\n";
    os << "env_mean=" << c.env_mean << "\n";
    os << "env_mean_k1=" << c.env_mean_k1 << "\n";
    os << "env_curv=" << c.env_curv << "\n";
    os << "env_inner=" << c.env_inner << "\n";
    return os.str();
}

inline Calibration parse_calibration(const std::string& text, const std::string& source) {
    std::map<std::string, double> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("calibration file: expected key=value, got '" + line + "'");
        kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    }
    Calibration c;
    for (auto& [key, val] : kv) {
        if (key == "c_norm") c.c_norm = val;
        else if (key == "env_mean") c.env_mean = val;
        else if (key == "env_mean_k1") c.env_mean_k1 = val;
        else if (key == "env_curv") c.env_curv = val;
        else if (key == "env_inner") c.env_inner = val;
        else throw PreconditionError("calibration file: unknown key '" + key + "'");
    }
    c.source = source;
    c.file_hash = fnv1a(text);
    return c;
}

inline Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open calibration file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_calibration(ss.str(), path);
}

inline void save_calibration(const Calibration& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ComputeError("cannot write calibration file: " + path);
    out << serialize(c);
}

}  // namespace hymlab
