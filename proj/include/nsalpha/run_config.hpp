#pragma once

#include <array>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsalpha/grid.hpp"

namespace nsalpha {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitKind { single_mode, random, file };

struct ForcingModeSpec {
    std::array<int, 3> n{};
    std::array<std::complex<double>, 3> amp{};
};

/// Everything a run needs, parsed from a flat key = value file.
struct RunConfig {
    std::string model = "custom";  // preset name or "custom"
    double theta1 = 0.0;           // used when model = custom
    double theta2 = 0.0;
    double alpha = 0.1;
    double nu = 1e-2;
    double L = two_pi;
    int N = 16;
    double dt = 0.0;  // 0 = automatic step-size selection
    double t_end = 1.0;
    unsigned long long seed = 1;

    InitKind init = InitKind::random;
    double init_decay = 4.0;
    std::array<int, 3> init_mode_k = {1, 0, 0};
    double init_amplitude = 1.0;
    std::string init_file;

    std::vector<ForcingModeSpec> forcing_modes;
    double forcing_scale = 1.0;

    int diag_interval = 10;
    double blowup_guard = 1e8;
    double c_const = 1.0;
    double cfl_visc = 0.25;
    double cfl_adv = 0.5;

    std::string records_csv = "run.csv";
    std::string manifest_json;  // empty = derived from records_csv
    std::string snapshot_path;  // empty = no snapshot

    double sing_threshold = 0.0;  // 0 = unset; analyze falls back to blowup_guard
    double sing_exponent = 0.0;   // 0 = unset; analyze derives it from the thetas

    std::string fftw_planner = "estimate";  // estimate | measure | patient
};

/// records.csv -> records.manifest.json (or append when no .csv suffix)
inline std::string default_manifest_path(const std::string& records_csv) {
    const std::string suffix = ".csv";
    if (records_csv.size() > suffix.size() &&
        records_csv.compare(records_csv.size() - suffix.size(), suffix.size(), suffix) == 0)
        return records_csv.substr(0, records_csv.size() - suffix.size()) + ".manifest.json";
    return records_csv + ".manifest.json";
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

inline std::array<int, 3> parse_int3(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    std::array<int, 3> out{};
    if (!(in >> out[0] >> out[1] >> out[2])) throw ConfigError("config: " + key + " needs 3 integers");
    std::string rest;
    if (in >> rest) throw ConfigError("config: " + key + " needs exactly 3 integers");
    return out;
}

// "kx ky kz re0 im0 re1 im1 re2 im2" per mode, modes separated by ';'
inline std::vector<ForcingModeSpec> parse_forcing_modes(const std::string& v) {
    std::vector<ForcingModeSpec> out;
    std::istringstream groups(v);
    std::string grp;
    while (std::getline(groups, grp, ';')) {
        grp = trim(grp);
        if (grp.empty()) continue;
        std::istringstream in(grp);
        ForcingModeSpec m;
        double re[3], im[3];
        if (!(in >> m.n[0] >> m.n[1] >> m.n[2] >> re[0] >> im[0] >> re[1] >> im[1] >> re[2] >> im[2]))
            throw ConfigError("config: forcing_modes entry needs 'kx ky kz' plus 3 complex amplitudes");
        for (int c = 0; c < 3; ++c) m.amp[c] = {re[c], im[c]};
        out.push_back(m);
    }
    return out;
}

}  // namespace detail

inline void validate_config(const RunConfig& c) {
    if (c.model != "custom" && c.model != "bardina" && c.model != "leray_alpha" &&
        c.model != "modified_leray_alpha")
        throw ConfigError("config: unknown model '" + c.model + "'");
    if (c.theta1 < 0.0 || c.theta1 > 1.0 || c.theta2 < 0.0 || c.theta2 > 1.0)
        throw ConfigError("config: theta exponents must lie in [0,1]");
    if (!(c.alpha > 0.0)) throw ConfigError("config: alpha must be > 0");
    if (!(c.nu > 0.0)) throw ConfigError("config: nu must be > 0");
    if (!(c.L > 0.0)) throw ConfigError("config: L must be > 0");
    if (c.N < 2) throw ConfigError("config: N must be >= 2");
    if (c.dt < 0.0) throw ConfigError("config: dt must be >= 0 (0 = automatic)");
    if (!(c.t_end > 0.0)) throw ConfigError("config: t_end must be > 0");
    if (c.init == InitKind::file && c.init_file.empty())
        throw ConfigError("config: init = file needs init_file");
    if (c.init == InitKind::random && c.init_decay < 0.0)
        throw ConfigError("config: init_decay must be >= 0");
    if (c.init == InitKind::single_mode) {
        const auto& k = c.init_mode_k;
        if (k[0] == 0 && k[1] == 0 && k[2] == 0)
            throw ConfigError("config: init_mode_k must be a nonzero mode");
        if (std::abs(k[0]) > c.N || std::abs(k[1]) > c.N || std::abs(k[2]) > c.N)
            throw ConfigError("config: init_mode_k outside the truncation");
    }
    if (c.diag_interval < 1) throw ConfigError("config: diag_interval must be >= 1");
    if (!(c.blowup_guard > 0.0)) throw ConfigError("config: blowup_guard must be > 0");
    if (!(c.c_const > 0.0)) throw ConfigError("config: c_const must be > 0");
    if (c.records_csv.empty()) throw ConfigError("config: records_csv must be set");
    if (c.fftw_planner != "estimate" && c.fftw_planner != "measure" && c.fftw_planner != "patient")
        throw ConfigError("config: fftw_planner must be estimate, measure or patient");
    if (c.sing_threshold < 0.0 || c.sing_exponent < 0.0 || c.sing_exponent > 1.0)
        throw ConfigError("config: singularity options out of range");
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));

        if (key == "model") c.model = val;
        else if (key == "theta1") c.theta1 = detail::parse_double(key, val);
        else if (key == "theta2") c.theta2 = detail::parse_double(key, val);
        else if (key == "alpha") c.alpha = detail::parse_double(key, val);
        else if (key == "nu") c.nu = detail::parse_double(key, val);
        else if (key == "L") c.L = detail::parse_double(key, val);
        else if (key == "N") c.N = static_cast<int>(detail::parse_int(key, val));
        else if (key == "dt") c.dt = detail::parse_double(key, val);
        else if (key == "t_end") c.t_end = detail::parse_double(key, val);
        else if (key == "seed") c.seed = static_cast<unsigned long long>(detail::parse_int(key, val));
        else if (key == "init") {
            if (val == "single_mode") c.init = InitKind::single_mode;
            else if (val == "random") c.init = InitKind::random;
            else if (val == "file") c.init = InitKind::file;
            else throw ConfigError("config: init must be single_mode, random or file");
        }
        else if (key == "init_decay") c.init_decay = detail::parse_double(key, val);
        else if (key == "init_mode_k") c.init_mode_k = detail::parse_int3(key, val);
        else if (key == "init_amplitude") c.init_amplitude = detail::parse_double(key, val);
        else if (key == "init_file") c.init_file = val;
        else if (key == "forcing") {
            if (val == "none") c.forcing_modes.clear();
            else if (val != "modes") throw ConfigError("config: forcing must be none or modes");
        }
        else if (key == "forcing_modes") c.forcing_modes = detail::parse_forcing_modes(val);
        else if (key == "forcing_scale") c.forcing_scale = detail::parse_double(key, val);
        else if (key == "diag_interval") c.diag_interval = static_cast<int>(detail::parse_int(key, val));
        else if (key == "blowup_guard") c.blowup_guard = detail::parse_double(key, val);
        else if (key == "c_const") c.c_const = detail::parse_double(key, val);
        else if (key == "cfl_visc") c.cfl_visc = detail::parse_double(key, val);
        else if (key == "cfl_adv") c.cfl_adv = detail::parse_double(key, val);
        else if (key == "records_csv") c.records_csv = val;
        else if (key == "manifest_json") c.manifest_json = val;
        else if (key == "snapshot_path") c.snapshot_path = val;
        else if (key == "sing_threshold") c.sing_threshold = detail::parse_double(key, val);
        else if (key == "sing_exponent") c.sing_exponent = detail::parse_double(key, val);
        else if (key == "fftw_planner") c.fftw_planner = val;
        else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    validate_config(c);
    return c;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace nsalpha
