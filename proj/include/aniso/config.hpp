#pragma once

#include <cstdint>
#include <string>

#include "aniso/symbols.hpp"
#include "aniso/wavefront.hpp"

namespace ag {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    double s = 1.0;
    std::string window = "gaussian";

    // sampling grid for generated signals and Weyl application: [-T, T), n points
    double grid_T = 32.0;
    int grid_n = 4096;
    double edge_taper = 0.25;

    double lambda_min = 4.0;
    double lambda_max = 0.0;  // 0: automatic
    int lambda_points = 24;
    double n_thresh = 5.0;
    double r_max = 1.0;
    double cap_radius = 0.05;
    int sphere_res = 360;
    double tol_deg = 5.0;

    std::string out;
    std::string decay_csv;

    std::uint64_t seed = 1;
    double noise = 0.0;  // complex Gaussian noise amplitude added by `gen`

    void validate() const;
    EstimatorConfig estimator() const;

    std::string to_json() const;
    std::string to_toml() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig from_toml(const std::string& text);
    // format picked from the extension: .toml or .json
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    bool operator==(const RunConfig&) const = default;
};

// Symbol file: a polynomial term list (optionally wrapped as {"terms", "m", "s"}) or
// {"kind": "cutoff", "z0": [x, xi], "epsilon", "r", "s"}
Symbol symbol_from_json(const std::string& text);
Symbol load_symbol(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ag
