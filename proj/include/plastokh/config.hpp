#pragma once

#include <string>

#include "plastokh/fd_operator.hpp"
#include "plastokh/model.hpp"
#include "plastokh/sim.hpp"

namespace plastokh {

/// One archived run: model, grid resolution, solver and MC knobs, the
/// source term selection for the nonhomogeneous problems, output paths.
struct RunConfig {
    ModelParams model;
    CycleLevels cycle{0.5, 1.0};

    int nx = 9;
    int ny_per_band = 5;
    int nz = 9;
    double y_max = 3.0;

    SolverOptions solver;
    double epsilon_z = 0.0;
    bool march = true;

    McOptions mc;

    double stochastic_tol = 1e-6;
    double gamma_tol = 1e-10;
    long gamma_max_iter = 100000;
    double solvability_tol = 1e-4;
    double series_tol = 1e-9;
    long series_max_terms = 400;
    double fp_tol = 1e-13;
    long fp_max_iter = 4000000;

    std::string function = "one"; ///< source name from the basket
    bool center = false;          ///< replace f by f - nu(f)

    std::string out_dir = "out";
    bool parallel = true;

    bool operator==(const RunConfig&) const = default;
};

/// Sectioned key=value format; '#' starts a comment. Unknown sections or
/// keys and duplicate keys are errors; omitted keys keep their defaults.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& c);

} // namespace plastokh
