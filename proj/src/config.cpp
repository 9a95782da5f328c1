#include "plastokh/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "plastokh/errors.hpp"

namespace plastokh {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ParseError(line, "expected a number, got '" + v + "'");
    return x;
}

long parse_long(const std::string& v, int line) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ParseError(line, "expected an integer, got '" + v + "'");
    return x;
}

uint64_t parse_u64(const std::string& v, int line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
    return static_cast<uint64_t>(x);
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError(line, "expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw, section;
    std::map<std::string, bool> seen;
    int line = 0;

    while (std::getline(in, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            static const char* known[] = {"model",   "cycle",   "grid",    "solver",
                                          "mc",      "ergodic", "problem", "outputs"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw ParseError(line, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) throw ParseError(line, "key outside any section");
        const std::string full = section + "." + key;
        if (seen[full]) throw ParseError(line, "duplicate key " + full);
        seen[full] = true;

        if (full == "model.alpha") c.model.alpha = parse_double(val, line);
        else if (full == "model.beta") c.model.beta = parse_double(val, line);
        else if (full == "model.c0") c.model.c0 = parse_double(val, line);
        else if (full == "model.k") c.model.k = parse_double(val, line);
        else if (full == "model.Y") c.model.Y = parse_double(val, line);
        else if (full == "model.L") c.model.L = parse_double(val, line);
        else if (full == "cycle.ybar") c.cycle.ybar = parse_double(val, line);
        else if (full == "cycle.ybar1") c.cycle.ybar1 = parse_double(val, line);
        else if (full == "grid.nx") c.nx = static_cast<int>(parse_long(val, line));
        else if (full == "grid.ny_per_band") c.ny_per_band = static_cast<int>(parse_long(val, line));
        else if (full == "grid.nz") c.nz = static_cast<int>(parse_long(val, line));
        else if (full == "grid.y_max") c.y_max = parse_double(val, line);
        else if (full == "solver.tol") c.solver.tol = parse_double(val, line);
        else if (full == "solver.max_iter") c.solver.max_iter = parse_long(val, line);
        else if (full == "solver.relaxation") c.solver.relaxation = parse_double(val, line);
        else if (full == "solver.epsilon_z") c.epsilon_z = parse_double(val, line);
        else if (full == "solver.march") c.march = parse_bool(val, line);
        else if (full == "mc.dt") c.mc.dt = parse_double(val, line);
        else if (full == "mc.n_paths") c.mc.n_paths = parse_long(val, line);
        else if (full == "mc.horizon") c.mc.horizon = parse_double(val, line);
        else if (full == "mc.burn_in") c.mc.burn_in = parse_double(val, line);
        else if (full == "mc.seed") c.mc.seed = parse_u64(val, line);
        else if (full == "ergodic.stochastic_tol") c.stochastic_tol = parse_double(val, line);
        else if (full == "ergodic.gamma_tol") c.gamma_tol = parse_double(val, line);
        else if (full == "ergodic.gamma_max_iter") c.gamma_max_iter = parse_long(val, line);
        else if (full == "ergodic.solvability_tol") c.solvability_tol = parse_double(val, line);
        else if (full == "ergodic.series_tol") c.series_tol = parse_double(val, line);
        else if (full == "ergodic.series_max_terms") c.series_max_terms = parse_long(val, line);
        else if (full == "ergodic.fp_tol") c.fp_tol = parse_double(val, line);
        else if (full == "ergodic.fp_max_iter") c.fp_max_iter = parse_long(val, line);
        else if (full == "problem.function") c.function = val;
        else if (full == "problem.center") c.center = parse_bool(val, line);
        else if (full == "outputs.dir") c.out_dir = val;
        else if (full == "outputs.parallel") c.parallel = parse_bool(val, line);
        else throw ParseError(line, "unknown key " + full);
    }

    const ValidationReport rep = validate_params(c.model, c.cycle);
    if (!rep.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw ValidationError(msg);
    }
    if (c.solver.tol <= 0 || c.solver.max_iter <= 0)
        throw ValidationError("solver.tol and solver.max_iter must be positive");
    if (c.solver.relaxation <= 0 || c.solver.relaxation >= 2)
        throw ValidationError("solver.relaxation must lie in (0,2)");
    if (c.epsilon_z < 0) throw ValidationError("solver.epsilon_z must be nonnegative");
    if (c.y_max <= c.cycle.ybar1) throw ValidationError("grid.y_max must exceed cycle.ybar1");
    if (c.mc.dt <= 0 || c.mc.horizon <= 0 || c.mc.n_paths <= 0 || c.mc.burn_in < 0)
        throw ValidationError("mc block must be positive (burn_in nonnegative)");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[model]\n"
      << "alpha = " << fmt(c.model.alpha) << "\n"
      << "beta = " << fmt(c.model.beta) << "\n"
      << "c0 = " << fmt(c.model.c0) << "\n"
      << "k = " << fmt(c.model.k) << "\n"
      << "Y = " << fmt(c.model.Y) << "\n"
      << "L = " << fmt(c.model.L) << "\n\n"
      << "[cycle]\n"
      << "ybar = " << fmt(c.cycle.ybar) << "\n"
      << "ybar1 = " << fmt(c.cycle.ybar1) << "\n\n"
      << "[grid]\n"
      << "nx = " << c.nx << "\n"
      << "ny_per_band = " << c.ny_per_band << "\n"
      << "nz = " << c.nz << "\n"
      << "y_max = " << fmt(c.y_max) << "\n\n"
      << "[solver]\n"
      << "tol = " << fmt(c.solver.tol) << "\n"
      << "max_iter = " << c.solver.max_iter << "\n"
      << "relaxation = " << fmt(c.solver.relaxation) << "\n"
      << "epsilon_z = " << fmt(c.epsilon_z) << "\n"
      << "march = " << (c.march ? "true" : "false") << "\n\n"
      << "[mc]\n"
      << "dt = " << fmt(c.mc.dt) << "\n"
      << "n_paths = " << c.mc.n_paths << "\n"
      << "horizon = " << fmt(c.mc.horizon) << "\n"
      << "burn_in = " << fmt(c.mc.burn_in) << "\n"
      << "seed = " << c.mc.seed << "\n\n"
      << "[ergodic]\n"
      << "stochastic_tol = " << fmt(c.stochastic_tol) << "\n"
      << "gamma_tol = " << fmt(c.gamma_tol) << "\n"
      << "gamma_max_iter = " << c.gamma_max_iter << "\n"
      << "solvability_tol = " << fmt(c.solvability_tol) << "\n"
      << "series_tol = " << fmt(c.series_tol) << "\n"
      << "series_max_terms = " << c.series_max_terms << "\n"
      << "fp_tol = " << fmt(c.fp_tol) << "\n"
      << "fp_max_iter = " << c.fp_max_iter << "\n\n"
      << "[problem]\n"
      << "function = " << c.function << "\n"
      << "center = " << (c.center ? "true" : "false") << "\n\n"
      << "[outputs]\n"
      << "dir = " << c.out_dir << "\n"
      << "parallel = " << (c.parallel ? "true" : "false") << "\n";
    return o.str();
}

} // namespace plastokh
