#pragma once

#include <stdexcept>
#include <string>

namespace plastokh {

struct HorizonExceeded : std::runtime_error {
    explicit HorizonExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    double residual;
    long iterations;
    NoConvergence(const std::string& what, double res, long iters)
        : std::runtime_error(what + " (residual=" + std::to_string(res) +
                             " after " + std::to_string(iters) + " iterations)"),
          residual(res), iterations(iters) {}
};

struct NotStochastic : std::runtime_error {
    explicit NotStochastic(const std::string& what) : std::runtime_error(what) {}
};

struct NotSolvable : std::runtime_error {
    double nu_f;
    explicit NotSolvable(double nu)
        : std::runtime_error("complete problem not solvable: nu(f)=" + std::to_string(nu)),
          nu_f(nu) {}
};

struct DegenerateDenominator : std::runtime_error {
    explicit DegenerateDenominator(const std::string& what) : std::runtime_error(what) {}
};

struct NullspaceDimension : std::runtime_error {
    explicit NullspaceDimension(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidResolution : std::invalid_argument {
    explicit InvalidResolution(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidTruncation : std::invalid_argument {
    explicit InvalidTruncation(const std::string& what) : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& msg)
        : std::runtime_error("parse error at line " + std::to_string(ln) + ": " + msg),
          line(ln) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace plastokh
