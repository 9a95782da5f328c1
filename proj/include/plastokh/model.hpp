#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace plastokh {

/// Physical constants of the oscillator and its filtered excitation.
/// All quantities are dimensionless.
struct ModelParams {
    double alpha = 1.0; ///< OU relaxation rate of the excitation x(t)
    double beta = 0.0;  ///< coupling of x into the velocity equation; beta=0 is the 1d case
    double c0 = 1.0;    ///< viscous damping
    double k = 1.0;     ///< stiffness
    double Y = 1.0;     ///< plastic yield bound, |z| <= Y
    double L = 1.0;     ///< reflection bound of the excitation, |x| <= L

    bool operator==(const ModelParams&) const = default;
};

/// Cycle thresholds on |y| defining the embedded chain: a cycle runs from
/// |y| = ybar1 down to |y| = ybar and back out to |y| = ybar1.
struct CycleLevels {
    double ybar = 0.5;
    double ybar1 = 1.0;

    bool operator==(const CycleLevels&) const = default;
};

/// Oscillator state (excitation, velocity, deformation) plus elapsed time.
struct State {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;
};

enum class Phase { Elastic, PlasticPlus, PlasticMinus };

/// Smooth test function with caller-supplied analytic derivatives.
/// hess_diag returns (d2/dx2, d2/dy2); the generator has no second
/// derivative in z.
struct TestFunction {
    std::function<double(double, double, double)> value;
    std::function<std::array<double, 3>(double, double, double)> grad;
    std::function<std::array<double, 2>(double, double, double)> hess_diag;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_params(const ModelParams& p, const CycleLevels& c);

/// Drift vector of the constrained dynamics at state s.
/// dz is y in the elastic phase and 0 while pinned at a plastic face.
std::array<double, 3> drift(const State& s, const ModelParams& p);

/// Phase classification. y = 0 on a face counts as Elastic; a face point
/// with wrong-sign velocity is instantaneously leaving and is Elastic too.
Phase phase_of(const State& s, const ModelParams& p);

/// Pointwise generator: A f in the elastic phase, B+ f / B- f on the
/// plastic faces.
double generator_apply(const TestFunction& f, const State& s, const ModelParams& p);

} // namespace plastokh
