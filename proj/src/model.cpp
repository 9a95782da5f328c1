#include "plastokh/model.hpp"

#include <sstream>

namespace plastokh {

ValidationReport validate_params(const ModelParams& p, const CycleLevels& c) {
    ValidationReport r;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) r.violations.push_back(msg);
    };
    require(p.alpha > 0.0, "alpha must be strictly positive");
    require(p.beta >= 0.0, "beta must be nonnegative");
    require(p.c0 > 0.0, "c0 must be strictly positive");
    require(p.k > 0.0, "k must be strictly positive");
    require(p.Y > 0.0, "Y must be strictly positive");
    require(p.L > 0.0, "L must be strictly positive");
    require(c.ybar > 0.0, "ybar must be strictly positive");
    require(c.ybar1 > 0.0, "ybar1 must be strictly positive");
    if (c.ybar > 0.0 && c.ybar1 > 0.0 && !(c.ybar < c.ybar1))
        r.violations.push_back("ybar < ybar1 fails");
    if (p.beta > 0.0 && 2.0 * c.ybar1 >= 1.0 / (2.0 * p.beta * p.L)) {
        std::ostringstream os;
        os << "2*ybar1 = " << 2.0 * c.ybar1 << " >= 1/(2*beta*L) = "
           << 1.0 / (2.0 * p.beta * p.L)
           << "; interior barrier bound is not available at these levels";
        r.warnings.push_back(os.str());
    }
    return r;
}

std::array<double, 3> drift(const State& s, const ModelParams& p) {
    const double dx = -p.alpha * s.x;
    const double dy = -(p.beta * s.x + p.c0 * s.y + p.k * s.z);
    const double dz = (phase_of(s, p) == Phase::Elastic) ? s.y : 0.0;
    return {dx, dy, dz};
}

Phase phase_of(const State& s, const ModelParams& p) {
    if (s.z >= p.Y && s.y > 0.0) return Phase::PlasticPlus;
    if (s.z <= -p.Y && s.y < 0.0) return Phase::PlasticMinus;
    return Phase::Elastic;
}

double generator_apply(const TestFunction& f, const State& s, const ModelParams& p) {
    const auto g = f.grad(s.x, s.y, s.z);
    const auto h = f.hess_diag(s.x, s.y, s.z);
    const double diffusion = 0.5 * h[0] + 0.5 * h[1];
    const double adv_x = -p.alpha * s.x * g[0];
    const double adv_y = -(p.beta * s.x + p.c0 * s.y + p.k * s.z) * g[1];
    switch (phase_of(s, p)) {
    case Phase::Elastic:
        return diffusion + adv_x + adv_y + s.y * g[2];
    case Phase::PlasticPlus:
        return diffusion + adv_x - (p.beta * s.x + p.c0 * s.y + p.k * p.Y) * g[1];
    case Phase::PlasticMinus:
        return diffusion + adv_x - (p.beta * s.x + p.c0 * s.y - p.k * p.Y) * g[1];
    }
    return 0.0;
}

} // namespace plastokh
