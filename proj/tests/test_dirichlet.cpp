#include <doctest.h>

#include <cmath>
#include <vector>

#include "plastokh/dirichlet.hpp"
#include "plastokh/rng.hpp"

using namespace plastokh;

namespace {

ModelParams desk() {
    ModelParams p;
    p.beta = 0.05;
    p.Y = 0.1;
    return p;
}

const CycleLevels levels{0.5, 1.0};

// fixed-step Simpson oracle for the kernel integrand
double simpson_exp(double a, double b, const ModelParams& p) {
    const int n = 20000; // even
    const double h = (b - a) / n;
    const auto f = [&](double t) { return std::exp(p.c0 * t * t + 2.0 * p.k * p.Y * t); };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("kernel_I against a fixed-step Simpson oracle") {
    const ModelParams p = desk();
    const double den = simpson_exp(0.0, levels.ybar1, p);
    for (auto [a, b] : {std::pair{0.0, 0.3}, {0.2, 0.9}, {0.0, 1.0}, {0.7, 1.0}}) {
        const double oracle = simpson_exp(a, b, p) / den;
        CHECK(kernel_I(a, b, p, levels) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(kernel_I(0.0, levels.ybar1, p, levels) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kernel_I(0.4, 0.4, p, levels) == doctest::Approx(0.0));
}

TEST_CASE("kernel_I is additive in its interval") {
    const ModelParams p = desk();
    CHECK(kernel_I(0.0, 0.4, p, levels) + kernel_I(0.4, 1.0, p, levels) ==
          doctest::Approx(kernel_I(0.0, 1.0, p, levels)).epsilon(1e-12));
}

TEST_CASE("constant boundary data produces the constant solution") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const SurfaceField phi = SurfaceField::constant(g, SurfaceLevel::Gamma1, 2.5);
    const InteriorSolution sol = solve_interior(g, desk(), phi);
    for (double v : sol.eta.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("interior solve is linear in the data") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const SurfaceField a = SurfaceField::sample(
        g, SurfaceLevel::Gamma1, [](double x, double z) { return x + z; },
        [](double x, double) { return x; });
    const SurfaceField b = SurfaceField::sample(
        g, SurfaceLevel::Gamma1, [](double x, double z) { return std::cos(x) * z; },
        [](double, double z) { return z; });
    SurfaceField combo(g, SurfaceLevel::Gamma1);
    for (long i = 0; i < combo.sheet_size(); ++i) {
        combo.upper[i] = 2.0 * a.upper[i] - 3.0 * b.upper[i];
        combo.lower[i] = 2.0 * a.lower[i] - 3.0 * b.lower[i];
    }
    const Field3 ua = solve_interior(g, desk(), a).eta;
    const Field3 ub = solve_interior(g, desk(), b).eta;
    const Field3 uc = solve_interior(g, desk(), combo).eta;
    for (long r = 0; r < uc.size(); ++r)
        CHECK(uc.values[r] ==
              doctest::Approx(2.0 * ua.values[r] - 3.0 * ub.values[r]).epsilon(1e-8));
}

TEST_CASE("exterior marching agrees with the coupled band solve") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const SurfaceField h = SurfaceField::sample(
        g, SurfaceLevel::Gamma,
        [](double x, double z) { return std::cos(x) + 10.0 * z; },
        [](double x, double z) { return std::sin(x) - 5.0 * z; });
    DirichletOptions march, coupled;
    march.march = true;
    coupled.march = false;
    const Field3 um = solve_exterior(g, desk(), h, march).zeta;
    const Field3 uc = solve_exterior(g, desk(), h, coupled).zeta;
    for (long r = 0; r < um.size(); ++r)
        CHECK(um.values[r] == doctest::Approx(uc.values[r]).epsilon(1e-7));
}

TEST_CASE("exterior solution vanishes at the truncation") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const SurfaceField h = SurfaceField::constant(g, SurfaceLevel::Gamma, 1.0);
    const Field3 u = solve_exterior(g, desk(), h).zeta;
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            CHECK(u.at(i, 0, k) == 0.0);
            CHECK(u.at(i, g.ny() - 1, k) == 0.0);
            CHECK(u.at(i, g.j_ybar, k) == 1.0);
            CHECK(u.at(i, g.j_m_ybar, k) == 1.0);
        }
}

TEST_CASE("uncoupled excitation: the 3D solution is x-independent") {
    ModelParams p1 = desk();
    p1.beta = 0.0;
    const Grid3 g = build_grid(p1, levels, 5, 3, 5, 3.0);
    const double Y = p1.Y;
    const SurfaceField phi = SurfaceField::sample(
        g, SurfaceLevel::Gamma1,
        [Y](double, double z) { return std::cos(M_PI * z / Y); },
        [Y](double, double z) { return z / Y; });
    const Field3 u = solve_interior(g, p1, phi).eta;
    for (int j = g.j_m_ybar1; j <= g.j_ybar1; ++j)
        for (int k = 0; k < g.nz(); ++k)
            for (int i = 1; i < g.nx(); ++i)
                CHECK(u.at(i, j, k) == doctest::Approx(u.at(0, j, k)).epsilon(1e-8));
}

TEST_CASE("the planar reference embeds its own boundary data") {
    ModelParams p1 = desk();
    p1.beta = 0.0;
    const Grid3 g = build_grid(p1, levels, 5, 4, 7, 3.0);
    const auto up = [&](double z) { return std::cos(M_PI * z / p1.Y); };
    const auto lo = [&](double z) { return 0.5 * z / p1.Y; };
    const Ref1d ref = solve_1d_reference(g, p1, up, lo);
    REQUIRE(ref.ny() == g.j_ybar1 - g.j_m_ybar1 + 1);
    for (int k = 0; k < ref.nz(); ++k) {
        CHECK(ref.at(ref.ny() - 1, k) == doctest::Approx(up(ref.zs[k])));
        CHECK(ref.at(0, k) == doctest::Approx(lo(ref.zs[k])));
    }
    // the face lines obey the closed-form two-point identity
    for (int j = 1; j < ref.ny() - 1; ++j) {
        const double y = ref.ys[j];
        if (y > 0.0) {
            const double pred = ref.eta_plus * kernel_I(y, levels.ybar1, p1, levels) +
                                up(p1.Y) * kernel_I(0.0, y, p1, levels);
            CHECK(ref.at(j, ref.nz() - 1) == doctest::Approx(pred).epsilon(1e-9));
        } else if (y < 0.0) {
            const double pred = ref.eta_minus * kernel_I(-y, levels.ybar1, p1, levels) +
                                lo(-p1.Y) * kernel_I(0.0, -y, p1, levels);
            CHECK(ref.at(j, 0) == doctest::Approx(pred).epsilon(1e-9));
        }
    }
}

TEST_CASE("face solve reproduces constants") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const std::vector<double> inner(g.nx(), 4.0), outer(g.nx(), 4.0);
    const FaceField u =
        solve_face_plus(inner, outer, Face::Plus, Region::Interior, g, desk());
    for (double v : u.values) CHECK(v == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("source problems: sign and zero boundary data") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const auto one = [](double, double, double) { return 1.0; };
    const InteriorSolution chi = solve_interior_nonhom(g, desk(), one);
    // expected exit time: positive inside, zero on the data surfaces
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            CHECK(chi.eta.at(i, g.j_ybar1, k) == 0.0);
            CHECK(chi.eta.at(i, g.j_m_ybar1, k) == 0.0);
            CHECK(chi.eta.at(i, g.j_zero, k) > 0.0);
        }

    const ExteriorSolution xi = solve_exterior_nonhom(g, desk(), one, nullptr);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            CHECK(xi.zeta.at(i, g.j_ybar, k) == 0.0);
            CHECK(xi.zeta.at(i, g.j_m_ybar, k) == 0.0);
        }
}

TEST_CASE("barrier parameters dominate every lower bound") {
    const ModelParams p = desk();
    for (double f_sup : {0.5, 1.0, 10.0}) {
        const BarrierGauge bar = BarrierGauge::interior(f_sup, p, levels);
        CHECK(bar.lambda >= 1.0);
        CHECK(bar.lambda >= 2.0 * f_sup / p.c0);
        CHECK(bar.lambda >=
              1.0 + (p.k * p.Y + p.beta * p.L) * (p.k * p.Y + p.beta * p.L) / p.c0);
        CHECK(bar.interior_bound(p, levels) >=
              bar.phi(levels.ybar1, p.Y, p) - 1e-12);
    }
}

TEST_CASE("gauge vanishes at the inner exterior boundary and grows outward") {
    const ModelParams p = desk();
    const BarrierGauge gauge = BarrierGauge::exterior(1.0, p, levels);
    CHECK(gauge.psi(levels.ybar) == doctest::Approx(0.0));
    CHECK(gauge.psi(levels.ybar1) > 0.0);
    CHECK(gauge.psi(3.0) > gauge.psi(1.0));
    CHECK(gauge.gamma_scale * p.c0 / 2.0 >= 1.0);
}
