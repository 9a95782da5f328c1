#include <doctest.h>

#include <cmath>
#include <numeric>

#include "plastokh/ergodic.hpp"
#include "plastokh/errors.hpp"
#include "plastokh/testfuncs.hpp"

using namespace plastokh;

namespace {

ModelParams desk() {
    ModelParams p;
    p.beta = 0.05;
    p.Y = 0.1;
    return p;
}

const CycleLevels levels{0.5, 1.0};

struct Setup {
    Grid3 grid;
    SolveContext ctx;

    Setup() : grid(build_grid(desk(), levels, 5, 2, 5, 5.0)) {
        ctx.grid = &grid;
        ctx.params = desk();
        ctx.cycle = levels;
        ctx.fp_tol = 1e-12;
    }
};

double scalar_one(double, double, double) { return 1.0; }

} // namespace

TEST_CASE("flatten and unflatten are inverse") {
    const Setup s;
    SurfaceField f(s.grid, SurfaceLevel::Gamma1);
    for (long i = 0; i < f.sheet_size(); ++i) {
        f.upper[i] = static_cast<double>(i);
        f.lower[i] = -static_cast<double>(i) - 1.0;
    }
    const std::vector<double> v = flatten(f);
    CHECK(v.front() == -1.0); // lower sheet first
    const SurfaceField g = unflatten(s.grid, SurfaceLevel::Gamma1, v);
    CHECK(g.upper == f.upper);
    CHECK(g.lower == f.lower);
}

TEST_CASE("the chain preserves constants and respects the sup bound") {
    const Setup s;
    const SurfaceField one_f = SurfaceField::constant(s.grid, SurfaceLevel::Gamma1, 1.0);
    const SurfaceField p1 = apply_P(one_f, s.ctx);
    // a little probability escapes through the y truncation on a coarse grid
    for (double v : p1.upper) CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
    for (double v : p1.lower) CHECK(v == doctest::Approx(1.0).epsilon(1e-5));

    const SurfaceField probe = SurfaceField::sample(
        s.grid, SurfaceLevel::Gamma1,
        [](double x, double z) { return std::sin(3 * x) + 20.0 * z; },
        [](double x, double) { return std::cos(5 * x); });
    const SurfaceField pp = apply_P(probe, s.ctx);
    CHECK(pp.sup_norm() <= probe.sup_norm() + 1e-9);
}

TEST_CASE("matrix assembly reproduces apply_P column by column") {
    const Setup s;
    const PMatrix P = assemble_P_matrix(s.ctx);
    REQUIRE(P.n == 2 * s.grid.nx() * s.grid.nz());

    SurfaceField probe(s.grid, SurfaceLevel::Gamma1);
    for (long i = 0; i < probe.sheet_size(); ++i) {
        probe.upper[i] = std::sin(0.1 * static_cast<double>(i) + 0.3);
        probe.lower[i] = std::cos(0.2 * static_cast<double>(i));
    }
    const std::vector<double> direct = flatten(apply_P(probe, s.ctx));
    const std::vector<double> via_matrix = P.apply(flatten(probe));
    for (long r = 0; r < P.n; ++r)
        CHECK(via_matrix[r] == doctest::Approx(direct[r]).epsilon(1e-8));
}

TEST_CASE("matrix rows are near-stochastic and the measure is invariant") {
    const Setup s;
    const PMatrix P = assemble_P_matrix(s.ctx);
    for (long r = 0; r < P.n; ++r) {
        double mass = 0.0;
        for (long c = 0; c < P.n; ++c) {
            CHECK(P.at(r, c) >= -1e-8);
            mass += P.at(r, c);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }

    const auto [gamma, diag] = boundary_invariant_measure(s.ctx, MeasureMode::Matrix, &P);
    CHECK(gamma.mass() == doctest::Approx(1.0).epsilon(1e-9));
    const std::vector<double> w = flatten(gamma.weights);
    const std::vector<double> pw = P.apply_adjoint(w);
    for (long r = 0; r < P.n; ++r)
        CHECK(pw[r] == doctest::Approx(w[r]).epsilon(1e-6).scale(1.0));
    CHECK(diag.r_squared > 0.5);
    CHECK(diag.rho_estimate > 0.0);
}

TEST_CASE("parallel and serial matrix assembly agree bitwise") {
    Setup s;
    s.ctx.parallel = false;
    const PMatrix a = assemble_P_matrix(s.ctx);
    s.ctx.parallel = true;
    const PMatrix b = assemble_P_matrix(s.ctx);
    CHECK(a.a == b.a);
}

TEST_CASE("nu is exactly one on constants and affine in the source") {
    const Setup s;
    const auto gamma = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
    CHECK(nu_functional(scalar_one, s.ctx, gamma) == 1.0);

    const auto f = [](double x, double y, double z) {
        return std::tanh(y) + 0.2 * x + z;
    };
    const double nf = nu_functional(f, s.ctx, gamma);
    const auto shifted = [&](double x, double y, double z) { return 2.0 * f(x, y, z) - 3.0; };
    CHECK(nu_functional(shifted, s.ctx, gamma) ==
          doctest::Approx(2.0 * nf - 3.0).epsilon(1e-7));
}

TEST_CASE("stationary density: structure of the masses") {
    const Setup s;
    const InvariantMeasure m = solve_stationary_density(s.ctx);
    const Grid3& g = s.grid;
    CHECK(std::accumulate(m.masses.begin(), m.masses.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.total_mass(g) == doctest::Approx(1.0).epsilon(1e-12));

    const NodeIndexer idx(g, Region::Full);
    for (long r = 0; r < static_cast<long>(m.masses.size()); ++r) {
        CHECK(m.masses[r] >= 0.0);
        int i, j, k;
        idx.decode(r, i, j, k);
        const double y = g.ys[j];
        if (j == 0 || j == g.ny() - 1) CHECK(m.masses[r] == 0.0);
        if (k == g.nz() - 1 && y < 0.0) CHECK(m.masses[r] == 0.0);
        if (k == 0 && y > 0.0) CHECK(m.masses[r] == 0.0);
    }
    // both plastic phases carry strictly positive probability
    double plus = 0.0, minus = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = m.plastic_plus.j_lo; j <= m.plastic_plus.j_hi; ++j)
            plus += m.plastic_plus.at(i, j);
        for (int j = m.plastic_minus.j_lo; j <= m.plastic_minus.j_hi; ++j)
            minus += m.plastic_minus.at(i, j);
    }
    CHECK(plus > 0.0);
    CHECK(minus > 0.0);
    // symmetric dynamics under (x,y,z) -> (-x,-y,-z): the two faces balance
    CHECK(plus == doctest::Approx(minus).epsilon(1e-6));
}

TEST_CASE("stationarity residual is small for a centered bump") {
    const Setup s;
    const InvariantMeasure m = solve_stationary_density(s.ctx);
    const TestFunction f = testfuncs::bump_product(0.0, 0.6, 0.0, 0.4, 0.0, 0.06);
    CHECK(std::abs(stationarity_residual(f, m, s.ctx.params)) < 0.5);
}

TEST_CASE("complete problem rejects an uncentered source") {
    const Setup s;
    const auto gamma = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
    CHECK_THROWS_AS(solve_complete_problem(scalar_one, s.ctx, &gamma), NotSolvable);
}

TEST_CASE("complete problem solves a centered source") {
    Setup s;
    const auto gamma = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
    const auto f = [](double, double y, double) { return std::tanh(2.0 * y); };
    const double nf = nu_functional(f, s.ctx, gamma);
    const auto centered = [&](double x, double y, double z) { return f(x, y, z) - nf; };
    const CompleteSolution sol = solve_complete_problem(centered, s.ctx, &gamma);
    CHECK(std::abs(sol.nu_f) <= s.ctx.solvability_tol);
    CHECK(sol.series_terms >= 2);
    CHECK(sol.series_tail <= s.ctx.series_tol);
    CHECK(sol.glue_residual < 0.5);
    CHECK(std::isfinite(sol.pde_residual));
}

TEST_CASE("mc boundary measure concentrates where the matrix one does") {
    Setup s;
    s.ctx.mc.dt = 1e-3;
    s.ctx.mc.horizon = 500.0;
    s.ctx.mc.n_paths = 2000;
    s.ctx.mc.seed = 99;
    const auto mc = boundary_invariant_measure(s.ctx, MeasureMode::Mc).first;
    const auto mx = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
    CHECK(mc.mass() == doctest::Approx(1.0).epsilon(1e-9));
    // coarse comparison: sheet masses agree within MC accuracy
    const auto sheet_mass = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    CHECK(sheet_mass(mc.weights.upper) ==
          doctest::Approx(sheet_mass(mx.weights.upper)).epsilon(0.15));
}

TEST_CASE("geometric fit recovers an exact exponential") {
    ErgodicDiagnostics d;
    for (int n = 0; n < 30; ++n) d.sup_diffs.push_back(2.0 * std::pow(0.6, n));
    fit_geometric_rate(d, 5);
    CHECK(d.rho_estimate == doctest::Approx(-std::log(0.6)).epsilon(1e-10));
    CHECK(d.K_estimate == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d.r_squared == doctest::Approx(1.0));
}
