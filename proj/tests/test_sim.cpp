#include <doctest.h>

#include <cmath>
#include <vector>

#include "plastokh/errors.hpp"
#include "plastokh/rng.hpp"
#include "plastokh/sim.hpp"

using namespace plastokh;

namespace {

ModelParams desk() {
    ModelParams p;
    p.beta = 0.05;
    p.Y = 0.1;
    return p;
}

} // namespace

TEST_CASE("one Euler step reproduces the explicit update") {
    const ModelParams p = desk();
    const State s{0.2, 0.3, 0.05, 1.0};
    const double dt = 1e-3, g1 = 0.01, g2 = -0.02;
    const State n = step(s, p, dt, g1, g2);
    CHECK(n.x == doctest::Approx(0.2 - 0.2 * dt + g1).epsilon(1e-15));
    CHECK(n.y ==
          doctest::Approx(0.3 - (0.05 * 0.2 + 0.3 + 0.05) * dt + g2).epsilon(1e-15));
    CHECK(n.z == doctest::Approx(0.05 + 0.3 * dt).epsilon(1e-15));
    CHECK(n.t == doctest::Approx(1.0 + dt));
}

TEST_CASE("the projections clamp both constrained coordinates") {
    const ModelParams p = desk();
    State s{0.999, 5.0, 0.0999, 0.0};
    State n = step(s, p, 1e-3, 0.5, 0.0);
    CHECK(n.x == p.L);
    CHECK(n.z == p.Y);
    s = {-0.999, -5.0, -0.0999, 0.0};
    n = step(s, p, 1e-3, -0.5, 0.0);
    CHECK(n.x == -p.L);
    CHECK(n.z == -p.Y);
}

TEST_CASE("dt admissibility guard") {
    McOptions o;
    o.dt = 1e-3;
    CHECK(mc_dt_admissible(o, desk()));
    o.dt = 0.5;
    CHECK_FALSE(mc_dt_admissible(o, desk()));
}

TEST_CASE("normal stream moments") {
    NormalStream s(12345);
    const long n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double v = s.next();
        sum += v;
        sum2 += v * v;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("substreams with distinct indices decorrelate") {
    NormalStream a = NormalStream::substream(7, 0);
    NormalStream b = NormalStream::substream(7, 1);
    double corr = 0.0;
    for (int i = 0; i < 10000; ++i) corr += a.next() * b.next();
    CHECK(std::abs(corr / 10000) < 0.05);
}

TEST_CASE("hit_level snaps onto the crossed level") {
    const ModelParams p = desk();
    McOptions o;
    o.dt = 1e-3;
    o.horizon = 200.0;
    NormalStream stream(99);
    const auto [hit, tau] = hit_level(State{}, 0.7, p, o, stream);
    CHECK(std::abs(hit.y) == 0.7);
    CHECK(tau > 0.0);
    CHECK(tau <= o.horizon);
}

TEST_CASE("hit_level throws when the horizon is too short") {
    const ModelParams p = desk();
    McOptions o;
    o.dt = 1e-3;
    o.horizon = 0.005; // five steps cannot reach |y| = 3 from rest
    NormalStream stream(1);
    CHECK_THROWS_AS(hit_level(State{}, 3.0, p, o, stream), HorizonExceeded);
}

TEST_CASE("a cycle visits the inner level before returning to the outer one") {
    const ModelParams p = desk();
    const CycleLevels c{0.5, 1.0};
    McOptions o;
    o.dt = 1e-3;
    o.horizon = 500.0;
    NormalStream stream(4242);
    const State s0{0.0, 1.0, 0.0, 0.0};
    const CycleSample cs =
        sample_cycle(s0, [](const State&) { return 1.0; }, p, c, o, stream);
    CHECK(std::abs(cs.hit_inner.y) == c.ybar);
    CHECK(std::abs(cs.hit_outer.y) == c.ybar1);
    CHECK(cs.tau_bar > 0.0);
    CHECK(cs.tau_bar1 > cs.tau_bar);
    // with f = 1 the cycle integral is the cycle duration up to one step
    CHECK(cs.integral == doctest::Approx(cs.tau_bar1).epsilon(0.01));
}

TEST_CASE("parallel ensembles reproduce the serial reference bitwise") {
    const ModelParams p = desk();
    McOptions o;
    o.dt = 1e-3;
    o.horizon = 100.0;
    const auto body = [&](long, NormalStream& stream) {
        return hit_level(State{}, 0.8, p, o, stream).second;
    };
    const std::vector<double> serial = ensemble_map(500, 31, body, false);
    const std::vector<double> parallel = ensemble_map(500, 31, body, true);
    CHECK(serial == parallel);
}

TEST_CASE("ensemble results depend on the path index, not the schedule") {
    const auto body = [](long idx, NormalStream& stream) {
        return stream.next() + static_cast<double>(idx);
    };
    const std::vector<double> a = ensemble_map(64, 5, body, true);
    const std::vector<double> b = ensemble_map(64, 5, body, true);
    CHECK(a == b);
    // substreams differ across indices
    CHECK(a[0] - 0.0 != a[1] - 1.0);
}

TEST_CASE("estimate_from_samples") {
    const McEstimate e = estimate_from_samples({1.0, 2.0, 3.0, 4.0});
    CHECK(e.mean == doctest::Approx(2.5));
    // sample sd = sqrt(5/3); stderr = sd / 2
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.n == 4);
}

TEST_CASE("long-run averages stay inside the state bounds") {
    const ModelParams p = desk();
    McOptions o;
    o.dt = 1e-3;
    o.n_paths = 4;
    o.horizon = 50.0;
    o.burn_in = 5.0;
    o.seed = 7;
    const McEstimate e =
        mc_longrun_average([](const State& s) { return s.z; }, p, o);
    CHECK(std::abs(e.mean) <= p.Y);
    CHECK(e.stderr_ >= 0.0);
}
