#include <doctest.h>

#include "plastokh/model.hpp"
#include "plastokh/testfuncs.hpp"

using namespace plastokh;

namespace {

ModelParams desk() {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.05;
    p.c0 = 1.0;
    p.k = 1.0;
    p.Y = 0.1;
    p.L = 1.0;
    return p;
}

} // namespace

TEST_CASE("validate_params accepts the desk configuration") {
    const ValidationReport r = validate_params(desk(), CycleLevels{0.5, 1.0});
    CHECK(r.ok());
    CHECK(r.warnings.empty());
}

TEST_CASE("validate_params flags each nonpositive constant") {
    const CycleLevels c{0.5, 1.0};
    for (auto mutate : {+[](ModelParams& p) { p.alpha = 0.0; },
                        +[](ModelParams& p) { p.c0 = -1.0; },
                        +[](ModelParams& p) { p.k = 0.0; },
                        +[](ModelParams& p) { p.Y = 0.0; },
                        +[](ModelParams& p) { p.L = -2.0; },
                        +[](ModelParams& p) { p.beta = -0.1; }}) {
        ModelParams p = desk();
        mutate(p);
        CHECK_FALSE(validate_params(p, c).ok());
    }
}

TEST_CASE("validate_params enforces the level ordering") {
    CHECK_FALSE(validate_params(desk(), CycleLevels{1.0, 1.0}).ok());
    CHECK_FALSE(validate_params(desk(), CycleLevels{1.5, 1.0}).ok());
    CHECK_FALSE(validate_params(desk(), CycleLevels{0.0, 1.0}).ok());
}

TEST_CASE("validate_params warns when the interior barrier is unavailable") {
    ModelParams p = desk();
    p.beta = 0.5; // 1/(2 beta L) = 1 <= 2 ybar1
    const ValidationReport r = validate_params(p, CycleLevels{0.5, 1.0});
    CHECK(r.ok());
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("phase classification") {
    const ModelParams p = desk();
    CHECK(phase_of({0.0, 0.5, 0.1, 0.0}, p) == Phase::PlasticPlus);
    CHECK(phase_of({0.0, -0.5, -0.1, 0.0}, p) == Phase::PlasticMinus);
    CHECK(phase_of({0.0, 0.5, -0.1, 0.0}, p) == Phase::Elastic);   // leaving the face
    CHECK(phase_of({0.0, 0.0, 0.1, 0.0}, p) == Phase::Elastic);    // zero velocity
    CHECK(phase_of({0.0, 0.5, 0.05, 0.0}, p) == Phase::Elastic);
}

TEST_CASE("drift freezes the deformation on the faces") {
    const ModelParams p = desk();
    const State elastic{0.2, 0.3, 0.05, 0.0};
    auto d = drift(elastic, p);
    CHECK(d[0] == doctest::Approx(-0.2));
    CHECK(d[1] == doctest::Approx(-(0.05 * 0.2 + 0.3 + 0.05)));
    CHECK(d[2] == doctest::Approx(0.3));

    const State plastic{0.2, 0.3, 0.1, 0.0};
    CHECK(drift(plastic, p)[2] == 0.0);
}

TEST_CASE("generator_apply matches a hand-computed value") {
    // f = x^2 + y^2 + y z at s = (0.5, 0.4, 0.05), elastic phase:
    //   0.5*2 + 0.5*2 - alpha x * 2x - (beta x + c0 y + k z) (2y + z) + y*y
    TestFunction f;
    f.value = [](double x, double y, double z) { return x * x + y * y + y * z; };
    f.grad = [](double x, double y, double z) -> std::array<double, 3> {
        return {2.0 * x, 2.0 * y + z, y};
    };
    f.hess_diag = [](double, double, double) -> std::array<double, 2> {
        return {2.0, 2.0};
    };
    const ModelParams p = desk();
    const State s{0.5, 0.4, 0.05, 0.0};
    const double expect = 1.0 + 1.0 - 1.0 * 0.5 * 1.0 -
                          (0.05 * 0.5 + 0.4 + 0.05) * (0.8 + 0.05) + 0.4 * 0.4;
    CHECK(generator_apply(f, s, p) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("generator_apply drops the z-advection on the plastic faces") {
    TestFunction f;
    f.value = [](double, double, double z) { return z; };
    f.grad = [](double, double, double) -> std::array<double, 3> { return {0, 0, 1}; };
    f.hess_diag = [](double, double, double) -> std::array<double, 2> { return {0, 0}; };
    const ModelParams p = desk();
    CHECK(generator_apply(f, {0.0, 0.5, 0.1, 0.0}, p) == 0.0);   // pinned at +Y
    CHECK(generator_apply(f, {0.0, 0.5, 0.05, 0.0}, p) == 0.5);  // elastic
}

TEST_CASE("bump test functions vanish smoothly at the support edge") {
    double b, db, ddb;
    testfuncs::bump1(1.0, b, db, ddb);
    CHECK(b == 0.0);
    CHECK(db == 0.0);
    CHECK(ddb == 0.0);
    testfuncs::bump1(0.0, b, db, ddb);
    CHECK(b == doctest::Approx(1.0));
    CHECK(db == doctest::Approx(0.0));
    // second derivative of exp(1-1/(1-t^2)) at 0 is -2
    CHECK(ddb == doctest::Approx(-2.0));
}

TEST_CASE("basket functions carry consistent analytic gradients") {
    // central-difference cross-check at a generic point
    const double x = 0.37, y = -0.61, z = 0.043, h = 1e-6;
    for (const auto& [name, f] : testfuncs::basket()) {
        CAPTURE(name);
        const auto g = f.grad(x, y, z);
        CHECK(g[0] == doctest::Approx((f.value(x + h, y, z) - f.value(x - h, y, z)) /
                                      (2 * h))
                          .epsilon(1e-5));
        CHECK(g[1] == doctest::Approx((f.value(x, y + h, z) - f.value(x, y - h, z)) /
                                      (2 * h))
                          .epsilon(1e-5));
        CHECK(g[2] == doctest::Approx((f.value(x, y, z + h) - f.value(x, y, z - h)) /
                                      (2 * h))
                          .epsilon(1e-5));
        const auto hd = f.hess_diag(x, y, z);
        CHECK(hd[0] == doctest::Approx((f.value(x + h, y, z) - 2 * f.value(x, y, z) +
                                        f.value(x - h, y, z)) /
                                       (h * h))
                           .epsilon(1e-3));
        CHECK(hd[1] == doctest::Approx((f.value(x, y + h, z) - 2 * f.value(x, y, z) +
                                        f.value(x, y - h, z)) /
                                       (h * h))
                           .epsilon(1e-3));
    }
}
