#include <doctest.h>

#include <cmath>
#include <numeric>

#include "plastokh/errors.hpp"
#include "plastokh/grid.hpp"

using namespace plastokh;

namespace {

ModelParams desk() {
    ModelParams p;
    p.beta = 0.05;
    p.Y = 0.1;
    return p;
}

const CycleLevels levels{0.5, 1.0};

} // namespace

TEST_CASE("grid snaps the special levels onto exact nodes") {
    const Grid3 g = build_grid(desk(), levels, 9, 5, 9, 3.0);
    CHECK(g.ys[g.j_zero] == 0.0);
    CHECK(g.ys[g.j_ybar] == 0.5);
    CHECK(g.ys[g.j_ybar1] == 1.0);
    CHECK(g.ys[g.j_m_ybar] == -0.5);
    CHECK(g.ys[g.j_m_ybar1] == -1.0);
    CHECK(g.ys.front() == -3.0);
    CHECK(g.ys.back() == 3.0);
    CHECK(g.xs.front() == -1.0);
    CHECK(g.xs.back() == 1.0);
    CHECK(g.zs.front() == -0.1);
    CHECK(g.zs.back() == 0.1);
}

TEST_CASE("the y axis is exactly symmetric") {
    const Grid3 g = build_grid(desk(), levels, 9, 5, 9, 3.0);
    const int n = g.ny();
    for (int j = 0; j < n; ++j) CHECK(g.ys[j] == -g.ys[n - 1 - j]);
    CHECK(g.j_zero == n / 2);
}

TEST_CASE("resolution and truncation guards") {
    CHECK_THROWS_AS(build_grid(desk(), levels, 2, 5, 9, 3.0), InvalidResolution);
    CHECK_THROWS_AS(build_grid(desk(), levels, 9, 0, 9, 3.0), InvalidResolution);
    CHECK_THROWS_AS(build_grid(desk(), levels, 9, 5, 2, 3.0), InvalidResolution);
    CHECK_THROWS_AS(build_grid(desk(), levels, 9, 5, 9, 1.0), InvalidTruncation);
    CHECK_THROWS_AS(build_grid(desk(), levels, 9, 5, 9, 0.5), InvalidTruncation);
}

TEST_CASE("axis weights integrate exactly on the trapezoid rule") {
    const Grid3 g = build_grid(desk(), levels, 9, 5, 9, 3.0);
    const auto wy = axis_weights(g.ys);
    CHECK(std::accumulate(wy.begin(), wy.end(), 0.0) == doctest::Approx(6.0));
    const auto wx = axis_weights(g.xs);
    CHECK(std::accumulate(wx.begin(), wx.end(), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("region fields expose the right y slabs") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const Field3 fi(g, Region::Interior);
    CHECK(fi.js().front() == g.j_m_ybar1);
    CHECK(fi.js().back() == g.j_ybar1);
    const Field3 fe(g, Region::Exterior);
    CHECK(fe.js().front() == 0);
    CHECK(fe.js().back() == g.ny() - 1);
    CHECK(fe.contains_j(g.j_ybar));
    CHECK_FALSE(fe.contains_j(g.j_zero));
    const Field3 ff(g, Region::Full);
    CHECK(ff.ny_region() == g.ny());
}

TEST_CASE("field sampling and trace agree nodewise") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const auto fn = [](double x, double y, double z) { return x + 2 * y + 3 * z; };
    const Field3 f = Field3::sample(g, Region::Interior, fn);
    const SurfaceField s = trace(f, SurfaceLevel::Gamma1);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            CHECK(s.up(i, k) == fn(g.xs[i], 1.0, g.zs[k]));
            CHECK(s.lo(i, k) == fn(g.xs[i], -1.0, g.zs[k]));
        }
}

TEST_CASE("trace_face reads the correct z sheet") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const Field3 f = Field3::sample(g, Region::Full,
                                    [](double, double y, double z) { return y + z; });
    const FaceField fp = trace_face(f, Face::Plus, g.j_zero, g.ny() - 1);
    CHECK(fp.at(0, g.j_zero) == doctest::Approx(0.0 + 0.1));
    const FaceField fm = trace_face(f, Face::Minus, 0, g.j_zero);
    CHECK(fm.at(0, g.j_zero) == doctest::Approx(0.0 - 0.1));
}

TEST_CASE("surface interpolation is exact on nodes and linear between them") {
    const Grid3 g = build_grid(desk(), levels, 5, 3, 5, 3.0);
    const SurfaceField s = SurfaceField::sample(
        g, SurfaceLevel::Gamma1, [](double x, double z) { return 2 * x + 5 * z; },
        [](double x, double z) { return x - z; });
    CHECK(s.interpolate(true, g.xs[2], g.zs[3]) ==
          doctest::Approx(2 * g.xs[2] + 5 * g.zs[3]).epsilon(1e-14));
    // bilinear interpolation reproduces affine data everywhere
    CHECK(s.interpolate(true, 0.123, 0.0456) ==
          doctest::Approx(2 * 0.123 + 5 * 0.0456).epsilon(1e-12));
    CHECK(s.interpolate(false, -0.7, -0.03) ==
          doctest::Approx(-0.7 + 0.03).epsilon(1e-12));
    // out-of-range queries clamp to the sheet
    CHECK(s.interpolate(true, 5.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("h_max reflects the coarsest axis") {
    const Grid3 g = build_grid(desk(), levels, 9, 5, 9, 3.0);
    CHECK(g.hx() == doctest::Approx(0.25));
    CHECK(g.hz() == doctest::Approx(0.025));
    CHECK(g.hy_max() == doctest::Approx(0.1));
    CHECK(g.h_max() == doctest::Approx(0.25));
}
