#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "plastokh/model.hpp"

namespace plastokh {
namespace testfuncs {

/// C-infinity bump on (-1,1): exp(1 - 1/(1-t^2)), zero outside.
/// Returns value and first two derivatives.
inline void bump1(double t, double& b, double& db, double& ddb) {
    if (std::abs(t) >= 1.0) {
        b = db = ddb = 0.0;
        return;
    }
    const double u = 1.0 / (1.0 - t * t);
    b = std::exp(1.0 - u);
    const double du = 2.0 * t * u * u;
    const double ddu = 2.0 * u * u + 8.0 * t * t * u * u * u;
    db = -du * b;
    ddb = (du * du - ddu) * b;
}

/// Separable compactly supported bump centered at (cx,cy,cz) with
/// half-widths (wx,wy,wz).
inline TestFunction bump_product(double cx, double wx, double cy, double wy, double cz,
                                 double wz) {
    TestFunction f;
    f.value = [=](double x, double y, double z) {
        double bx, by, bz, d, dd;
        bump1((x - cx) / wx, bx, d, dd);
        bump1((y - cy) / wy, by, d, dd);
        bump1((z - cz) / wz, bz, d, dd);
        return bx * by * bz;
    };
    f.grad = [=](double x, double y, double z) -> std::array<double, 3> {
        double bx, by, bz, dbx, dby, dbz, dd;
        bump1((x - cx) / wx, bx, dbx, dd);
        bump1((y - cy) / wy, by, dby, dd);
        bump1((z - cz) / wz, bz, dbz, dd);
        return {dbx / wx * by * bz, bx * dby / wy * bz, bx * by * dbz / wz};
    };
    f.hess_diag = [=](double x, double y, double z) -> std::array<double, 2> {
        double bx, by, bz, d, ddbx, ddby, dd;
        bump1((x - cx) / wx, bx, d, ddbx);
        bump1((y - cy) / wy, by, d, ddby);
        bump1((z - cz) / wz, bz, d, dd);
        return {ddbx / (wx * wx) * by * bz, bx * ddby / (wy * wy) * bz};
    };
    return f;
}

/// Ten bounded test functions with analytic derivatives, used by the
/// cross-route checks of the long-run averages.
inline std::vector<std::pair<std::string, TestFunction>> basket() {
    std::vector<std::pair<std::string, TestFunction>> fs;
    const auto mk = [&](const std::string& name, TestFunction f) {
        fs.emplace_back(name, std::move(f));
    };

    TestFunction one;
    one.value = [](double, double, double) { return 1.0; };
    one.grad = [](double, double, double) -> std::array<double, 3> { return {0, 0, 0}; };
    one.hess_diag = [](double, double, double) -> std::array<double, 2> { return {0, 0}; };
    mk("one", one);

    TestFunction tanh_y;
    tanh_y.value = [](double, double y, double) { return std::tanh(y); };
    tanh_y.grad = [](double, double y, double) -> std::array<double, 3> {
        const double c = std::cosh(y);
        return {0.0, 1.0 / (c * c), 0.0};
    };
    tanh_y.hess_diag = [](double, double y, double) -> std::array<double, 2> {
        const double t = std::tanh(y), c = std::cosh(y);
        return {0.0, -2.0 * t / (c * c)};
    };
    mk("tanh_y", tanh_y);

    TestFunction cos_x;
    cos_x.value = [](double x, double, double) { return std::cos(x); };
    cos_x.grad = [](double x, double, double) -> std::array<double, 3> {
        return {-std::sin(x), 0.0, 0.0};
    };
    cos_x.hess_diag = [](double x, double, double) -> std::array<double, 2> {
        return {-std::cos(x), 0.0};
    };
    mk("cos_x", cos_x);

    TestFunction sin_z;
    sin_z.value = [](double, double, double z) { return std::sin(z); };
    sin_z.grad = [](double, double, double z) -> std::array<double, 3> {
        return {0.0, 0.0, std::cos(z)};
    };
    sin_z.hess_diag = [](double, double, double) -> std::array<double, 2> {
        return {0.0, 0.0};
    };
    mk("sin_z", sin_z);

    TestFunction gauss_x;
    gauss_x.value = [](double x, double, double) { return std::exp(-x * x); };
    gauss_x.grad = [](double x, double, double) -> std::array<double, 3> {
        return {-2.0 * x * std::exp(-x * x), 0.0, 0.0};
    };
    gauss_x.hess_diag = [](double x, double, double) -> std::array<double, 2> {
        return {(4.0 * x * x - 2.0) * std::exp(-x * x), 0.0};
    };
    mk("gauss_x", gauss_x);

    TestFunction cauchy_y;
    cauchy_y.value = [](double, double y, double) { return 1.0 / (1.0 + y * y); };
    cauchy_y.grad = [](double, double y, double) -> std::array<double, 3> {
        const double d = 1.0 + y * y;
        return {0.0, -2.0 * y / (d * d), 0.0};
    };
    cauchy_y.hess_diag = [](double, double y, double) -> std::array<double, 2> {
        const double d = 1.0 + y * y;
        return {0.0, (6.0 * y * y - 2.0) / (d * d * d)};
    };
    mk("cauchy_y", cauchy_y);

    TestFunction cos_x_tanh_y;
    cos_x_tanh_y.value = [](double x, double y, double) { return std::cos(x) * std::tanh(y); };
    cos_x_tanh_y.grad = [](double x, double y, double) -> std::array<double, 3> {
        const double c = std::cosh(y);
        return {-std::sin(x) * std::tanh(y), std::cos(x) / (c * c), 0.0};
    };
    cos_x_tanh_y.hess_diag = [](double x, double y, double) -> std::array<double, 2> {
        const double t = std::tanh(y), c = std::cosh(y);
        return {-std::cos(x) * t, -2.0 * std::cos(x) * t / (c * c)};
    };
    mk("cos_x_tanh_y", cos_x_tanh_y);

    TestFunction sin_xz;
    sin_xz.value = [](double x, double, double z) { return std::sin(x + z); };
    sin_xz.grad = [](double x, double, double z) -> std::array<double, 3> {
        return {std::cos(x + z), 0.0, std::cos(x + z)};
    };
    sin_xz.hess_diag = [](double x, double, double z) -> std::array<double, 2> {
        return {-std::sin(x + z), 0.0};
    };
    mk("sin_xz", sin_xz);

    TestFunction z_tanh_y;
    z_tanh_y.value = [](double, double y, double z) { return z * std::tanh(y); };
    z_tanh_y.grad = [](double, double y, double z) -> std::array<double, 3> {
        const double c = std::cosh(y);
        return {0.0, z / (c * c), std::tanh(y)};
    };
    z_tanh_y.hess_diag = [](double, double y, double z) -> std::array<double, 2> {
        const double t = std::tanh(y), c = std::cosh(y);
        return {0.0, -2.0 * z * t / (c * c)};
    };
    mk("z_tanh_y", z_tanh_y);

    TestFunction x_gauss;
    x_gauss.value = [](double x, double y, double) { return x * std::exp(-x * x - y * y); };
    x_gauss.grad = [](double x, double y, double) -> std::array<double, 3> {
        const double e = std::exp(-x * x - y * y);
        return {(1.0 - 2.0 * x * x) * e, -2.0 * x * y * e, 0.0};
    };
    x_gauss.hess_diag = [](double x, double y, double) -> std::array<double, 2> {
        const double e = std::exp(-x * x - y * y);
        return {(4.0 * x * x * x - 6.0 * x) * e, x * (4.0 * y * y - 2.0) * e};
    };
    mk("x_gauss", x_gauss);

    return fs;
}

} // namespace testfuncs
} // namespace plastokh
