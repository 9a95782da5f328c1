#include "plastokh/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plastokh/errors.hpp"

namespace plastokh {

namespace {

// Append `n` uniform subintervals from a to b; a is assumed already present.
void subdivide(std::vector<double>& axis, double a, double b, int n) {
    for (int i = 1; i <= n; ++i)
        axis.push_back(a + (b - a) * static_cast<double>(i) / n);
}

std::vector<double> uniform_axis(double lo, double hi, int n) {
    std::vector<double> axis{lo};
    subdivide(axis, lo, hi, n - 1);
    axis.back() = hi;
    return axis;
}

int find_node(const std::vector<double>& axis, double v) {
    for (int i = 0; i < static_cast<int>(axis.size()); ++i)
        if (axis[i] == v) return i;
    throw std::logic_error("snapped node missing from axis");
}

} // namespace

double Grid3::hy_max() const {
    double h = 0.0;
    for (size_t j = 0; j + 1 < ys.size(); ++j) h = std::max(h, ys[j + 1] - ys[j]);
    return h;
}

double Grid3::h_max() const { return std::max({hx(), hy_max(), hz()}); }

int Grid3::j_of_level(SurfaceLevel level, int sign) const {
    if (level == SurfaceLevel::Gamma) return sign > 0 ? j_ybar : j_m_ybar;
    return sign > 0 ? j_ybar1 : j_m_ybar1;
}

Grid3 build_grid(const ModelParams& p, const CycleLevels& c, int nx, int ny_per_band,
                 int nz, double y_max) {
    if (nx < 3 || nz < 3 || ny_per_band < 1)
        throw InvalidResolution("need nx >= 3, nz >= 3, ny_per_band >= 1");
    if (!(y_max > c.ybar1))
        throw InvalidTruncation("y_max must exceed ybar1");

    Grid3 g;
    g.ybar = c.ybar;
    g.ybar1 = c.ybar1;
    g.y_max = y_max;
    g.xs = uniform_axis(-p.L, p.L, nx);
    g.zs = uniform_axis(-p.Y, p.Y, nz);

    // Positive half of the y axis: bands [0,ybar], [ybar,ybar1], [ybar1,y_max]
    // with the outer band subdivided in proportion to its length so spacing
    // stays roughly uniform.
    const double h_ref = std::min(c.ybar, c.ybar1 - c.ybar) / ny_per_band;
    const int n_outer = std::max<int>(2, std::lround((y_max - c.ybar1) / h_ref));
    std::vector<double> pos{0.0};
    subdivide(pos, 0.0, c.ybar, ny_per_band);
    pos.back() = c.ybar;
    subdivide(pos, c.ybar, c.ybar1, ny_per_band);
    pos.back() = c.ybar1;
    subdivide(pos, c.ybar1, y_max, n_outer);
    pos.back() = y_max;

    // Mirror for exact symmetry of the axis.
    g.ys.clear();
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.ys.push_back(-*it);
    for (size_t i = 1; i < pos.size(); ++i) g.ys.push_back(pos[i]);

    g.j_zero = find_node(g.ys, 0.0);
    g.j_ybar = find_node(g.ys, c.ybar);
    g.j_ybar1 = find_node(g.ys, c.ybar1);
    g.j_m_ybar = find_node(g.ys, -c.ybar);
    g.j_m_ybar1 = find_node(g.ys, -c.ybar1);
    return g;
}

std::vector<Slab> region_slabs(const Grid3& g, Region r) {
    switch (r) {
    case Region::Interior: return {{g.j_m_ybar1, g.j_ybar1}};
    case Region::ExteriorUp: return {{g.j_ybar, g.ny() - 1}};
    case Region::ExteriorDown: return {{0, g.j_m_ybar}};
    case Region::Exterior: return {{0, g.j_m_ybar}, {g.j_ybar, g.ny() - 1}};
    case Region::Full: return {{0, g.ny() - 1}};
    }
    return {};
}

Field3::Field3(const Grid3& g, Region r) : grid(&g), region(r) {
    j_local_.assign(g.ny(), -1);
    for (const Slab& s : region_slabs(g, r))
        for (int j = s.j_lo; j <= s.j_hi; ++j) {
            if (j_local_[j] >= 0) continue;
            j_local_[j] = ny_region_++;
            js_.push_back(j);
        }
    values.assign(static_cast<long>(g.nx()) * ny_region_ * g.nz(), 0.0);
}

double Field3::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

Field3 Field3::constant(const Grid3& g, Region r, double v) {
    Field3 f(g, r);
    std::fill(f.values.begin(), f.values.end(), v);
    return f;
}

Field3 Field3::sample(const Grid3& g, Region r,
                      const std::function<double(double, double, double)>& fn) {
    Field3 f(g, r);
    for (int i = 0; i < g.nx(); ++i)
        for (int j : f.js_)
            for (int k = 0; k < g.nz(); ++k)
                f.at(i, j, k) = fn(g.xs[i], g.ys[j], g.zs[k]);
    return f;
}

FaceField::FaceField(const Grid3& g, Face f, int lo, int hi)
    : face(f), grid(&g), j_lo(lo), j_hi(hi) {
    values.assign(static_cast<long>(g.nx()) * n_y(), 0.0);
}

double FaceField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

SurfaceField::SurfaceField(const Grid3& g, SurfaceLevel lv) : level(lv), grid(&g) {
    upper.assign(sheet_size(), 0.0);
    lower.assign(sheet_size(), 0.0);
}

double SurfaceField::sup_norm() const {
    double m = 0.0;
    for (double v : upper) m = std::max(m, std::abs(v));
    for (double v : lower) m = std::max(m, std::abs(v));
    return m;
}

double SurfaceField::interpolate(bool upper_sheet, double x, double z) const {
    const Grid3& g = *grid;
    const auto& sheet = upper_sheet ? upper : lower;
    const double hx = g.hx(), hz = g.hz();
    double sx = (x - g.xs.front()) / hx;
    double sz = (z - g.zs.front()) / hz;
    sx = std::clamp(sx, 0.0, static_cast<double>(g.nx() - 1));
    sz = std::clamp(sz, 0.0, static_cast<double>(g.nz() - 1));
    const int i0 = std::min(static_cast<int>(sx), g.nx() - 2);
    const int k0 = std::min(static_cast<int>(sz), g.nz() - 2);
    const double tx = sx - i0, tz = sz - k0;
    const auto v = [&](int i, int k) { return sheet[static_cast<long>(i) * g.nz() + k]; };
    return (1 - tx) * ((1 - tz) * v(i0, k0) + tz * v(i0, k0 + 1)) +
           tx * ((1 - tz) * v(i0 + 1, k0) + tz * v(i0 + 1, k0 + 1));
}

SurfaceField SurfaceField::constant(const Grid3& g, SurfaceLevel lv, double v) {
    SurfaceField s(g, lv);
    std::fill(s.upper.begin(), s.upper.end(), v);
    std::fill(s.lower.begin(), s.lower.end(), v);
    return s;
}

SurfaceField SurfaceField::sample(const Grid3& g, SurfaceLevel lv,
                                  const std::function<double(double, double)>& f_up,
                                  const std::function<double(double, double)>& f_lo) {
    SurfaceField s(g, lv);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            s.up(i, k) = f_up(g.xs[i], g.zs[k]);
            s.lo(i, k) = f_lo(g.xs[i], g.zs[k]);
        }
    return s;
}

SurfaceField trace(const Field3& f, SurfaceLevel level) {
    const Grid3& g = *f.grid;
    SurfaceField s(g, level);
    const int jp = g.j_of_level(level, +1);
    const int jm = g.j_of_level(level, -1);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            s.up(i, k) = f.at(i, jp, k);
            s.lo(i, k) = f.at(i, jm, k);
        }
    return s;
}

FaceField trace_face(const Field3& f, Face face, int j_lo, int j_hi) {
    const Grid3& g = *f.grid;
    FaceField out(g, face, j_lo, j_hi);
    const int k = (face == Face::Plus) ? g.nz() - 1 : 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = j_lo; j <= j_hi; ++j)
            out.at(i, j) = f.at(i, j, k);
    return out;
}

std::vector<double> axis_weights(const std::vector<double>& axis) {
    const size_t n = axis.size();
    std::vector<double> w(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) {
        const double h = axis[i + 1] - axis[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

} // namespace plastokh
