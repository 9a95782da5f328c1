#pragma once

#include <functional>
#include <vector>

#include "plastokh/model.hpp"

namespace plastokh {

/// Node-set selectors on the truncated state space. Interior covers
/// |y| <= ybar1, ExteriorUp y in [ybar, y_max], ExteriorDown the mirror
/// band, Exterior their union, Full everything.
enum class Region { Interior, ExteriorUp, ExteriorDown, Exterior, Full };

enum class Face { Plus, Minus };

enum class SurfaceLevel { Gamma, Gamma1 };

/// Tensor grid with uniform x and z axes and a piecewise-uniform y axis
/// snapped exactly onto {-y_max, -ybar1, -ybar, 0, ybar, ybar1, y_max}.
struct Grid3 {
    std::vector<double> xs, ys, zs;
    double ybar = 0.0, ybar1 = 0.0, y_max = 0.0;
    int j_m_ybar1 = 0, j_m_ybar = 0, j_zero = 0, j_ybar = 0, j_ybar1 = 0;

    int nx() const { return static_cast<int>(xs.size()); }
    int ny() const { return static_cast<int>(ys.size()); }
    int nz() const { return static_cast<int>(zs.size()); }
    double hx() const { return xs[1] - xs[0]; }
    double hz() const { return zs[1] - zs[0]; }
    double hy_max() const;
    double h_max() const;
    int j_of_level(SurfaceLevel level, int sign) const;
};

Grid3 build_grid(const ModelParams& p, const CycleLevels& c, int nx, int ny_per_band,
                 int nz, double y_max);

/// Inclusive y-index range of one contiguous slab of a region.
struct Slab {
    int j_lo, j_hi;
};

std::vector<Slab> region_slabs(const Grid3& g, Region r);

/// Scalar grid function over the nodes of one region. Node order is
/// lexicographic in (x, y, z); the face sheets z = +-Y are ordinary
/// z-endpoint nodes.
struct Field3 {
    const Grid3* grid = nullptr;
    Region region = Region::Full;
    std::vector<double> values;

    Field3() = default;
    Field3(const Grid3& g, Region r);

    long size() const { return static_cast<long>(values.size()); }
    bool contains_j(int j) const { return j_local_[j] >= 0; }
    long index(int i, int j, int k) const {
        return (static_cast<long>(i) * ny_region_ + j_local_[j]) * grid->nz() + k;
    }
    double& at(int i, int j, int k) { return values[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    double sup_norm() const;

    /// y indices belonging to the region, ascending
    const std::vector<int>& js() const { return js_; }
    int ny_region() const { return ny_region_; }

    static Field3 constant(const Grid3& g, Region r, double v);
    static Field3 sample(const Grid3& g, Region r,
                         const std::function<double(double, double, double)>& f);

private:
    std::vector<int> j_local_; // ny entries, -1 when outside the region
    std::vector<int> js_;
    int ny_region_ = 0;
};

/// Scalar function on one plastic face strip z = +Y (y >= 0) or z = -Y
/// (y <= 0); the y range depends on the problem (interior or exterior).
struct FaceField {
    Face face = Face::Plus;
    const Grid3* grid = nullptr;
    int j_lo = 0, j_hi = 0;
    std::vector<double> values; // (i, j) -> i * n_y + (j - j_lo)

    FaceField() = default;
    FaceField(const Grid3& g, Face f, int lo, int hi);

    int n_y() const { return j_hi - j_lo + 1; }
    long index(int i, int j) const {
        return static_cast<long>(i) * n_y() + (j - j_lo);
    }
    double& at(int i, int j) { return values[index(i, j)]; }
    double at(int i, int j) const { return values[index(i, j)]; }
    double sup_norm() const;
};

/// Data on the pair of cycle surfaces y = +-ybar or y = +-ybar1, stored as
/// two (x,z) sheets.
struct SurfaceField {
    SurfaceLevel level = SurfaceLevel::Gamma1;
    const Grid3* grid = nullptr;
    std::vector<double> upper, lower; // i * nz + k

    SurfaceField() = default;
    SurfaceField(const Grid3& g, SurfaceLevel lv);

    long sheet_size() const { return static_cast<long>(grid->nx()) * grid->nz(); }
    double& up(int i, int k) { return upper[static_cast<long>(i) * grid->nz() + k]; }
    double up(int i, int k) const { return upper[static_cast<long>(i) * grid->nz() + k]; }
    double& lo(int i, int k) { return lower[static_cast<long>(i) * grid->nz() + k]; }
    double lo(int i, int k) const { return lower[static_cast<long>(i) * grid->nz() + k]; }
    double sup_norm() const;

    /// Bilinear interpolation on one sheet; x and z are clamped to the axes.
    double interpolate(bool upper_sheet, double x, double z) const;

    static SurfaceField constant(const Grid3& g, SurfaceLevel lv, double v);
    static SurfaceField sample(const Grid3& g, SurfaceLevel lv,
                               const std::function<double(double, double)>& f_up,
                               const std::function<double(double, double)>& f_lo);
};

/// Exact nodal restriction of a volume field to a cycle surface.
SurfaceField trace(const Field3& f, SurfaceLevel level);

/// Exact nodal restriction to a plastic face strip [j_lo, j_hi].
FaceField trace_face(const Field3& f, Face face, int j_lo, int j_hi);

/// Trapezoid weights of one axis (nonuniform spacing allowed).
std::vector<double> axis_weights(const std::vector<double>& axis);

} // namespace plastokh
