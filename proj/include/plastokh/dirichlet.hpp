#pragma once

#include <functional>
#include <vector>

#include "plastokh/fd_operator.hpp"
#include "plastokh/grid.hpp"
#include "plastokh/model.hpp"

namespace plastokh {

using ScalarFn = std::function<double(double, double, double)>;

struct DirichletOptions {
    SolverOptions solver;
    double epsilon_z = 0.0;
    /// Exterior bands: slab-by-slab marching in z (valid when
    /// epsilon_z == 0); the coupled whole-band solve is the cross-check.
    bool march = true;
};

struct InteriorSolution {
    Field3 eta;
    double residual = 0.0;
    long iterations = 0;
};

struct ExteriorSolution {
    Field3 zeta;
    double residual = 0.0;
    long iterations = 0;
};

/// Two-point kernel I(a,b): the ratio of integrals of
/// exp(c0 t^2 + 2 k Y t) over [a,b] and [0, ybar1], by adaptive
/// quadrature to ~1e-12.
double kernel_I(double a, double b, const ModelParams& p, const CycleLevels& c);

/// Sup-norm certificates for the nonhomogeneous problems. The interior
/// barrier is exp(lambda (c0 k z^2 + c0 y^2)); the exterior gauge is
/// psi(y) = gamma_scale * log(y) + K_offset on y >= ybar.
struct BarrierGauge {
    enum class Kind { PhiInterior, PsiExterior };
    Kind kind = Kind::PhiInterior;
    double lambda = 1.0;
    double gamma_scale = 0.0;
    double K_offset = 0.0;

    static BarrierGauge interior(double f_sup, const ModelParams& p, const CycleLevels& c);
    static BarrierGauge exterior(double f_sup, const ModelParams& p, const CycleLevels& c);

    double phi(double y, double z, const ModelParams& p) const;
    double interior_bound(const ModelParams& p, const CycleLevels& c) const;
    double psi(double abs_y) const;
};

/// Pre-assembled operators shared between repeated solves on the same
/// grid (the cycle operators call these solvers hundreds of times).
struct DirichletOps {
    SparseOperator interior;
    SparseOperator exterior;
};

DirichletOps make_dirichlet_ops(const Grid3& g, const ModelParams& p,
                                const DirichletOptions& o = {});

/// Homogeneous interior problem: generator rows inside |y| < ybar1, data
/// phi on both sheets of y = +-ybar1 (the lower sheet generalizes the
/// zero data of the basic problem; the composition of cycle solves needs
/// both).
InteriorSolution solve_interior(const SparseOperator& op, const SurfaceField& phi_gamma1,
                                const ScalarFn& f, const DirichletOptions& o = {});
InteriorSolution solve_interior(const Grid3& g, const ModelParams& p,
                                const SurfaceField& phi_gamma1,
                                const DirichletOptions& o = {});

/// Nonhomogeneous interior problem: source f, zero data at y = +-ybar1.
InteriorSolution solve_interior_nonhom(const Grid3& g, const ModelParams& p,
                                       const ScalarFn& f, const DirichletOptions& o = {});

/// Homogeneous exterior problem on both bands ybar <= |y| <= y_max: data
/// h on y = +-ybar, zero at the truncation |y| = y_max.
ExteriorSolution solve_exterior(const SparseOperator& op, const SurfaceField& h_gamma,
                                const ScalarFn& f, const DirichletOptions& o = {});
ExteriorSolution solve_exterior(const Grid3& g, const ModelParams& p,
                                const SurfaceField& h_gamma,
                                const DirichletOptions& o = {});

/// Nonhomogeneous exterior problem: source f, data at |y| = ybar
/// (defaults to zero when data is null), zero at the truncation.
ExteriorSolution solve_exterior_nonhom(const Grid3& g, const ModelParams& p,
                                       const ScalarFn& f, const SurfaceField* data_gamma,
                                       const DirichletOptions& o = {});

/// Standalone 2D solve of one plastic-face problem in (x, y): Neumann in
/// x, Dirichlet data at the inner end (y = 0 interior, |y| = ybar
/// exterior) and the outer end (|y| = ybar1 or y_max). Data vectors run
/// over the x axis.
FaceField solve_face_plus(const std::vector<double>& data_inner,
                          const std::vector<double>& data_outer, Face face, Region region,
                          const Grid3& g, const ModelParams& p,
                          const DirichletOptions& o = {});

/// 2D (y,z) reference solution of the interior problem for the beta = 0
/// case. The boundary lines z = +-Y carry the closed-form two-point rows
/// eta(y) = eta_corner * I(y, ybar1) + data(Y) * I(0, y), parameterized
/// by the unknown values at (y=0, z=+-Y) which the coupled solve
/// determines.
struct Ref1d {
    std::vector<double> ys; ///< interior y nodes, -ybar1 .. ybar1
    std::vector<double> zs;
    std::vector<double> values; ///< (j, k) -> j * nz + k
    double eta_plus = 0.0;      ///< value at (y=0, z=+Y)
    double eta_minus = 0.0;     ///< value at (y=0, z=-Y)
    double residual = 0.0;
    long iterations = 0;

    int ny() const { return static_cast<int>(ys.size()); }
    int nz() const { return static_cast<int>(zs.size()); }
    double at(int j, int k) const { return values[static_cast<long>(j) * nz() + k]; }
};

Ref1d solve_1d_reference(const Grid3& g, const ModelParams& p,
                         const std::function<double(double)>& phi_up,
                         const std::function<double(double)>& phi_lo,
                         const ScalarFn& f = nullptr, const DirichletOptions& o = {});

} // namespace plastokh
