#pragma once

#include <functional>
#include <vector>

#include "plastokh/dirichlet.hpp"
#include "plastokh/grid.hpp"
#include "plastokh/model.hpp"
#include "plastokh/sim.hpp"

namespace plastokh {

/// Everything the cycle-operator machinery needs for one configuration.
struct SolveContext {
    const Grid3* grid = nullptr;
    ModelParams params;
    CycleLevels cycle;
    DirichletOptions dirichlet;
    McOptions mc;
    bool parallel = true;

    double stochastic_tol = 1e-6;  ///< row-mass deviation tripping NotStochastic
    double gamma_tol = 1e-10;      ///< fixed-point tolerance for the boundary measure
    long gamma_max_iter = 100000;
    double solvability_tol = 1e-4; ///< |nu(f)| gate of the complete problem
    double series_tol = 1e-9;      ///< sup-norm increment stop for the series
    long series_max_terms = 400;
    double fp_tol = 1e-13;         ///< stationary-density fixed-point tolerance
    long fp_max_iter = 4000000;
};

/// Dense transition matrix of the embedded chain on the two sheets of
/// the outer cycle surface. Node order: lower sheet first, then upper,
/// each sheet lexicographic in (x, z).
struct PMatrix {
    long n = 0;
    std::vector<double> a; ///< row-major

    double at(long r, long c) const { return a[r * n + c]; }
    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<double> apply_adjoint(const std::vector<double>& v) const;
};

std::vector<double> flatten(const SurfaceField& s);
SurfaceField unflatten(const Grid3& g, SurfaceLevel lv, const std::vector<double>& v);

/// Probability weights (masses per node) on the outer cycle surface.
struct BoundaryMeasure {
    SurfaceField weights;
    double mass() const;
};

struct ErgodicDiagnostics {
    std::vector<double> sup_diffs; ///< sup norm of P^{n+1} phi - P^n phi
    double rho_estimate = 0.0;
    double K_estimate = 0.0;
    double r_squared = 0.0;
};

enum class MeasureMode { Matrix, Mc };

/// One step of the embedded chain: interior solve with data phi, trace
/// at the inner surface, exterior solve, trace back at the outer one.
SurfaceField apply_P(const SurfaceField& phi, const SolveContext& ctx);
SurfaceField apply_P(const DirichletOps& ops, const SurfaceField& phi,
                     const SolveContext& ctx);

/// Expected integral of f over one cycle, as a function of the cycle
/// start on the outer surface.
SurfaceField apply_T(const ScalarFn& f, const SolveContext& ctx);
SurfaceField apply_T(const DirichletOps& ops, const ScalarFn& f, const SolveContext& ctx);

/// One apply_P per surface node (columns are independent and solved in
/// parallel when ctx.parallel is set).
PMatrix assemble_P_matrix(const SolveContext& ctx);

/// Invariant measure of the embedded chain, with geometric-decay
/// diagnostics (matrix mode) or the long-run hitting histogram (mc mode).
std::pair<BoundaryMeasure, ErgodicDiagnostics>
boundary_invariant_measure(const SolveContext& ctx, MeasureMode mode,
                           const PMatrix* prebuilt = nullptr);

/// Fit of log sup_diffs against n on [n_lo, end); fills rho/K/R^2.
void fit_geometric_rate(ErgodicDiagnostics& d, int n_lo);

/// nu(f) = integral of Tf against gamma over both sheets, normalized by
/// the same integral of T1.
double nu_functional(const ScalarFn& f, const SolveContext& ctx,
                     const BoundaryMeasure& gamma);

/// Stationary density of the full process: elastic volume part plus the
/// two plastic surface parts. masses holds the raw per-node stationary
/// probabilities on the full grid (Region::Full node order).
struct InvariantMeasure {
    Field3 elastic; ///< density on the elastic slab, zero at z = +-Y
    FaceField plastic_plus;
    FaceField plastic_minus;
    std::vector<double> masses;
    long iterations = 0;
    double fixed_point_residual = 0.0;

    double total_mass(const Grid3& g) const;
};

InvariantMeasure solve_stationary_density(const SolveContext& ctx);

/// Quadrature of the generator applied to a smooth test function against
/// the stationary measure; zero in the limit for the exact measure.
double stationarity_residual(const TestFunction& f, const InvariantMeasure& m,
                             const ModelParams& p);

struct CompleteSolution {
    Field3 u; ///< Full region
    double nu_f = 0.0;
    int series_terms = 0;
    double series_tail = 0.0;
    double glue_residual = 0.0;
    double pde_residual = 0.0;
};

/// Ergodic-type problem for the full generator: solvable only when
/// nu(f) vanishes; throws NotSolvable otherwise. The boundary values on
/// the outer surface are accumulated as the series of cycle operators
/// applied to Tf.
CompleteSolution solve_complete_problem(const ScalarFn& f, const SolveContext& ctx,
                                        const BoundaryMeasure* gamma = nullptr);

} // namespace plastokh
