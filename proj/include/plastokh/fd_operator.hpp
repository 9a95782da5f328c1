#pragma once

#include <cstdint>
#include <vector>

#include "plastokh/grid.hpp"
#include "plastokh/model.hpp"

namespace plastokh {

/// What kind of equation a row discretizes. Volume rows carry the elastic
/// operator (or its wrong-sign face restriction with inward z-advection),
/// FacePlus / FaceMinus rows the two-dimensional plastic-face operators,
/// Boundary rows are identity placeholders for Dirichlet data.
enum class RowKind : uint8_t { Volume, FacePlus, FaceMinus, Boundary };

/// CSR matrix over the nodes of one region, ordered exactly like
/// Field3::index. Generator rows sum to zero with nonnegative
/// off-diagonals and negative diagonal, so the scheme is monotone.
struct SparseOperator {
    const Grid3* grid = nullptr;
    Region region = Region::Full;
    long n = 0;
    std::vector<long> row_ptr;
    std::vector<long> cols;
    std::vector<double> vals;
    std::vector<RowKind> row_kind;

    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    std::vector<double> apply(const std::vector<double>& u) const;
    double diag(long r) const;
};

struct AssemblyOptions {
    /// Artificial z-diffusion 0.5 * epsilon_z * d2/dz2 added to volume
    /// rows (Neumann closure at z = +-Y). Zero keeps the degenerate
    /// operator; a small positive value is occasionally useful to study
    /// the regularized problem. Marching solvers require zero.
    double epsilon_z = 0.0;
};

/// Upwind finite-difference discretization of the generator on one
/// region. x uses reflecting (mirror) closure at +-L; y boundaries of the
/// region are tagged Boundary; z = +-Y nodes get face rows when the
/// velocity points into the face and inward-upwinded volume rows
/// otherwise.
SparseOperator assemble_generator(const Grid3& g, const ModelParams& p, Region r,
                                  const AssemblyOptions& opts = {});

/// Structural CSR transpose; row kinds of the result are all Volume.
SparseOperator transpose(const SparseOperator& L);

/// Dirichlet data by node: where mask is set the solution is pinned to
/// value and the row equation is ignored.
struct DirichletBC {
    std::vector<uint8_t> mask;
    std::vector<double> value;

    DirichletBC() = default;
    explicit DirichletBC(long n) : mask(n, 0), value(n, 0.0) {}
    void pin(long r, double v) {
        mask[r] = 1;
        value[r] = v;
    }
};

struct SolverOptions {
    double tol = 1e-11;
    long max_iter = 400000;
    double relaxation = 1.4;

    bool operator==(const SolverOptions&) const = default;
};

struct SolveStats {
    long iterations = 0;
    double residual = 0.0;
};

/// SOR with a fixed lexicographic sweep order, so results do not depend
/// on thread count. Solves L u = rhs on unpinned rows. Throws
/// NoConvergence when max_iter is exhausted.
SolveStats solve_linear(const SparseOperator& L, const std::vector<double>& rhs,
                        const DirichletBC& bc, std::vector<double>& u,
                        const SolverOptions& opts = {});

/// Same, restricted to an explicit row subset (used by the z-marching
/// exterior solver); rows outside the subset are treated as known.
SolveStats solve_subset(const SparseOperator& L, const std::vector<double>& rhs,
                        const DirichletBC& bc, const std::vector<long>& rows,
                        std::vector<double>& u, const SolverOptions& opts = {});

/// Max norm of L u - rhs over unpinned rows.
double residual_norm(const SparseOperator& L, const std::vector<double>& rhs,
                     const DirichletBC& bc, const std::vector<double>& u);

/// Decode a row index back to grid indices (i, j, k) of the region.
struct NodeIndexer {
    const Grid3* grid;
    std::vector<int> js;          // region y-indices, ascending
    std::vector<int> j_local;     // ny entries, -1 outside
    int ny_region;

    NodeIndexer(const Grid3& g, Region r);
    long size() const { return static_cast<long>(grid->nx()) * ny_region * grid->nz(); }
    long index(int i, int j, int k) const {
        return (static_cast<long>(i) * ny_region + j_local[j]) * grid->nz() + k;
    }
    void decode(long r, int& i, int& j, int& k) const {
        k = static_cast<int>(r % grid->nz());
        const long q = r / grid->nz();
        j = js[static_cast<int>(q % ny_region)];
        i = static_cast<int>(q / ny_region);
    }
};

} // namespace plastokh
