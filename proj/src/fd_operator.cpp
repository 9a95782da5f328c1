#include "plastokh/fd_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plastokh/errors.hpp"

namespace plastokh {

NodeIndexer::NodeIndexer(const Grid3& g, Region r) : grid(&g), ny_region(0) {
    j_local.assign(g.ny(), -1);
    for (const Slab& s : region_slabs(g, r))
        for (int j = s.j_lo; j <= s.j_hi; ++j) {
            if (j_local[j] >= 0) continue;
            j_local[j] = ny_region++;
            js.push_back(j);
        }
}

void SparseOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
    out.assign(n, 0.0);
    for (long r = 0; r < n; ++r) {
        double acc = 0.0;
        for (long p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += vals[p] * u[cols[p]];
        out[r] = acc;
    }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& u) const {
    std::vector<double> out;
    apply(u, out);
    return out;
}

double SparseOperator::diag(long r) const {
    for (long p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        if (cols[p] == r) return vals[p];
    return 0.0;
}

namespace {

/// Accumulates one row's entries, merging duplicate columns.
struct RowBuilder {
    std::vector<std::pair<long, double>> entries;

    void add(long col, double v) {
        if (v == 0.0) return;
        for (auto& e : entries)
            if (e.first == col) {
                e.second += v;
                return;
            }
        entries.emplace_back(col, v);
    }

    void flush(RowKind kind, SparseOperator& L) {
        std::sort(entries.begin(), entries.end());
        for (const auto& e : entries) {
            L.cols.push_back(e.first);
            L.vals.push_back(e.second);
        }
        L.row_ptr.push_back(static_cast<long>(L.cols.size()));
        L.row_kind.push_back(kind);
        entries.clear();
    }
};

bool is_region_boundary(const Grid3& g, Region r, int j) {
    switch (r) {
    case Region::Interior: return j == g.j_m_ybar1 || j == g.j_ybar1;
    case Region::ExteriorUp: return j == g.j_ybar || j == g.ny() - 1;
    case Region::ExteriorDown: return j == g.j_m_ybar || j == 0;
    case Region::Exterior:
        return j == 0 || j == g.j_m_ybar || j == g.j_ybar || j == g.ny() - 1;
    case Region::Full: return j == 0 || j == g.ny() - 1;
    }
    return false;
}

} // namespace

SparseOperator assemble_generator(const Grid3& g, const ModelParams& p, Region r,
                                  const AssemblyOptions& opts) {
    const NodeIndexer idx(g, r);
    SparseOperator L;
    L.grid = &g;
    L.region = r;
    L.n = idx.size();
    L.row_ptr.push_back(0);

    const int nx = g.nx(), nz = g.nz();
    const double hx = g.hx(), hz = g.hz();
    RowBuilder row;

    for (int i = 0; i < nx; ++i)
        for (int j : idx.js)
            for (int k = 0; k < nz; ++k) {
                const long r0 = idx.index(i, j, k);
                if (is_region_boundary(g, r, j)) {
                    row.add(r0, 1.0);
                    row.flush(RowKind::Boundary, L);
                    continue;
                }

                const double x = g.xs[i], y = g.ys[j], z = g.zs[k];
                const bool face_plus = (k == nz - 1) && y > 0.0;
                const bool face_minus = (k == 0) && y < 0.0;
                const bool on_face = face_plus || face_minus;

                // 0.5 d2/dx2 with mirror closure at x = +-L
                const double cx = 0.5 / (hx * hx);
                if (i == 0) {
                    row.add(idx.index(1, j, k), 2.0 * cx);
                    row.add(r0, -2.0 * cx);
                } else if (i == nx - 1) {
                    row.add(idx.index(nx - 2, j, k), 2.0 * cx);
                    row.add(r0, -2.0 * cx);
                } else {
                    row.add(idx.index(i - 1, j, k), cx);
                    row.add(r0, -2.0 * cx);
                    row.add(idx.index(i + 1, j, k), cx);
                }

                // -alpha x d/dx, upwinded; points inward at both walls
                const double bx = -p.alpha * x;
                if (bx > 0.0) {
                    row.add(idx.index(i + 1, j, k), bx / hx);
                    row.add(r0, -bx / hx);
                } else if (bx < 0.0) {
                    row.add(idx.index(i - 1, j, k), -bx / hx);
                    row.add(r0, bx / hx);
                }

                // 0.5 d2/dy2, three-point formula on nonuniform spacing;
                // region boundary rows shield j-1 / j+1 from leaving the band
                const double hm = g.ys[j] - g.ys[j - 1];
                const double hp = g.ys[j + 1] - g.ys[j];
                row.add(idx.index(i, j - 1, k), 1.0 / (hm * (hm + hp)));
                row.add(r0, -1.0 / (hm * hp));
                row.add(idx.index(i, j + 1, k), 1.0 / (hp * (hm + hp)));

                // velocity drift, with z pinned to the face value on face rows
                const double zeff = on_face ? (face_plus ? p.Y : -p.Y) : z;
                const double by = -(p.beta * x + p.c0 * y + p.k * zeff);
                if (by > 0.0) {
                    row.add(idx.index(i, j + 1, k), by / hp);
                    row.add(r0, -by / hp);
                } else if (by < 0.0) {
                    row.add(idx.index(i, j - 1, k), -by / hm);
                    row.add(r0, by / hm);
                }

                if (!on_face) {
                    // y d/dz, upwinded in the direction of motion; at a
                    // wrong-sign face node the upwind neighbor is inward
                    if (y > 0.0) {
                        row.add(idx.index(i, j, k + 1), y / hz);
                        row.add(r0, -y / hz);
                    } else if (y < 0.0) {
                        row.add(idx.index(i, j, k - 1), -y / hz);
                        row.add(r0, y / hz);
                    }
                    if (opts.epsilon_z > 0.0) {
                        const double cz = 0.5 * opts.epsilon_z / (hz * hz);
                        if (k == 0) {
                            row.add(idx.index(i, j, 1), 2.0 * cz);
                            row.add(r0, -2.0 * cz);
                        } else if (k == nz - 1) {
                            row.add(idx.index(i, j, nz - 2), 2.0 * cz);
                            row.add(r0, -2.0 * cz);
                        } else {
                            row.add(idx.index(i, j, k - 1), cz);
                            row.add(r0, -2.0 * cz);
                            row.add(idx.index(i, j, k + 1), cz);
                        }
                    }
                }

                row.flush(face_plus ? RowKind::FacePlus
                              : face_minus ? RowKind::FaceMinus
                                           : RowKind::Volume,
                          L);
            }
    return L;
}

SparseOperator transpose(const SparseOperator& L) {
    SparseOperator T;
    T.grid = L.grid;
    T.region = L.region;
    T.n = L.n;
    T.row_kind.assign(L.n, RowKind::Volume);
    std::vector<long> count(L.n, 0);
    for (long c : L.cols) ++count[c];
    T.row_ptr.assign(L.n + 1, 0);
    for (long r = 0; r < L.n; ++r) T.row_ptr[r + 1] = T.row_ptr[r] + count[r];
    T.cols.assign(L.cols.size(), 0);
    T.vals.assign(L.vals.size(), 0.0);
    std::vector<long> cursor(T.row_ptr.begin(), T.row_ptr.end() - 1);
    for (long r = 0; r < L.n; ++r)
        for (long p = L.row_ptr[r]; p < L.row_ptr[r + 1]; ++p) {
            const long q = cursor[L.cols[p]]++;
            T.cols[q] = r;
            T.vals[q] = L.vals[p];
        }
    return T;
}

namespace {

double data_scale(const std::vector<double>& rhs, const DirichletBC& bc) {
    double s = 1.0;
    for (double v : rhs) s = std::max(s, std::abs(v));
    for (size_t r = 0; r < bc.mask.size(); ++r)
        if (bc.mask[r]) s = std::max(s, std::abs(bc.value[r]));
    return s;
}

SolveStats sor_sweeps(const SparseOperator& L, const std::vector<double>& rhs,
                      const DirichletBC& bc, const std::vector<long>& rows,
                      std::vector<double>& u, const SolverOptions& opts) {
    for (long r : rows)
        if (bc.mask[r]) u[r] = bc.value[r];

    std::vector<long> sweep;
    sweep.reserve(rows.size());
    for (long r : rows)
        if (!bc.mask[r] && L.row_kind[r] != RowKind::Boundary) sweep.push_back(r);
    if (sweep.empty()) return {0, 0.0};

    const double scale = data_scale(rhs, bc);
    const double w = opts.relaxation;
    SolveStats st;
    for (long it = 1; it <= opts.max_iter; ++it) {
        double res = 0.0;
        for (long r : sweep) {
            double d = 0.0, off = 0.0;
            for (long p = L.row_ptr[r]; p < L.row_ptr[r + 1]; ++p) {
                if (L.cols[p] == r)
                    d = L.vals[p];
                else
                    off += L.vals[p] * u[L.cols[p]];
            }
            const double target = (rhs[r] - off) / d;
            res = std::max(res, std::abs(d * (u[r] - target)));
            u[r] += w * (target - u[r]);
        }
        st.iterations = it;
        st.residual = res / scale;
        if (st.residual <= opts.tol) return st;
    }
    throw NoConvergence("relaxation sweep stalled", st.residual, st.iterations);
}

} // namespace

SolveStats solve_linear(const SparseOperator& L, const std::vector<double>& rhs,
                        const DirichletBC& bc, std::vector<double>& u,
                        const SolverOptions& opts) {
    if (static_cast<long>(u.size()) != L.n) u.assign(L.n, 0.0);
    std::vector<long> rows(L.n);
    std::iota(rows.begin(), rows.end(), 0L);
    return sor_sweeps(L, rhs, bc, rows, u, opts);
}

SolveStats solve_subset(const SparseOperator& L, const std::vector<double>& rhs,
                        const DirichletBC& bc, const std::vector<long>& rows,
                        std::vector<double>& u, const SolverOptions& opts) {
    if (static_cast<long>(u.size()) != L.n) u.assign(L.n, 0.0);
    return sor_sweeps(L, rhs, bc, rows, u, opts);
}

double residual_norm(const SparseOperator& L, const std::vector<double>& rhs,
                     const DirichletBC& bc, const std::vector<double>& u) {
    double res = 0.0;
    for (long r = 0; r < L.n; ++r) {
        if (bc.mask[r] || L.row_kind[r] == RowKind::Boundary) continue;
        double acc = -rhs[r];
        for (long p = L.row_ptr[r]; p < L.row_ptr[r + 1]; ++p)
            acc += L.vals[p] * u[L.cols[p]];
        res = std::max(res, std::abs(acc));
    }
    return res;
}

} // namespace plastokh
