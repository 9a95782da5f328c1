#include "plastokh/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "plastokh/errors.hpp"

namespace plastokh {

namespace {

double simpson(const std::function<double(double)>& g, double a, double m, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(g, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(g, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = g(a), fm = g(m), fb = g(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(g, a, m, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

double kernel_I(double a, double b, const ModelParams& p, const CycleLevels& c) {
    const auto g = [&](double t) { return std::exp(p.c0 * t * t + 2.0 * p.k * p.Y * t); };
    const double scale = g(std::max(std::abs(a), std::max(std::abs(b), c.ybar1)));
    const double den = integrate(g, 0.0, c.ybar1, 1e-13 * scale * c.ybar1);
    return integrate(g, a, b, 1e-13 * scale * std::max(std::abs(b - a), 1e-6)) / den;
}

BarrierGauge BarrierGauge::interior(double f_sup, const ModelParams& p,
                                    const CycleLevels& c) {
    BarrierGauge b;
    b.kind = Kind::PhiInterior;
    const double edge = p.k * p.Y + p.beta * p.L;
    double lambda = std::max(1.0, 2.0 * f_sup / p.c0);
    lambda = std::max(lambda, 1.0 + edge * edge / p.c0);
    const double slack = 1.0 - 2.0 * p.beta * p.L * c.ybar1;
    if (slack > 0.0) lambda = std::max(lambda, f_sup / (p.c0 * slack));
    b.lambda = lambda;
    return b;
}

BarrierGauge BarrierGauge::exterior(double f_sup, const ModelParams& p,
                                    const CycleLevels& c) {
    BarrierGauge b;
    b.kind = Kind::PsiExterior;
    // gamma c0 / 2 >= ||f|| with a factor-two safety margin covering the
    // first-order discretization error of the supersolution inequality
    b.gamma_scale = 2.0 * std::max(1.0, 2.0 * f_sup / p.c0);
    b.K_offset = -b.gamma_scale * std::log(c.ybar);
    return b;
}

double BarrierGauge::phi(double y, double z, const ModelParams& p) const {
    return std::exp(lambda * (p.c0 * p.k * z * z + p.c0 * y * y));
}

double BarrierGauge::interior_bound(const ModelParams& p, const CycleLevels& c) const {
    return std::exp(lambda * (p.c0 * p.k * p.Y * p.Y + p.c0 * c.ybar1 * c.ybar1));
}

double BarrierGauge::psi(double abs_y) const {
    return gamma_scale * std::log(abs_y) + K_offset;
}

DirichletOps make_dirichlet_ops(const Grid3& g, const ModelParams& p,
                                const DirichletOptions& o) {
    AssemblyOptions a;
    a.epsilon_z = o.epsilon_z;
    DirichletOps ops;
    ops.interior = assemble_generator(g, p, Region::Interior, a);
    ops.exterior = assemble_generator(g, p, Region::Exterior, a);
    return ops;
}

namespace {

std::vector<double> make_rhs(const SparseOperator& op, const ScalarFn& f) {
    std::vector<double> rhs(op.n, 0.0);
    if (!f) return rhs;
    const NodeIndexer idx(*op.grid, op.region);
    const Grid3& g = *op.grid;
    for (long r = 0; r < op.n; ++r) {
        if (op.row_kind[r] == RowKind::Boundary) continue;
        int i, j, k;
        idx.decode(r, i, j, k);
        rhs[r] = -f(g.xs[i], g.ys[j], g.zs[k]);
    }
    return rhs;
}

Field3 to_field(const Grid3& g, Region r, const std::vector<double>& u) {
    Field3 out(g, r);
    out.values = u;
    return out;
}

SolveStats march_exterior(const SparseOperator& op, const std::vector<double>& rhs,
                          const DirichletBC& bc, std::vector<double>& u,
                          const SolverOptions& so) {
    const Grid3& g = *op.grid;
    const NodeIndexer idx(g, Region::Exterior);
    const int nz = g.nz();

    // information flows away from the plastic face in each band: downward
    // in z for y > 0, upward for y < 0
    std::vector<std::vector<long>> planes;
    for (int k = nz - 1; k >= 0; --k) {
        planes.emplace_back();
        for (int i = 0; i < g.nx(); ++i)
            for (int j : idx.js)
                if (j >= g.j_ybar) planes.back().push_back(idx.index(i, j, k));
    }
    for (int k = 0; k < nz; ++k) {
        planes.emplace_back();
        for (int i = 0; i < g.nx(); ++i)
            for (int j : idx.js)
                if (j <= g.j_m_ybar) planes.back().push_back(idx.index(i, j, k));
    }

    SolveStats total;
    for (const auto& rows : planes) {
        const SolveStats st = solve_subset(op, rhs, bc, rows, u, so);
        total.iterations += st.iterations;
    }
    double scale = 1.0;
    for (double v : rhs) scale = std::max(scale, std::abs(v));
    for (long r = 0; r < op.n; ++r)
        if (bc.mask[r]) scale = std::max(scale, std::abs(bc.value[r]));
    total.residual = residual_norm(op, rhs, bc, u) / scale;
    return total;
}

} // namespace

InteriorSolution solve_interior(const SparseOperator& op, const SurfaceField& phi_gamma1,
                                const ScalarFn& f, const DirichletOptions& o) {
    const Grid3& g = *op.grid;
    const NodeIndexer idx(g, Region::Interior);
    DirichletBC bc(op.n);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            bc.pin(idx.index(i, g.j_ybar1, k), phi_gamma1.up(i, k));
            bc.pin(idx.index(i, g.j_m_ybar1, k), phi_gamma1.lo(i, k));
        }
    const auto rhs = make_rhs(op, f);
    std::vector<double> u;
    const SolveStats st = solve_linear(op, rhs, bc, u, o.solver);
    InteriorSolution s;
    s.eta = to_field(g, Region::Interior, u);
    s.residual = st.residual;
    s.iterations = st.iterations;
    return s;
}

InteriorSolution solve_interior(const Grid3& g, const ModelParams& p,
                                const SurfaceField& phi_gamma1, const DirichletOptions& o) {
    AssemblyOptions a;
    a.epsilon_z = o.epsilon_z;
    const SparseOperator op = assemble_generator(g, p, Region::Interior, a);
    return solve_interior(op, phi_gamma1, nullptr, o);
}

InteriorSolution solve_interior_nonhom(const Grid3& g, const ModelParams& p,
                                       const ScalarFn& f, const DirichletOptions& o) {
    AssemblyOptions a;
    a.epsilon_z = o.epsilon_z;
    const SparseOperator op = assemble_generator(g, p, Region::Interior, a);
    const SurfaceField zero = SurfaceField::constant(g, SurfaceLevel::Gamma1, 0.0);
    return solve_interior(op, zero, f, o);
}

ExteriorSolution solve_exterior(const SparseOperator& op, const SurfaceField& h_gamma,
                                const ScalarFn& f, const DirichletOptions& o) {
    const Grid3& g = *op.grid;
    const NodeIndexer idx(g, Region::Exterior);
    DirichletBC bc(op.n);
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k) {
            bc.pin(idx.index(i, g.j_ybar, k), h_gamma.up(i, k));
            bc.pin(idx.index(i, g.j_m_ybar, k), h_gamma.lo(i, k));
            bc.pin(idx.index(i, g.ny() - 1, k), 0.0);
            bc.pin(idx.index(i, 0, k), 0.0);
        }
    const auto rhs = make_rhs(op, f);
    std::vector<double> u;
    SolveStats st;
    if (o.march && o.epsilon_z == 0.0) {
        u.assign(op.n, 0.0);
        st = march_exterior(op, rhs, bc, u, o.solver);
    } else {
        st = solve_linear(op, rhs, bc, u, o.solver);
    }
    ExteriorSolution s;
    s.zeta = to_field(g, Region::Exterior, u);
    s.residual = st.residual;
    s.iterations = st.iterations;
    return s;
}

ExteriorSolution solve_exterior(const Grid3& g, const ModelParams& p,
                                const SurfaceField& h_gamma, const DirichletOptions& o) {
    AssemblyOptions a;
    a.epsilon_z = o.epsilon_z;
    const SparseOperator op = assemble_generator(g, p, Region::Exterior, a);
    return solve_exterior(op, h_gamma, nullptr, o);
}

ExteriorSolution solve_exterior_nonhom(const Grid3& g, const ModelParams& p,
                                       const ScalarFn& f, const SurfaceField* data_gamma,
                                       const DirichletOptions& o) {
    AssemblyOptions a;
    a.epsilon_z = o.epsilon_z;
    const SparseOperator op = assemble_generator(g, p, Region::Exterior, a);
    const SurfaceField zero = SurfaceField::constant(g, SurfaceLevel::Gamma, 0.0);
    return solve_exterior(op, data_gamma ? *data_gamma : zero, f, o);
}

FaceField solve_face_plus(const std::vector<double>& data_inner,
                          const std::vector<double>& data_outer, Face face, Region region,
                          const Grid3& g, const ModelParams& p, const DirichletOptions& o) {
    int j_lo, j_hi;
    if (face == Face::Plus) {
        j_lo = (region == Region::Interior) ? g.j_zero : g.j_ybar;
        j_hi = (region == Region::Interior) ? g.j_ybar1 : g.ny() - 1;
    } else {
        j_lo = (region == Region::Interior) ? g.j_m_ybar1 : 0;
        j_hi = (region == Region::Interior) ? g.j_zero : g.j_m_ybar;
    }
    const int nx = g.nx(), nY = j_hi - j_lo + 1;
    const double hx = g.hx();
    const double zface = (face == Face::Plus) ? p.Y : -p.Y;

    SparseOperator L;
    L.n = static_cast<long>(nx) * nY;
    L.row_ptr.push_back(0);
    DirichletBC bc(L.n);
    const auto id = [&](int i, int j) { return static_cast<long>(i) * nY + (j - j_lo); };

    for (int i = 0; i < nx; ++i)
        for (int j = j_lo; j <= j_hi; ++j) {
            const long r = id(i, j);
            // inner end for Plus is the low-j side, for Minus the high-j side
            const bool inner = (face == Face::Plus) ? (j == j_lo) : (j == j_hi);
            const bool outer = (face == Face::Plus) ? (j == j_hi) : (j == j_lo);
            if (inner || outer) {
                L.cols.push_back(r);
                L.vals.push_back(1.0);
                L.row_ptr.push_back(static_cast<long>(L.cols.size()));
                L.row_kind.push_back(RowKind::Boundary);
                bc.pin(r, inner ? data_inner[i] : data_outer[i]);
                continue;
            }
            std::vector<std::pair<long, double>> e;
            const auto add = [&](long c, double v) {
                for (auto& q : e)
                    if (q.first == c) {
                        q.second += v;
                        return;
                    }
                e.emplace_back(c, v);
            };
            const double x = g.xs[i], y = g.ys[j];
            const double cx = 0.5 / (hx * hx);
            if (i == 0) {
                add(id(1, j), 2.0 * cx);
                add(r, -2.0 * cx);
            } else if (i == nx - 1) {
                add(id(nx - 2, j), 2.0 * cx);
                add(r, -2.0 * cx);
            } else {
                add(id(i - 1, j), cx);
                add(r, -2.0 * cx);
                add(id(i + 1, j), cx);
            }
            const double bx = -p.alpha * x;
            if (bx > 0.0) {
                add(id(i + 1, j), bx / hx);
                add(r, -bx / hx);
            } else if (bx < 0.0) {
                add(id(i - 1, j), -bx / hx);
                add(r, bx / hx);
            }
            const double hm = g.ys[j] - g.ys[j - 1];
            const double hp = g.ys[j + 1] - g.ys[j];
            add(id(i, j - 1), 1.0 / (hm * (hm + hp)));
            add(r, -1.0 / (hm * hp));
            add(id(i, j + 1), 1.0 / (hp * (hm + hp)));
            const double by = -(p.beta * x + p.c0 * y + p.k * zface);
            if (by > 0.0) {
                add(id(i, j + 1), by / hp);
                add(r, -by / hp);
            } else if (by < 0.0) {
                add(id(i, j - 1), -by / hm);
                add(r, by / hm);
            }
            std::sort(e.begin(), e.end());
            for (const auto& q : e) {
                L.cols.push_back(q.first);
                L.vals.push_back(q.second);
            }
            L.row_ptr.push_back(static_cast<long>(L.cols.size()));
            L.row_kind.push_back(face == Face::Plus ? RowKind::FacePlus : RowKind::FaceMinus);
        }

    std::vector<double> rhs(L.n, 0.0), u;
    solve_linear(L, rhs, bc, u, o.solver);
    FaceField out(g, face, j_lo, j_hi);
    out.values = u;
    return out;
}

Ref1d solve_1d_reference(const Grid3& g, const ModelParams& p,
                         const std::function<double(double)>& phi_up,
                         const std::function<double(double)>& phi_lo, const ScalarFn& f,
                         const DirichletOptions& o) {
    const int j0 = g.j_m_ybar1, j1 = g.j_ybar1;
    const int nyi = j1 - j0 + 1, nz = g.nz();
    const double hz = g.hz();
    const CycleLevels c{g.ybar, g.ybar1};

    SparseOperator L;
    L.n = static_cast<long>(nyi) * nz;
    L.row_ptr.push_back(0);
    DirichletBC bc(L.n);
    std::vector<double> rhs(L.n, 0.0);
    const auto id = [&](int j, int k) { return static_cast<long>(j - j0) * nz + k; };
    const long corner_up = id(g.j_zero, nz - 1);
    const long corner_lo = id(g.j_zero, 0);

    for (int j = j0; j <= j1; ++j)
        for (int k = 0; k < nz; ++k) {
            const long r = id(j, k);
            const double y = g.ys[j], z = g.zs[k];
            if (j == j0 || j == j1) {
                L.cols.push_back(r);
                L.vals.push_back(1.0);
                L.row_ptr.push_back(static_cast<long>(L.cols.size()));
                L.row_kind.push_back(RowKind::Boundary);
                bc.pin(r, j == j1 ? phi_up(z) : phi_lo(z));
                continue;
            }
            // plastic-face lines: closed-form two-point rows linking the
            // line to its unknown corner value at y = 0
            const auto push_line_row = [&](long corner, double weight, RowKind kind) {
                if (corner < r) {
                    L.cols.push_back(corner);
                    L.vals.push_back(-weight);
                    L.cols.push_back(r);
                    L.vals.push_back(1.0);
                } else {
                    L.cols.push_back(r);
                    L.vals.push_back(1.0);
                    L.cols.push_back(corner);
                    L.vals.push_back(-weight);
                }
                L.row_ptr.push_back(static_cast<long>(L.cols.size()));
                L.row_kind.push_back(kind);
            };
            if (k == nz - 1 && y > 0.0) {
                push_line_row(corner_up, kernel_I(y, c.ybar1, p, c), RowKind::FacePlus);
                rhs[r] = kernel_I(0.0, y, p, c) * phi_up(g.zs[nz - 1]);
                continue;
            }
            if (k == 0 && y < 0.0) {
                push_line_row(corner_lo, kernel_I(-y, c.ybar1, p, c), RowKind::FaceMinus);
                rhs[r] = kernel_I(0.0, -y, p, c) * phi_lo(g.zs[0]);
                continue;
            }
            std::vector<std::pair<long, double>> e;
            const auto add = [&](long col, double v) {
                for (auto& q : e)
                    if (q.first == col) {
                        q.second += v;
                        return;
                    }
                e.emplace_back(col, v);
            };
            const double hm = g.ys[j] - g.ys[j - 1];
            const double hp = g.ys[j + 1] - g.ys[j];
            add(id(j - 1, k), 1.0 / (hm * (hm + hp)));
            add(r, -1.0 / (hm * hp));
            add(id(j + 1, k), 1.0 / (hp * (hm + hp)));
            const double by = -(p.c0 * y + p.k * z);
            if (by > 0.0) {
                add(id(j + 1, k), by / hp);
                add(r, -by / hp);
            } else if (by < 0.0) {
                add(id(j - 1, k), -by / hm);
                add(r, by / hm);
            }
            if (y > 0.0) {
                add(id(j, k + 1), y / hz);
                add(r, -y / hz);
            } else if (y < 0.0) {
                add(id(j, k - 1), -y / hz);
                add(r, y / hz);
            }
            std::sort(e.begin(), e.end());
            for (const auto& q : e) {
                L.cols.push_back(q.first);
                L.vals.push_back(q.second);
            }
            L.row_ptr.push_back(static_cast<long>(L.cols.size()));
            L.row_kind.push_back(RowKind::Volume);
            if (f) rhs[r] = -f(0.0, y, z);
        }

    std::vector<double> u;
    const SolveStats st = solve_linear(L, rhs, bc, u, o.solver);

    Ref1d out;
    out.ys.assign(g.ys.begin() + j0, g.ys.begin() + j1 + 1);
    out.zs = g.zs;
    out.values = u;
    out.eta_plus = u[corner_up];
    out.eta_minus = u[corner_lo];
    out.residual = st.residual;
    out.iterations = st.iterations;
    return out;
}

} // namespace plastokh
