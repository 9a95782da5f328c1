#include "plastokh/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plastokh/errors.hpp"
#include "plastokh/fd_operator.hpp"

namespace plastokh {

std::vector<double> PMatrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(n, 0.0);
    for (long r = 0; r < n; ++r) {
        double acc = 0.0;
        for (long c = 0; c < n; ++c) acc += a[r * n + c] * v[c];
        out[r] = acc;
    }
    return out;
}

std::vector<double> PMatrix::apply_adjoint(const std::vector<double>& v) const {
    std::vector<double> out(n, 0.0);
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < n; ++c) out[c] += a[r * n + c] * v[r];
    return out;
}

std::vector<double> flatten(const SurfaceField& s) {
    std::vector<double> v;
    v.reserve(2 * s.sheet_size());
    v.insert(v.end(), s.lower.begin(), s.lower.end());
    v.insert(v.end(), s.upper.begin(), s.upper.end());
    return v;
}

SurfaceField unflatten(const Grid3& g, SurfaceLevel lv, const std::vector<double>& v) {
    SurfaceField s(g, lv);
    const long m = s.sheet_size();
    std::copy(v.begin(), v.begin() + m, s.lower.begin());
    std::copy(v.begin() + m, v.end(), s.upper.begin());
    return s;
}

double BoundaryMeasure::mass() const {
    double m = 0.0;
    for (double w : weights.lower) m += w;
    for (double w : weights.upper) m += w;
    return m;
}

SurfaceField apply_P(const DirichletOps& ops, const SurfaceField& phi,
                     const SolveContext& ctx) {
    const InteriorSolution eta = solve_interior(ops.interior, phi, nullptr, ctx.dirichlet);
    const SurfaceField h = trace(eta.eta, SurfaceLevel::Gamma);
    const ExteriorSolution zeta = solve_exterior(ops.exterior, h, nullptr, ctx.dirichlet);
    return trace(zeta.zeta, SurfaceLevel::Gamma1);
}

SurfaceField apply_P(const SurfaceField& phi, const SolveContext& ctx) {
    const DirichletOps ops = make_dirichlet_ops(*ctx.grid, ctx.params, ctx.dirichlet);
    return apply_P(ops, phi, ctx);
}

SurfaceField apply_T(const DirichletOps& ops, const ScalarFn& f, const SolveContext& ctx) {
    const SurfaceField zero1 = SurfaceField::constant(*ctx.grid, SurfaceLevel::Gamma1, 0.0);
    const InteriorSolution chi = solve_interior(ops.interior, zero1, f, ctx.dirichlet);
    const SurfaceField h = trace(chi.eta, SurfaceLevel::Gamma);
    const ExteriorSolution xi = solve_exterior(ops.exterior, h, f, ctx.dirichlet);
    return trace(xi.zeta, SurfaceLevel::Gamma1);
}

SurfaceField apply_T(const ScalarFn& f, const SolveContext& ctx) {
    const DirichletOps ops = make_dirichlet_ops(*ctx.grid, ctx.params, ctx.dirichlet);
    return apply_T(ops, f, ctx);
}

PMatrix assemble_P_matrix(const SolveContext& ctx) {
    const Grid3& g = *ctx.grid;
    const DirichletOps ops = make_dirichlet_ops(g, ctx.params, ctx.dirichlet);
    const long m = static_cast<long>(g.nx()) * g.nz();
    PMatrix P;
    P.n = 2 * m;
    P.a.assign(P.n * P.n, 0.0);

    std::exception_ptr first_error = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (ctx.parallel)
#endif
    for (long c = 0; c < P.n; ++c) {
        if (first_error) continue;
        try {
            std::vector<double> e(P.n, 0.0);
            e[c] = 1.0;
            const SurfaceField col =
                apply_P(ops, unflatten(g, SurfaceLevel::Gamma1, e), ctx);
            const std::vector<double> v = flatten(col);
            for (long r = 0; r < P.n; ++r) P.a[r * P.n + c] = v[r];
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return P;
}

void fit_geometric_rate(ErgodicDiagnostics& d, int n_lo) {
    std::vector<double> xs, ys;
    for (size_t n = static_cast<size_t>(n_lo); n < d.sup_diffs.size(); ++n) {
        // stop the fit window at the solver-noise / truncation-leakage
        // plateau, where successive diffs stop contracting
        if (d.sup_diffs[n] <= 1e-13) break;
        if (n > 0 && d.sup_diffs[n] > 0.95 * d.sup_diffs[n - 1]) break;
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(d.sup_diffs[n]));
    }
    if (xs.size() < 3) return;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double fit = icept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    d.rho_estimate = -slope;
    d.K_estimate = std::exp(icept);
    d.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
}

namespace {

std::pair<BoundaryMeasure, ErgodicDiagnostics>
gamma_star_matrix(const SolveContext& ctx, const PMatrix& P) {
    // stochasticity of the discrete chain
    for (long r = 0; r < P.n; ++r) {
        double mass = 0.0;
        for (long c = 0; c < P.n; ++c) {
            const double v = P.at(r, c);
            if (v < -ctx.stochastic_tol)
                throw NotStochastic("negative transition weight " + std::to_string(v));
            mass += v;
        }
        if (std::abs(mass - 1.0) > 10.0 * ctx.stochastic_tol)
            throw NotStochastic("row mass " + std::to_string(mass) +
                                "; refine the grid or enlarge y_max");
    }

    std::vector<double> v(P.n, 1.0 / static_cast<double>(P.n));
    long it = 0;
    double diff = 0.0;
    for (it = 1; it <= ctx.gamma_max_iter; ++it) {
        std::vector<double> w = P.apply_adjoint(v);
        double mass = 0.0;
        for (double& x : w) {
            if (x < 0.0) x = 0.0;
            mass += x;
        }
        for (double& x : w) x /= mass;
        diff = 0.0;
        for (long i = 0; i < P.n; ++i) diff += std::abs(w[i] - v[i]);
        v.swap(w);
        if (diff <= ctx.gamma_tol) break;
    }
    if (diff > ctx.gamma_tol)
        throw NoConvergence("boundary measure power iteration", diff, it);

    const Grid3& g = *ctx.grid;
    BoundaryMeasure bm{unflatten(g, SurfaceLevel::Gamma1, v)};

    // geometric decay of the iterates for an asymmetric probe
    ErgodicDiagnostics diag;
    SurfaceField probe = SurfaceField::constant(g, SurfaceLevel::Gamma1, 0.0);
    std::fill(probe.upper.begin(), probe.upper.end(), 1.0);
    std::vector<double> cur = flatten(probe);
    for (int n = 0; n < 60; ++n) {
        std::vector<double> nxt = P.apply(cur);
        double d = 0.0;
        for (long i = 0; i < P.n; ++i) d = std::max(d, std::abs(nxt[i] - cur[i]));
        diag.sup_diffs.push_back(d);
        cur.swap(nxt);
        if (d <= 1e-14) break;
    }
    fit_geometric_rate(diag, 5);
    return {std::move(bm), std::move(diag)};
}

std::pair<BoundaryMeasure, ErgodicDiagnostics> gamma_star_mc(const SolveContext& ctx) {
    const Grid3& g = *ctx.grid;
    SurfaceField w = SurfaceField::constant(g, SurfaceLevel::Gamma1, 0.0);
    NormalStream stream(ctx.mc.seed);
    State s{0.0, ctx.cycle.ybar1, 0.0, 0.0};
    const long n = ctx.mc.n_paths;
    const long burn = std::max<long>(10, n / 10);
    long kept = 0;
    for (long c = 0; c < n + burn; ++c) {
        const CycleSample cs = sample_cycle(s, nullptr, ctx.params, ctx.cycle, ctx.mc, stream);
        s = cs.hit_outer;
        s.t = 0.0;
        if (c < burn) continue;
        ++kept;
        // bilinear deposit on the hit sheet
        auto& sheet = (s.y > 0.0) ? w.upper : w.lower;
        double sx = (s.x - g.xs.front()) / g.hx();
        double sz = (s.z - g.zs.front()) / g.hz();
        sx = std::clamp(sx, 0.0, static_cast<double>(g.nx() - 1));
        sz = std::clamp(sz, 0.0, static_cast<double>(g.nz() - 1));
        const int i0 = std::min(static_cast<int>(sx), g.nx() - 2);
        const int k0 = std::min(static_cast<int>(sz), g.nz() - 2);
        const double tx = sx - i0, tz = sz - k0;
        sheet[static_cast<long>(i0) * g.nz() + k0] += (1 - tx) * (1 - tz);
        sheet[static_cast<long>(i0) * g.nz() + k0 + 1] += (1 - tx) * tz;
        sheet[static_cast<long>(i0 + 1) * g.nz() + k0] += tx * (1 - tz);
        sheet[static_cast<long>(i0 + 1) * g.nz() + k0 + 1] += tx * tz;
    }
    for (double& x : w.upper) x /= kept;
    for (double& x : w.lower) x /= kept;
    return {BoundaryMeasure{std::move(w)}, ErgodicDiagnostics{}};
}

} // namespace

std::pair<BoundaryMeasure, ErgodicDiagnostics>
boundary_invariant_measure(const SolveContext& ctx, MeasureMode mode,
                           const PMatrix* prebuilt) {
    if (mode == MeasureMode::Mc) return gamma_star_mc(ctx);
    if (prebuilt) return gamma_star_matrix(ctx, *prebuilt);
    const PMatrix P = assemble_P_matrix(ctx);
    return gamma_star_matrix(ctx, P);
}

double nu_functional(const ScalarFn& f, const SolveContext& ctx,
                     const BoundaryMeasure& gamma) {
    const DirichletOps ops = make_dirichlet_ops(*ctx.grid, ctx.params, ctx.dirichlet);
    const auto one = [](double, double, double) { return 1.0; };
    const std::vector<double> tf = flatten(apply_T(ops, f, ctx));
    const std::vector<double> t1 = flatten(apply_T(ops, one, ctx));
    const std::vector<double> w = flatten(gamma.weights);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        num += w[i] * tf[i];
        den += w[i] * t1[i];
    }
    if (den <= 0.0)
        throw DegenerateDenominator("mean cycle length " + std::to_string(den));
    return num / den;
}

namespace {

/// Transfer plan for the forward iteration. Truncation rows (kill) lose
/// their mass; wrong-sign face nodes are instantaneous states of the
/// constrained dynamics (the deformation leaves the face the moment the
/// velocity flips sign), so their mass is forwarded to the neighboring
/// z-interior node every sweep. That keeps them exactly zero in the
/// stationary measure without cutting the only return path from the
/// plastic sheets to the elastic volume.
struct FpPlan {
    std::vector<uint8_t> kill;       // truncation rows, mass removed
    std::vector<long> forward_from;  // wrong-sign face rows
    std::vector<long> forward_to;    // their z-interior neighbors
};

FpPlan make_fp_plan(const Grid3& g, const NodeIndexer& idx) {
    FpPlan plan;
    plan.kill.assign(idx.size(), 0);
    for (long r = 0; r < idx.size(); ++r) {
        int i, j, k;
        idx.decode(r, i, j, k);
        if (j == 0 || j == g.ny() - 1) {
            plan.kill[r] = 1;
            continue;
        }
        const double y = g.ys[j];
        if (k == g.nz() - 1 && y < 0.0) {
            plan.forward_from.push_back(r);
            plan.forward_to.push_back(idx.index(i, j, k - 1));
        } else if (k == 0 && y > 0.0) {
            plan.forward_from.push_back(r);
            plan.forward_to.push_back(idx.index(i, j, k + 1));
        }
    }
    return plan;
}

std::vector<double> fp_iterate(const SparseOperator& T, const FpPlan& plan, double dt,
                               std::vector<double> m, const SolveContext& ctx,
                               long& iters, double& final_diff) {
    const long n = T.n;
    const auto settle = [&](std::vector<double>& v) {
        for (long r = 0; r < n; ++r)
            if (plan.kill[r]) v[r] = 0.0;
        for (size_t q = 0; q < plan.forward_from.size(); ++q) {
            v[plan.forward_to[q]] += v[plan.forward_from[q]];
            v[plan.forward_from[q]] = 0.0;
        }
    };
    double mass = 0.0;
    settle(m);
    for (double x : m) mass += x;
    for (double& x : m) x /= mass;

    std::vector<double> nxt(n, 0.0);
    for (iters = 1; iters <= ctx.fp_max_iter; ++iters) {
        T.apply(m, nxt);
        for (long r = 0; r < n; ++r) {
            double v = m[r] + dt * nxt[r];
            nxt[r] = (v < 0.0) ? 0.0 : v;
        }
        settle(nxt);
        mass = 0.0;
        for (long r = 0; r < n; ++r) mass += nxt[r];
        final_diff = 0.0;
        for (long r = 0; r < n; ++r) {
            nxt[r] /= mass;
            final_diff += std::abs(nxt[r] - m[r]);
        }
        m.swap(nxt);
        if (final_diff <= ctx.fp_tol) return m;
    }
    throw NoConvergence("stationary density fixed point", final_diff, ctx.fp_max_iter);
}

} // namespace

double InvariantMeasure::total_mass(const Grid3& g) const {
    const auto wx = axis_weights(g.xs), wy = axis_weights(g.ys), wz = axis_weights(g.zs);
    double m = 0.0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 1; k < g.nz() - 1; ++k)
                m += elastic.at(i, j, k) * wx[i] * wy[j] * wz[k];
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = plastic_plus.j_lo; j <= plastic_plus.j_hi; ++j)
            m += plastic_plus.at(i, j) * wx[i] * wy[j];
        for (int j = plastic_minus.j_lo; j <= plastic_minus.j_hi; ++j)
            m += plastic_minus.at(i, j) * wx[i] * wy[j];
    }
    return m;
}

InvariantMeasure solve_stationary_density(const SolveContext& ctx) {
    const Grid3& g = *ctx.grid;
    SparseOperator op = assemble_generator(g, ctx.params, Region::Full,
                                           AssemblyOptions{ctx.dirichlet.epsilon_z});
    // boundary identity rows must not inject mass into the forward system
    for (long r = 0; r < op.n; ++r)
        if (op.row_kind[r] == RowKind::Boundary)
            for (long p = op.row_ptr[r]; p < op.row_ptr[r + 1]; ++p) op.vals[p] = 0.0;
    const SparseOperator T = transpose(op);

    const NodeIndexer idx(g, Region::Full);
    const FpPlan plan = make_fp_plan(g, idx);
    double max_diag = 0.0;
    for (long r = 0; r < op.n; ++r) max_diag = std::max(max_diag, std::abs(op.diag(r)));
    const double dt = 1.0 / max_diag;

    long it1 = 0, it2 = 0;
    double diff1 = 0.0, diff2 = 0.0;
    const std::vector<double> m1 =
        fp_iterate(T, plan, dt, std::vector<double>(op.n, 1.0), ctx, it1, diff1);
    std::vector<double> ramp(op.n);
    for (long r = 0; r < op.n; ++r) ramp[r] = 1.0 + static_cast<double>(r % 97) / 97.0;
    const std::vector<double> m2 = fp_iterate(T, plan, dt, std::move(ramp), ctx, it2, diff2);
    double sep = 0.0;
    for (long r = 0; r < op.n; ++r) sep += std::abs(m1[r] - m2[r]);
    if (sep > 1e-6)
        throw NullspaceDimension("two initializations split by " + std::to_string(sep) +
                                 "; resolution too coarse");

    InvariantMeasure out;
    out.masses = m1;
    out.iterations = it1;
    out.fixed_point_residual = diff1;
    out.elastic = Field3(g, Region::Full);
    out.plastic_plus = FaceField(g, Face::Plus, g.j_zero, g.ny() - 1);
    out.plastic_minus = FaceField(g, Face::Minus, 0, g.j_zero);
    const auto wx = axis_weights(g.xs), wy = axis_weights(g.ys), wz = axis_weights(g.zs);
    for (long r = 0; r < op.n; ++r) {
        int i, j, k;
        idx.decode(r, i, j, k);
        const double mass = m1[r];
        if (k == g.nz() - 1) {
            if (j >= g.j_zero) out.plastic_plus.at(i, j) = mass / (wx[i] * wy[j]);
        } else if (k == 0) {
            if (j <= g.j_zero) out.plastic_minus.at(i, j) = mass / (wx[i] * wy[j]);
        } else {
            out.elastic.at(i, j, k) = mass / (wx[i] * wy[j] * wz[k]);
        }
    }
    return out;
}

double stationarity_residual(const TestFunction& f, const InvariantMeasure& m,
                             const ModelParams& p) {
    const Grid3& g = *m.elastic.grid;
    const NodeIndexer idx(g, Region::Full);
    double acc = 0.0;
    for (long r = 0; r < static_cast<long>(m.masses.size()); ++r) {
        if (m.masses[r] == 0.0) continue;
        int i, j, k;
        idx.decode(r, i, j, k);
        const State s{g.xs[i], g.ys[j], g.zs[k], 0.0};
        acc += m.masses[r] * generator_apply(f, s, p);
    }
    return acc;
}

CompleteSolution solve_complete_problem(const ScalarFn& f, const SolveContext& ctx,
                                        const BoundaryMeasure* gamma) {
    const Grid3& g = *ctx.grid;
    BoundaryMeasure local;
    if (!gamma) {
        local = boundary_invariant_measure(ctx, MeasureMode::Matrix).first;
        gamma = &local;
    }
    CompleteSolution out;
    out.nu_f = nu_functional(f, ctx, *gamma);
    if (std::abs(out.nu_f) > ctx.solvability_tol) throw NotSolvable(out.nu_f);

    const DirichletOps ops = make_dirichlet_ops(g, ctx.params, ctx.dirichlet);
    SurfaceField term = apply_T(ops, f, ctx);
    const double tf_norm = term.sup_norm();
    SurfaceField sum = term;
    out.series_terms = 1;
    while (term.sup_norm() > ctx.series_tol) {
        if (out.series_terms >= ctx.series_max_terms || term.sup_norm() > 10.0 * tf_norm + 1.0)
            throw NoConvergence("boundary series for the complete problem diverges "
                                "(nu(f) is effectively nonzero)",
                                term.sup_norm(), out.series_terms);
        term = apply_P(ops, term, ctx);
        for (long i = 0; i < sum.sheet_size(); ++i) {
            sum.upper[i] += term.upper[i];
            sum.lower[i] += term.lower[i];
        }
        ++out.series_terms;
    }
    out.series_tail = term.sup_norm();

    const InteriorSolution ui = solve_interior(ops.interior, sum, f, ctx.dirichlet);
    const SurfaceField h = trace(ui.eta, SurfaceLevel::Gamma);
    const ExteriorSolution ue = solve_exterior(ops.exterior, h, f, ctx.dirichlet);

    // overlap agreement in the band ybar <= |y| <= ybar1
    double glue = 0.0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            const double ay = std::abs(g.ys[j]);
            if (ay < g.ybar || ay > g.ybar1) continue;
            for (int k = 0; k < g.nz(); ++k)
                glue = std::max(glue, std::abs(ui.eta.at(i, j, k) - ue.zeta.at(i, j, k)));
        }
    out.glue_residual = glue;

    out.u = Field3(g, Region::Full);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < g.nz(); ++k)
                out.u.at(i, j, k) = (std::abs(g.ys[j]) <= g.ybar1)
                                        ? ui.eta.at(i, j, k)
                                        : ue.zeta.at(i, j, k);

    const SparseOperator full = assemble_generator(g, ctx.params, Region::Full,
                                                   AssemblyOptions{ctx.dirichlet.epsilon_z});
    const std::vector<double> lu = full.apply(out.u.values);
    const NodeIndexer idx(g, Region::Full);
    double res = 0.0;
    for (long r = 0; r < full.n; ++r) {
        if (full.row_kind[r] == RowKind::Boundary) continue;
        int i, j, k;
        idx.decode(r, i, j, k);
        res = std::max(res, std::abs(lu[r] + f(g.xs[i], g.ys[j], g.zs[k])));
    }
    out.pde_residual = res;
    return out;
}

} // namespace plastokh
