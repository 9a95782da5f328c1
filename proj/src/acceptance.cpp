#include "plastokh/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "plastokh/csv.hpp"
#include "plastokh/dirichlet.hpp"
#include "plastokh/ergodic.hpp"
#include "plastokh/errors.hpp"
#include "plastokh/rng.hpp"
#include "plastokh/sim.hpp"
#include "plastokh/testfuncs.hpp"

namespace plastokh {

namespace {

// ---------------------------------------------------------------------
// Pinned acceptance budgets. The C constants in the C*h budgets were
// calibrated once on the desk-scale configuration below and then frozen;
// they are first-order-in-h envelopes with roughly 2x headroom over the
// observed values.
// ---------------------------------------------------------------------
constexpr double kMaxPrincipleSlack = 1e-9;   // sup-norm overshoot allowance
constexpr double kChainMassTol = 1e-6;        // |P^n 1 - 1| for n <= 50
constexpr double kReductionRatioMin = 1.8;    // first-order error ratio under h -> h/2
constexpr double kLineFormulaTol = 1e-6;      // closed-form face line identity
constexpr double kMcEquivC = 1.0;             // MC vs PDE: 3 stderr + C h
constexpr double kFitR2Min = 0.95;            // geometric-decay log fit quality
constexpr double kRouteC = 0.35;              // cross-route long-run averages: C h
constexpr double kRouteTol = 1e-8;            // solver-level slack in the route budget
constexpr double kTvC = 0.6;                  // coarse-bin total variation: C h
constexpr double kMassTol = 1e-8;             // stationary measure normalization
constexpr double kStationarityC = 2.0;        // |<L f, m>| <= C h for smooth bumps
constexpr double kGaugeSlack = 1e-8;          // discrete overshoot of the gauge bound
constexpr double kCompleteTol = 2e-3;         // complete-problem scale: residual 10x, glue 2x

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    double value = 0.0;
    double budget = 0.0;
    std::string note;
};

void criterion(RunReport& rep, std::ostream& log, int num, const std::string& name,
               const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, 0.0, 0.0, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.add_check(name, o.pass, o.value, o.budget, o.note);
    rep.add_stage(name, 0.0, 0, secs);
    log << "criterion " << num << " " << name << ": " << (o.pass ? "PASS" : "FAIL")
        << " (value " << fmt(o.value) << ", budget " << fmt(o.budget)
        << (o.note.empty() ? "" : ", " + o.note) << ")\n"
        << std::flush;
}

SolveContext make_ctx(const RunConfig& c, const Grid3& g) {
    SolveContext ctx;
    ctx.grid = &g;
    ctx.params = c.model;
    ctx.cycle = c.cycle;
    ctx.dirichlet.solver = c.solver;
    ctx.dirichlet.epsilon_z = c.epsilon_z;
    ctx.dirichlet.march = c.march;
    ctx.mc = c.mc;
    ctx.parallel = c.parallel;
    ctx.stochastic_tol = c.stochastic_tol;
    ctx.gamma_tol = c.gamma_tol;
    ctx.gamma_max_iter = c.gamma_max_iter;
    ctx.solvability_tol = c.solvability_tol;
    ctx.series_tol = c.series_tol;
    ctx.series_max_terms = c.series_max_terms;
    ctx.fp_tol = c.fp_tol;
    ctx.fp_max_iter = c.fp_max_iter;
    return ctx;
}

double scalar_one(double, double, double) { return 1.0; }

// coarse occupation bins shared by the TV comparison: 3 x-cells, 4 y-cells,
// phase in {plastic minus, elastic, plastic plus}
constexpr int kBins = 3 * 4 * 3;

int coarse_bin(double x, double y, int phase_bin, const ModelParams& p,
               const CycleLevels& c) {
    const int xb = (x < -p.L / 3.0) ? 0 : (x < p.L / 3.0) ? 1 : 2;
    const int yb = (y < -c.ybar) ? 0 : (y < 0.0) ? 1 : (y < c.ybar) ? 2 : 3;
    return (xb * 4 + yb) * 3 + phase_bin;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (int i = 0; i < kBins; ++i) d += std::abs(a[i] - b[i]);
    return 0.5 * d;
}

} // namespace

RunConfig acceptance_config() {
    RunConfig c;
    c.model.alpha = 1.0;
    c.model.beta = 0.05;
    c.model.c0 = 1.0;
    c.model.k = 1.0;
    c.model.Y = 0.1;
    c.model.L = 1.0;
    c.cycle = {0.5, 1.0};
    c.nx = 9;
    c.ny_per_band = 5;
    c.nz = 9;
    // the truncation must be far enough out that the chance of the
    // velocity escaping to |y| = y_max before re-entering the cycle band
    // stays below the chain-mass tolerance over 50 cycle steps
    c.y_max = 5.0;
    c.mc.dt = 5e-4;
    c.mc.n_paths = 4000;
    c.mc.horizon = 500.0;
    c.mc.seed = 20260823;
    c.fp_tol = 1e-12;
    c.function = "tanh_y";
    return c;
}

RunReport run_acceptance(const RunConfig& cfg, std::ostream& log) {
    RunReport rep;
    rep.command = "acceptance";
    rep.seed = cfg.mc.seed;
    rep.config_text = render_config(cfg);

    const ModelParams& p = cfg.model;
    const CycleLevels& c = cfg.cycle;
    const Grid3 g = build_grid(p, c, cfg.nx, cfg.ny_per_band, cfg.nz, cfg.y_max);
    const SolveContext ctx = make_ctx(cfg, g);
    const DirichletOps ops = make_dirichlet_ops(g, p, ctx.dirichlet);
    const double h = g.h_max();
    const int i_mid = g.nx() / 2, k_mid = g.nz() / 2;

    // shared state filled by the earlier criteria
    std::optional<PMatrix> P;
    std::optional<BoundaryMeasure> gamma;
    ErgodicDiagnostics diag;
    std::optional<InvariantMeasure> inv;

    // 1. comparison principle of the homogeneous solvers on random data
    criterion(rep, log, 1, "maximum-principle", [&]() -> Outcome {
        Xoshiro256 rng(20260823u);
        const auto randomize = [&](SurfaceField& s) {
            for (double& v : s.upper) v = 2.0 * rng.next_uniform() - 1.0;
            for (double& v : s.lower) v = 2.0 * rng.next_uniform() - 1.0;
        };
        double worst = 0.0;
        for (int t = 0; t < 25; ++t) {
            SurfaceField phi(g, SurfaceLevel::Gamma1);
            randomize(phi);
            const InteriorSolution eta = solve_interior(ops.interior, phi, nullptr, ctx.dirichlet);
            worst = std::max(worst, eta.eta.sup_norm() - phi.sup_norm());
        }
        for (int t = 0; t < 25; ++t) {
            SurfaceField hdat(g, SurfaceLevel::Gamma);
            randomize(hdat);
            const ExteriorSolution zeta = solve_exterior(ops.exterior, hdat, nullptr, ctx.dirichlet);
            worst = std::max(worst, zeta.zeta.sup_norm() - hdat.sup_norm());
        }
        return {worst <= kMaxPrincipleSlack, worst, kMaxPrincipleSlack,
                "50 random boundary data sets"};
    });

    // 2. conservation of the embedded chain and of the cycle functional
    criterion(rep, log, 2, "chain-conservation", [&]() -> Outcome {
        P = assemble_P_matrix(ctx);
        std::vector<double> v(P->n, 1.0);
        double dev = 0.0;
        for (int n = 1; n <= 50; ++n) {
            v = P->apply(v);
            for (double x : v) dev = std::max(dev, std::abs(x - 1.0));
        }
        const SurfaceField t1 = apply_T(ops, scalar_one, ctx);
        double t1_min = t1.upper[0];
        for (double x : t1.upper) t1_min = std::min(t1_min, x);
        for (double x : t1.lower) t1_min = std::min(t1_min, x);

        auto bm = boundary_invariant_measure(ctx, MeasureMode::Matrix, &*P);
        gamma = std::move(bm.first);
        diag = std::move(bm.second);
        const double nu1 = nu_functional(scalar_one, ctx, *gamma);

        const bool pass = dev <= kChainMassTol && t1_min > 0.0 && nu1 == 1.0;
        return {pass, dev, kChainMassTol,
                "min T1 " + fmt(t1_min) + ", nu(1)-1 " + fmt(nu1 - 1.0)};
    });

    // 3. uncoupled-excitation reduction: the 3D solve collapses onto the
    // 2D reference, the gap shrinks at first order, and the face lines
    // obey the two-point kernel identity
    criterion(rep, log, 3, "planar-reduction", [&]() -> Outcome {
        ModelParams p1 = p;
        p1.beta = 0.0;
        const auto phi_up = [&](double z) {
            return std::cos(0.5 * M_PI * z / p.Y) + 0.5 * z / p.Y;
        };
        const auto phi_lo = [&](double z) {
            return 0.3 * std::sin(0.5 * M_PI * z / p.Y) - 0.2;
        };
        const auto gap = [&](const Grid3& gr) {
            const SurfaceField phi = SurfaceField::sample(
                gr, SurfaceLevel::Gamma1,
                [&](double, double z) { return phi_up(z); },
                [&](double, double z) { return phi_lo(z); });
            const InteriorSolution sol = solve_interior(gr, p1, phi, ctx.dirichlet);
            const Ref1d ref = solve_1d_reference(gr, p1, phi_up, phi_lo, nullptr, ctx.dirichlet);
            double e = 0.0;
            const int im = gr.nx() / 2;
            for (int j = gr.j_m_ybar1; j <= gr.j_ybar1; ++j)
                for (int k = 0; k < gr.nz(); ++k)
                    e = std::max(e, std::abs(sol.eta.at(im, j, k) -
                                             ref.at(j - gr.j_m_ybar1, k)));
            return std::make_pair(e, ref);
        };
        const Grid3 gf = build_grid(p1, c, 2 * cfg.nx - 1, 2 * cfg.ny_per_band,
                                    2 * cfg.nz - 1, cfg.y_max);
        const auto [e_coarse, ref_c] = gap(g);
        const auto [e_fine, ref_f] = gap(gf);
        const double ratio = (e_fine > 1e-12) ? e_coarse / e_fine : 10.0;

        // two-point kernel identity along both plastic-face lines
        double line_err = 0.0;
        for (int j = gf.j_zero + 1; j < gf.j_ybar1; ++j) {
            const double y = gf.ys[j];
            const double pred = ref_f.eta_plus * kernel_I(y, c.ybar1, p1, c) +
                                phi_up(p.Y) * kernel_I(0.0, y, p1, c);
            line_err = std::max(
                line_err, std::abs(ref_f.at(j - gf.j_m_ybar1, gf.nz() - 1) - pred));
        }
        for (int j = gf.j_m_ybar1 + 1; j < gf.j_zero; ++j) {
            const double y = gf.ys[j];
            const double pred = ref_f.eta_minus * kernel_I(-y, c.ybar1, p1, c) +
                                phi_lo(-p.Y) * kernel_I(0.0, -y, p1, c);
            line_err = std::max(line_err, std::abs(ref_f.at(j - gf.j_m_ybar1, 0) - pred));
        }
        const bool pass = ratio >= kReductionRatioMin && line_err <= kLineFormulaTol;
        return {pass, ratio, kReductionRatioMin,
                "gap " + fmt(e_coarse) + " -> " + fmt(e_fine) + ", line identity " +
                    fmt(line_err)};
    });

    // 4. Monte Carlo vs PDE: hitting functionals, expected exit time,
    // and the cycle integral agree within 3 stderr + C h
    criterion(rep, log, 4, "mc-pde-equivalence", [&]() -> Outcome {
        McOptions mco = cfg.mc;
        const double Y = p.Y;
        using Sheet = std::function<double(double, double)>;
        const std::vector<std::pair<Sheet, Sheet>> data = {
            {[Y](double x, double z) { return std::cos(x) * std::cos(M_PI * z / Y); },
             [](double, double) { return 0.0; }},
            {[Y](double x, double z) { return std::sin(x) + z / Y; },
             [](double, double) { return 0.5; }},
            {[Y](double x, double z) { return std::exp(-x * x) * (1.0 + z / Y); },
             [](double x, double) { return -0.3 * std::cos(x); }},
            {[Y](double x, double z) { return x / (1.0 + x * x) - 0.5 * z / Y; },
             [Y](double, double z) { return 0.2 * std::sin(M_PI * z / Y); }},
            {[Y](double x, double z) { return std::cos(2.0 * x) * z / Y; },
             [](double x, double) { return std::cos(x); }}};
        struct Start {
            int i, j, k;
        };
        const std::vector<Start> starts = {{i_mid, g.j_zero, k_mid},
                                           {1, g.j_zero + 1, 1},
                                           {g.nx() - 2, g.j_zero - 1, g.nz() - 2}};
        double worst = 0.0; // excess over the individual budget, normalized
        std::string worst_tag;
        const auto record = [&](const std::string& tag, double diff, double bud) {
            if (diff / bud > worst) {
                worst = diff / bud;
                worst_tag = tag + " " + fmt(diff) + "/" + fmt(bud);
            }
        };

        uint64_t seed = cfg.mc.seed;
        for (size_t m = 0; m < data.size(); ++m) {
            const SurfaceField phi = SurfaceField::sample(g, SurfaceLevel::Gamma1,
                                                          data[m].first, data[m].second);
            const InteriorSolution eta = solve_interior(ops.interior, phi, nullptr, ctx.dirichlet);
            for (size_t s = 0; s < starts.size(); ++s) {
                const Start st = starts[s];
                const State s0{g.xs[st.i], g.ys[st.j], g.zs[st.k], 0.0};
                mco.seed = ++seed;
                const McEstimate est = mc_boundary_functional(phi, s0, p, c, mco);
                const double pde = eta.eta.at(st.i, st.j, st.k);
                record("hit[" + std::to_string(m) + "," + std::to_string(s) + "]",
                       std::abs(est.mean - pde), 3.0 * est.stderr_ + kMcEquivC * h);
            }
        }

        // expected time to exit the cycle core
        const InteriorSolution chi = solve_interior_nonhom(g, p, scalar_one, ctx.dirichlet);
        for (size_t s = 0; s < starts.size(); ++s) {
            const Start st = starts[s];
            const State s0{g.xs[st.i], g.ys[st.j], g.zs[st.k], 0.0};
            mco.seed = ++seed;
            const std::vector<double> taus = ensemble_map(
                mco.n_paths, mco.seed,
                [&](long, NormalStream& stream) {
                    return hit_level(s0, c.ybar1, p, mco, stream).second;
                },
                cfg.parallel);
            const McEstimate est = estimate_from_samples(taus);
            record("tau1[" + std::to_string(s) + "]",
                   std::abs(est.mean - chi.eta.at(st.i, st.j, st.k)),
                   3.0 * est.stderr_ + kMcEquivC * h);
        }

        // exterior hitting functional from the outer surface
        {
            const SurfaceField hdat = SurfaceField::sample(g, SurfaceLevel::Gamma,
                                                           data[0].first, data[0].second);
            const ExteriorSolution zeta = solve_exterior(ops.exterior, hdat, nullptr, ctx.dirichlet);
            const State s0{g.xs[i_mid], c.ybar1, g.zs[k_mid], 0.0};
            mco.seed = ++seed;
            const std::vector<double> vals = ensemble_map(
                mco.n_paths, mco.seed,
                [&](long, NormalStream& stream) {
                    const State hit = hit_level(s0, c.ybar, p, mco, stream).first;
                    return hdat.interpolate(hit.y > 0.0, hit.x, hit.z);
                },
                cfg.parallel);
            const McEstimate est = estimate_from_samples(vals);
            record("exterior", std::abs(est.mean - zeta.zeta.at(i_mid, g.j_ybar1, k_mid)),
                   3.0 * est.stderr_ + kMcEquivC * h);
        }

        // cycle integral of a bounded observable
        {
            const auto fx = [](double x, double, double) { return std::cos(x); };
            const SurfaceField tf = apply_T(ops, fx, ctx);
            const State s0{g.xs[i_mid], c.ybar1, g.zs[k_mid], 0.0};
            mco.seed = ++seed;
            const std::vector<double> ints = ensemble_map(
                mco.n_paths, mco.seed,
                [&](long, NormalStream& stream) {
                    return sample_cycle(
                               s0, [](const State& q) { return std::cos(q.x); }, p, c,
                               mco, stream)
                        .integral;
                },
                cfg.parallel);
            const McEstimate est = estimate_from_samples(ints);
            record("cycle-integral", std::abs(est.mean - tf.up(i_mid, k_mid)),
                   3.0 * est.stderr_ + kMcEquivC * h);
        }

        return {worst <= 1.0, worst, 1.0, "worst " + worst_tag};
    });

    // 5. geometric decay of the chain iterates
    criterion(rep, log, 5, "geometric-decay", [&]() -> Outcome {
        if (!P) return {false, 0.0, 0.0, "chain unavailable"};
        // the iterate diffs eventually plateau at the truncation-leakage
        // level; only the contraction window before it probes the decay rate
        double max_ratio = 0.0;
        int counted = 0;
        for (size_t n = 5; n + 1 < diag.sup_diffs.size(); ++n) {
            if (diag.sup_diffs[n] <= 1e-12) break;
            const double ratio = diag.sup_diffs[n + 1] / diag.sup_diffs[n];
            if (ratio > 0.95) break;
            max_ratio = std::max(max_ratio, ratio);
            ++counted;
        }
        const bool pass = diag.r_squared >= kFitR2Min && diag.rho_estimate > 0.0 &&
                          counted >= 3 && max_ratio < 1.0;
        return {pass, diag.r_squared, kFitR2Min,
                "rho " + fmt(diag.rho_estimate) + ", max successive ratio " +
                    fmt(max_ratio)};
    });

    // 6. the long-run average of each basket function agrees across the
    // cycle route, the stationary-density route, and plain simulation
    criterion(rep, log, 6, "triple-route", [&]() -> Outcome {
        if (!gamma) return {false, 0.0, 0.0, "boundary measure unavailable"};
        inv = solve_stationary_density(ctx);
        const NodeIndexer idx(g, Region::Full);

        double worst = 0.0;
        std::string worst_tag;
        const auto record = [&](const std::string& tag, double diff, double bud) {
            if (diff / bud > worst) {
                worst = diff / bud;
                worst_tag = tag + " " + fmt(diff) + "/" + fmt(bud);
            }
        };

        const double route_budget = 2.0 * (kRouteC * h + kRouteTol);
        McOptions mcl;
        mcl.dt = 1e-3;
        mcl.n_paths = 8;
        mcl.horizon = 400.0;
        mcl.burn_in = 40.0;

        const auto basket = testfuncs::basket();
        for (size_t b = 0; b < basket.size(); ++b) {
            const auto& f = basket[b].second;
            const double nu_cycle = nu_functional(f.value, ctx, *gamma);
            double nu_fp = 0.0;
            for (long r = 0; r < static_cast<long>(inv->masses.size()); ++r) {
                int i, j, k;
                idx.decode(r, i, j, k);
                nu_fp += inv->masses[r] * f.value(g.xs[i], g.ys[j], g.zs[k]);
            }
            record("route[" + basket[b].first + "]", std::abs(nu_cycle - nu_fp),
                   route_budget);

            mcl.seed = cfg.mc.seed + 7000 + static_cast<uint64_t>(b);
            const McEstimate mc = mc_longrun_average(
                [&](const State& s) { return f.value(s.x, s.y, s.z); }, p, mcl);
            const double mc_budget = 3.0 * mc.stderr_ + kRouteC * h;
            record("mc-cycle[" + basket[b].first + "]", std::abs(mc.mean - nu_cycle),
                   mc_budget);
            record("mc-fp[" + basket[b].first + "]", std::abs(mc.mean - nu_fp), mc_budget);
        }

        // coarse-bin occupation vs the stationary masses
        std::vector<double> occ(kBins, 0.0), stat(kBins, 0.0);
        {
            McOptions mct;
            mct.dt = 1e-3;
            mct.horizon = 12000.0;
            mct.seed = cfg.mc.seed + 9001;
            const double burn = 100.0;
            long count = 0;
            simulate_path(State{0.0, 0.0, 0.0, 0.0}, p, mct, [&](const State& s) {
                if (s.t < burn) return;
                const Phase ph = phase_of(s, p);
                const int pb = (ph == Phase::PlasticMinus) ? 0
                               : (ph == Phase::Elastic)    ? 1
                                                           : 2;
                occ[coarse_bin(s.x, s.y, pb, p, c)] += 1.0;
                ++count;
            });
            for (double& v : occ) v /= static_cast<double>(count);
            for (long r = 0; r < static_cast<long>(inv->masses.size()); ++r) {
                int i, j, k;
                idx.decode(r, i, j, k);
                const int pb = (k == g.nz() - 1 && j >= g.j_zero) ? 2
                               : (k == 0 && j <= g.j_zero)        ? 0
                                                                  : 1;
                stat[coarse_bin(g.xs[i], g.ys[j], pb, p, c)] += inv->masses[r];
            }
        }
        const double tv = tv_distance(occ, stat);
        record("tv", tv, kTvC * h);

        return {worst <= 1.0, worst, 1.0, "worst " + worst_tag + ", tv " + fmt(tv)};
    });

    // 7. structure of the stationary measure and weak stationarity
    criterion(rep, log, 7, "stationary-density", [&]() -> Outcome {
        if (!inv) inv = solve_stationary_density(ctx);
        const NodeIndexer idx(g, Region::Full);
        double min_mass = 0.0, wrong_sign = 0.0;
        for (long r = 0; r < static_cast<long>(inv->masses.size()); ++r) {
            min_mass = std::min(min_mass, inv->masses[r]);
            int i, j, k;
            idx.decode(r, i, j, k);
            const double y = g.ys[j];
            if ((k == g.nz() - 1 && y < 0.0) || (k == 0 && y > 0.0))
                wrong_sign = std::max(wrong_sign, std::abs(inv->masses[r]));
        }
        const double mass_err = std::abs(inv->total_mass(g) - 1.0);

        const std::vector<TestFunction> bumps = {
            testfuncs::bump_product(0.0, 0.5, 0.0, 0.35, 0.0, 0.6 * p.Y),
            testfuncs::bump_product(0.3, 0.5, 0.6, 0.35, 0.02, 0.6 * p.Y),
            testfuncs::bump_product(-0.3, 0.5, -0.6, 0.35, -0.02, 0.6 * p.Y),
            testfuncs::bump_product(0.3, 0.5, -0.4, 0.35, 0.02, 0.6 * p.Y),
            testfuncs::bump_product(-0.2, 0.5, 0.4, 0.35, -0.02, 0.6 * p.Y)};

        RunConfig fine = cfg;
        fine.nx = 2 * cfg.nx - 1;
        fine.ny_per_band = 2 * cfg.ny_per_band;
        fine.nz = 2 * cfg.nz - 1;
        const Grid3 gfine =
            build_grid(p, c, fine.nx, fine.ny_per_band, fine.nz, fine.y_max);
        const SolveContext ctx_fine = make_ctx(fine, gfine);
        const InvariantMeasure inv_fine = solve_stationary_density(ctx_fine);

        double worst_res = 0.0, worst_decrease = 0.0;
        for (const TestFunction& f : bumps) {
            const double r_h = std::abs(stationarity_residual(f, *inv, p));
            const double r_f = std::abs(stationarity_residual(f, inv_fine, p));
            worst_res = std::max(worst_res, r_h);
            worst_decrease = std::max(worst_decrease, r_f - r_h);
        }

        const bool pass = min_mass >= 0.0 && wrong_sign == 0.0 &&
                          mass_err <= kMassTol && worst_res <= kStationarityC * h &&
                          worst_decrease <= 0.0;
        return {pass, worst_res, kStationarityC * h,
                "mass err " + fmt(mass_err) + ", wrong-sign " + fmt(wrong_sign) +
                    ", refinement change " + fmt(worst_decrease)};
    });

    // 8. barrier and gauge certificates for the source problems
    criterion(rep, log, 8, "barrier-bounds", [&]() -> Outcome {
        const InteriorSolution chi = solve_interior_nonhom(g, p, scalar_one, ctx.dirichlet);
        const BarrierGauge bar = BarrierGauge::interior(1.0, p, c);
        const double bound = bar.interior_bound(p, c);
        const double chi_sup = chi.eta.sup_norm();

        const ExteriorSolution xi =
            solve_exterior_nonhom(g, p, scalar_one, nullptr, ctx.dirichlet);
        const BarrierGauge gauge = BarrierGauge::exterior(1.0, p, c);
        double overshoot = 0.0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j : xi.zeta.js())
                for (int k = 0; k < g.nz(); ++k)
                    overshoot = std::max(overshoot, std::abs(xi.zeta.at(i, j, k)) -
                                                        gauge.psi(std::abs(g.ys[j])));
        const bool pass = chi_sup <= bound && overshoot <= kGaugeSlack;
        return {pass, chi_sup, bound,
                "lambda " + fmt(bar.lambda) + ", gauge overshoot " + fmt(overshoot)};
    });

    // 9. the complete problem: rejected for uncentered sources, solved
    // with small residuals after centering
    criterion(rep, log, 9, "complete-problem", [&]() -> Outcome {
        if (!gamma) return {false, 0.0, 0.0, "boundary measure unavailable"};
        bool rejected = false;
        double nu_one = 0.0;
        try {
            solve_complete_problem(scalar_one, ctx, &*gamma);
        } catch (const NotSolvable& e) {
            rejected = true;
            nu_one = e.nu_f;
        }

        const TestFunction f = testfuncs::basket()[1].second; // tanh in velocity
        const double nu_f = nu_functional(f.value, ctx, *gamma);
        const auto centered = [&](double x, double y, double z) {
            return f.value(x, y, z) - nu_f;
        };
        const CompleteSolution sol = solve_complete_problem(centered, ctx, &*gamma);
        const bool pass = rejected && sol.pde_residual <= 10.0 * kCompleteTol &&
                          sol.glue_residual <= 2.0 * kCompleteTol;
        return {pass, sol.pde_residual, 10.0 * kCompleteTol,
                "nu(1) " + fmt(nu_one) + ", glue " + fmt(sol.glue_residual) + ", " +
                    std::to_string(sol.series_terms) + " series terms"};
    });

    // 10. byte-identical artifacts across repeated runs
    criterion(rep, log, 10, "determinism", [&]() -> Outcome {
        RunConfig small = cfg;
        small.nx = 5;
        small.ny_per_band = 3;
        small.nz = 5;
        small.mc.n_paths = 2000;
        const std::string base = cfg.out_dir + "/determinism";
        export_artifacts(small, base + "/a");
        export_artifacts(small, base + "/b");

        long mismatches = 0;
        long compared = 0;
        const auto slurp = [](const std::filesystem::path& q) {
            std::ifstream in(q, std::ios::binary);
            std::ostringstream body;
            body << in.rdbuf();
            return body.str();
        };
        for (const auto& entry : std::filesystem::directory_iterator(base + "/a")) {
            const auto other = std::filesystem::path(base + "/b") / entry.path().filename();
            ++compared;
            if (!std::filesystem::exists(other) ||
                slurp(entry.path()) != slurp(other))
                ++mismatches;
        }
        const bool pass = compared >= 8 && mismatches == 0;
        return {pass, static_cast<double>(mismatches), 0.0,
                std::to_string(compared) + " artifacts compared"};
    });

    return rep;
}

void export_artifacts(const RunConfig& cfg, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const ModelParams& p = cfg.model;
    const CycleLevels& c = cfg.cycle;
    const Grid3 g = build_grid(p, c, cfg.nx, cfg.ny_per_band, cfg.nz, cfg.y_max);
    const SolveContext ctx = make_ctx(cfg, g);
    const DirichletOps ops = make_dirichlet_ops(g, p, ctx.dirichlet);

    {
        std::ofstream out(dir + "/config.txt", std::ios::binary);
        if (!out) throw IoError("cannot write " + dir + "/config.txt");
        out << render_config(cfg);
    }

    const double Y = p.Y;
    const SurfaceField phi = SurfaceField::sample(
        g, SurfaceLevel::Gamma1,
        [Y](double x, double z) { return std::cos(x) * std::cos(M_PI * z / Y); },
        [Y](double x, double z) { return std::sin(x) * z / Y; });
    const InteriorSolution eta = solve_interior(ops.interior, phi, nullptr, ctx.dirichlet);
    export_volume(eta.eta, dir + "/interior.csv");

    const SurfaceField hdat = trace(eta.eta, SurfaceLevel::Gamma);
    const ExteriorSolution zeta = solve_exterior(ops.exterior, hdat, nullptr, ctx.dirichlet);
    export_volume(zeta.zeta, dir + "/exterior.csv");

    export_surface(apply_T(ops, scalar_one, ctx), dir + "/t_one.csv");

    const PMatrix P = assemble_P_matrix(ctx);
    const auto bm = boundary_invariant_measure(ctx, MeasureMode::Matrix, &P);
    export_surface(bm.first.weights, dir + "/gamma.csv");

    const InvariantMeasure inv = solve_stationary_density(ctx);
    export_volume(inv.elastic, dir + "/fp_elastic.csv");
    export_face(inv.plastic_plus, dir + "/fp_plus.csv");
    export_face(inv.plastic_minus, dir + "/fp_minus.csv");

    const State s0{0.0, 0.0, 0.0, 0.0};
    const McEstimate est = mc_boundary_functional(phi, s0, p, c, cfg.mc);
    {
        std::ofstream out(dir + "/mc.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + dir + "/mc.csv");
        char buf[96];
        out << "name,value\n";
        std::snprintf(buf, sizeof buf, "mean,%.17g\n", est.mean);
        out << buf;
        std::snprintf(buf, sizeof buf, "stderr,%.17g\n", est.stderr_);
        out << buf;
        std::snprintf(buf, sizeof buf, "n,%ld\n", est.n);
        out << buf;
    }
}

} // namespace plastokh
