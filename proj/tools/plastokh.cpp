#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "plastokh/acceptance.hpp"
#include "plastokh/csv.hpp"
#include "plastokh/dirichlet.hpp"
#include "plastokh/ergodic.hpp"
#include "plastokh/errors.hpp"
#include "plastokh/sim.hpp"
#include "plastokh/testfuncs.hpp"

using namespace plastokh;

namespace {

TestFunction find_function(const std::string& name) {
    for (auto& [n, f] : testfuncs::basket())
        if (n == name) return f;
    throw ValidationError("unknown function '" + name + "'");
}

struct Session {
    RunConfig cfg;
    Grid3 grid;
    SolveContext ctx;
    RunReport report;

    explicit Session(const RunConfig& c, const std::string& command)
        : cfg(c),
          grid(build_grid(c.model, c.cycle, c.nx, c.ny_per_band, c.nz, c.y_max)) {
        ctx.grid = &grid;
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
        report.command = command;
        report.seed = c.mc.seed;
        report.config_text = render_config(c);
    }

    ScalarFn source() const {
        const TestFunction f = find_function(cfg.function);
        return f.value;
    }

    void finish() {
        report.write(cfg.out_dir);
        std::cout << report.to_log();
    }
};

void cmd_simulate(Session& s) {
    const ScalarFn f = s.source();
    const McEstimate est = mc_longrun_average(
        [&](const State& q) { return f(q.x, q.y, q.z); }, s.cfg.model, s.cfg.mc);
    s.report.add_check("longrun-average", true, est.mean, 0.0,
                       "stderr " + std::to_string(est.stderr_) + ", n " +
                           std::to_string(est.n));

    // one archived sample path, thinned to ~2000 rows
    McOptions one = s.cfg.mc;
    one.n_paths = 1;
    const long stride =
        std::max<long>(1, static_cast<long>(one.horizon / one.dt) / 2000);
    std::filesystem::create_directories(s.cfg.out_dir);
    std::ofstream out(s.cfg.out_dir + "/path.csv", std::ios::binary);
    out << "t,x,y,z\n";
    long step_no = 0;
    char buf[160];
    simulate_path(State{}, s.cfg.model, one, [&](const State& q) {
        if (step_no++ % stride) return;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", q.t, q.x, q.y, q.z);
        out << buf;
    });
}

void cmd_solve_interior(Session& s) {
    const ScalarFn f = s.source();
    const double y1 = s.cfg.cycle.ybar1;
    const SurfaceField phi = SurfaceField::sample(
        s.grid, SurfaceLevel::Gamma1,
        [&](double x, double z) { return f(x, y1, z); },
        [&](double x, double z) { return f(x, -y1, z); });
    const InteriorSolution sol = solve_interior(s.grid, s.cfg.model, phi, s.ctx.dirichlet);
    s.report.add_stage("interior", sol.residual, sol.iterations, 0.0);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(sol.eta, s.cfg.out_dir + "/interior.csv");
}

void cmd_solve_exterior(Session& s) {
    const ScalarFn f = s.source();
    const double yb = s.cfg.cycle.ybar;
    const SurfaceField h = SurfaceField::sample(
        s.grid, SurfaceLevel::Gamma,
        [&](double x, double z) { return f(x, yb, z); },
        [&](double x, double z) { return f(x, -yb, z); });
    const ExteriorSolution sol = solve_exterior(s.grid, s.cfg.model, h, s.ctx.dirichlet);
    s.report.add_stage("exterior", sol.residual, sol.iterations, 0.0);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(sol.zeta, s.cfg.out_dir + "/exterior.csv");
}

void cmd_solve_interior_src(Session& s) {
    const ScalarFn f = s.source();
    const InteriorSolution sol =
        solve_interior_nonhom(s.grid, s.cfg.model, f, s.ctx.dirichlet);
    double f_sup = 0.0;
    for (int i = 0; i < s.grid.nx(); ++i)
        for (int j = s.grid.j_m_ybar1; j <= s.grid.j_ybar1; ++j)
            for (int k = 0; k < s.grid.nz(); ++k)
                f_sup = std::max(f_sup,
                                 std::abs(f(s.grid.xs[i], s.grid.ys[j], s.grid.zs[k])));
    const BarrierGauge bar = BarrierGauge::interior(f_sup, s.cfg.model, s.cfg.cycle);
    const double bound = bar.interior_bound(s.cfg.model, s.cfg.cycle);
    s.report.add_stage("interior-src", sol.residual, sol.iterations, 0.0);
    s.report.add_check("barrier-bound", sol.eta.sup_norm() <= bound, sol.eta.sup_norm(),
                       bound, "lambda " + std::to_string(bar.lambda));
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(sol.eta, s.cfg.out_dir + "/interior_src.csv");
}

void cmd_solve_exterior_src(Session& s) {
    const ScalarFn f = s.source();
    const ExteriorSolution sol =
        solve_exterior_nonhom(s.grid, s.cfg.model, f, nullptr, s.ctx.dirichlet);
    double f_sup = 0.0;
    for (int i = 0; i < s.grid.nx(); ++i)
        for (int j : sol.zeta.js())
            for (int k = 0; k < s.grid.nz(); ++k)
                f_sup = std::max(f_sup,
                                 std::abs(f(s.grid.xs[i], s.grid.ys[j], s.grid.zs[k])));
    const BarrierGauge gauge = BarrierGauge::exterior(f_sup, s.cfg.model, s.cfg.cycle);
    double overshoot = 0.0;
    for (int i = 0; i < s.grid.nx(); ++i)
        for (int j : sol.zeta.js())
            for (int k = 0; k < s.grid.nz(); ++k)
                overshoot = std::max(overshoot, std::abs(sol.zeta.at(i, j, k)) -
                                                    gauge.psi(std::abs(s.grid.ys[j])));
    s.report.add_stage("exterior-src", sol.residual, sol.iterations, 0.0);
    s.report.add_check("gauge-bound", overshoot <= 1e-8, overshoot, 1e-8);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(sol.zeta, s.cfg.out_dir + "/exterior_src.csv");
}

void cmd_apply_p(Session& s) {
    const ScalarFn f = s.source();
    const double y1 = s.cfg.cycle.ybar1;
    const SurfaceField phi = SurfaceField::sample(
        s.grid, SurfaceLevel::Gamma1,
        [&](double x, double z) { return f(x, y1, z); },
        [&](double x, double z) { return f(x, -y1, z); });
    const SurfaceField out = apply_P(phi, s.ctx);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_surface(out, s.cfg.out_dir + "/p_phi.csv");
    s.report.add_check("sup-norm", true, out.sup_norm(), 0.0);
}

void cmd_apply_t(Session& s) {
    const SurfaceField out = apply_T(s.source(), s.ctx);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_surface(out, s.cfg.out_dir + "/t_f.csv");
    s.report.add_check("sup-norm", true, out.sup_norm(), 0.0);
}

void cmd_gamma_star(Session& s) {
    const auto [gamma, diag] = boundary_invariant_measure(s.ctx, MeasureMode::Matrix);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_surface(gamma.weights, s.cfg.out_dir + "/gamma.csv");
    s.report.add_check("mass", std::abs(gamma.mass() - 1.0) <= 1e-10, gamma.mass(), 1.0);
    s.report.add_check("decay-rate", diag.rho_estimate > 0.0, diag.rho_estimate, 0.0,
                       "r2 " + std::to_string(diag.r_squared));
}

void cmd_nu(Session& s) {
    const auto gamma = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
    const double nu = nu_functional(s.source(), s.ctx, gamma);
    s.report.add_check("nu", true, nu, 0.0, "function " + s.cfg.function);
    std::cout << "nu(" << s.cfg.function << ") = " << nu << "\n";
}

void cmd_fokker_planck(Session& s) {
    const InvariantMeasure m = solve_stationary_density(s.ctx);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(m.elastic, s.cfg.out_dir + "/fp_elastic.csv");
    export_face(m.plastic_plus, s.cfg.out_dir + "/fp_plus.csv");
    export_face(m.plastic_minus, s.cfg.out_dir + "/fp_minus.csv");
    s.report.add_stage("fixed-point", m.fixed_point_residual, m.iterations, 0.0);
    s.report.add_check("mass", std::abs(m.total_mass(s.grid) - 1.0) <= 1e-8,
                       m.total_mass(s.grid), 1.0);
}

void cmd_complete(Session& s) {
    ScalarFn f = s.source();
    if (s.cfg.center) {
        const auto gamma = boundary_invariant_measure(s.ctx, MeasureMode::Matrix).first;
        const double nu = nu_functional(f, s.ctx, gamma);
        const ScalarFn base = f;
        f = [base, nu](double x, double y, double z) { return base(x, y, z) - nu; };
        s.report.add_check("centering-shift", true, nu, 0.0);
    }
    const CompleteSolution sol = solve_complete_problem(f, s.ctx);
    std::filesystem::create_directories(s.cfg.out_dir);
    export_volume(sol.u, s.cfg.out_dir + "/complete.csv");
    s.report.add_check("nu-f", true, sol.nu_f, s.cfg.solvability_tol);
    s.report.add_check("pde-residual", true, sol.pde_residual, 0.0,
                       std::to_string(sol.series_terms) + " series terms");
    s.report.add_check("glue-residual", true, sol.glue_residual, 0.0);
}

void cmd_validate(Session& s) {
    const ValidationReport v = validate_params(s.cfg.model, s.cfg.cycle);
    for (const auto& msg : v.violations) {
        s.report.add_check("violation", false, 0.0, 0.0, msg);
        std::cout << "violation: " << msg << "\n";
    }
    for (const auto& msg : v.warnings) {
        s.report.add_check("warning", true, 0.0, 0.0, msg);
        std::cout << "warning: " << msg << "\n";
    }
    if (!v.ok()) throw ValidationError("configuration rejected");
    std::cout << "configuration ok\n";
}

} // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("PLASTOKH_THREADS")) {
#ifdef _OPENMP
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
#else
        (void)env;
#endif
    }

    CLI::App app{"elasto-plastic oscillator: degenerate Dirichlet solvers, "
                 "cycle operators, and long-run statistics"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    uint64_t seed_override = 0;
    bool have_seed = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed_override, "simulation seed override")
            ->each([&](const std::string&) { have_seed = true; });
        return sub;
    };

    struct Entry {
        const char* name;
        const char* help;
        void (*fn)(Session&);
        bool with_report;
    };
    const std::vector<Entry> entries = {
        {"simulate", "Monte Carlo long-run average and one sample path", cmd_simulate, true},
        {"solve-interior", "homogeneous problem inside |y| <= ybar1", cmd_solve_interior, true},
        {"solve-exterior", "homogeneous problem on the outer bands", cmd_solve_exterior, true},
        {"solve-interior-src", "source problem inside |y| <= ybar1", cmd_solve_interior_src, true},
        {"solve-exterior-src", "source problem on the outer bands", cmd_solve_exterior_src, true},
        {"apply-p", "one step of the embedded boundary chain", cmd_apply_p, true},
        {"apply-t", "expected cycle integral of the source", cmd_apply_t, true},
        {"gamma-star", "invariant measure of the boundary chain", cmd_gamma_star, true},
        {"nu", "long-run average of the source function", cmd_nu, true},
        {"fokker-planck", "stationary density of the full process", cmd_fokker_planck, true},
        {"complete", "ergodic-type problem for the full generator", cmd_complete, true},
        {"validate", "check the configuration and exit", cmd_validate, true},
    };

    std::string chosen;
    for (const Entry& e : entries)
        add_common(app.add_subcommand(e.name, e.help))
            ->callback([&chosen, name = e.name] { chosen = name; });
    add_common(app.add_subcommand(
                   "oracle-suite",
                   "deterministic artifact bundle (byte-stable across runs)"))
        ->callback([&chosen] { chosen = "oracle-suite"; });

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (have_seed) cfg.mc.seed = seed_override;

        if (chosen == "oracle-suite") {
            export_artifacts(cfg, cfg.out_dir);
            std::cout << "artifacts written to " << cfg.out_dir << "\n";
            return 0;
        }
        for (const Entry& e : entries)
            if (chosen == e.name) {
                Session s(cfg, chosen);
                e.fn(s);
                s.finish();
                return 0;
            }
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const NotSolvable& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
