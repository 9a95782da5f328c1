// Compares the OpenMP-parallel kernels against the serial reference
// implementation: wall time and bitwise agreement of the results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plastokh/acceptance.hpp"
#include "plastokh/ergodic.hpp"
#include "plastokh/sim.hpp"

using namespace plastokh;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
                serial / parallel, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    if (const char* env = std::getenv("PLASTOKH_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    RunConfig cfg = acceptance_config();
    const Grid3 g = build_grid(cfg.model, cfg.cycle, cfg.nx, cfg.ny_per_band, cfg.nz,
                               cfg.y_max);

    // path ensemble: mean hitting time of the outer cycle level
    {
        McOptions mc = cfg.mc;
        mc.n_paths = 20000;
        const State s0{0.0, 0.0, 0.0, 0.0};
        const auto body = [&](long, NormalStream& stream) {
            return hit_level(s0, cfg.cycle.ybar1, cfg.model, mc, stream).second;
        };
        double t0 = now();
        const std::vector<double> a = ensemble_map(mc.n_paths, mc.seed, body, false);
        double t1 = now();
        const std::vector<double> b = ensemble_map(mc.n_paths, mc.seed, body, true);
        double t2 = now();
        row("path ensemble", t1 - t0, t2 - t1, a == b);
    }

    // chain matrix: one boundary-to-boundary solve per surface node
    {
        SolveContext ctx;
        ctx.grid = &g;
        ctx.params = cfg.model;
        ctx.cycle = cfg.cycle;
        ctx.dirichlet.solver = cfg.solver;
        ctx.mc = cfg.mc;
        ctx.parallel = false;
        double t0 = now();
        const PMatrix a = assemble_P_matrix(ctx);
        double t1 = now();
        ctx.parallel = true;
        const PMatrix b = assemble_P_matrix(ctx);
        double t2 = now();
        row("chain matrix", t1 - t0, t2 - t1, a.a == b.a);
    }
    return 0;
}
