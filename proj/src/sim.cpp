#include "plastokh/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plastokh/errors.hpp"
#include "plastokh/grid.hpp"

namespace plastokh {

bool mc_dt_admissible(const McOptions& o, const ModelParams& p) {
    return o.dt <= 0.1 / std::max({p.alpha, p.c0, 1.0});
}

State step(const State& s, const ModelParams& p, double dt, double g1, double g2) {
    State n;
    n.x = std::clamp(s.x - p.alpha * s.x * dt + g1, -p.L, p.L);
    n.y = s.y - (p.beta * s.x + p.c0 * s.y + p.k * s.z) * dt + g2;
    n.z = std::clamp(s.z + s.y * dt, -p.Y, p.Y);
    n.t = s.t + dt;
    return n;
}

State simulate_path(const State& s0, const ModelParams& p, const McOptions& opts,
                    const std::function<void(const State&)>& observer) {
    NormalStream stream(opts.seed);
    const long n_steps = std::llround(opts.horizon / opts.dt);
    const double sdt = std::sqrt(opts.dt);
    State s = s0;
    for (long n = 0; n < n_steps; ++n) {
        const double g1 = sdt * stream.next();
        const double g2 = sdt * stream.next();
        s = step(s, p, opts.dt, g1, g2);
        if (observer) observer(s);
    }
    return s;
}

namespace {

// Run until |y| first crosses `level`, optionally accumulating
// integral += f(state) * dt (left endpoint). The returned state has y
// snapped to the crossed side.
double run_to_level(State& s, double level, const ModelParams& p, const McOptions& opts,
                    NormalStream& stream, const std::function<double(const State&)>* f,
                    double* integral) {
    const long max_steps = std::llround(opts.horizon / opts.dt);
    const double sdt = std::sqrt(opts.dt);
    const double start_side = std::abs(s.y) - level;
    for (long n = 0; n < max_steps; ++n) {
        if (f) *integral += (*f)(s)*opts.dt;
        const double g1 = sdt * stream.next();
        const double g2 = sdt * stream.next();
        s = step(s, p, opts.dt, g1, g2);
        const double side = std::abs(s.y) - level;
        if (side == 0.0 || side * start_side < 0.0) {
            s.y = (s.y >= 0.0) ? level : -level;
            return static_cast<double>(n + 1) * opts.dt;
        }
    }
    throw HorizonExceeded("no crossing of |y|=" + std::to_string(level) +
                          " within horizon; check dt/horizon");
}

} // namespace

std::pair<State, double> hit_level(const State& s0, double level, const ModelParams& p,
                                   const McOptions& opts, NormalStream& stream) {
    State s = s0;
    const double elapsed = run_to_level(s, level, p, opts, stream, nullptr, nullptr);
    return {s, elapsed};
}

std::pair<State, double> hit_level(const State& s0, double level, const ModelParams& p,
                                   const McOptions& opts) {
    NormalStream stream(opts.seed);
    return hit_level(s0, level, p, opts, stream);
}

CycleSample sample_cycle(const State& s0, const std::function<double(const State&)>& f,
                         const ModelParams& p, const CycleLevels& c, const McOptions& opts,
                         NormalStream& stream) {
    CycleSample cs;
    cs.start = s0;
    State s = s0;
    double integral = 0.0;
    cs.tau_bar = run_to_level(s, c.ybar, p, opts, stream, f ? &f : nullptr, &integral);
    cs.hit_inner = s;
    cs.tau_bar1 =
        cs.tau_bar + run_to_level(s, c.ybar1, p, opts, stream, f ? &f : nullptr, &integral);
    cs.hit_outer = s;
    cs.integral = integral;
    return cs;
}

CycleSample sample_cycle(const State& s0, const std::function<double(const State&)>& f,
                         const ModelParams& p, const CycleLevels& c, const McOptions& opts) {
    NormalStream stream(opts.seed);
    return sample_cycle(s0, f, p, c, opts, stream);
}

std::vector<double> ensemble_map(long n_paths, uint64_t seed,
                                 const std::function<double(long, NormalStream&)>& body,
                                 bool parallel) {
    std::vector<double> out(n_paths, 0.0);
    std::exception_ptr first_error = nullptr;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
        for (long i = 0; i < n_paths; ++i) {
            if (first_error) continue;
            try {
                NormalStream stream = NormalStream::substream(seed, static_cast<uint64_t>(i));
                out[i] = body(i, stream);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!first_error) first_error = std::current_exception();
            }
        }
    } else {
        for (long i = 0; i < n_paths; ++i) {
            NormalStream stream = NormalStream::substream(seed, static_cast<uint64_t>(i));
            out[i] = body(i, stream);
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

McEstimate estimate_from_samples(const std::vector<double>& samples) {
    McEstimate e;
    e.n = static_cast<long>(samples.size());
    if (e.n == 0) return e;
    double sum = 0.0;
    for (double v : samples) sum += v;
    e.mean = sum / e.n;
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    const double sd = (e.n > 1) ? std::sqrt(ss / (e.n - 1)) : 0.0;
    e.stderr_ = sd / std::sqrt(static_cast<double>(e.n));
    return e;
}

McEstimate mc_boundary_functional(const SurfaceField& phi, const State& s0,
                                  const ModelParams& p, const CycleLevels& c,
                                  const McOptions& opts) {
    const auto samples = ensemble_map(
        opts.n_paths, opts.seed, [&](long, NormalStream& stream) {
            auto [hit, elapsed] = hit_level(s0, c.ybar1, p, opts, stream);
            (void)elapsed;
            return phi.interpolate(hit.y > 0.0, hit.x, hit.z);
        });
    return estimate_from_samples(samples);
}

McEstimate mc_longrun_average(const std::function<double(const State&)>& f,
                              const ModelParams& p, const McOptions& opts) {
    const long n_steps = std::llround(opts.horizon / opts.dt);
    const long n_skip = std::llround(opts.burn_in / opts.dt);
    const auto samples = ensemble_map(
        opts.n_paths, opts.seed, [&](long, NormalStream& stream) {
            const double sdt = std::sqrt(opts.dt);
            State s;
            double acc = 0.0;
            for (long n = 0; n < n_steps; ++n) {
                if (n >= n_skip) acc += f(s) * opts.dt;
                const double g1 = sdt * stream.next();
                const double g2 = sdt * stream.next();
                s = step(s, p, opts.dt, g1, g2);
            }
            return acc / ((n_steps - n_skip) * opts.dt);
        });
    return estimate_from_samples(samples);
}

} // namespace plastokh
