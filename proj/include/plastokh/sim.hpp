#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "plastokh/model.hpp"
#include "plastokh/rng.hpp"

namespace plastokh {

struct Grid3;
struct SurfaceField;

struct McOptions {
    double dt = 1e-3;
    long n_paths = 1000;
    double horizon = 100.0;
    double burn_in = 0.0;
    uint64_t seed = 1;

    bool operator==(const McOptions&) const = default;
};

/// dt stability guard for the explicit drift step.
bool mc_dt_admissible(const McOptions& o, const ModelParams& p);

struct CycleSample {
    State start;      ///< on |y| = ybar1
    State hit_inner;  ///< first hit of |y| = ybar
    State hit_outer;  ///< subsequent hit of |y| = ybar1
    double tau_bar = 0.0;
    double tau_bar1 = 0.0;
    double integral = 0.0; ///< accumulated f dt over the cycle
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

/// One projected Euler step. g1, g2 are normal increments already scaled
/// by sqrt(dt). x is clamped to [-L,L] (reflection by projection) and z to
/// [-Y,Y], which realizes the variational inequality exactly at the
/// discrete level.
State step(const State& s, const ModelParams& p, double dt, double g1, double g2);

State simulate_path(const State& s0, const ModelParams& p, const McOptions& opts,
                    const std::function<void(const State&)>& observer = nullptr);

/// First crossing of |y| = level; the returned state has y snapped to the
/// crossed side. Throws HorizonExceeded if no crossing occurs in time.
std::pair<State, double> hit_level(const State& s0, double level, const ModelParams& p,
                                   const McOptions& opts, NormalStream& stream);
std::pair<State, double> hit_level(const State& s0, double level, const ModelParams& p,
                                   const McOptions& opts);

/// One Khasminskii cycle from a start on |y| = ybar1: run to |y| = ybar,
/// then back out to |y| = ybar1, accumulating integral += f(state) dt.
CycleSample sample_cycle(const State& s0, const std::function<double(const State&)>& f,
                         const ModelParams& p, const CycleLevels& c, const McOptions& opts,
                         NormalStream& stream);
CycleSample sample_cycle(const State& s0, const std::function<double(const State&)>& f,
                         const ModelParams& p, const CycleLevels& c, const McOptions& opts);

/// E[ phi(x,z) at the first hit of |y| = ybar1 ] by Monte Carlo; phi is
/// interpolated bilinearly on the hit sheet.
McEstimate mc_boundary_functional(const SurfaceField& phi, const State& s0,
                                  const ModelParams& p, const CycleLevels& c,
                                  const McOptions& opts);

/// Long-run time average of f over [burn_in, horizon], replicated over
/// n_paths independent paths for the standard error.
McEstimate mc_longrun_average(const std::function<double(const State&)>& f,
                              const ModelParams& p, const McOptions& opts);

/// Deterministic parallel map over path indices with fixed-order
/// reduction: parallel and serial execution produce identical bits.
/// The serial variant is the reference implementation kept for testing
/// and benchmarking.
std::vector<double> ensemble_map(long n_paths, uint64_t seed,
                                 const std::function<double(long, NormalStream&)>& body,
                                 bool parallel = true);

McEstimate estimate_from_samples(const std::vector<double>& samples);

} // namespace plastokh
