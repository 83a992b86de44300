#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "ktfloor/circuit_model.hpp"
#include "ktfloor/csv.hpp"
#include "ktfloor/philox.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

/// Johnson noise on the gate node: a stationary Ornstein-Uhlenbeck voltage
/// with equipartition variance kT/C and correlation time RC.
struct OuProcess {
    double stationary_sigma = 0.0;  // V
    double correlation_time = 0.0;  // s

    double variance() const { return stationary_sigma * stationary_sigma; }
};

enum class ZeroTemperature { Reject, Allow };

inline OuProcess from_stage(const RcStage& stage, ZeroTemperature mode = ZeroTemperature::Reject)
{
    stage.validate();
    if (stage.env.temperature == 0.0 && mode == ZeroTemperature::Reject)
        throw DomainError("noise process at T = 0 needs zero-temperature mode");
    const double kt = thermal_energy(stage.env);
    return OuProcess{std::sqrt(kt / stage.capacitance), stage.correlation_time()};
}

/// Exact transition of the OU process over dt (no discretisation bias).
inline double step(const OuProcess& process, double v, double dt, double gaussian_draw)
{
    const double decay = std::exp(-dt / process.correlation_time);
    // sqrt(1 - e^(-2x)) written with expm1 so tiny dt keeps its precision
    const double spread = process.stationary_sigma * std::sqrt(-std::expm1(-2.0 * dt / process.correlation_time));
    return v * decay + spread * gaussian_draw;
}

/// Precomputed step coefficients for a fixed dt.
struct OuStepper {
    double decay;
    double spread;

    OuStepper(const OuProcess& process, double dt)
        : decay(std::exp(-dt / process.correlation_time)),
          spread(process.stationary_sigma * std::sqrt(-std::expm1(-2.0 * dt / process.correlation_time)))
    {
    }

    double operator()(double v, double gaussian_draw) const { return v * decay + spread * gaussian_draw; }
};

struct NoisePath {
    double dt = 0.0;
    double v0 = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> samples;  // samples[k] is V at (k + 1) * dt
};

inline NoisePath sample_path(const OuProcess& process, double dt, std::size_t n, std::uint64_t seed,
                             double v0, std::uint64_t stream = 0)
{
    if (n == 0)
        throw DomainError("noise path needs at least one sample");
    if (!(dt > 0.0))
        throw DomainError("time step must be > 0 s");
    if (!(process.correlation_time > 0.0))
        throw DomainError("correlation time must be > 0 s");

    NoisePath path{dt, v0, seed, stream, {}};
    path.samples.reserve(n);
    CounterRng rng(seed, stream);
    const OuStepper advance(process, dt);
    double v = v0;
    for (std::size_t k = 0; k < n; ++k) {
        v = advance(v, rng.normal());
        path.samples.push_back(v);
    }
    return path;
}

/// CSV columns t,V. The first row is the initial condition at t = 0.
inline void write_path_csv(std::ostream& os, const NoisePath& path)
{
    os << "t,V" << csv::eol;
    os << csv::number(0.0) << ',' << csv::number(path.v0) << csv::eol;
    for (std::size_t k = 0; k < path.samples.size(); ++k)
        os << csv::number(path.dt * static_cast<double>(k + 1)) << ',' << csv::number(path.samples[k]) << csv::eol;
}

}  // namespace ktfloor
