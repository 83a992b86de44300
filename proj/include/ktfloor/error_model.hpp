#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <thread>
#include <vector>

#include "ktfloor/circuit_model.hpp"
#include "ktfloor/gaussian_tail.hpp"
#include "ktfloor/noise_model.hpp"
#include "ktfloor/philox.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

/// Target error probability over an observation window.
struct ErrorSpec {
    double epsilon = 0.0;           // in (0, 0.5)
    double observation_time = 0.0;  // s
    double correlation_time = 0.0;  // s
};

enum class Regime { Short, Long };

inline std::string_view to_string(Regime r)
{
    return r == Regime::Short ? "short" : "long";
}

struct FloorResult {
    double floor_joule = 0.0;
    double floor_kt = 0.0;
    Regime regime = Regime::Short;
};

inline void check_epsilon(double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw DomainError("error probability epsilon must lie in the open interval (0, 0.5)");
}

namespace detail {
inline FloorResult make_floor(double kt_units, Regime regime, const PhysicalEnvironment& env)
{
    const double kt = thermal_energy(env);
    if (!(kt > 0.0))
        throw DomainError("dissipation floor needs temperature > 0 K");
    const double joule = kt * kt_units;
    return FloorResult{joule, joule / kt, regime};
}
}  // namespace detail

/// kT ln(1/eps): valid while the observation window is within one correlation time.
inline FloorResult floor_short(const ErrorSpec& spec, const PhysicalEnvironment& env)
{
    check_epsilon(spec.epsilon);
    return detail::make_floor(-std::log(spec.epsilon), Regime::Short, env);
}

/// kT [ln(1/eps) + ln(t_o / tau)]: one extra ln per decade of independent looks.
inline FloorResult floor_long(const ErrorSpec& spec, const PhysicalEnvironment& env)
{
    check_epsilon(spec.epsilon);
    if (!(spec.correlation_time > 0.0))
        throw DomainError("correlation time tau must be > 0 s");
    if (!(spec.observation_time >= spec.correlation_time))
        throw DomainError("long-observation floor needs t_o >= tau");
    const double kt_units = -std::log(spec.epsilon) + std::log(spec.observation_time / spec.correlation_time);
    return detail::make_floor(kt_units, Regime::Long, env);
}

/// One-sided error of a logic 0 read above threshold under N(0, sigma^2) noise.
inline double instantaneous_error_prob(double threshold, double sigma)
{
    if (!(sigma > 0.0))
        throw DomainError("noise sigma must be > 0 V");
    return upper_tail(threshold / sigma);
}

/// Probability of at least one error in n independent looks.
inline double multi_sample_error(double per_sample, std::uint64_t n_observations)
{
    if (!(per_sample >= 0.0 && per_sample <= 1.0))
        throw DomainError("per-sample probability must lie in [0, 1]");
    if (n_observations == 0)
        throw DomainError("need at least one observation");
    if (per_sample == 1.0)
        return 1.0;
    return -std::expm1(static_cast<double>(n_observations) * std::log1p(-per_sample));
}

struct RequiredSwing {
    double u1 = 0.0;     // V
    double e1 = 0.0;     // J
    double e1_kt = 0.0;  // kT
};

/// Smallest logic swing whose single-look error at the decision threshold
/// (threshold_fraction * U1, midpoint by default) equals epsilon_target.
/// The stage's own swing voltage is ignored.
inline RequiredSwing required_swing(double epsilon_target, const RcStage& stage, double threshold_fraction = 0.5)
{
    check_epsilon(epsilon_target);
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw DomainError("threshold fraction must lie in (0, 1)");
    const OuProcess noise = from_stage(stage);
    const double u1 = noise.stationary_sigma * upper_tail_inverse(epsilon_target) / threshold_fraction;
    const double e1 = 0.5 * stage.capacitance * u1 * u1;
    return RequiredSwing{u1, e1, joules_to_kt(e1, stage.env)};
}

/// Number of looks at instants k * tau, k = 1 .. floor(t_o / tau). The ratio
/// is nudged by a few ulps so t_o = n * tau survives rounding of RC products.
inline std::uint64_t observation_count(double t_o, double tau)
{
    if (!(tau > 0.0))
        throw DomainError("correlation time must be > 0 s");
    const double ratio = t_o / tau;
    const double n = std::floor(ratio * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()));
    if (!(n >= 1.0))
        throw DomainError("observation time must be >= one correlation time");
    return static_cast<std::uint64_t>(n);
}

struct FirstPassageEstimate {
    double epsilon_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    std::uint64_t n_observations = 0;
    double expected_errors = 0.0;  // under the independent-look model
    bool low_confidence = false;   // fewer than 10 expected errors
};

inline constexpr double kLowConfidenceErrors = 10.0;

namespace detail {
// Trial i owns stream (seed, i). Initial state drawn from the stationary law.
inline bool first_passage_trial(const OuProcess& noise, const OuStepper& advance, double threshold,
                                std::uint64_t n_obs, std::uint64_t seed, std::uint64_t trial)
{
    CounterRng rng(seed, trial);
    double v = noise.stationary_sigma * rng.normal();
    for (std::uint64_t k = 0; k < n_obs; ++k) {
        v = advance(v, rng.normal());
        if (v > threshold)
            return true;
    }
    return false;
}
}  // namespace detail

/// Fraction of stationary OU paths that exceed the threshold at least once
/// when looked at every tau up to t_o. The count is a sum of per-trial
/// outcomes, so it does not depend on the worker count.
inline FirstPassageEstimate first_passage_mc(const RcStage& stage, double threshold, double t_o, std::uint64_t trials,
                                             std::uint64_t seed, unsigned workers = 1)
{
    if (trials == 0)
        throw DomainError("Monte Carlo needs at least one trial");
    const OuProcess noise = from_stage(stage);
    const std::uint64_t n_obs = observation_count(t_o, noise.correlation_time);
    const OuStepper advance(noise, noise.correlation_time);

    workers = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(workers, trials)));
    std::vector<std::uint64_t> hits(workers, 0);
    auto run_range = [&](unsigned w) {
        const std::uint64_t begin = trials * w / workers;
        const std::uint64_t end = trials * (w + 1) / workers;
        std::uint64_t count = 0;
        for (std::uint64_t i = begin; i < end; ++i)
            count += detail::first_passage_trial(noise, advance, threshold, n_obs, seed, i) ? 1 : 0;
        hits[w] = count;
    };
    if (workers == 1) {
        run_range(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run_range, w);
    }

    FirstPassageEstimate est;
    est.trials = trials;
    est.n_observations = n_obs;
    for (auto h : hits)
        est.errors += h;
    const double n = static_cast<double>(trials);
    est.epsilon_hat = static_cast<double>(est.errors) / n;
    est.std_err = std::sqrt(est.epsilon_hat * (1.0 - est.epsilon_hat) / n);
    const double predicted = multi_sample_error(instantaneous_error_prob(threshold, noise.stationary_sigma), n_obs);
    est.expected_errors = predicted * n;
    est.low_confidence = est.expected_errors < kLowConfidenceErrors;
    return est;
}

}  // namespace ktfloor
