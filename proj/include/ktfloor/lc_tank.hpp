#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "ktfloor/csv.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

/*
 * Resonant recycling tank. C1 starts at initial_voltage, C2 empty.
 *
 *   phase 1 (S1 closed):  C1 -> L -> R   until the inductor current peaks
 *   phase 2 (S2 closed):  L -> R -> C2   until the current returns to zero
 *
 * Switches are ideal and swap at t1 without overlap. The same series R is
 * in the loop in both phases.
 */
struct TankCircuit {
    double c1 = 0.0;                 // F
    double c2 = 0.0;                 // F
    double inductance = 0.0;         // H
    double series_resistance = 0.0;  // ohm
    double initial_voltage = 0.0;    // V on C1
};

inline double quality_factor(double inductance, double capacitance, double resistance)
{
    if (resistance == 0.0)
        return std::numeric_limits<double>::infinity();
    return std::sqrt(inductance / capacitance) / resistance;
}

/// Series RLC loop constants for one phase.
struct RlcPhase {
    double alpha;    // R / 2L
    double omega0;   // 1 / sqrt(LC)
    double zeta;     // alpha / omega0 = 1 / 2q
    double omega_d;  // omega0 sqrt(1 - zeta^2)

    RlcPhase(double inductance, double capacitance, double resistance)
        : alpha(resistance / (2.0 * inductance)),
          omega0(1.0 / std::sqrt(inductance * capacitance)),
          zeta(alpha / omega0),
          omega_d(omega0 * std::sqrt((1.0 - zeta) * (1.0 + zeta)))
    {
    }

    double quarter_period() const { return 0.5 * constants::pi / omega_d; }
    // omega0^2 / omega_d^2, exactly 1 when lossless
    double undamped_ratio() const { return 1.0 / ((1.0 - zeta) * (1.0 + zeta)); }
};

inline void validate(const TankCircuit& tank)
{
    if (!(tank.c1 > 0.0) || !(tank.c2 > 0.0) || !std::isfinite(tank.c1) || !std::isfinite(tank.c2))
        throw DomainError("tank capacitances must be finite and > 0 F");
    if (!(tank.inductance > 0.0) || !std::isfinite(tank.inductance))
        throw DomainError("tank inductance must be > 0 H");
    if (!(tank.series_resistance >= 0.0))
        throw DomainError("series resistance must be >= 0 ohm");
    if (!std::isfinite(tank.initial_voltage))
        throw DomainError("initial voltage must be finite");
    const double q1 = quality_factor(tank.inductance, tank.c1, tank.series_resistance);
    const double q2 = quality_factor(tank.inductance, tank.c2, tank.series_resistance);
    if (!(q1 > 0.5) || !(q2 > 0.5))
        throw DomainError("tank is not underdamped (need q = sqrt(L/C)/R > 0.5 with both C1 and C2; got q1 = " +
                          std::to_string(q1) + ", q2 = " + std::to_string(q2) + ")");
}

struct TransferSchedule {
    double t1 = 0.0;  // S1 opens, S2 closes
    double t2 = 0.0;  // duration of phase 2
};

/// Quarter damped periods of the two loops: (pi/2) sqrt(LC) / sqrt(1 - 1/4q^2).
inline TransferSchedule transfer_schedule(const TankCircuit& tank)
{
    validate(tank);
    const RlcPhase p1(tank.inductance, tank.c1, tank.series_resistance);
    const RlcPhase p2(tank.inductance, tank.c2, tank.series_resistance);
    return TransferSchedule{p1.quarter_period(), p2.quarter_period()};
}

struct TransferReport {
    double t_switch_1 = 0.0;
    double t_switch_2 = 0.0;  // absolute time S2 opens, t1 + phase-2 duration
    double energy_initial = 0.0;
    double energy_delivered = 0.0;
    double efficiency = 0.0;
    double max_ledger_drift = 0.0;  // numeric path only
};

/// Circuit state in the units the waveform dump uses.
struct TankState {
    double t = 0.0;
    double v_c1 = 0.0;
    double i_l = 0.0;
    double v_c2 = 0.0;
    double e_loss = 0.0;
};

inline double stored_energy(const TankCircuit& tank, const TankState& s)
{
    return 0.5 * tank.c1 * s.v_c1 * s.v_c1 + 0.5 * tank.inductance * s.i_l * s.i_l +
           0.5 * tank.c2 * s.v_c2 * s.v_c2;
}

/// Closed-form state at absolute time t in [0, t1 + t2].
inline TankState tank_state(const TankCircuit& tank, double t)
{
    validate(tank);
    const RlcPhase p1(tank.inductance, tank.c1, tank.series_resistance);
    const RlcPhase p2(tank.inductance, tank.c2, tank.series_resistance);
    const double t1 = p1.quarter_period();
    const double v0 = tank.initial_voltage;
    const double e0 = 0.5 * tank.c1 * v0 * v0;

    TankState s;
    s.t = t;
    const double tp = std::min(t, t1);
    {
        const double decay = std::exp(-p1.alpha * tp);
        const double wt = p1.omega_d * tp;
        s.v_c1 = v0 * decay * (std::cos(wt) + (p1.alpha / p1.omega_d) * std::sin(wt));
        s.i_l = v0 / (tank.inductance * p1.omega_d) * decay * std::sin(wt);
    }
    if (t > t1) {
        // phase 2 starts from the peak current, i.e. sin(omega_d t1) = 1
        const double i1 = v0 / (tank.inductance * p1.omega_d) * std::exp(-p1.alpha * t1);
        const double u = t - t1;
        const double decay = std::exp(-p2.alpha * u);
        const double wt = p2.omega_d * u;
        s.i_l = i1 * decay * (std::cos(wt) - (p2.alpha / p2.omega_d) * std::sin(wt));
        s.v_c2 = i1 * decay * std::sin(wt) / (tank.c2 * p2.omega_d);
    }
    s.e_loss = e0 - stored_energy(tank, s);
    return s;
}

/// Closed-form transfer. Each phase keeps e^(-2 alpha t) / (1 - zeta^2) of
/// the energy it receives, so a lossless tank returns efficiency 1 exactly.
inline TransferReport transfer_efficiency(const TankCircuit& tank)
{
    validate(tank);
    const RlcPhase p1(tank.inductance, tank.c1, tank.series_resistance);
    const RlcPhase p2(tank.inductance, tank.c2, tank.series_resistance);
    const double t1 = p1.quarter_period();
    const double t2 = p2.quarter_period();

    const double keep1 = std::exp(-2.0 * p1.alpha * t1) * p1.undamped_ratio();
    const double keep2 = std::exp(-2.0 * p2.alpha * t2) * p2.undamped_ratio();

    TransferReport r;
    r.t_switch_1 = t1;
    r.t_switch_2 = t1 + t2;
    r.energy_initial = 0.5 * tank.c1 * tank.initial_voltage * tank.initial_voltage;
    r.efficiency = keep1 * keep2;
    r.energy_delivered = r.efficiency * r.energy_initial;
    return r;
}

namespace detail {

// state: charge on C1, inductor current (C1 -> C2 positive), charge on C2, resistor heat
using TankVector = std::array<double, 4>;

inline TankVector tank_rhs(const TankCircuit& tank, int phase, const TankVector& x)
{
    const double r = tank.series_resistance;
    const double l = tank.inductance;
    const double i = x[1];
    if (phase == 1)
        return {-i, (x[0] / tank.c1 - r * i) / l, 0.0, r * i * i};
    return {0.0, (-x[2] / tank.c2 - r * i) / l, i, r * i * i};
}

inline TankVector rk4_step(const TankCircuit& tank, int phase, const TankVector& x, double h)
{
    auto axpy = [](const TankVector& a, double s, const TankVector& b) {
        return TankVector{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
    };
    const TankVector k1 = tank_rhs(tank, phase, x);
    const TankVector k2 = tank_rhs(tank, phase, axpy(x, 0.5 * h, k1));
    const TankVector k3 = tank_rhs(tank, phase, axpy(x, 0.5 * h, k2));
    const TankVector k4 = tank_rhs(tank, phase, axpy(x, h, k3));
    TankVector out;
    for (std::size_t j = 0; j < 4; ++j)
        out[j] = x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    return out;
}

}  // namespace detail

/// Fixed-step RK4 through both phases, landing exactly on the switch
/// instants. The visitor sees every accepted state including t = 0.
inline TransferReport simulate_transfer(const TankCircuit& tank, double dt,
                                        const std::function<void(const TankState&)>& visit = {})
{
    validate(tank);
    const double dt_max = std::sqrt(tank.inductance * std::min(tank.c1, tank.c2)) / 100.0;
    if (!(dt > 0.0) || dt > dt_max)
        throw DomainError("integration step must satisfy 0 < dt <= sqrt(L min(C1,C2)) / 100 = " +
                          csv::number(dt_max) + " s");

    const TransferSchedule sched = transfer_schedule(tank);
    const double e0 = 0.5 * tank.c1 * tank.initial_voltage * tank.initial_voltage;

    detail::TankVector x{tank.c1 * tank.initial_voltage, 0.0, 0.0, 0.0};
    double t = 0.0;
    double drift = 0.0;
    auto emit = [&]() {
        const TankState s{t, x[0] / tank.c1, x[1], x[2] / tank.c2, x[3]};
        if (e0 > 0.0)
            drift = std::max(drift, std::abs(stored_energy(tank, s) + s.e_loss - e0) / e0);
        if (visit)
            visit(s);
    };
    emit();

    double t_start = 0.0;
    for (int phase = 1; phase <= 2; ++phase) {
        const double span = phase == 1 ? sched.t1 : sched.t2;
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt));
        const double h = span / static_cast<double>(steps);
        for (std::size_t k = 1; k <= steps; ++k) {
            x = detail::rk4_step(tank, phase, x, h);
            t = t_start + h * static_cast<double>(k);
            emit();
        }
        t_start += span;
    }

    TransferReport r;
    r.t_switch_1 = sched.t1;
    r.t_switch_2 = sched.t1 + sched.t2;
    r.energy_initial = e0;
    const double v2 = x[2] / tank.c2;
    r.energy_delivered = 0.5 * tank.c2 * v2 * v2;
    r.efficiency = e0 > 0.0 ? r.energy_delivered / e0 : 0.0;
    r.max_ledger_drift = drift;
    return r;
}

/// Default step for the numeric path: half the largest allowed.
inline double default_tank_step(const TankCircuit& tank)
{
    return std::sqrt(tank.inductance * std::min(tank.c1, tank.c2)) / 200.0;
}

inline void write_waveform_header(std::ostream& os)
{
    os << "t,v_c1,i_l,v_c2,e_loss" << csv::eol;
}

inline void write_waveform_row(std::ostream& os, const TankState& s)
{
    os << csv::number(s.t) << ',' << csv::number(s.v_c1) << ',' << csv::number(s.i_l) << ','
       << csv::number(s.v_c2) << ',' << csv::number(s.e_loss) << csv::eol;
}

struct BreakEven {
    Energy net_saving;
    Energy break_even_energy;
    double efficiency = 0.0;
};

/// Recycling pays only when the recovered energy beats the cost of running
/// the extra switches.
inline BreakEven break_even(const TankCircuit& tank, double e_switch_control, unsigned n_switch_events,
                            const PhysicalEnvironment& env)
{
    if (n_switch_events < 2)
        throw DomainError("a recycling transfer operates at least 2 switches");
    if (!(e_switch_control >= 0.0))
        throw DomainError("switch control energy must be >= 0 J");
    const TransferReport tr = transfer_efficiency(tank);
    const double overhead = static_cast<double>(n_switch_events) * e_switch_control;
    BreakEven b;
    b.efficiency = tr.efficiency;
    b.net_saving = Energy::from_joules(tr.efficiency * tr.energy_initial - overhead, env);
    b.break_even_energy = Energy::from_joules(overhead / tr.efficiency, env);
    return b;
}

}  // namespace ktfloor
