#pragma once

#include <cmath>
#include <cstddef>

#include "ktfloor/quantities.hpp"

namespace ktfloor {

/*
 * Voltage-controlled logic stage:
 *
 *        S1   R
 *   U1 --/ --/\/\--+-- gate
 *                  |
 *        S2   R    C
 *   0  --/ --/\/\--+
 *
 * Closing S1 charges C to U1 (0 => 1). Closing S2 instead resets it to 0.
 * Switches are ideal: resistance R when closed, open otherwise.
 */
struct RcStage {
    double capacitance = 0.0;    // F
    double resistance = 0.0;     // ohm
    double swing_voltage = 0.0;  // V
    PhysicalEnvironment env{};

    static RcStage make(double capacitance, double resistance, double swing_voltage,
                        PhysicalEnvironment env = {})
    {
        RcStage s{capacitance, resistance, swing_voltage, env};
        s.validate();
        return s;
    }

    void validate() const
    {
        if (!(capacitance > 0.0) || !std::isfinite(capacitance))
            throw DomainError("capacitance must be > 0 F");
        if (!(resistance > 0.0) || !std::isfinite(resistance))
            throw DomainError("resistance must be > 0 ohm (R = 0 is a singular limit)");
        if (!(swing_voltage >= 0.0) || !std::isfinite(swing_voltage))
            throw DomainError("swing voltage must be >= 0 V");
        if (!(env.temperature >= 0.0))
            throw DomainError("temperature must be >= 0 K");
    }

    double correlation_time() const { return resistance * capacitance; }
};

/// Energy bookkeeping for one 0 => 1 => 0 cycle.
struct CycleLedger {
    double stored_after_charge = 0.0;
    double dissipated_on_charge = 0.0;
    double dissipated_on_discharge = 0.0;
    double total_dissipated = 0.0;
};

inline double charge_energy(const RcStage& stage)
{
    if (!(stage.capacitance > 0.0))
        throw DomainError("capacitance must be > 0 F");
    if (!(stage.swing_voltage >= 0.0))
        throw DomainError("swing voltage must be >= 0 V");
    return 0.5 * stage.capacitance * stage.swing_voltage * stage.swing_voltage;
}

// Heat in R while stepping C from 0 to U1. Equal to the stored energy for any R > 0.
inline double step_charge_dissipation(const RcStage& stage)
{
    stage.validate();
    return charge_energy(stage);
}

inline CycleLedger full_cycle_dissipation(const RcStage& stage)
{
    stage.validate();
    const double e1 = charge_energy(stage);
    CycleLedger ledger;
    ledger.stored_after_charge = e1;
    ledger.dissipated_on_charge = e1;
    // reset through S2 dumps the whole stored energy
    ledger.dissipated_on_discharge = e1;
    ledger.total_dissipated = ledger.dissipated_on_charge + ledger.dissipated_on_discharge;
    return ledger;
}

struct TransientSample {
    double capacitor_voltage = 0.0;  // V
    double resistor_power = 0.0;     // W
};

inline TransientSample transient_power(const RcStage& stage, double t)
{
    stage.validate();
    if (!(t >= 0.0))
        throw DomainError("time must be >= 0 s");
    const double tau = stage.correlation_time();
    // 1 - e^(-x) via expm1 keeps V accurate for t << RC
    const double v = -stage.swing_voltage * std::expm1(-t / tau);
    const double drop = stage.swing_voltage * std::exp(-t / tau);
    return TransientSample{v, drop * drop / stage.resistance};
}

/// Resistor heat over [0, t_end] by fixed-step trapezoid on transient_power.
/// The default grid is RC/1000 steps over 20 RC.
inline double resistor_energy_trapezoid(const RcStage& stage, double t_end, std::size_t steps)
{
    stage.validate();
    if (!(t_end > 0.0) || steps == 0)
        throw DomainError("quadrature needs t_end > 0 and at least one step");
    const double h = t_end / static_cast<double>(steps);
    double sum = 0.5 * (transient_power(stage, 0.0).resistor_power +
                        transient_power(stage, t_end).resistor_power);
    for (std::size_t k = 1; k < steps; ++k)
        sum += transient_power(stage, h * static_cast<double>(k)).resistor_power;
    return sum * h;
}

inline double resistor_energy_trapezoid(const RcStage& stage)
{
    return resistor_energy_trapezoid(stage, 20.0 * stage.correlation_time(), 20000);
}

}  // namespace ktfloor
