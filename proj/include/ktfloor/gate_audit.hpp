#pragma once

#include <optional>
#include <string_view>

#include "ktfloor/circuit_model.hpp"
#include "ktfloor/error_model.hpp"
#include "ktfloor/noise_model.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

/// Follower gate: the electrode voltage (0 or U1) sets the output state.
/// Mechanical loss enters only as a measured energy per transition; it is
/// never derived from the electrical model.
struct FollowerGate {
    RcStage stage;
    double friction_energy_per_transition = 0.0;  // J
    double threshold_fraction = 0.5;
};

enum class FrictionVerdict { SubKt, AboveKt };
enum class FloorVerdict { BelowFloor, AtOrAboveFloor, NotApplicable };
enum class ClaimVerdict { Consistent, NeglectsInputCharging };

/// Which energy is held against the per-operation floor. A 0 => 1 => 0
/// cycle is two logic operations.
enum class Accounting { PerOperation, PerCycle };

inline std::string_view to_string(FrictionVerdict v)
{
    return v == FrictionVerdict::SubKt ? "sub-kT" : "above-kT";
}

inline std::string_view to_string(FloorVerdict v)
{
    switch (v) {
    case FloorVerdict::BelowFloor:
        return "below-floor";
    case FloorVerdict::AtOrAboveFloor:
        return "at-or-above-floor";
    case FloorVerdict::NotApplicable:
        break;
    }
    return "not-applicable";
}

inline std::string_view to_string(ClaimVerdict v)
{
    return v == ClaimVerdict::Consistent ? "consistent" : "neglects-input-charging";
}

inline std::string_view to_string(Accounting a)
{
    return a == Accounting::PerOperation ? "per-operation" : "per-cycle";
}

struct AuditReport {
    Energy e_friction_cycle;
    Energy e_input_cycle;
    Energy e_total_cycle;
    Energy e_compared;  // e_total_cycle / 2 or e_total_cycle, see accounting
    double epsilon_per_observation = 0.5;
    std::optional<double> floor_short_kt;  // empty when epsilon = 0.5 (no bit held)
    FrictionVerdict verdict_friction_only = FrictionVerdict::SubKt;
    FloorVerdict verdict_total = FloorVerdict::NotApplicable;
    Accounting accounting = Accounting::PerOperation;
};

inline void validate(const FollowerGate& gate)
{
    gate.stage.validate();
    if (!(gate.stage.env.temperature > 0.0))
        throw DomainError("gate audit needs temperature > 0 K");
    if (!(gate.friction_energy_per_transition >= 0.0))
        throw DomainError("friction energy per transition must be >= 0 J");
    if (!(gate.threshold_fraction > 0.0 && gate.threshold_fraction < 1.0))
        throw DomainError("threshold fraction must lie in (0, 1)");
}

inline AuditReport run_cycle(const FollowerGate& gate, Accounting accounting = Accounting::PerOperation)
{
    validate(gate);
    const PhysicalEnvironment& env = gate.stage.env;
    const double kt = thermal_energy(env);

    AuditReport r;
    r.accounting = accounting;
    r.e_friction_cycle = Energy::from_joules(2.0 * gate.friction_energy_per_transition, env);
    r.e_input_cycle = Energy::from_joules(full_cycle_dissipation(gate.stage).total_dissipated, env);
    r.e_total_cycle = Energy::from_joules(r.e_friction_cycle.joule + r.e_input_cycle.joule, env);
    r.e_compared = Energy::from_joules(
        accounting == Accounting::PerOperation ? 0.5 * r.e_total_cycle.joule : r.e_total_cycle.joule, env);

    const OuProcess noise = from_stage(gate.stage);
    r.epsilon_per_observation =
        instantaneous_error_prob(gate.threshold_fraction * gate.stage.swing_voltage, noise.stationary_sigma);

    r.verdict_friction_only =
        gate.friction_energy_per_transition < kt ? FrictionVerdict::SubKt : FrictionVerdict::AboveKt;

    if (r.epsilon_per_observation < 0.5) {
        // ln(1/epsilon) from the log tail, so a wide swing whose epsilon
        // underflows to 0 still gets a finite floor
        const double z = gate.threshold_fraction * gate.stage.swing_voltage / noise.stationary_sigma;
        r.floor_short_kt = -log_upper_tail(z);
        r.verdict_total = r.e_compared.joule >= *r.floor_short_kt * kt ? FloorVerdict::AtOrAboveFloor
                                                                       : FloorVerdict::BelowFloor;
    }
    return r;
}

/// Checks a reported per-operation dissipation against the gate's own
/// electrical budget.
inline ClaimVerdict audit_claim(const FollowerGate& gate, double claimed_energy_per_op)
{
    if (!(claimed_energy_per_op >= 0.0))
        throw DomainError("claimed energy must be >= 0 J");
    const AuditReport r = run_cycle(gate);
    if (r.e_input_cycle.joule > 0.0 && claimed_energy_per_op < 0.5 * r.e_total_cycle.joule)
        return ClaimVerdict::NeglectsInputCharging;
    return ClaimVerdict::Consistent;
}

}  // namespace ktfloor
