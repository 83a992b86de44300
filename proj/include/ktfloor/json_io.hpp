#pragma once

#include <json.hpp>

#include "ktfloor/error_model.hpp"
#include "ktfloor/gate_audit.hpp"
#include "ktfloor/lc_tank.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

inline nlohmann::json to_json(const Energy& e)
{
    return nlohmann::json{{"joule", e.joule}, {"kT", e.kt}};
}

inline nlohmann::json to_json(const FloorResult& f)
{
    return nlohmann::json{{"floor_joule", f.floor_joule}, {"floor_kT", f.floor_kt}, {"regime", to_string(f.regime)}};
}

inline nlohmann::json to_json(const AuditReport& r)
{
    nlohmann::json j{{"e_friction_cycle", to_json(r.e_friction_cycle)},
                     {"e_input_cycle", to_json(r.e_input_cycle)},
                     {"e_total_cycle", to_json(r.e_total_cycle)},
                     {"e_compared", to_json(r.e_compared)},
                     {"accounting", to_string(r.accounting)},
                     {"epsilon_per_observation", r.epsilon_per_observation},
                     {"verdict_friction_only", to_string(r.verdict_friction_only)},
                     {"verdict_total", to_string(r.verdict_total)}};
    j["floor_short_kT"] = r.floor_short_kt ? nlohmann::json(*r.floor_short_kt) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const FirstPassageEstimate& e)
{
    return nlohmann::json{{"epsilon_hat", e.epsilon_hat},
                          {"std_err", e.std_err},
                          {"trials", e.trials},
                          {"errors_observed", e.errors},
                          {"n_observations", e.n_observations},
                          {"expected_errors", e.expected_errors},
                          {"low_confidence", e.low_confidence}};
}

inline nlohmann::json to_json(const TransferReport& t)
{
    return nlohmann::json{{"t_switch_1", t.t_switch_1},
                          {"t_switch_2", t.t_switch_2},
                          {"energy_initial", t.energy_initial},
                          {"energy_delivered", t.energy_delivered},
                          {"efficiency", t.efficiency}};
}

inline nlohmann::json to_json(const BreakEven& b)
{
    return nlohmann::json{{"net_saving", to_json(b.net_saving)},
                          {"break_even_energy", to_json(b.break_even_energy)},
                          {"efficiency", b.efficiency}};
}

}  // namespace ktfloor
