#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ktfloor/circuit_model.hpp"
#include "ktfloor/csv.hpp"
#include "ktfloor/error_model.hpp"
#include "ktfloor/lc_tank.hpp"
#include "ktfloor/noise_model.hpp"
#include "ktfloor/philox.hpp"
#include "ktfloor/quantities.hpp"

namespace ktfloor {

inline constexpr std::string_view kToolName = "ktfloor";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 20160712;

/// Thrown for malformed sweep configurations; the message names the field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Scale { Linear, Log };

/*
 * Sweep configuration (JSON):
 *
 *   {
 *     "variable": "epsilon",          one of U1 C T epsilon t_o tau q e_switch
 *     "scale": "log",                 linear | log
 *     "from": 1e-30, "to": 1e-3,
 *     "points": 28,
 *     "fixed": { "C": 1e-15, "U1": 0.02408 },
 *     "seed": 7,                      optional, else $KTFLOOR_SEED, else built-in
 *     "output": "eps_sweep.csv",
 *     "workers": 4                    optional, does not affect results
 *   }
 *
 * Units: U1 V, C F, T K, t_o s, tau s, e_switch kT, L H. tau sets the stage
 * resistance R = tau / C. C and U1 have no defaults.
 */
struct SweepSpec {
    std::string variable;
    Scale scale = Scale::Linear;
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;
    std::map<std::string, double> fixed;
    std::uint64_t seed = kDefaultSeed;
    std::string output_path;
    unsigned workers = 1;
};

namespace sweep {

inline const std::vector<std::string>& sweepable()
{
    static const std::vector<std::string> names{"U1", "C", "T", "epsilon", "t_o", "tau", "q", "e_switch"};
    return names;
}

// Fixed-only knobs. mc_trials = 0 disables the Monte Carlo columns.
inline const std::vector<std::string>& fixed_only()
{
    static const std::vector<std::string> names{"L", "threshold_fraction", "n_switch", "mc_trials", "mc_n_obs"};
    return names;
}

inline std::map<std::string, double> defaults()
{
    return {{"T", constants::default_temperature},
            {"epsilon", 1e-30},
            {"t_o", constants::seconds_per_year},
            {"tau", 1e-10},
            {"q", 100.0},
            {"e_switch", -std::log(1e-30)},
            {"L", 1e-6},
            {"threshold_fraction", 0.5},
            {"n_switch", 2.0},
            {"mc_trials", 0.0},
            {"mc_n_obs", 100.0}};
}

inline bool contains(const std::vector<std::string>& v, const std::string& s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

inline double number_field(const nlohmann::json& j, const char* name)
{
    if (!j.contains(name))
        throw ConfigError(std::string("field '") + name + "': missing");
    if (!j.at(name).is_number())
        throw ConfigError(std::string("field '") + name + "': expected a number");
    return j.at(name).get<double>();
}

}  // namespace sweep

/// Accepts either a sweep config or a run manifest (whose "config" member
/// is re-used verbatim).
inline SweepSpec parse_sweep_spec(const nlohmann::json& doc, std::optional<std::uint64_t> env_seed = std::nullopt)
{
    const nlohmann::json& j = doc.is_object() && doc.contains("config") ? doc.at("config") : doc;
    if (!j.is_object())
        throw ConfigError("sweep config must be a JSON object");

    SweepSpec s;
    if (!j.contains("variable") || !j.at("variable").is_string())
        throw ConfigError("field 'variable': expected one of U1, C, T, epsilon, t_o, tau, q, e_switch");
    s.variable = j.at("variable").get<std::string>();
    if (!sweep::contains(sweep::sweepable(), s.variable))
        throw ConfigError("field 'variable': unknown sweep variable '" + s.variable + "'");

    const std::string scale = j.value("scale", std::string("linear"));
    if (scale == "linear")
        s.scale = Scale::Linear;
    else if (scale == "log")
        s.scale = Scale::Log;
    else
        throw ConfigError("field 'scale': expected 'linear' or 'log', got '" + scale + "'");

    s.from = sweep::number_field(j, "from");
    s.to = sweep::number_field(j, "to");
    if (!(s.from < s.to))
        throw ConfigError("fields 'from'/'to': need from < to");
    if (s.scale == Scale::Log && !(s.from > 0.0))
        throw ConfigError("fields 'from'/'to': log scale needs positive endpoints");

    if (!j.contains("points") || !j.at("points").is_number_integer() || j.at("points").get<long long>() < 2)
        throw ConfigError("field 'points': expected an integer >= 2");
    s.points = static_cast<std::size_t>(j.at("points").get<long long>());

    if (j.contains("fixed")) {
        const auto& f = j.at("fixed");
        if (!f.is_object())
            throw ConfigError("field 'fixed': expected an object of name -> number");
        for (const auto& [name, value] : f.items()) {
            if (!sweep::contains(sweep::sweepable(), name) && !sweep::contains(sweep::fixed_only(), name))
                throw ConfigError("field 'fixed." + name + "': unknown parameter");
            if (name == s.variable)
                throw ConfigError("field 'fixed." + name + "': also the sweep variable");
            if (!value.is_number())
                throw ConfigError("field 'fixed." + name + "': expected a number");
            s.fixed[name] = value.get<double>();
        }
    }
    for (const char* required : {"C", "U1"}) {
        if (s.variable != required && !s.fixed.count(required))
            throw ConfigError(std::string("field 'fixed.") + required + "': required (no default)");
    }

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned())
            throw ConfigError("field 'seed': expected a non-negative integer");
        s.seed = j.at("seed").get<std::uint64_t>();
    } else if (env_seed) {
        s.seed = *env_seed;
    }

    if (j.contains("output")) {
        if (!j.at("output").is_string())
            throw ConfigError("field 'output': expected a path string");
        s.output_path = j.at("output").get<std::string>();
    }
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_unsigned() || j.at("workers").get<unsigned>() == 0)
            throw ConfigError("field 'workers': expected an integer >= 1");
        s.workers = j.at("workers").get<unsigned>();
    }
    return s;
}

/// Normalised config as written into the manifest. Workers are omitted
/// since they never change the output.
inline nlohmann::json to_json(const SweepSpec& s)
{
    nlohmann::json fixed = nlohmann::json::object();
    for (const auto& [k, v] : s.fixed)
        fixed[k] = v;
    return nlohmann::json{{"variable", s.variable},
                          {"scale", s.scale == Scale::Log ? "log" : "linear"},
                          {"from", s.from},
                          {"to", s.to},
                          {"points", s.points},
                          {"fixed", fixed},
                          {"seed", s.seed},
                          {"output", s.output_path}};
}

inline std::vector<double> sweep_values(const SweepSpec& s)
{
    std::vector<double> v(s.points);
    const double last = static_cast<double>(s.points - 1);
    for (std::size_t i = 0; i < s.points; ++i) {
        const double frac = static_cast<double>(i) / last;
        if (s.scale == Scale::Linear)
            v[i] = s.from + (s.to - s.from) * frac;
        else
            v[i] = std::exp(std::log(s.from) + (std::log(s.to) - std::log(s.from)) * frac);
    }
    v.front() = s.from;
    v.back() = s.to;
    return v;
}

/// One evaluated sweep point. Empty optionals are written as empty CSV fields.
struct SweepRow {
    std::map<std::string, double> inputs;
    std::vector<std::pair<std::string, std::optional<double>>> outputs;
};

inline const std::vector<std::string>& sweep_output_columns()
{
    static const std::vector<std::string> cols{
        "kT_J",           "sigma_V",       "e1_J",           "e1_kT",        "cycle_J",
        "cycle_kT",       "epsilon_gate",  "floor_short_kT", "floor_long_kT", "swing_U1_V",
        "swing_e1_kT",    "swing_ratio",   "tank_efficiency", "break_even_kT", "net_saving_kT",
        "mc_epsilon_hat", "mc_std_err",    "mc_analytic"};
    return cols;
}

inline SweepRow evaluate_sweep_point(const std::map<std::string, double>& p, std::uint64_t seed, std::size_t index)
{
    const auto get = [&](const char* k) { return p.at(k); };
    const PhysicalEnvironment env = PhysicalEnvironment::at(get("T"));
    const double c = get("C");
    const double tau = get("tau");
    const RcStage stage = RcStage::make(c, tau / c, get("U1"), env);
    const double kt = thermal_energy(env);
    if (!(kt > 0.0))
        throw DomainError("sweep points need T > 0 K");

    std::vector<std::pair<std::string, std::optional<double>>> out;
    auto put = [&](const char* name, std::optional<double> v) { out.emplace_back(name, v); };

    const OuProcess noise = from_stage(stage);
    const CycleLedger ledger = full_cycle_dissipation(stage);
    const double e1 = charge_energy(stage);
    const double fraction = get("threshold_fraction");
    const double eps_gate = instantaneous_error_prob(fraction * stage.swing_voltage, noise.stationary_sigma);
    const double eps = get("epsilon");
    const ErrorSpec spec{eps, get("t_o"), tau};

    put("kT_J", kt);
    put("sigma_V", noise.stationary_sigma);
    put("e1_J", e1);
    put("e1_kT", e1 / kt);
    put("cycle_J", ledger.total_dissipated);
    put("cycle_kT", ledger.total_dissipated / kt);
    put("epsilon_gate", eps_gate);

    const FloorResult fs = floor_short(spec, env);
    put("floor_short_kT", fs.floor_kt);
    put("floor_long_kT",
        spec.observation_time >= tau ? std::optional<double>(floor_long(spec, env).floor_kt) : std::nullopt);
    const RequiredSwing swing = required_swing(eps, stage, fraction);
    put("swing_U1_V", swing.u1);
    put("swing_e1_kT", swing.e1_kt);
    put("swing_ratio", swing.e1_kt / fs.floor_kt);

    const double q = get("q");
    const double l = get("L");
    const TankCircuit tank{c, c, l, std::sqrt(l / c) / q, stage.swing_voltage};
    const auto n_switch = static_cast<unsigned>(get("n_switch"));
    const BreakEven be = break_even(tank, kt_to_joules(get("e_switch"), env), n_switch, env);
    put("tank_efficiency", be.efficiency);
    put("break_even_kT", be.break_even_energy.kt);
    put("net_saving_kT", be.net_saving.kt);

    const auto trials = static_cast<std::uint64_t>(get("mc_trials"));
    if (trials > 0) {
        const auto n_obs = static_cast<std::uint64_t>(get("mc_n_obs"));
        const FirstPassageEstimate mc = first_passage_mc(stage, fraction * stage.swing_voltage,
                                                         static_cast<double>(n_obs) * tau, trials,
                                                         splitmix64(seed + index));
        put("mc_epsilon_hat", mc.epsilon_hat);
        put("mc_std_err", mc.std_err);
        put("mc_analytic", mc.expected_errors / static_cast<double>(mc.trials));
    } else {
        put("mc_epsilon_hat", std::nullopt);
        put("mc_std_err", std::nullopt);
        put("mc_analytic", std::nullopt);
    }
    return SweepRow{p, std::move(out)};
}

struct SweepResult {
    std::vector<std::string> input_columns;
    std::vector<SweepRow> rows;
};

/// Rows come back in sweep order whatever the worker count.
inline SweepResult run_sweep(const SweepSpec& s)
{
    std::map<std::string, double> base = sweep::defaults();
    for (const auto& [k, v] : s.fixed)
        base[k] = v;
    if (base.at("n_switch") < 2.0 || base.at("mc_trials") < 0.0 || base.at("mc_n_obs") < 1.0)
        throw ConfigError("field 'fixed': need n_switch >= 2, mc_trials >= 0, mc_n_obs >= 1");

    const std::vector<double> values = sweep_values(s);
    SweepResult result;
    result.input_columns = sweep::sweepable();
    result.rows.resize(values.size());

    const unsigned workers = std::max(1u, std::min<unsigned>(s.workers, static_cast<unsigned>(values.size())));
    std::vector<std::exception_ptr> failures(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t i = w; i < values.size(); i += workers) {
                auto p = base;
                p[s.variable] = values[i];
                result.rows[i] = evaluate_sweep_point(p, s.seed, i);
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
    }
    for (const auto& f : failures)
        if (f)
            std::rethrow_exception(f);
    return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r)
{
    os << "index";
    for (const auto& c : r.input_columns)
        os << ',' << csv::field(c);
    for (const auto& c : sweep_output_columns())
        os << ',' << csv::field(c);
    os << csv::eol;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const SweepRow& row = r.rows[i];
        os << i;
        for (const auto& c : r.input_columns)
            os << ',' << csv::number(row.inputs.at(c));
        for (const auto& [name, v] : row.outputs)
            os << ',' << (v ? csv::number(*v) : std::string());
        os << csv::eol;
    }
}

inline std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path)
{
    std::filesystem::path p = csv_path;
    p.replace_extension(".manifest.json");
    return p;
}

inline nlohmann::json sweep_manifest(const SweepSpec& s, const SweepResult& r)
{
    nlohmann::json columns = nlohmann::json::array({"index"});
    for (const auto& c : r.input_columns)
        columns.push_back(c);
    for (const auto& c : sweep_output_columns())
        columns.push_back(c);
    return nlohmann::json{{"tool", kToolName},
                          {"version", kToolVersion},
                          {"command", "sweep"},
                          {"config", to_json(s)},
                          {"seed", s.seed},
                          {"rows", r.rows.size()},
                          {"columns", columns}};
}

}  // namespace ktfloor
