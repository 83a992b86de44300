#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktfloor/circuit_model.hpp"
#include "ktfloor/error_model.hpp"
#include "ktfloor/gate_audit.hpp"
#include "ktfloor/json_io.hpp"
#include "ktfloor/lc_tank.hpp"
#include "ktfloor/noise_model.hpp"
#include "ktfloor/quantities.hpp"
#include "ktfloor/sweep.hpp"

namespace ktfloor::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kStrictAudit = 3 };

namespace text {

inline std::string fixed(double x, int digits)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, digits);
    return std::string(buf.data(), res.ptr);
}

inline std::string sci(double x, int digits = 4)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, digits);
    return std::string(buf.data(), res.ptr);
}

// "2.8611e-19 J   69.08 kT"
inline std::string energy(const Energy& e)
{
    return sci(e.joule) + " J   " + fixed(e.kt, 2) + " kT";
}

class Table {
public:
    explicit Table(std::ostream& os) : os_(os) {}
    Table& row(const std::string& key, const std::string& value)
    {
        os_ << key;
        for (std::size_t i = key.size(); i < 26; ++i)
            os_ << ' ';
        os_ << value << '\n';
        return *this;
    }

private:
    std::ostream& os_;
};

}  // namespace text

inline std::optional<std::uint64_t> seed_from_environment()
{
    const char* s = std::getenv("KTFLOOR_SEED");
    if (s == nullptr || *s == '\0')
        return std::nullopt;
    std::uint64_t v = 0;
    const std::string str(s);
    const auto res = std::from_chars(str.data(), str.data() + str.size(), v);
    if (res.ec != std::errc() || res.ptr != str.data() + str.size())
        throw DomainError("KTFLOOR_SEED must be a non-negative integer, got '" + str + "'");
    return v;
}

struct FloorArgs {
    double epsilon = 0.0;
    double temp = constants::default_temperature;
    std::optional<double> t_obs;
    std::optional<double> tau;
    bool json = false;
};

inline int cmd_floor(const FloorArgs& a, std::ostream& out)
{
    const PhysicalEnvironment env = PhysicalEnvironment::at(a.temp);
    if (a.t_obs.has_value() != a.tau.has_value())
        throw DomainError("long-observation floor needs both --t-obs and --tau");
    const ErrorSpec spec{a.epsilon, a.t_obs.value_or(0.0), a.tau.value_or(0.0)};
    const FloorResult f = a.t_obs ? floor_long(spec, env) : floor_short(spec, env);
    if (a.json) {
        nlohmann::json j = to_json(f);
        j["epsilon"] = a.epsilon;
        j["temperature"] = a.temp;
        if (a.t_obs) {
            j["t_obs"] = *a.t_obs;
            j["tau"] = *a.tau;
        }
        out << j.dump(2) << '\n';
        return kOk;
    }
    text::Table t(out);
    t.row("regime", std::string(to_string(f.regime)));
    t.row("epsilon", text::sci(a.epsilon));
    t.row("temperature", text::fixed(a.temp, 2) + " K");
    if (a.t_obs) {
        t.row("observation time", text::sci(*a.t_obs) + " s");
        t.row("correlation time", text::sci(*a.tau) + " s");
    }
    t.row("floor", text::fixed(f.floor_kt, 2) + " kT");
    t.row("floor (joule)", text::sci(f.floor_joule) + " J");
    return kOk;
}

struct CycleArgs {
    double cap = 0.0;
    double swing = 0.0;
    double res = 1e3;
    double temp = constants::default_temperature;
    std::optional<double> friction_j;
    std::optional<double> friction_kt;
    std::optional<double> claimed_j;
    std::optional<double> claimed_kt;
    double threshold_fraction = 0.5;
    Accounting accounting = Accounting::PerOperation;
    bool strict = false;
    bool json = false;
};

inline int cmd_cycle(const CycleArgs& a, std::ostream& out)
{
    const PhysicalEnvironment env = PhysicalEnvironment::at(a.temp);
    if (a.friction_j.has_value() == a.friction_kt.has_value())
        throw DomainError("give exactly one of --friction-per-transition (J) or --friction-kt");
    const double friction = a.friction_j ? *a.friction_j : kt_to_joules(*a.friction_kt, env);
    const FollowerGate gate{RcStage::make(a.cap, a.res, a.swing, env), friction, a.threshold_fraction};
    const AuditReport r = run_cycle(gate, a.accounting);

    std::optional<double> claimed = a.claimed_j;
    if (a.claimed_kt)
        claimed = kt_to_joules(*a.claimed_kt, env);
    std::optional<ClaimVerdict> claim;
    if (claimed)
        claim = audit_claim(gate, *claimed);

    if (a.json) {
        nlohmann::json j = to_json(r);
        j["inputs"] = {{"capacitance", a.cap},
                       {"swing_voltage", a.swing},
                       {"resistance", a.res},
                       {"temperature", a.temp},
                       {"friction_per_transition", friction},
                       {"threshold_fraction", a.threshold_fraction}};
        if (claim) {
            j["claimed_per_operation"] = to_json(Energy::from_joules(*claimed, env));
            j["claim_verdict"] = to_string(*claim);
        }
        out << j.dump(2) << '\n';
    } else {
        text::Table t(out);
        t.row("friction per cycle", text::energy(r.e_friction_cycle));
        t.row("input charging per cycle", text::energy(r.e_input_cycle));
        t.row("total per cycle", text::energy(r.e_total_cycle));
        t.row("compared (" + std::string(to_string(r.accounting)) + ")", text::energy(r.e_compared));
        t.row("epsilon per observation", text::sci(r.epsilon_per_observation));
        t.row("floor (short)", r.floor_short_kt ? text::fixed(*r.floor_short_kt, 2) + " kT" : "not-applicable");
        t.row("verdict friction only", std::string(to_string(r.verdict_friction_only)) + " (per transition)");
        t.row("verdict total", std::string(to_string(r.verdict_total)));
        if (claim) {
            t.row("claimed per operation", text::energy(Energy::from_joules(*claimed, env)));
            t.row("claim verdict", std::string(to_string(*claim)));
        }
    }
    if (a.strict && claim == ClaimVerdict::NeglectsInputCharging)
        return kStrictAudit;
    return kOk;
}

struct McArgs {
    double cap = 0.0;
    double res = 0.0;
    double temp = constants::default_temperature;
    double threshold_sigma = 0.0;
    double t_obs = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
    bool json = false;
};

inline int cmd_mc(const McArgs& a, std::ostream& out)
{
    const PhysicalEnvironment env = PhysicalEnvironment::at(a.temp);
    const RcStage stage = RcStage::make(a.cap, a.res, 0.0, env);
    const OuProcess noise = from_stage(stage);
    const double threshold = a.threshold_sigma * noise.stationary_sigma;
    const FirstPassageEstimate e = first_passage_mc(stage, threshold, a.t_obs, a.trials, a.seed, a.workers);
    const double per_look = instantaneous_error_prob(threshold, noise.stationary_sigma);
    const double analytic = multi_sample_error(per_look, e.n_observations);

    if (a.json) {
        nlohmann::json j = to_json(e);
        j["seed"] = a.seed;
        j["threshold_V"] = threshold;
        j["threshold_sigma"] = a.threshold_sigma;
        j["sigma_V"] = noise.stationary_sigma;
        j["tau_s"] = noise.correlation_time;
        j["analytic_per_observation"] = per_look;
        j["analytic_independent"] = analytic;
        j["warning"] = e.low_confidence ? nlohmann::json("fewer than 10 expected errors for this trial budget")
                                        : nlohmann::json(nullptr);
        out << j.dump(2) << '\n';
        return kOk;
    }
    text::Table t(out);
    t.row("sigma", text::sci(noise.stationary_sigma) + " V");
    t.row("tau", text::sci(noise.correlation_time) + " s");
    t.row("threshold", text::sci(threshold) + " V (" + text::fixed(a.threshold_sigma, 3) + " sigma)");
    t.row("observations", std::to_string(e.n_observations));
    t.row("trials", std::to_string(e.trials));
    t.row("seed", std::to_string(a.seed));
    t.row("errors observed", std::to_string(e.errors));
    t.row("epsilon_hat", text::sci(e.epsilon_hat, 6) + " +/- " + text::sci(e.std_err, 2));
    t.row("analytic (independent)", text::sci(analytic, 6));
    if (e.low_confidence)
        t.row("warning", "fewer than 10 expected errors for this trial budget");
    return kOk;
}

struct TankArgs {
    double l = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double r = 0.0;
    double v0 = 0.0;
    double e_switch_kt = -std::log(1e-30);
    unsigned n_switch = 2;
    double temp = constants::default_temperature;
    std::optional<double> dt;
    std::string dump_waveform;
    bool json = false;
};

inline int cmd_tank(const TankArgs& a, std::ostream& out)
{
    const PhysicalEnvironment env = PhysicalEnvironment::at(a.temp);
    const TankCircuit tank{a.c1, a.c2, a.l, a.r, a.v0};
    validate(tank);
    const TransferReport closed = transfer_efficiency(tank);
    const double dt = a.dt.value_or(default_tank_step(tank));

    TransferReport ode;
    if (!a.dump_waveform.empty()) {
        std::ofstream f(a.dump_waveform, std::ios::binary);
        if (!f)
            throw DomainError("cannot open waveform file '" + a.dump_waveform + "'");
        write_waveform_header(f);
        ode = simulate_transfer(tank, dt, [&](const TankState& s) { write_waveform_row(f, s); });
    } else {
        ode = simulate_transfer(tank, dt);
    }
    const BreakEven be = break_even(tank, kt_to_joules(a.e_switch_kt, env), a.n_switch, env);
    const double q1 = quality_factor(a.l, a.c1, a.r);
    const double q2 = quality_factor(a.l, a.c2, a.r);

    if (a.json) {
        nlohmann::json j;
        j["closed_form"] = to_json(closed);
        j["ode"] = to_json(ode);
        j["ode"]["dt"] = dt;
        j["ode"]["max_ledger_drift"] = ode.max_ledger_drift;
        j["break_even"] = to_json(be);
        j["switch_control"] = {{"per_event", to_json(Energy::from_joules(kt_to_joules(a.e_switch_kt, env), env))},
                               {"events", a.n_switch}};
        j["quality_factor"] = {{"phase1", std::isfinite(q1) ? nlohmann::json(q1) : nlohmann::json(nullptr)},
                               {"phase2", std::isfinite(q2) ? nlohmann::json(q2) : nlohmann::json(nullptr)}};
        out << j.dump(2) << '\n';
        return kOk;
    }
    auto qtext = [](double q) { return std::isfinite(q) ? text::fixed(q, 3) : std::string("inf"); };
    text::Table t(out);
    t.row("quality factor", qtext(q1) + " / " + qtext(q2));
    t.row("t1 (S1 -> S2)", text::sci(closed.t_switch_1) + " s");
    t.row("t2 (S2 opens)", text::sci(closed.t_switch_2) + " s");
    t.row("energy initial", text::energy(Energy::from_joules(closed.energy_initial, env)));
    t.row("energy delivered", text::energy(Energy::from_joules(closed.energy_delivered, env)));
    t.row("efficiency", text::fixed(closed.efficiency, 6));
    t.row("efficiency (ode)", text::fixed(ode.efficiency, 6));
    t.row("ode ledger drift", text::sci(ode.max_ledger_drift, 2));
    t.row("switch control", text::fixed(a.e_switch_kt, 2) + " kT x " + std::to_string(a.n_switch));
    t.row("net saving", text::energy(be.net_saving));
    t.row("break-even energy", text::energy(be.break_even_energy));
    t.row("recycling pays off", be.net_saving.joule > 0.0 ? "yes" : "no");
    return kOk;
}

struct SweepArgs {
    std::string config;
    std::string output;
    std::optional<unsigned> workers;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out)
{
    std::ifstream in(a.config);
    if (!in)
        throw ConfigError("cannot read config file '" + a.config + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(a.config + ": " + e.what());
    }
    SweepSpec spec = parse_sweep_spec(doc, seed_from_environment());
    if (!a.output.empty())
        spec.output_path = a.output;
    if (spec.output_path.empty())
        throw ConfigError("field 'output': missing (or pass --output)");
    if (a.workers)
        spec.workers = *a.workers;

    const SweepResult result = run_sweep(spec);
    {
        std::ofstream csv_out(spec.output_path, std::ios::binary);
        if (!csv_out)
            throw ConfigError("cannot write '" + spec.output_path + "'");
        write_sweep_csv(csv_out, result);
    }
    const auto manifest = manifest_path_for(spec.output_path);
    {
        std::ofstream m(manifest, std::ios::binary);
        if (!m)
            throw ConfigError("cannot write '" + manifest.string() + "'");
        m << sweep_manifest(spec, result).dump(2) << '\n';
    }
    out << "wrote " << result.rows.size() << " rows to " << spec.output_path << '\n';
    out << "manifest " << manifest.string() << '\n';
    return kOk;
}

inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs the tool on argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dissipation floors of voltage-controlled logic under Johnson noise", "ktfloor"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    FloorArgs fa;
    auto* floor = app.add_subcommand("floor", "Dissipation floor kT ln(1/eps) (+ kT ln(t_o/tau) with --t-obs/--tau)");
    floor->add_option("--epsilon", fa.epsilon, "Error probability in (0, 0.5)")->required();
    floor->add_option("--temp", fa.temp, "Temperature [K]")->capture_default_str();
    auto* t_obs = floor->add_option("--t-obs", fa.t_obs, "Observation time [s]");
    auto* tau = floor->add_option("--tau", fa.tau, "Correlation time [s]");
    t_obs->needs(tau);
    tau->needs(t_obs);
    floor->add_flag("--json", fa.json, "Emit JSON");

    CycleArgs ca;
    std::string accounting = "per-operation";
    auto* cycle = app.add_subcommand("cycle", "Audit a Follower gate's 0=>1=>0 cycle");
    cycle->add_option("--cap", ca.cap, "Input capacitance [F]")->required();
    cycle->add_option("--swing", ca.swing, "Logic swing U1 [V]")->required();
    cycle->add_option("--res", ca.res, "Switch resistance [ohm]")->capture_default_str();
    cycle->add_option("--temp", ca.temp, "Temperature [K]")->capture_default_str();
    auto* fj = cycle->add_option("--friction-per-transition", ca.friction_j, "Mechanical loss per transition [J]");
    auto* fk = cycle->add_option("--friction-kt", ca.friction_kt, "Mechanical loss per transition [kT]");
    fj->excludes(fk);
    auto* cj = cycle->add_option("--claimed", ca.claimed_j, "Claimed dissipation per operation [J]");
    auto* ck = cycle->add_option("--claimed-kt", ca.claimed_kt, "Claimed dissipation per operation [kT]");
    cj->excludes(ck);
    cycle->add_option("--threshold-fraction", ca.threshold_fraction, "Decision threshold as a fraction of U1")
        ->capture_default_str();
    cycle->add_option("--accounting", accounting, "Energy held against the floor")
        ->check(CLI::IsMember({"per-operation", "per-cycle"}))
        ->capture_default_str();
    cycle->add_flag("--strict", ca.strict, "Exit 3 when the claim neglects input charging");
    cycle->add_flag("--json", ca.json, "Emit JSON");

    McArgs ma;
    ma.workers = default_workers();
    try {
        if (auto s = seed_from_environment())
            ma.seed = *s;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    auto* mc = app.add_subcommand("mc", "Monte Carlo first-passage error estimate");
    mc->add_option("--cap", ma.cap, "Capacitance [F]")->required();
    mc->add_option("--res", ma.res, "Resistance [ohm]")->required();
    mc->add_option("--temp", ma.temp, "Temperature [K]")->capture_default_str();
    mc->add_option("--threshold-sigma", ma.threshold_sigma, "Threshold in units of sigma")->required();
    mc->add_option("--t-obs", ma.t_obs, "Observation time [s]")->required();
    mc->add_option("--trials", ma.trials, "Number of trials")->required()->check(CLI::PositiveNumber);
    mc->add_option("--seed", ma.seed, "Master seed (default $KTFLOOR_SEED)")->capture_default_str();
    mc->add_option("--workers", ma.workers, "Worker threads (result does not depend on it)")
        ->check(CLI::PositiveNumber);
    mc->add_flag("--json", ma.json, "Emit JSON");

    TankArgs ta;
    auto* tank = app.add_subcommand("tank", "LC tank energy recycling and break-even");
    tank->add_option("--l", ta.l, "Inductance [H]")->required();
    tank->add_option("--c1", ta.c1, "Source capacitance [F]")->required();
    tank->add_option("--c2", ta.c2, "Target capacitance [F]")->required();
    tank->add_option("--r", ta.r, "Series resistance [ohm]")->capture_default_str();
    tank->add_option("--v0", ta.v0, "Initial voltage on C1 [V]")->required();
    tank->add_option("--e-switch-kt", ta.e_switch_kt, "Control energy per switch event [kT]")->capture_default_str();
    tank->add_option("--n-switch", ta.n_switch, "Switch events per transfer")->capture_default_str();
    tank->add_option("--temp", ta.temp, "Temperature [K]")->capture_default_str();
    tank->add_option("--dt", ta.dt, "ODE step [s]");
    tank->add_option("--dump-waveform", ta.dump_waveform, "Write t,v_c1,i_l,v_c2,e_loss CSV");
    tank->add_flag("--json", ta.json, "Emit JSON");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep from a JSON config (or a previous manifest)");
    sweep->add_option("config", sa.config, "Sweep config JSON")->required();
    sweep->add_option("--output", sa.output, "Override the CSV output path");
    sweep->add_option("--workers", sa.workers, "Worker threads (result does not depend on it)")
        ->check(CLI::PositiveNumber);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args)
        argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*floor)
            return cmd_floor(fa, out);
        if (*cycle) {
            ca.accounting = accounting == "per-cycle" ? Accounting::PerCycle : Accounting::PerOperation;
            return cmd_cycle(ca, out);
        }
        if (*mc)
            return cmd_mc(ma, out);
        if (*tank)
            return cmd_tank(ta, out);
        if (*sweep)
            return cmd_sweep(sa, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace ktfloor::cli
