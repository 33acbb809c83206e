#pragma once

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlab/entropy.hpp"
#include "wlab/flows.hpp"
#include "wlab/grid.hpp"
#include "wlab/heat.hpp"
#include "wlab/logsobolev.hpp"
#include "wlab/operators.hpp"
#include "wlab/verify.hpp"

namespace wlab {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    std::string check_id;
    NumericalError(std::string id, const std::string& what)
        : std::runtime_error(what), check_id(std::move(id)) {}
};

namespace cfg {

inline void require_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where, bool strict) {
    if (!strict) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline double get_number(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_string() && v.get<std::string>() == "inf")
        return std::numeric_limits<double>::infinity();
    if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number or \"inf\"");
    return v.get<double>();
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace cfg

inline FlowFamily flow_from_config(const json& fc, bool strict) {
    if (!fc.contains("kind")) throw ConfigError("flow config needs a 'kind'");
    const std::string kind = fc.at("kind").get<std::string>();
    const std::size_t nodes = static_cast<std::size_t>(cfg::get_number(fc, "nodes", 512));
    if (nodes < 64 || nodes > 8192)
        throw ConfigError("flow nodes must lie in [64, 8192]");
    cfg::require_keys(fc,
                      {"kind", "nodes", "length", "half_width", "cone_N", "radius", "sphere_n",
                       "horizon_fraction"},
                      "flow", strict);
    if (kind == "flat_circle")
        return make_flat_circle(cfg::get_number(fc, "length", 2.0 * kPi), nodes);
    if (kind == "flat_line") return make_flat_line(cfg::get_number(fc, "length", 32.0), nodes);
    if (kind == "ou_line") return make_ou_line(nodes, cfg::get_number(fc, "half_width", 8.0));
    if (kind == "cone")
        return make_cone(cfg::get_number(fc, "cone_N", 3.0), cfg::get_number(fc, "radius", 8.0),
                         nodes);
    if (kind == "weighted_sphere")
        return make_weighted_sphere(static_cast<int>(cfg::get_number(fc, "sphere_n", 2)), nodes);
    if (kind == "shrinking_sphere")
        return make_shrinking_sphere(static_cast<int>(cfg::get_number(fc, "sphere_n", 2)),
                                     cfg::get_number(fc, "horizon_fraction", 0.5), nodes);
    throw ConfigError("unknown flow kind: " + kind);
}

inline Trajectory trajectory_from_config(const FlowFamily& flow, const json& config,
                                         bool strict) {
    if (!config.contains("time")) throw ConfigError("config needs a 'time' section");
    const json& tc = config.at("time");
    cfg::require_keys(tc, {"dt", "T"}, "time", strict);
    if (!tc.contains("dt")) throw ConfigError("time section needs 'dt'");
    if (!tc.contains("T")) throw ConfigError("time section needs 'T'");
    const double dt = cfg::get_number(tc, "dt", 0.0);
    const double T = cfg::get_number(tc, "T", 0.0);
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (T > flow.horizon) throw ConfigError("T exceeds the flow horizon");

    const std::string initial =
        config.contains("initial") ? config.at("initial").get<std::string>() : "kernel";
    const std::size_t n = flow.grid.size();
    if (initial == "kernel") {
        const std::size_t x0 = (flow.kind == "cone") ? flow.collar + 1 : n / 2;
        return kernel_trajectory(flow, x0, T, dt);
    }
    const double t0 = dt;
    const std::size_t steps = static_cast<std::size_t>(std::ceil((T - t0) / dt));
    const double T_end = t0 + steps * dt;
    if (initial == "uniform")
        return solve_heat(flow, Field(n, 1.0), t0, T_end, dt);
    if (initial == "bump") {
        Field u(n);
        const double x0 = flow.grid.x.front(), x1 = flow.grid.x.back();
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (flow.grid.x[i] - x0) / (x1 - x0) - 0.5;
            u[i] = std::exp(-0.5 * z * z / (0.05 * 0.05));
        }
        return solve_heat(flow, std::move(u), t0, T_end, dt);
    }
    throw ConfigError("unknown initial data kind: " + initial);
}

// ------------------------------------------------------------ extra checks

inline CheckResult check_soliton_constant(const FlowFamily& flow) {
    CheckResult r;
    r.id = "SOLITON_CONSTANT";
    r.kind = CheckKind::identity;
    r.anchor = "the scalar-curvature W-entropy of the shrinking round sphere is "
               "constant in backward time";
    if (flow.kind != "shrinking_sphere") {
        r.status = CheckStatus::not_applicable;
        r.note = "needs the shrinking sphere family";
        return r;
    }
    const double n = flow.model_dimension;
    const double t_sing = 1.0 / (2.0 * (n - 1.0));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int j = 0; j <= 4; ++j) {
        const double t = flow.horizon * j / 4.0;
        const double w = perelman_w_sphere(flow, t_sing - t);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    r.value = hi - lo;
    r.tolerance = 1e-10;
    r.status = r.value <= r.tolerance ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

inline CheckResult check_measure_invariance(const FlowFamily& flow) {
    CheckResult r;
    r.id = "MEASURE_INVARIANCE";
    r.kind = CheckKind::identity;
    r.anchor = "the weighted measure of a conjugate flow is frozen in time";
    if (!flow.conjugate) {
        r.status = CheckStatus::not_applicable;
        r.note = "flow is not flagged conjugate";
        return r;
    }
    const double T = std::isinf(flow.horizon) ? 1.0 : flow.horizon;
    WeightedGeometry g0 = flow.geometry_at(0.0);
    double worst = 0.0;
    for (int j = 1; j <= 4; ++j) {
        WeightedGeometry g = flow.geometry_at(T * j / 4.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            worst = std::max(worst, std::abs(g.measure[i] - g0.measure[i]));
        worst = std::max(worst, std::abs(g.total_measure() - g0.total_measure()));
    }
    r.value = worst;
    r.tolerance = 1e-10;
    r.status = r.value <= r.tolerance ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

inline CheckResult check_super_ricci_defect(const FlowFamily& flow, double N, double K) {
    CheckResult r;
    r.id = "SUPER_RICCI_DEFECT";
    r.kind = CheckKind::inequality;
    r.anchor = "(1/2) dg/dt + Ric_{N,1} >= K g on the unit direction, sampled in time";
    const double T = std::isinf(flow.horizon) ? 1.0 : flow.horizon;
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 4; ++j)
        margin = std::min(margin, super_ricci_defect(flow, N, K, T * j / 4.0).min_defect);
    const double h = flow.grid.h;
    r.value = margin;
    r.tolerance = 100.0 * h * h;
    r.status = margin >= -r.tolerance ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

inline CheckResult check_logsobolev_extremal(const WeightedGeometry& geom, double t, double N,
                                             double K, std::size_t budget) {
    CheckResult r;
    r.id = "LOGSOBOLEV_EXTREMAL";
    r.kind = CheckKind::identity;
    r.anchor = "the optimal log-Sobolev constant vanishes on the flat line and the "
               "extremal satisfies its Euler-Lagrange equation";
    LogSobolevSolution sol = best_log_sobolev(geom, t, N, K, budget);
    const double el = sol.converged ? euler_lagrange_residual(sol, geom) : 1.0;
    std::ostringstream note;
    note << "mu=" << sol.mu << " el_residual=" << el << " spread=" << sol.spread
         << " iterations=" << sol.iterations << (sol.converged ? "" : " UNCONVERGED");
    r.note = note.str();
    r.value = std::abs(sol.mu);
    r.tolerance = 5e-3;
    const bool ok = sol.converged && r.value <= r.tolerance && el <= 1e-3;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

// ---------------------------------------------------------------- reporting

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        default: return "not-applicable";
    }
}

inline const char* kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::identity: return "identity";
        case CheckKind::inequality: return "inequality";
        default: return "asymptotic";
    }
}

inline json check_to_json(const CheckResult& r) {
    json j;
    j["id"] = r.id;
    j["kind"] = kind_name(r.kind);
    j["value"] = r.value;
    j["tolerance"] = r.tolerance;
    j["status"] = status_name(r.status);
    j["pass"] = r.status != CheckStatus::fail;
    j["anchor"] = r.anchor;
    if (!r.note.empty()) j["note"] = r.note;
    if (!std::isnan(r.order)) j["order"] = r.order;
    return j;
}

struct RunOutcome {
    json report;
    int exit_code = 0;  // 0 pass, 1 check failure, 2 config error, 3 numerical error
    std::string message;
};

inline void write_entropy_series(const std::string& path, const Trajectory& traj,
                                 double N, double K, double a) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open series file " + path);
    os << "t,H,I,H_NK,W_NK_direct,W_via_derivative,entropy_power,Y_a,nash\n";
    auto wd = w_via_derivative(traj, N, K);
    const std::size_t rows = wd.size();
    const std::size_t stride = rows > 400 ? rows / 400 + 1 : 1;
    for (std::size_t j = 0; j < rows; j += stride) {
        const std::size_t k = j + 1;  // interior trajectory index
        WeightedGeometry geom = traj.flow.geometry_at(traj.states[k].t);
        OperatorSet ops(geom);
        EntropyReport rep = entropy_panel(geom, ops, traj.states[k], N, K, a);
        os << cfg::fmt(rep.t) << ',' << cfg::fmt(rep.H) << ',' << cfg::fmt(rep.I) << ','
           << cfg::fmt(rep.H_NK) << ',' << cfg::fmt(rep.W_NK_direct) << ','
           << cfg::fmt(wd[j].second) << ',' << cfg::fmt(rep.entropy_power) << ','
           << cfg::fmt(rep.Y_a) << ',' << cfg::fmt(rep.nash) << '\n';
    }
}

inline void write_check_detail(const std::string& path, const CheckResult& r) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open detail file " + path);
    os << "id,kind,value,tolerance,status,note\n";
    std::string note = r.note;
    for (char& c : note)
        if (c == ',' || c == '\n') c = ';';
    os << r.id << ',' << kind_name(r.kind) << ',' << cfg::fmt(r.value) << ','
       << cfg::fmt(r.tolerance) << ',' << status_name(r.status) << ',' << note << '\n';
}

/// Runs one scenario configuration: builds the flow and trajectory, runs
/// every requested check, writes the JSON report plus CSV series into
/// out_dir, and reports the aggregate exit code.
inline RunOutcome run_scenario(const json& config, const std::string& out_dir, bool strict) {
    cfg::require_keys(config,
                      {"scenario", "flow", "time", "initial", "params", "checks", "logsobolev",
                       "mu_times"},
                      "config", strict);
    if (!config.contains("scenario")) throw ConfigError("config needs a 'scenario' name");
    const std::string name = config.at("scenario").get<std::string>();
    if (!config.contains("flow")) throw ConfigError("config needs a 'flow' section");
    if (!config.contains("checks") || !config.at("checks").is_array())
        throw ConfigError("config needs a 'checks' array");

    FlowFamily flow = flow_from_config(config.at("flow"), strict);
    const json params = config.contains("params") ? config.at("params") : json::object();
    cfg::require_keys(params, {"N", "K", "a", "t_lo", "t_hi"}, "params", strict);
    CheckParams base;
    base.N = cfg::get_number(params, "N", 1.0);
    base.K = cfg::get_number(params, "K", 0.0);
    base.a = cfg::get_number(params, "a", 0.25);
    base.t_lo = cfg::get_number(params, "t_lo", 0.0);
    base.t_hi = cfg::get_number(params, "t_hi", std::numeric_limits<double>::infinity());

    // validate check ids up front so malformed configs fail before any work
    std::vector<std::pair<std::string, CheckParams>> requested;
    for (const json& entry : config.at("checks")) {
        std::string id;
        CheckParams p = base;
        if (entry.is_string()) {
            id = entry.get<std::string>();
        } else if (entry.is_object()) {
            cfg::require_keys(entry, {"id", "N", "K", "a", "t_lo", "t_hi"}, "check entry",
                              strict);
            if (!entry.contains("id")) throw ConfigError("check entry needs an 'id'");
            id = entry.at("id").get<std::string>();
            p.N = cfg::get_number(entry, "N", p.N);
            p.K = cfg::get_number(entry, "K", p.K);
            p.a = cfg::get_number(entry, "a", p.a);
            p.t_lo = cfg::get_number(entry, "t_lo", p.t_lo);
            p.t_hi = cfg::get_number(entry, "t_hi", p.t_hi);
        } else {
            throw ConfigError("check entries must be strings or objects");
        }
        const bool extra = id == "SOLITON_CONSTANT" || id == "MEASURE_INVARIANCE" ||
                           id == "SUPER_RICCI_DEFECT" || id == "LOGSOBOLEV_EXTREMAL" ||
                           id == "MU_MONOTONE";
        if (!extra && !find_check(id)) throw ConfigError("unknown check id: " + id);
        requested.emplace_back(id, p);
    }

    std::filesystem::create_directories(out_dir);
    Trajectory traj = trajectory_from_config(flow, config, strict);

    RunOutcome out;
    json checks = json::array();
    std::vector<std::string> series;
    bool any_fail = false;

    const std::string series_path = out_dir + "/entropy_series.csv";
    {
        const double seriesN = std::isinf(base.N) ? 1.0 : base.N;
        write_entropy_series(series_path, traj, seriesN, base.K, base.a);
        series.push_back("entropy_series.csv");
    }

    for (auto& [id, p] : requested) {
        CheckResult r;
        try {
            if (id == "SOLITON_CONSTANT") {
                r = check_soliton_constant(flow);
            } else if (id == "MEASURE_INVARIANCE") {
                r = check_measure_invariance(flow);
            } else if (id == "SUPER_RICCI_DEFECT") {
                r = check_super_ricci_defect(flow, p.N, p.K);
            } else if (id == "LOGSOBOLEV_EXTREMAL") {
                const json& ls =
                    config.contains("logsobolev") ? config.at("logsobolev") : json::object();
                cfg::require_keys(ls, {"t", "budget"}, "logsobolev", strict);
                const double tls = cfg::get_number(ls, "t", 1.0);
                const std::size_t budget =
                    static_cast<std::size_t>(cfg::get_number(ls, "budget", 20000));
                r = check_logsobolev_extremal(flow.geometry_at(0.0), tls, p.N, p.K, budget);
            } else if (id == "MU_MONOTONE") {
                std::vector<double> times;
                if (config.contains("mu_times"))
                    for (const json& tv : config.at("mu_times")) times.push_back(tv.get<double>());
                if (times.empty())
                    for (int j = 1; j <= 5; ++j)
                        times.push_back(flow.horizon * j / 6.0);
                r = mu_monotonicity(flow, p.N, p.K, times);
            } else {
                r = run_check(id, traj, p);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalError(id, std::string("check ") + id + " failed: " + e.what());
        }
        if (r.status == CheckStatus::fail) any_fail = true;
        checks.push_back(check_to_json(r));
        const std::string detail = "check_" + r.id + ".csv";
        write_check_detail(out_dir + "/" + detail, r);
        series.push_back(detail);
    }

    json report;
    report["config"] = config;
    json env;
    env["version"] = kVersion;
    env["grid"] = flow.grid.size();
    env["h"] = flow.grid.h;
    env["dt"] = traj.dt;
    env["strict"] = strict;
    if (!strict) {
        std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        env["timestamp"] = buf;
    }
    report["environment"] = env;
    report["checks"] = checks;
    report["series_files"] = series;

    std::ofstream os(out_dir + "/report.json");
    if (!os) throw std::runtime_error("cannot open report file in " + out_dir);
    os << report.dump(2) << '\n';

    out.report = report;
    out.exit_code = any_fail ? 1 : 0;
    out.message = any_fail ? "scenario " + name + ": at least one check failed"
                           : "scenario " + name + ": all checks pass or are not applicable";
    return out;
}

// ------------------------------------------------------------- built-ins

inline std::vector<std::string> builtin_scenario_names() {
    return {"gaussian-rigidity", "flat-circle",     "ou-line",
            "cone-N",            "weighted-sphere-static", "shrinking-sphere",
            "noncollapse-scan",  "logsobolev-line"};
}

inline json builtin_scenario(const std::string& name) {
    auto base = [](const char* nm) {
        json j;
        j["scenario"] = nm;
        return j;
    };
    if (name == "gaussian-rigidity") {
        json j = base("gaussian-rigidity");
        j["flow"] = {{"kind", "flat_line"}, {"nodes", 4097}, {"length", 32.0}};
        j["time"] = {{"dt", 0.0078125}, {"T", 4.0}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 1.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.5}, {"t_hi", 4.0}};
        j["checks"] = {"FIRST_DISSIPATION", "W_DEFINITION",        "W_MONOTONE",
                       "RICCATI_EDI",       "ENTROPY_POWER_CONCAVE", "FISHER_BOUND",
                       "LOG_ENTROPY_DECAY", "LI_YAU",              "HARNACK_NU",
                       "NASH_MONOTONE"};
        return j;
    }
    if (name == "flat-circle") {
        json j = base("flat-circle");
        j["flow"] = {{"kind", "flat_circle"}, {"nodes", 512}, {"length", 6.283185307179586}};
        j["time"] = {{"dt", 0.0122718463030851}, {"T", 2.0106944841013681}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 1.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.2}, {"t_hi", 1.2}};
        j["checks"] = {"FIRST_DISSIPATION",
                       "SECOND_DISSIPATION",
                       "W_DEFINITION",
                       "W_DERIVATIVE_FORMULA",
                       "ENTROPY_POWER_IDENTITY",
                       "HARNACK_EVOLUTION",
                       "W_MONOTONE",
                       "RICCATI_EDI",
                       "ENTROPY_POWER_CONCAVE",
                       "FISHER_BOUND",
                       "LOG_ENTROPY_DECAY",
                       "LI_YAU",
                       "HARNACK_NU",
                       "DYNAMIC_BOCHNER",
                       "GRADIENT_ESTIMATE",
                       "W2_CONTRACTION",
                       "HEAT_KERNEL_BOUNDS",
                       "NASH_MONOTONE"};
        return j;
    }
    if (name == "ou-line") {
        json j = base("ou-line");
        j["flow"] = {{"kind", "ou_line"}, {"nodes", 1025}, {"half_width", 8.0}};
        j["time"] = {{"dt", 0.015625}, {"T", 2.0}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 3.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.25}, {"t_hi", 1.5}};
        j["checks"] = json::array({"FIRST_DISSIPATION", "SECOND_DISSIPATION", "W_DEFINITION",
                                   "HARNACK_EVOLUTION", "ENTROPY_POWER_IDENTITY",
                                   json{{"id", "DYNAMIC_BOCHNER"}, {"N", "inf"}, {"K", 1.0}},
                                   json{{"id", "GRADIENT_ESTIMATE"}, {"N", "inf"}, {"K", 1.0}},
                                   json{{"id", "W2_CONTRACTION"}, {"N", "inf"}, {"K", 1.0}}});
        return j;
    }
    if (name == "cone-N") {
        json j = base("cone-N");
        j["flow"] = {{"kind", "cone"}, {"nodes", 1024}, {"cone_N", 3.0}, {"radius", 8.0}};
        j["time"] = {{"dt", 0.015625}, {"T", 2.0}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 3.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.5}, {"t_hi", 2.0}};
        j["checks"] = {"FIRST_DISSIPATION", "FISHER_BOUND",          "W_MONOTONE",
                       "RICCATI_EDI",       "ENTROPY_POWER_CONCAVE", "LI_YAU",
                       "HARNACK_NU",        "NASH_MONOTONE",         "NONCOLLAPSE_EQUIV"};
        return j;
    }
    if (name == "weighted-sphere-static") {
        json j = base("weighted-sphere-static");
        j["flow"] = {{"kind", "weighted_sphere"}, {"nodes", 512}, {"sphere_n", 2}};
        j["time"] = {{"dt", 0.00125}, {"T", 0.5}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 2.0}, {"K", 1.0}, {"a", 0.25}, {"t_lo", 0.05}, {"t_hi", 0.4}};
        j["checks"] = {"FIRST_DISSIPATION", "FISHER_BOUND",     "RICCATI_EDI",
                       "ENTROPY_POWER_CONCAVE", "DYNAMIC_BOCHNER", "GRADIENT_ESTIMATE",
                       "W2_CONTRACTION",    "NASH_MONOTONE"};
        return j;
    }
    if (name == "shrinking-sphere") {
        json j = base("shrinking-sphere");
        j["flow"] = {{"kind", "shrinking_sphere"},
                     {"nodes", 512},
                     {"sphere_n", 2},
                     {"horizon_fraction", 0.5}};
        j["time"] = {{"dt", 0.0009765625}, {"T", 0.25}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 2.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.02}, {"t_hi", 0.2}};
        j["mu_times"] = {0.05, 0.08, 0.11, 0.14, 0.17};
        j["checks"] = {"SOLITON_CONSTANT", "MEASURE_INVARIANCE", "SUPER_RICCI_DEFECT",
                       "FIRST_DISSIPATION", "W_MONOTONE",        "DYNAMIC_BOCHNER",
                       "GRADIENT_ESTIMATE", "W2_CONTRACTION",    "MU_MONOTONE"};
        return j;
    }
    if (name == "noncollapse-scan") {
        json j = base("noncollapse-scan");
        j["flow"] = {{"kind", "flat_line"}, {"nodes", 2049}, {"length", 32.0}};
        j["time"] = {{"dt", 0.015625}, {"T", 4.0}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 1.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.5}, {"t_hi", 4.0}};
        j["checks"] = {"NONCOLLAPSE_EQUIV", "W_INFINITY_KAPPA", "NASH_MONOTONE"};
        return j;
    }
    if (name == "logsobolev-line") {
        json j = base("logsobolev-line");
        j["flow"] = {{"kind", "flat_line"}, {"nodes", 1025}, {"length", 32.0}};
        j["time"] = {{"dt", 0.03125}, {"T", 2.0}};
        j["initial"] = "kernel";
        j["params"] = {{"N", 1.0}, {"K", 0.0}, {"a", 0.25}, {"t_lo", 0.5}, {"t_hi", 2.0}};
        j["logsobolev"] = {{"t", 1.0}, {"budget", 20000}};
        j["checks"] = {"LOGSOBOLEV_EXTREMAL", "FIRST_DISSIPATION"};
        return j;
    }
    throw ConfigError("unknown built-in scenario: " + name);
}

inline std::string describe_check(const std::string& id) {
    if (id == "SOLITON_CONSTANT")
        return "SOLITON_CONSTANT (identity): the scalar-curvature W-entropy of the shrinking "
               "round sphere is constant in backward time";
    if (id == "MEASURE_INVARIANCE")
        return "MEASURE_INVARIANCE (identity): the weighted measure of a conjugate flow is "
               "frozen in time";
    if (id == "SUPER_RICCI_DEFECT")
        return "SUPER_RICCI_DEFECT (inequality): (1/2) dg/dt + Ric_{N,1} >= K g on the unit "
               "direction, sampled in time";
    if (id == "LOGSOBOLEV_EXTREMAL")
        return "LOGSOBOLEV_EXTREMAL (identity): the optimal log-Sobolev constant vanishes on "
               "the flat line and the extremal satisfies its Euler-Lagrange equation";
    const CheckInfo* info = find_check(id);
    if (!info) throw ConfigError("unknown check id: " + id);
    std::ostringstream os;
    os << info->id << " (" << kind_name(info->kind) << "): " << info->anchor;
    return os.str();
}

}  // namespace wlab
