#include "optomech/config.hpp"

#include "optomech/drive_engineering.hpp"
#include "optomech/error.hpp"
#include "optomech/first_moments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace optomech {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorKind::InvalidConfig, message); }

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) bad(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad("unknown key \"" + key + "\" in " + std::string(where));
        }
    }
}

double number(const json& obj, std::string_view key, std::string_view where) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_number()) bad(std::string(where) + "." + std::string(key) + " must be a number");
    return v.get<double>();
}

void read_number(const json& obj, std::string_view key, std::string_view where, double& out) {
    if (obj.contains(std::string(key))) out = number(obj, key, where);
}

std::size_t count(const json& obj, std::string_view key, std::string_view where) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        bad(std::string(where) + "." + std::string(key) + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

const std::vector<std::pair<Output, std::string_view>> output_names = {
    {Output::first_moments, "first_moments"}, {Output::cm, "cm"},           {Output::EN, "EN"},
    {Output::variance, "variance"},           {Output::neff, "neff"},       {Output::squeezing, "squeezing"},
    {Output::wigner, "wigner"},               {Output::stability, "stability"},
};

const std::vector<std::pair<MomentSourceKind, std::string_view>> source_names = {
    {MomentSourceKind::trajectory, "trajectory"},
    {MomentSourceKind::floquet, "floquet"},
    {MomentSourceKind::engineered, "engineered"},
};

void parse_params(const json& j, ExperimentConfig& cfg) {
    check_keys(j, "params",
               {"omega_m", "delta_a", "kappa", "gamma_m", "g", "delta_c", "gamma_a", "G0", "g0_collective", "n_th",
                "Delta_a"});
    auto& p = cfg.params;
    read_number(j, "omega_m", "params", p.omega_m);
    read_number(j, "delta_a", "params", p.delta_a);
    read_number(j, "kappa", "params", p.kappa);
    read_number(j, "gamma_m", "params", p.gamma_m);
    read_number(j, "g", "params", p.g);
    read_number(j, "delta_c", "params", p.delta_c);
    read_number(j, "gamma_a", "params", p.gamma_a);
    read_number(j, "g0_collective", "params", p.g0_collective);
    read_number(j, "G0", "params", p.g0_collective);
    read_number(j, "n_th", "params", p.n_th);
    if (j.contains("Delta_a")) cfg.effective_detuning = number(j, "Delta_a", "params");
    if (j.contains("Delta_a") && j.contains("delta_a")) bad("params: give either delta_a or Delta_a, not both");
}

DriveSpec parse_drive(const json& j) {
    check_keys(j, "drive", {"Omega", "components", "max_harmonic"});
    DriveSpec d;
    read_number(j, "Omega", "drive", d.big_omega);
    if (j.contains("max_harmonic")) d.max_harmonic = static_cast<int>(count(j, "max_harmonic", "drive"));
    if (j.contains("components")) {
        if (!j.at("components").is_array()) bad("drive.components must be an array");
        for (const auto& c : j.at("components")) {
            check_keys(c, "drive.components[]", {"n", "re", "im"});
            if (!c.contains("n") || !c.at("n").is_number_integer()) bad("drive component needs an integer \"n\"");
            const int n = c.at("n").get<int>();
            double re = 0.0, im = 0.0;
            read_number(c, "re", "drive.components[]", re);
            read_number(c, "im", "drive.components[]", im);
            if (d.components.count(n) != 0) bad("drive component n = " + std::to_string(n) + " given twice");
            d.components[n] = {re, im};
        }
    }
    return d;
}

void parse_engineered(const json& j, ExperimentConfig& cfg) {
    check_keys(j, "engineered", {"G1", "G2", "Omega", "synthesis"});
    EngineeredCoupling e;
    e.g1 = number(j, "G1", "engineered");
    e.g2 = number(j, "G2", "engineered");
    e.big_omega = number(j, "Omega", "engineered");
    if (j.contains("synthesis")) {
        const auto s = j.at("synthesis").get<std::string>();
        if (s == "exact") {
            cfg.exact_synthesis = true;
        } else if (s != "components") {
            bad("engineered.synthesis must be \"components\" or \"exact\"");
        }
    }
    if (e.g1 < 0.0 || e.g2 < 0.0) bad("engineered: G1 and G2 must be non-negative");
    cfg.engineered = e;
}

void parse_init(const json& j, ExperimentConfig& cfg) {
    check_keys(j, "init", {"moments", "cm"});
    if (j.contains("moments")) {
        const auto& m = j.at("moments");
        check_keys(m, "init.moments", {"q", "p", "re_a", "im_a", "re_c", "im_c"});
        double re_a = 0.0, im_a = 0.0, re_c = 0.0, im_c = 0.0;
        read_number(m, "q", "init.moments", cfg.init_moments.q);
        read_number(m, "p", "init.moments", cfg.init_moments.p);
        read_number(m, "re_a", "init.moments", re_a);
        read_number(m, "im_a", "init.moments", im_a);
        read_number(m, "re_c", "init.moments", re_c);
        read_number(m, "im_c", "init.moments", im_c);
        cfg.init_moments.a = {re_a, im_a};
        cfg.init_moments.c = {re_c, im_c};
        cfg.init_moments_given = true;
    }
    if (j.contains("cm")) {
        const auto& c = j.at("cm");
        if (c.is_string()) {
            const auto s = c.get<std::string>();
            if (s == "vacuum") {
                cfg.init_cm = CovarianceMatrix::vacuum();
            } else if (s != "thermal") {
                bad("init.cm must be \"thermal\", \"vacuum\" or a 6x6 array");
            }
        } else {
            if (!c.is_array() || c.size() != 6) bad("init.cm must be a 6x6 array");
            CovarianceMatrix v;
            for (int r = 0; r < 6; ++r) {
                const auto& row = c.at(static_cast<std::size_t>(r));
                if (!row.is_array() || row.size() != 6) bad("init.cm must be a 6x6 array");
                for (int k = 0; k < 6; ++k) v.v(r, k) = row.at(static_cast<std::size_t>(k)).get<double>();
            }
            if (v.asymmetry() > 1e-12) bad("init.cm must be symmetric");
            cfg.init_cm = v;
        }
    }
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.drive && cfg.engineered) bad("give exactly one of \"drive\" and \"engineered\"");
    if (!cfg.drive && !cfg.engineered) bad("missing drive: give \"drive\" or \"engineered\"");

    const ValidationReport report =
        cfg.drive ? validate_params(cfg.params, *cfg.drive) : validate_params(cfg.params);
    if (!report.ok()) {
        std::ostringstream os;
        os << "invalid parameters:";
        for (const auto& v : report.violations) os << ' ' << v << ';';
        bad(os.str());
    }
    if (cfg.engineered) {
        if (!(cfg.engineered->big_omega > 0.0)) bad("engineered.Omega must be positive");
        if (!(cfg.params.g > 0.0)) bad("an engineered coupling needs g > 0");
    }
    if (cfg.effective_detuning && cfg.modulated()) bad("params.Delta_a can only be prescribed for a constant drive");
    if (cfg.mode == RunMode::steady_state && cfg.modulated()) bad("steady_state mode needs a constant drive");
    if (cfg.source == MomentSourceKind::floquet && !cfg.modulated()) bad("the floquet source needs Omega > 0");
    if (cfg.source == MomentSourceKind::engineered && !cfg.engineered) bad("the engineered source needs \"engineered\"");
    if (cfg.effective_detuning && cfg.mode == RunMode::dynamics && cfg.source != MomentSourceKind::trajectory) {
        bad("params.Delta_a needs the trajectory source");
    }
    if (cfg.mode == RunMode::dynamics && !(cfg.t_end() > 0.0)) bad("horizon must be positive");
    if (!(cfg.period > 0.0)) bad("period must be positive");
    if (cfg.samples_per_period == 0) bad("samples_per_period must be positive");
    if (cfg.stability_samples == 0) bad("stability.samples_per_period must be positive");
    if (cfg.j_max < 0 || cfg.n_max < 1) bad("floquet needs j_max >= 0 and n_max >= 1");
    if (cfg.wigner_grid.points < 2) bad("wigner.points must be at least 2");
    if (!(cfg.wigner_grid.half_width_sigmas > 0.0)) bad("wigner.half_width_sigmas must be positive");
    if (cfg.mode == RunMode::dynamics) {
        const auto w = cfg.window();
        if (!(w[0] >= 0.0) || !(w[1] >= w[0]) || w[1] > cfg.t_end() * (1.0 + 1e-12)) {
            bad("window_periods must lie inside [0, horizon]");
        }
        for (double t : cfg.wigner_times) {
            if (t < 0.0 || t * cfg.tau() > cfg.t_end() * (1.0 + 1e-12)) bad("wigner times must lie inside the horizon");
        }
    }
    if (cfg.sweep.size() > 2) bad("at most two sweep axes");
    for (const auto& axis : cfg.sweep) {
        const auto& names = sweepable_fields();
        if (std::find(names.begin(), names.end(), axis.name) == names.end()) {
            bad("sweep axis \"" + axis.name + "\" is not a sweepable field");
        }
        if (axis.points == 0) bad("sweep axis \"" + axis.name + "\" needs at least one point");
    }
    if (cfg.sweep.size() == 2 && cfg.sweep[0].name == cfg.sweep[1].name) bad("sweep axes must differ");
    try {
        cfg.stepper().validate();
    } catch (const Error& e) {
        bad(std::string("numerics: ") + e.what());
    }
}

}  // namespace

std::string_view to_string(Output o) {
    for (const auto& [value, name] : output_names) {
        if (value == o) return name;
    }
    return "unknown";
}

std::string_view to_string(MomentSourceKind k) {
    for (const auto& [value, name] : source_names) {
        if (value == k) return name;
    }
    return "unknown";
}

std::vector<double> SweepAxis::values() const {
    if (points == 1) return {min};
    return uniform_grid(min, max, points);
}

const std::vector<std::string>& sweepable_fields() {
    static const std::vector<std::string> names = {"E",       "E0",      "E1",    "G0",      "n_th",
                                                   "kappa",   "delta_a", "Delta_a", "gamma_m", "gamma_a",
                                                   "delta_c", "g",       "Omega", "G1",      "G2"};
    return names;
}

bool ExperimentConfig::wants(Output o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }

bool ExperimentConfig::modulated() const {
    if (engineered) return true;
    return drive && drive->big_omega > 0.0;
}

double ExperimentConfig::tau() const {
    if (engineered) return engineered->period();
    if (drive && drive->big_omega > 0.0) return drive->period();
    return period;
}

double ExperimentConfig::t_end() const { return horizon ? *horizon : horizon_periods * tau(); }

std::array<double, 2> ExperimentConfig::window() const {
    if (window_periods) return {(*window_periods)[0] * tau(), (*window_periods)[1] * tau()};
    const double end = t_end();
    return {std::max(0.0, end - 2.0 * tau()), end};
}

DriveSpec ExperimentConfig::resolved_drive() const {
    if (drive) return *drive;
    return modulation_components(params, *engineered);
}

DriveSignal ExperimentConfig::drive_signal() const {
    if (engineered && exact_synthesis) return exact_drive(resolved_params(), *engineered);
    return as_signal(resolved_drive());
}

StepperConfig ExperimentConfig::stepper() const {
    StepperConfig cfg = numerics;
    if (!max_step_given && modulated()) cfg.max_step = StepperConfig::for_period(tau()).max_step;
    return cfg;
}

FirstMoments ExperimentConfig::initial_moments() const {
    if (init_moments_given) return init_moments;
    FirstMoments m;
    // The exact synthesis reproduces the transient solution, which starts from the target field.
    if (engineered && exact_synthesis) m.a = engineered->value(0.0) / (std::sqrt(2.0) * params.g);
    return m;
}

CovarianceMatrix ExperimentConfig::initial_cm() const {
    return init_cm ? *init_cm : CovarianceMatrix::initial(params);
}

SystemParams ExperimentConfig::resolved_params() const {
    if (!effective_detuning) return params;
    return steady_state_for_detuning(params, resolved_drive().component(0), *effective_detuning).params;
}

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc, "config",
               {"name", "description", "params", "drive", "engineered", "mode", "first_moment_source",
                "horizon_periods", "horizon", "period", "window_periods", "samples_per_period", "outputs", "sweep",
                "numerics", "floquet", "init", "wigner", "stability"});
    ExperimentConfig cfg;
    try {
        if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();
        if (doc.contains("params")) parse_params(doc.at("params"), cfg);
        if (doc.contains("drive")) cfg.drive = parse_drive(doc.at("drive"));
        if (doc.contains("engineered")) parse_engineered(doc.at("engineered"), cfg);
        if (doc.contains("mode")) {
            const auto m = doc.at("mode").get<std::string>();
            if (m == "dynamics") {
                cfg.mode = RunMode::dynamics;
            } else if (m == "steady_state") {
                cfg.mode = RunMode::steady_state;
            } else {
                bad("mode must be \"dynamics\" or \"steady_state\"");
            }
        }
        if (doc.contains("first_moment_source")) {
            const auto s = doc.at("first_moment_source").get<std::string>();
            auto it = std::find_if(source_names.begin(), source_names.end(), [&](auto& e) { return e.second == s; });
            if (it == source_names.end()) bad("unknown first_moment_source \"" + s + "\"");
            cfg.source = it->first;
        }
        read_number(doc, "horizon_periods", "config", cfg.horizon_periods);
        if (doc.contains("horizon")) cfg.horizon = number(doc, "horizon", "config");
        read_number(doc, "period", "config", cfg.period);
        if (doc.contains("window_periods")) {
            const auto& w = doc.at("window_periods");
            if (!w.is_array() || w.size() != 2) bad("window_periods must be [start, end]");
            cfg.window_periods = std::array<double, 2>{w.at(0).get<double>(), w.at(1).get<double>()};
        }
        if (doc.contains("samples_per_period")) cfg.samples_per_period = count(doc, "samples_per_period", "config");
        if (doc.contains("outputs")) {
            if (!doc.at("outputs").is_array()) bad("outputs must be an array");
            for (const auto& o : doc.at("outputs")) {
                const auto s = o.get<std::string>();
                auto it = std::find_if(output_names.begin(), output_names.end(), [&](auto& e) { return e.second == s; });
                if (it == output_names.end()) bad("unknown output \"" + s + "\"");
                if (!cfg.wants(it->first)) cfg.outputs.push_back(it->first);
            }
        }
        if (doc.contains("sweep")) {
            const json& axes = doc.at("sweep").is_object() ? doc.at("sweep").at("axes") : doc.at("sweep");
            if (!axes.is_array()) bad("sweep must be an array of axes");
            for (const auto& a : axes) {
                check_keys(a, "sweep axis", {"name", "min", "max", "points"});
                SweepAxis axis;
                axis.name = a.at("name").get<std::string>();
                axis.min = number(a, "min", "sweep axis");
                axis.max = a.contains("max") ? number(a, "max", "sweep axis") : axis.min;
                axis.points = a.contains("points") ? count(a, "points", "sweep axis") : 1;
                cfg.sweep.push_back(axis);
            }
        }
        if (doc.contains("numerics")) {
            const auto& n = doc.at("numerics");
            check_keys(n, "numerics", {"rel_tol", "abs_tol", "max_step", "overflow_guard", "initial_step"});
            read_number(n, "rel_tol", "numerics", cfg.numerics.rel_tol);
            read_number(n, "abs_tol", "numerics", cfg.numerics.abs_tol);
            read_number(n, "overflow_guard", "numerics", cfg.numerics.overflow_guard);
            read_number(n, "initial_step", "numerics", cfg.numerics.initial_step);
            if (n.contains("max_step")) {
                cfg.numerics.max_step = number(n, "max_step", "numerics");
                cfg.max_step_given = true;
            }
        }
        if (doc.contains("floquet")) {
            const auto& f = doc.at("floquet");
            check_keys(f, "floquet", {"j_max", "n_max"});
            if (f.contains("j_max")) cfg.j_max = static_cast<int>(count(f, "j_max", "floquet"));
            if (f.contains("n_max")) cfg.n_max = static_cast<int>(count(f, "n_max", "floquet"));
        }
        if (doc.contains("init")) parse_init(doc.at("init"), cfg);
        if (doc.contains("wigner")) {
            const auto& w = doc.at("wigner");
            check_keys(w, "wigner", {"half_width_sigmas", "points", "times_periods"});
            read_number(w, "half_width_sigmas", "wigner", cfg.wigner_grid.half_width_sigmas);
            if (w.contains("points")) cfg.wigner_grid.points = count(w, "points", "wigner");
            if (w.contains("times_periods")) cfg.wigner_times = w.at("times_periods").get<std::vector<double>>();
        }
        if (doc.contains("stability")) {
            const auto& s = doc.at("stability");
            check_keys(s, "stability", {"samples_per_period"});
            if (s.contains("samples_per_period")) cfg.stability_samples = count(s, "samples_per_period", "stability");
        }
    } catch (const json::exception& e) {
        bad(std::string("malformed config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        bad("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json drive_to_json(const DriveSpec& drive) {
    json comps = json::array();
    // Highest harmonic first, matching the way the synthesis lists them.
    for (auto it = drive.components.rbegin(); it != drive.components.rend(); ++it) {
        comps.push_back({{"n", it->first}, {"re", it->second.real()}, {"im", it->second.imag()}});
    }
    return {{"Omega", drive.big_omega}, {"components", comps}};
}

json to_json(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    json params = {{"omega_m", p.omega_m}, {"delta_a", p.delta_a},       {"kappa", p.kappa},
                   {"gamma_m", p.gamma_m}, {"g", p.g},                   {"delta_c", p.delta_c},
                   {"gamma_a", p.gamma_a}, {"G0", p.g0_collective},      {"n_th", p.n_th}};
    json doc;
    doc["name"] = cfg.name;
    if (cfg.effective_detuning) {
        params.erase("delta_a");
        params["Delta_a"] = *cfg.effective_detuning;
    }
    doc["params"] = params;
    if (cfg.drive) doc["drive"] = drive_to_json(*cfg.drive);
    if (cfg.engineered) {
        doc["engineered"] = {{"G1", cfg.engineered->g1},
                             {"G2", cfg.engineered->g2},
                             {"Omega", cfg.engineered->big_omega},
                             {"synthesis", cfg.exact_synthesis ? "exact" : "components"}};
    }
    doc["mode"] = cfg.mode == RunMode::dynamics ? "dynamics" : "steady_state";
    doc["first_moment_source"] = std::string(to_string(cfg.source));
    doc["horizon_periods"] = cfg.horizon_periods;
    if (cfg.horizon) doc["horizon"] = *cfg.horizon;
    doc["period"] = cfg.period;
    if (cfg.mode == RunMode::dynamics) {
        const auto w = cfg.window();
        doc["window_periods"] = {w[0] / cfg.tau(), w[1] / cfg.tau()};
    }
    doc["samples_per_period"] = cfg.samples_per_period;
    json outputs = json::array();
    for (auto o : cfg.outputs) outputs.push_back(std::string(to_string(o)));
    doc["outputs"] = outputs;
    json sweep = json::array();
    for (const auto& a : cfg.sweep) sweep.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"points", a.points}});
    doc["sweep"] = sweep;
    // Derived defaults (max_step, initial state) stay implicit so that a reparsed
    // document still tracks later parameter changes.
    doc["numerics"] = {{"rel_tol", cfg.numerics.rel_tol},
                       {"abs_tol", cfg.numerics.abs_tol},
                       {"overflow_guard", cfg.numerics.overflow_guard},
                       {"initial_step", cfg.numerics.initial_step}};
    if (cfg.max_step_given) doc["numerics"]["max_step"] = cfg.numerics.max_step;
    doc["floquet"] = {{"j_max", cfg.j_max}, {"n_max", cfg.n_max}};
    json init = json::object();
    if (cfg.init_moments_given) {
        const FirstMoments& m = cfg.init_moments;
        init["moments"] = {{"q", m.q},           {"p", m.p},           {"re_a", m.a.real()},
                           {"im_a", m.a.imag()}, {"re_c", m.c.real()}, {"im_c", m.c.imag()}};
    }
    if (cfg.init_cm) {
        json cm = json::array();
        for (int r = 0; r < 6; ++r) {
            json row = json::array();
            for (int k = 0; k < 6; ++k) row.push_back(cfg.init_cm->v(r, k));
            cm.push_back(row);
        }
        init["cm"] = cm;
    } else {
        init["cm"] = "thermal";
    }
    doc["init"] = init;
    doc["wigner"] = {{"half_width_sigmas", cfg.wigner_grid.half_width_sigmas},
                     {"points", cfg.wigner_grid.points},
                     {"times_periods", cfg.wigner_times}};
    doc["stability"] = {{"samples_per_period", cfg.stability_samples}};
    return doc;
}

void apply_field(ExperimentConfig& cfg, std::string_view name, double value) {
    auto& p = cfg.params;
    auto need_drive = [&]() -> DriveSpec& {
        if (!cfg.drive) bad("sweep axis \"" + std::string(name) + "\" needs an explicit drive");
        return *cfg.drive;
    };
    auto need_target = [&]() -> EngineeredCoupling& {
        if (!cfg.engineered) bad("sweep axis \"" + std::string(name) + "\" needs an engineered coupling");
        return *cfg.engineered;
    };
    if (name == "E" || name == "E0") {
        need_drive().components[0] = value;
    } else if (name == "E1") {
        auto& d = need_drive();
        d.components[1] = value;
        d.components[-1] = value;
    } else if (name == "G0") {
        p.g0_collective = value;
    } else if (name == "n_th") {
        p.n_th = value;
    } else if (name == "kappa") {
        p.kappa = value;
    } else if (name == "delta_a") {
        p.delta_a = value;
        cfg.effective_detuning.reset();
    } else if (name == "Delta_a") {
        cfg.effective_detuning = value;
    } else if (name == "gamma_m") {
        p.gamma_m = value;
    } else if (name == "gamma_a") {
        p.gamma_a = value;
    } else if (name == "delta_c") {
        p.delta_c = value;
    } else if (name == "g") {
        p.g = value;
    } else if (name == "Omega") {
        if (cfg.engineered) {
            cfg.engineered->big_omega = value;
        } else {
            need_drive().big_omega = value;
        }
    } else if (name == "G1") {
        need_target().g1 = value;
    } else if (name == "G2") {
        need_target().g2 = value;
    } else {
        bad("unknown sweep field \"" + std::string(name) + "\"");
    }
}

}  // namespace optomech
