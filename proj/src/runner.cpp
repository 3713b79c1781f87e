#include "optomech/runner.hpp"

#include "optomech/csv.hpp"
#include "optomech/drive_engineering.hpp"
#include "optomech/error.hpp"
#include "optomech/floquet.hpp"
#include "optomech/measures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#ifndef OPTOMECH_VERSION
#define OPTOMECH_VERSION "unknown"
#endif

namespace optomech {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

AnalyticMoments analytic_source(const ExperimentConfig& cfg, const SystemParams& params) {
    if (cfg.source == MomentSourceKind::floquet) {
        auto sol = std::make_shared<FloquetSolution>(floquet_recurse(params, cfg.resolved_drive(), cfg.j_max, cfg.n_max));
        const double g = params.g;
        return [sol, g](double t) { return evaluate_floquet(*sol, g, t); };
    }
    const EngineeredCoupling target = *cfg.engineered;
    const LaplaceCoefficients lc = laplace_coefficients(params, target);
    return [params, lc, target](double t) { return transient_first_moments(params, lc, target, t); };
}

std::vector<double> final_period_times(const ExperimentConfig& cfg) {
    const double end = cfg.t_end();
    const double tau = std::min(cfg.tau(), end);
    std::vector<double> times(cfg.stability_samples);
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = end - tau + tau * static_cast<double>(i) / static_cast<double>(times.size());
    }
    return times;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    return out;
}

void write_measures_header(std::ostream& os) { write_csv_header(os, "t,EN,v11,v22,neff,r_db"); }

void write_measures_row(std::ostream& os, const MeasureRow& r) {
    write_csv_row(os, {r.t, r.en, r.v11, r.v22, r.neff, r.r_db});
}

void write_squeezing_header(std::ostream& os) { write_csv_header(os, "t,lambda,r_raw,r_db,phase"); }

void write_squeezing_row(std::ostream& os, double t, const CovarianceMatrix& v) {
    const Mat2 block = mechanical_block(v);
    const SqueezingReading s = squeezing_parameter(block);
    write_csv_row(os, {t, s.lambda, s.r_raw, s.r_db, squeezing_phase(block)});
}

void write_stability_csv(std::ostream& os, const StabilityReport& r) {
    write_csv_header(os, "stable,margin,worst_t,samples");
    write_csv_row(os, {r.stable ? 1.0 : 0.0, r.margin, r.worst_time, static_cast<double>(r.samples)});
}

bool wants_covariance(const ExperimentConfig& cfg) {
    for (auto o : {Output::cm, Output::EN, Output::variance, Output::neff, Output::squeezing, Output::wigner}) {
        if (cfg.wants(o)) return true;
    }
    return false;
}

bool wants_measures(const ExperimentConfig& cfg) {
    return cfg.wants(Output::EN) || cfg.wants(Output::variance) || cfg.wants(Output::neff) ||
           cfg.wants(Output::squeezing);
}

SweepCell evaluate_cell(const ExperimentConfig& base, const std::vector<double>& values) {
    SweepCell cell;
    cell.values = values;
    cell.en = nan;
    cell.margin = nan;
    cell.min_symplectic = nan;
    try {
        ExperimentConfig cfg = base;
        cfg.sweep.clear();
        for (std::size_t i = 0; i < values.size(); ++i) apply_field(cfg, base.sweep[i].name, values[i]);
        cfg = parse_config(to_json(cfg));  // re-validate the modified configuration

        if (cfg.mode == RunMode::steady_state) {
            const SteadyRun run = steady_run(cfg);
            cell.margin = run.stability.margin;
            if (!run.stability.stable) {
                cell.status = "unstable";
                return cell;
            }
            cell.min_symplectic = symplectic_eigenvalues(run.cm->v).front();
            cell.en = log_negativity(reduce_atom_mirror(*run.cm));
            cell.status = "stable";
            return cell;
        }

        const Simulation sim = simulate(cfg, {true, true, {}});
        cell.margin = sim.stability->margin;
        if (!sim.stability->stable) {
            cell.status = "unstable";
            return cell;
        }
        double en = 0.0;
        double nu = std::numeric_limits<double>::infinity();
        for (const auto& v : sim.cm) {
            en = std::max(en, log_negativity(reduce_atom_mirror(v)));
            nu = std::min(nu, symplectic_eigenvalues(v.v).front());
        }
        cell.en = en;
        cell.min_symplectic = nu;
        cell.status = "stable";
    } catch (const Error& e) {
        const bool dynamical = e.kind() == ErrorKind::Diverged || e.kind() == ErrorKind::StepFailure ||
                               e.kind() == ErrorKind::NotStable;
        cell.status = dynamical ? "unstable" : "error";
        cell.en = nan;
        cell.message = e.what();
    } catch (const std::exception& e) {
        cell.status = "error";
        cell.en = nan;
        cell.message = e.what();
    }
    return cell;
}

}  // namespace

std::string_view version() { return OPTOMECH_VERSION; }

std::vector<double> output_grid(const ExperimentConfig& cfg) {
    const auto w = cfg.window();
    const double span = (w[1] - w[0]) / cfg.tau();
    const auto n = static_cast<std::size_t>(std::llround(span * static_cast<double>(cfg.samples_per_period))) + 1;
    if (w[1] == w[0]) return {w[0]};
    return uniform_grid(w[0], w[1], std::max<std::size_t>(n, 2));
}

Simulation simulate(const ExperimentConfig& cfg, const SimulationRequest& request) {
    if (cfg.mode != RunMode::dynamics) throw Error(ErrorKind::InvalidArgument, "simulate: configuration is not dynamic");
    Simulation sim;
    sim.params = cfg.resolved_params();
    sim.t = output_grid(cfg);
    sim.extra_t = request.extra_times;
    std::sort(sim.extra_t.begin(), sim.extra_t.end());
    const std::vector<double> stab_t = request.stability ? final_period_times(cfg) : std::vector<double>{};

    std::vector<double> all;
    all.insert(all.end(), sim.t.begin(), sim.t.end());
    all.insert(all.end(), sim.extra_t.begin(), sim.extra_t.end());
    all.insert(all.end(), stab_t.begin(), stab_t.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::map<double, CovarianceSample> by_time;
    const double t_end = cfg.t_end();
    const StepperConfig stepper = cfg.stepper();
    if (request.covariance) {
        MomentSource source = cfg.source == MomentSourceKind::trajectory
                                  ? MomentSource{IntegratedMoments{cfg.drive_signal(), cfg.initial_moments()}}
                                  : MomentSource{analytic_source(cfg, sim.params)};
        integrate_lyapunov(sim.params, source, cfg.initial_cm(), t_end, all, stepper,
                           [&](const CovarianceSample& s) { by_time.emplace(s.t, s); });
    } else if (cfg.source == MomentSourceKind::trajectory) {
        for (const auto& s :
             integrate_first_moments(sim.params, cfg.drive_signal(), cfg.initial_moments(), t_end, all, stepper)) {
            by_time.emplace(s.t, CovarianceSample{s.t, {}, s.state});
        }
    } else {
        const AnalyticMoments m = analytic_source(cfg, sim.params);
        for (double t : all) by_time.emplace(t, CovarianceSample{t, {}, m(t)});
    }

    for (double t : sim.t) {
        const auto& s = by_time.at(t);
        sim.moments.push_back(s.moments);
        if (request.covariance) sim.cm.push_back(s.v);
    }
    for (double t : sim.extra_t) {
        const auto& s = by_time.at(t);
        sim.extra_moments.push_back(s.moments);
        if (request.covariance) sim.extra_cm.push_back(s.v);
    }
    if (request.stability) {
        std::vector<FirstMoments> m;
        for (double t : stab_t) m.push_back(by_time.at(t).moments);
        sim.stability = stability_check(sim.params, stab_t, m);
    }
    return sim;
}

SteadyRun steady_run(const ExperimentConfig& cfg) {
    if (cfg.modulated()) throw Error(ErrorKind::InvalidArgument, "steady_run: drive is modulated");
    SteadyRun run;
    const cplx e0 = cfg.resolved_drive().component(0);
    if (cfg.effective_detuning) {
        auto r = steady_state_for_detuning(cfg.params, e0, *cfg.effective_detuning);
        run.params = r.params;
        run.state = r.state;
    } else {
        run.params = cfg.params;
        run.state = steady_state(cfg.params, e0, cfg.stepper());
    }
    const std::vector<double> t{0.0};
    const std::vector<FirstMoments> m{run.state.moments};
    run.stability = stability_check(run.params, t, m);
    if (run.stability.stable) {
        run.cm = steady_state_lyapunov(build_drift(run.params, run.state.moments.q, run.state.moments.a),
                                       build_diffusion(run.params));
    }
    return run;
}

MeasureRow measure(double t, const CovarianceMatrix& v) {
    MeasureRow r;
    r.t = t;
    r.en = log_negativity(reduce_atom_mirror(v));
    r.v11 = position_variance(v).value;
    r.v22 = momentum_variance(v).value;
    r.neff = mean_phonon_number(v);
    r.r_db = squeezing_parameter(mechanical_block(v)).r_db;
    return r;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, unsigned jobs) {
    if (cfg.sweep.empty()) throw Error(ErrorKind::InvalidConfig, "configuration has no sweep axes");
    std::vector<std::vector<double>> points;
    const auto first = cfg.sweep[0].values();
    if (cfg.sweep.size() == 1) {
        for (double x : first) points.push_back({x});
    } else {
        const auto second = cfg.sweep[1].values();
        for (double x : first) {
            for (double y : second) points.push_back({x, y});
        }
    }

    std::vector<SweepCell> cells(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) cells[i] = evaluate_cell(cfg, points[i]);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return cells;
}

void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, std::span<const SweepCell> cells) {
    std::string header;
    for (const auto& axis : cfg.sweep) header += axis.name + ",";
    header += "status,EN";
    write_csv_header(os, header);
    for (const auto& cell : cells) {
        for (double v : cell.values) os << format_number(v) << ',';
        os << cell.status << ',' << format_number(cell.en) << '\n';
    }
}

StabilityReport check_stability(const ExperimentConfig& cfg) {
    if (cfg.mode == RunMode::steady_state) return steady_run(cfg).stability;
    if (cfg.source == MomentSourceKind::trajectory) {
        ExperimentConfig quiet = cfg;
        quiet.window_periods = std::array<double, 2>{cfg.t_end() / cfg.tau(), cfg.t_end() / cfg.tau()};
        return *simulate(quiet, {false, true, {}}).stability;
    }
    const SystemParams params = cfg.resolved_params();
    return stability_check(params, analytic_source(cfg, params), cfg.t_end() - cfg.tau(), cfg.tau(),
                           cfg.stability_samples);
}

SourceComparison compare_sources(const ExperimentConfig& cfg) {
    if (!cfg.modulated()) throw Error(ErrorKind::InvalidArgument, "compare_sources needs Omega > 0");
    const double tau = cfg.tau();
    const double end = cfg.t_end();
    const double start = std::max(0.0, end - 2.0 * tau);
    const auto n = static_cast<std::size_t>(std::llround((end - start) / tau * static_cast<double>(cfg.samples_per_period))) + 1;
    const auto times = uniform_grid(start, end, std::max<std::size_t>(n, 2));

    const SystemParams params = cfg.resolved_params();
    const auto ode = integrate_first_moments(params, cfg.drive_signal(), cfg.initial_moments(), end, times, cfg.stepper());
    const FloquetSolution sol = floquet_recurse(params, cfg.resolved_drive(), cfg.j_max, cfg.n_max);

    double dq = 0.0, dp = 0.0, da = 0.0, dc = 0.0;
    double sq = 0.0, sp = 0.0, sa = 0.0, sc = 0.0;
    for (const auto& s : ode) {
        const FirstMoments f = evaluate_floquet(sol, params.g, s.t);
        dq = std::max(dq, std::abs(s.state.q - f.q));
        dp = std::max(dp, std::abs(s.state.p - f.p));
        da = std::max(da, std::abs(s.state.a - f.a));
        dc = std::max(dc, std::abs(s.state.c - f.c));
        sq = std::max(sq, std::abs(s.state.q));
        sp = std::max(sp, std::abs(s.state.p));
        sa = std::max(sa, std::abs(s.state.a));
        sc = std::max(sc, std::abs(s.state.c));
    }
    auto ratio = [](double diff, double scale) { return scale > 0.0 ? diff / scale : diff; };
    return {ratio(dq, sq), ratio(dp, sp), ratio(da, sa), ratio(dc, sc), start, end, times.size()};
}

json to_json(const StabilityReport& r) {
    return {{"stable", r.stable}, {"margin", r.margin}, {"worst_time", r.worst_time}, {"samples", r.samples}};
}

json to_json(const SourceComparison& r) {
    return {{"max_rel_deviation", {{"q", r.q}, {"p", r.p}, {"a", r.a}, {"c", r.c}}},
            {"window", {r.window_start, r.window_end}},
            {"samples", r.samples}};
}

std::filesystem::path default_out_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("OPTOMECH_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "out";
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs) {
    std::filesystem::create_directories(out_dir);
    RunResult result;
    json& manifest = result.manifest;
    manifest["name"] = cfg.name;
    manifest["version"] = std::string(version());
    manifest["config"] = to_json(cfg);
    json files = json::array();

    auto add_file = [&](const std::string& name) {
        const auto path = out_dir / name;
        result.files.push_back(path);
        files.push_back(name);
        return open_output(path);
    };
    auto write_manifest = [&] {
        manifest["files"] = files;
        std::ofstream out(out_dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    };

    try {
        if (!cfg.sweep.empty()) {
            const auto cells = run_sweep(cfg, jobs);
            auto out = add_file("sweep.csv");
            write_sweep_csv(out, cfg, cells);
            std::map<std::string, std::size_t> tally;
            for (const auto& c : cells) ++tally[c.status];
            manifest["sweep"] = {{"cells", cells.size()}, {"status_counts", tally}};
        } else if (cfg.mode == RunMode::steady_state) {
            const SteadyRun run = steady_run(cfg);
            manifest["resolved_delta_a"] = run.params.delta_a;
            manifest["stability"] = to_json(run.stability);
            if (cfg.wants(Output::stability)) {
                auto out = add_file("stability.csv");
                write_stability_csv(out, run.stability);
            }
            if (cfg.wants(Output::first_moments)) {
                auto out = add_file("first_moments.csv");
                const TrajectorySample s{0.0, run.state.moments};
                write_trajectory_csv(out, std::span<const TrajectorySample>(&s, 1));
            }
            if (wants_covariance(cfg)) {
                if (!run.cm) throw Error(ErrorKind::NotStable, "steady state is unstable; no covariance matrix");
                const CovarianceMatrix& v = *run.cm;
                if (cfg.wants(Output::cm)) {
                    auto out = add_file("cm.csv");
                    write_covariance_csv_header(out);
                    write_covariance_csv_row(out, 0.0, v);
                }
                if (wants_measures(cfg)) {
                    auto out = add_file("measures.csv");
                    write_measures_header(out);
                    write_measures_row(out, measure(0.0, v));
                }
                if (cfg.wants(Output::squeezing)) {
                    auto out = add_file("squeezing.csv");
                    write_squeezing_header(out);
                    write_squeezing_row(out, 0.0, v);
                }
                if (cfg.wants(Output::wigner)) {
                    auto out = add_file("wigner_0.csv");
                    write_wigner_csv(out, wigner(mechanical_block(v), cfg.wigner_grid));
                }
            }
        } else if (!cfg.outputs.empty()) {
            SimulationRequest request;
            request.covariance = wants_covariance(cfg);
            request.stability = cfg.wants(Output::stability);
            std::vector<double> wigner_periods = cfg.wigner_times;
            if (cfg.wants(Output::wigner) && wigner_periods.empty()) wigner_periods.push_back(cfg.window()[0] / cfg.tau());
            if (cfg.wants(Output::wigner)) {
                std::sort(wigner_periods.begin(), wigner_periods.end());
                wigner_periods.erase(std::unique(wigner_periods.begin(), wigner_periods.end()), wigner_periods.end());
                for (double w : wigner_periods) request.extra_times.push_back(w * cfg.tau());
            }
            const Simulation sim = simulate(cfg, request);
            if (cfg.effective_detuning) manifest["resolved_delta_a"] = sim.params.delta_a;

            if (cfg.wants(Output::first_moments)) {
                auto out = add_file("first_moments.csv");
                std::vector<TrajectorySample> rows;
                for (std::size_t i = 0; i < sim.t.size(); ++i) rows.push_back({sim.t[i], sim.moments[i]});
                write_trajectory_csv(out, rows);
            }
            if (cfg.wants(Output::cm)) {
                auto out = add_file("cm.csv");
                write_covariance_csv_header(out);
                for (std::size_t i = 0; i < sim.t.size(); ++i) write_covariance_csv_row(out, sim.t[i], sim.cm[i]);
            }
            if (wants_measures(cfg)) {
                auto out = add_file("measures.csv");
                write_measures_header(out);
                for (std::size_t i = 0; i < sim.t.size(); ++i) write_measures_row(out, measure(sim.t[i], sim.cm[i]));
            }
            if (cfg.wants(Output::squeezing)) {
                auto out = add_file("squeezing.csv");
                write_squeezing_header(out);
                for (std::size_t i = 0; i < sim.t.size(); ++i) write_squeezing_row(out, sim.t[i], sim.cm[i]);
            }
            if (cfg.wants(Output::wigner)) {
                json slices = json::array();
                for (std::size_t k = 0; k < sim.extra_t.size(); ++k) {
                    const std::string name = "wigner_" + std::to_string(k) + ".csv";
                    auto out = add_file(name);
                    write_wigner_csv(out, wigner(mechanical_block(sim.extra_cm[k]), cfg.wigner_grid));
                    slices.push_back({{"file", name}, {"t", sim.extra_t[k]}, {"t_periods", wigner_periods[k]}});
                }
                manifest["wigner"] = slices;
            }
            if (sim.stability) {
                manifest["stability"] = to_json(*sim.stability);
                auto out = add_file("stability.csv");
                write_stability_csv(out, *sim.stability);
            }
        }
        manifest["status"] = "ok";
    } catch (const Error& e) {
        manifest["status"] = "error";
        manifest["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
        write_manifest();
        throw;
    }
    write_manifest();
    result.files.push_back(out_dir / "manifest.json");
    return result;
}

}  // namespace optomech
