// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "../unit/transcription.hpp"

#include <optomech/config.hpp>
#include <optomech/covariance.hpp>
#include <optomech/drive_engineering.hpp>
#include <optomech/error.hpp>
#include <optomech/first_moments.hpp>
#include <optomech/floquet.hpp>
#include <optomech/measures.hpp>
#include <optomech/runner.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <filesystem>
#include <functional>
#include <numbers>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace optomech;
using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

json recipe(const std::string& name) {
    std::ifstream in(std::filesystem::path(OPTOMECH_RECIPE_DIR) / (name + ".json"));
    return json::parse(in);
}

ExperimentConfig config(json doc, const json& patch = json::object()) {
    doc.merge_patch(patch);
    return parse_config(doc);
}

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return (*hi - *lo) / std::abs(mean);
}

// 1. Floquet series against the integrated trajectory over the final two periods.
Verdict floquet_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const SourceComparison c = compare_sources(config(recipe("fig2")));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {c.a <= 1e-2 && c.c <= 1e-2 && secs <= 30.0,
            fmt("window [%.0f tau, %.0f tau]: dev<a> = %.3e, dev<c> = %.3e (limit 1e-2), %.2f s", c.window_start / pi,
                c.window_end / pi, c.a, c.c, secs)};
}

// 2. The mechanical phase-space loop settles onto a limit cycle.
Verdict limit_cycle() {
    const ExperimentConfig cfg = config(recipe("fig3"), {{"samples_per_period", 512}, {"window_periods", {30, 50}}});
    const Simulation sim = simulate(cfg, {});
    std::vector<std::array<double, 2>> early, late;
    for (std::size_t i = 0; i < sim.t.size(); ++i) {
        const double periods = sim.t[i] / cfg.tau();
        (periods <= 40.0 + 1e-9 ? early : late).push_back({sim.moments[i].q, sim.moments[i].p});
        if (std::abs(periods - 40.0) < 1e-9) late.push_back({sim.moments[i].q, sim.moments[i].p});
    }
    auto dist = [](const auto& a, const auto& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };
    auto directed = [&](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& x : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : to) best = std::min(best, dist(x, y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    const double hausdorff = std::max(directed(early, late), directed(late, early));
    double diameter = 0.0;
    for (const auto& x : late) {
        for (const auto& y : late) diameter = std::max(diameter, dist(x, y));
    }
    const double ratio = hausdorff / diameter;
    return {ratio <= 1e-2, fmt("Hausdorff([30,40] tau, [40,50] tau) = %.4g, diameter %.4g, ratio %.3e (limit 1e-2)",
                               hausdorff, diameter, ratio)};
}

// 3. The four-component drive reproduces the target coupling after the transient.
Verdict drive_engineering() {
    json doc = recipe("fig6");
    doc.erase("init");  // start from rest
    const ExperimentConfig cfg =
        config(doc, {{"horizon_periods", 40}, {"window_periods", {30, 40}}, {"samples_per_period", 256}});
    const Simulation sim = simulate(cfg, {});
    const EngineeredCoupling target = *cfg.engineered;
    double worst = 0.0;
    for (std::size_t i = 0; i < sim.t.size(); ++i) {
        const cplx g = effective_coupling(cfg.params.g, sim.moments[i].a);
        worst = std::max(worst, std::abs(g - target.value(sim.t[i])));
    }
    const double rel = worst / target.g1;
    return {rel <= 2e-2, fmt("max |G_num - G_target| / G1 over [30, 40] tau = %.3e (limit 2e-2)", rel)};
}

struct PeriodicEn {
    double min = 0.0;
    double max = 0.0;
    double mismatch = 0.0;  // max |E_N(t + tau) - E_N(t)| / max E_N
};

PeriodicEn periodic_en(const ExperimentConfig& cfg) {
    const Simulation sim = simulate(cfg, {true, false, {}});
    std::vector<double> en;
    for (const auto& v : sim.cm) en.push_back(log_negativity(reduce_atom_mirror(v)));
    PeriodicEn r;
    r.min = *std::min_element(en.begin(), en.end());
    r.max = *std::max_element(en.begin(), en.end());
    const std::size_t shift = cfg.samples_per_period;
    for (std::size_t i = 0; i + shift < en.size(); ++i) r.mismatch = std::max(r.mismatch, std::abs(en[i + shift] - en[i]));
    r.mismatch /= r.max;
    return r;
}

// 4. Modulated entanglement is periodic and survives a hot mechanical bath.
Verdict entanglement_periodicity() {
    const PeriodicEn cold = periodic_en(config(recipe("fig5a")));
    const PeriodicEn hot = periodic_en(config(recipe("fig5b")));
    const bool pass = cold.min > 0.0 && cold.mismatch <= 1e-3 && hot.max > 0.0;
    return {pass, fmt("n_th=0: E_N in [%.4f, %.4f], period mismatch %.2e (limit 1e-3); n_th=50: max E_N %.4f", cold.min,
                      cold.max, cold.mismatch, hot.max)};
}

double steady_en(const ExperimentConfig& cfg) {
    const SteadyRun run = steady_run(cfg);
    if (!run.cm) return std::numeric_limits<double>::quiet_NaN();
    return log_negativity(reduce_atom_mirror(*run.cm));
}

json fig4_point(double g0, double n_th) {
    json doc = recipe("fig4a");
    doc.erase("sweep");
    doc["params"]["G0"] = g0;
    doc["params"]["n_th"] = n_th;
    return doc;
}

double best_fig4_g0() {
    double best_g0 = 0.0;
    double best = 0.0;
    for (int k = 1; k <= 60; ++k) {
        const double g0 = 0.05 * k;
        const double en = steady_en(parse_config(fig4_point(g0, 0.0)));
        if (en > best) {
            best = en;
            best_g0 = g0;
        }
    }
    return best_g0;
}

// 5. Constant-drive baseline: steady entanglement exists and dies with temperature.
Verdict unmodulated_baseline() {
    const double g0 = best_fig4_g0();
    if (g0 == 0.0) return {false, "no stable G0 with E_N > 0"};
    std::vector<double> en;
    for (int n = 0; n <= 200; ++n) en.push_back(steady_en(parse_config(fig4_point(g0, n))));
    bool monotone = true;
    for (std::size_t i = 1; i < en.size(); ++i) monotone = monotone && en[i] <= en[i - 1] + 1e-12;
    const auto vanish = std::find(en.begin(), en.end(), 0.0);
    const bool vanishes = vanish != en.end() && std::all_of(vanish, en.end(), [](double x) { return x == 0.0; });
    const bool pass = en[0] > 0.0 && monotone && vanishes;
    return {pass, fmt("G0 = %.2f: E_N(n_th=0) = %.4f, E_N(n_th=10) = %.4f, non-increasing: %s, zero from n_th = %ld",
                      g0, en[0], en[10], monotone ? "yes" : "no",
                      vanishes ? static_cast<long>(vanish - en.begin()) : -1L)};
}

// 6. The (E, G0) stability map has one connected unstable region and physical stable cells.
Verdict stability_map() {
    const ExperimentConfig cfg = config(recipe("fig4a"));
    const auto cells = run_sweep(cfg, std::max(1u, std::thread::hardware_concurrency()));
    const std::size_t nx = cfg.sweep[0].points;
    const std::size_t ny = cfg.sweep[1].points;
    std::size_t unstable = 0, errors = 0, unphysical = 0;
    double worst_nu = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
        if (c.status == "unstable") ++unstable;
        if (c.status == "error") ++errors;
        if (c.status == "stable") {
            worst_nu = std::min(worst_nu, c.min_symplectic);
            if (!(c.min_symplectic >= 0.5 - 1e-6)) ++unphysical;
        }
    }
    std::vector<int> label(cells.size(), -1);
    int regions = 0;
    for (std::size_t s = 0; s < cells.size(); ++s) {
        if (cells[s].status != "unstable" || label[s] >= 0) continue;
        std::queue<std::size_t> todo;
        todo.push(s);
        label[s] = regions;
        while (!todo.empty()) {
            const std::size_t k = todo.front();
            todo.pop();
            const std::size_t i = k / ny, j = k % ny;
            auto visit = [&](std::size_t ii, std::size_t jj) {
                const std::size_t n = ii * ny + jj;
                if (cells[n].status == "unstable" && label[n] < 0) {
                    label[n] = regions;
                    todo.push(n);
                }
            };
            if (i > 0) visit(i - 1, j);
            if (i + 1 < nx) visit(i + 1, j);
            if (j > 0) visit(i, j - 1);
            if (j + 1 < ny) visit(i, j + 1);
        }
        ++regions;
    }
    const bool pass = unstable > 0 && regions == 1 && errors == 0 && unphysical == 0;
    return {pass, fmt("%zu cells, %zu unstable in %d region(s), %zu errors; min symplectic eigenvalue of stable cells "
                      "%.6f (limit 0.5 - 1e-6)",
                      cells.size(), unstable, regions, errors, worst_nu)};
}

struct LateWindow {
    std::vector<double> v11, neff, lambda_min, lambda_max, r_db, phase;
};

LateWindow late_window(const ExperimentConfig& cfg) {
    const Simulation sim = simulate(cfg, {true, false, {}});
    LateWindow w;
    for (const auto& v : sim.cm) {
        w.v11.push_back(v.v(0, 0));
        w.neff.push_back(mean_phonon_number(v));
        const Mat2 block = mechanical_block(v);
        const Eigen::SelfAdjointEigenSolver<Mat2> es(block);
        w.lambda_min.push_back(es.eigenvalues()(0));
        w.lambda_max.push_back(es.eigenvalues()(1));
        w.r_db.push_back(squeezing_parameter(block).r_db);
        w.phase.push_back(squeezing_phase(block));
    }
    return w;
}

struct Fig8Runs {
    LateWindow atoms, control, no_atoms, hot;
    double seconds = 0.0;
};

const Fig8Runs& fig8_runs() {
    static const Fig8Runs runs = [] {
        Fig8Runs r;
        const auto start = std::chrono::steady_clock::now();
        const json base = recipe("fig8a");
        r.atoms = late_window(config(base));
        const double tau = config(base).tau();
        r.control = late_window(config(
            base, {{"drive", {{"Omega", 0}, {"components", {{{"n", 0}, {"re", 12e4}, {"im", 0}}}}}}, {"period", tau}}));
        r.no_atoms = late_window(config(base, {{"params", {{"G0", 0}}}}));
        r.hot = late_window(config(recipe("fig8b")));
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }();
    return runs;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// 7. Periodic squeezing below the vacuum level, absent without modulation or atoms.
Verdict mechanical_squeezing() {
    const Fig8Runs& r = fig8_runs();
    const double v_min = min_of(r.atoms.v11);
    double control_dev = 0.0;
    for (double v : r.control.v11) control_dev = std::max(control_dev, std::abs(v - 0.5) / 0.5);
    const double bare_min = min_of(r.no_atoms.v11);
    const bool pass = v_min < 0.5 && control_dev <= 0.05 && bare_min > 0.5 && r.seconds <= 600.0;
    return {pass, fmt("min V11 = %.4f (< 0.5); Omega=0 control max deviation %.2f%% (<= 5%%); no atoms min V11 = %.3f "
                      "(> 0.5); four 3000-tau runs in %.1f s",
                      v_min, 100.0 * control_dev, bare_min, r.seconds)};
}

// 8. Atom-assisted cooling.
Verdict cooling() {
    const Fig8Runs& r = fig8_runs();
    const double with_atoms = max_of(r.atoms.neff);
    double bare = 0.0;
    for (double n : r.no_atoms.neff) bare += n;
    bare /= static_cast<double>(r.no_atoms.neff.size());
    const double hot = max_of(r.hot.neff);
    const bool pass = with_atoms < 1.0 && bare >= 30.0 && bare <= 50.0 && hot < 1.0;
    return {pass, fmt("late n_eff: atoms max %.4f (< 1); no atoms mean %.2f (in [30, 50]); n_th=100 with atoms max "
                      "%.4f (< 1)",
                      with_atoms, bare, hot)};
}

// 9. Fixed squeezing ellipse whose axis rotates once per modulation period.
Verdict squeezing_rotation() {
    const LateWindow& w = fig8_runs().atoms;
    const double s_min = spread(w.lambda_min);
    const double s_max = spread(w.lambda_max);
    const double s_r = spread(w.r_db);
    // Unwrapped doubled-angle phase; the ellipse is symmetric under a half turn.
    double advance = 0.0;
    for (std::size_t i = 1; i < w.phase.size(); ++i) {
        double d = w.phase[i] - w.phase[i - 1];
        d -= 2.0 * pi * std::round(d / (2.0 * pi));
        advance += d;
    }
    const double periods = 3.0;
    const double per_period = std::abs(advance) / periods;
    const double rel = std::abs(per_period - 2.0 * pi) / (2.0 * pi);
    const bool pass = s_min <= 1e-2 && s_max <= 1e-2 && s_r <= 1e-2 && rel <= 2e-2;
    return {pass, fmt("eigenvalue spreads %.2e / %.2e, r_db spread %.2e (limit 1e-2); phase advance %.4f rad per tau, "
                      "%.2e from 2 pi (limit 2e-2)",
                      s_min, s_max, s_r, per_period, rel)};
}

// 10. Oracle equivalences.
Verdict oracles() {
    // Algebraic steady state against long-time integration of the Lyapunov flow.
    const ExperimentConfig f4 = parse_config(fig4_point(best_fig4_g0(), 0.0));
    const SteadyRun run = steady_run(f4);
    const DriftMatrix a = build_drift(run.params, run.state.moments.q, run.state.moments.a);
    const DiffusionMatrix d = build_diffusion(run.params);
    StepperConfig tight;
    tight.rel_tol = 1e-12;
    tight.abs_tol = 1e-14;
    tight.max_step = 1.0;
    const RelaxationResult relaxed = relax_lyapunov(a, d, CovarianceMatrix::initial(run.params), tight, 1e7, 1e-11);
    const double lyap = (relaxed.v.v - run.cm->v).cwiseAbs().maxCoeff();

    double tmsv = 0.0;
    for (double r : {0.05, 0.3, 0.7, 1.0, 1.5, 2.0, 3.0}) {
        ReducedCM rcm;
        rcm.a = 0.5 * std::cosh(2.0 * r) * Mat2::Identity();
        rcm.b = rcm.a;
        rcm.c << 0.5 * std::sinh(2.0 * r), 0.0, 0.0, -0.5 * std::sinh(2.0 * r);
        tmsv = std::max(tmsv, std::abs(log_negativity(rcm) - 2.0 * r));
    }

    double norm = 0.0;
    Mat2 squeezed, thermal;
    squeezed << 0.3, 0.1, 0.1, 1.2;
    thermal << 3.0, -1.0, -1.0, 2.0;
    const std::vector<Mat2> blocks = {mechanical_block(*run.cm), squeezed, thermal};
    for (const auto& m : blocks) norm = std::max(norm, std::abs(wigner(m).trapezoid_integral() - 1.0));

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double transcription = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const SystemParams p = oracle::random_system_params(rng);
        const double q = 1e4 * u(rng);
        const cplx am{1e4 * u(rng), 1e4 * u(rng)};
        const auto [want, imag] = oracle::transcribed_drift(p, q, am);
        const double scale = 1.0 + want.cwiseAbs().maxCoeff();
        transcription = std::max({transcription, (build_drift(p, q, am).a - want).cwiseAbs().maxCoeff() / scale,
                                  imag / scale});
    }

    const bool pass = lyap <= 1e-6 && tmsv <= 1e-9 && norm <= 1e-3 && transcription <= 1e-12;
    return {pass, fmt("Lyapunov algebraic vs integrated %.2e (<= 1e-6); TMSV |E_N - 2r| %.2e (<= 1e-9); Wigner "
                      "normalization %.2e (<= 1e-3); drift transcription %.2e relative (<= 1e-12, rounding)",
                      lyap, tmsv, norm, transcription)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"floquet-ode-equivalence", floquet_equivalence},
        {"limit-cycle-convergence", limit_cycle},
        {"drive-engineering-closure", drive_engineering},
        {"entanglement-periodicity", entanglement_periodicity},
        {"unmodulated-baseline", unmodulated_baseline},
        {"stability-map", stability_map},
        {"mechanical-squeezing", mechanical_squeezing},
        {"cooling-interference", cooling},
        {"squeezing-rotation", squeezing_rotation},
        {"oracle-equivalences", oracles},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
