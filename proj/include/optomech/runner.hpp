#pragma once

// Experiment orchestration: single runs, steady-state evaluations, parameter
// sweeps and cross-checks between first-moment sources.

#include "optomech/config.hpp"
#include "optomech/covariance.hpp"
#include "optomech/first_moments.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace optomech {

std::string_view version();

/// Time-resolved run over the configured horizon.
struct Simulation {
    SystemParams params;  // resolved (delta_a back-computed when Delta_a is prescribed)
    std::vector<double> t;
    std::vector<FirstMoments> moments;
    std::vector<CovarianceMatrix> cm;  // empty unless requested
    std::vector<double> extra_t;
    std::vector<FirstMoments> extra_moments;
    std::vector<CovarianceMatrix> extra_cm;
    std::optional<StabilityReport> stability;  // over the final period
};

struct SimulationRequest {
    bool covariance = false;
    bool stability = false;
    std::vector<double> extra_times;  // absolute times reported alongside the output grid
};

/// Output grid: samples_per_period points per tau across the window, both ends included.
std::vector<double> output_grid(const ExperimentConfig& cfg);

Simulation simulate(const ExperimentConfig& cfg, const SimulationRequest& request);

/// Constant-drive stationary point with its algebraic covariance matrix.
struct SteadyRun {
    SystemParams params;
    SteadyState state;
    StabilityReport stability;
    std::optional<CovarianceMatrix> cm;  // set only when stable
};

SteadyRun steady_run(const ExperimentConfig& cfg);

struct MeasureRow {
    double t = 0.0;
    double en = 0.0;
    double v11 = 0.0;
    double v22 = 0.0;
    double neff = 0.0;
    double r_db = 0.0;
};

MeasureRow measure(double t, const CovarianceMatrix& v);

struct SweepCell {
    std::vector<double> values;
    std::string status;  // "stable", "unstable" or "error"
    double en = 0.0;     // NaN unless stable
    double margin = 0.0;
    double min_symplectic = 0.0;
    std::string message;
};

/// Evaluates every cell of the configured grid on `jobs` worker threads.
/// Results come back in row-major grid order regardless of scheduling.
std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, unsigned jobs);

void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, std::span<const SweepCell> cells);

/// Stability of the configured run: constant drift for steady-state runs,
/// otherwise the final period of the selected first-moment source.
StabilityReport check_stability(const ExperimentConfig& cfg);

struct SourceComparison {
    // max_t |ODE - series| / max_t |ODE| over the final two periods
    double q = 0.0;
    double p = 0.0;
    double a = 0.0;
    double c = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t samples = 0;
};

/// Integrated trajectory against the Floquet series. Requires Omega > 0.
SourceComparison compare_sources(const ExperimentConfig& cfg);

nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const SourceComparison& r);

struct RunResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json manifest;
};

/// Executes the configured pipeline and writes one CSV per requested output
/// plus manifest.json into `out_dir`. A sweep configuration writes sweep.csv.
/// On failure the manifest records the error before it is rethrown.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs = 1);

/// Output directory: explicit value, else $OPTOMECH_OUT_DIR, else "out".
std::filesystem::path default_out_dir(const std::string& explicit_dir);

}  // namespace optomech
