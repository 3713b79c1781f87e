#pragma once

// Experiment configuration: JSON ingestion, validation and the resolved form
// echoed into run manifests.

#include "optomech/covariance.hpp"
#include "optomech/measures.hpp"
#include "optomech/model.hpp"
#include "optomech/ode.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace optomech {

enum class Output { first_moments, cm, EN, variance, neff, squeezing, wigner, stability };

std::string_view to_string(Output o);

enum class MomentSourceKind { trajectory, floquet, engineered };

std::string_view to_string(MomentSourceKind k);

enum class RunMode {
    dynamics,      // time integration over the horizon
    steady_state,  // constant drive: stationary point and algebraic covariance
};

struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 1;

    std::vector<double> values() const;
};

/// Names accepted by sweep axes.
const std::vector<std::string>& sweepable_fields();

struct ExperimentConfig {
    std::string name;
    SystemParams params;
    std::optional<double> effective_detuning;  // prescribed Delta_a for constant drives
    std::optional<DriveSpec> drive;
    std::optional<EngineeredCoupling> engineered;
    bool exact_synthesis = false;  // engineered drive from the transient solution instead of four components

    RunMode mode = RunMode::dynamics;
    MomentSourceKind source = MomentSourceKind::trajectory;
    double horizon_periods = 0.0;
    std::optional<double> horizon;  // absolute t_end; overrides horizon_periods
    double period = two_pi;         // time unit for constant drives
    std::optional<std::array<double, 2>> window_periods;
    std::size_t samples_per_period = 64;
    std::vector<Output> outputs;
    std::vector<SweepAxis> sweep;

    StepperConfig numerics;
    bool max_step_given = false;
    int j_max = 6;
    int n_max = 5;

    FirstMoments init_moments;
    bool init_moments_given = false;
    std::optional<CovarianceMatrix> init_cm;

    WignerGridSpec wigner_grid;
    std::vector<double> wigner_times;  // in units of tau
    std::size_t stability_samples = 64;

    bool wants(Output o) const;
    bool modulated() const;
    /// Modulation period, or `period` for a constant drive.
    double tau() const;
    double t_end() const;
    /// Output window [t0, t1] in absolute time.
    std::array<double, 2> window() const;
    /// Explicit drive, or the four-component synthesis of the engineered target.
    DriveSpec resolved_drive() const;
    DriveSignal drive_signal() const;
    StepperConfig stepper() const;
    FirstMoments initial_moments() const;
    CovarianceMatrix initial_cm() const;
    /// Effective parameters; with a prescribed Delta_a, delta_a is back-computed
    /// at the stationary point of the constant drive.
    SystemParams resolved_params() const;
};

/// Parses and validates a configuration document. Throws Error{InvalidConfig}.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Normalized JSON form. Reparsing it yields an equivalent configuration;
/// derived defaults (max_step, initial state) are left implicit.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Sets one sweepable scalar. Throws Error{InvalidConfig} for unknown names.
void apply_field(ExperimentConfig& cfg, std::string_view name, double value);

/// DriveSpec as {"Omega": ..., "components": [{"n": ..., "re": ..., "im": ...}]}.
nlohmann::json drive_to_json(const DriveSpec& drive);

}  // namespace optomech
