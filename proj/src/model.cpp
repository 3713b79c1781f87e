#include "optomech/model.hpp"

#include "optomech/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optomech {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::Diverged: return "Diverged";
        case ErrorKind::SingularDenominator: return "SingularDenominator";
        case ErrorKind::DegenerateExponents: return "DegenerateExponents";
        case ErrorKind::NotStable: return "NotStable";
        case ErrorKind::Unphysical: return "Unphysical";
        case ErrorKind::NonPhysical: return "NonPhysical";
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::SingularCM: return "SingularCM";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

cplx drive_value(const DriveSpec& drive, double t) {
    if (drive.big_omega == 0.0) return drive.component(0);
    cplx sum{};
    for (const auto& [n, en] : drive.components) {
        sum += en * std::polar(1.0, -n * drive.big_omega * t);
    }
    return sum;
}

DriveSignal as_signal(const DriveSpec& drive) {
    return [drive](double t) { return drive_value(drive, t); };
}

bool FirstMoments::is_finite() const {
    return std::isfinite(q) && std::isfinite(p) && std::isfinite(a.real()) &&
           std::isfinite(a.imag()) && std::isfinite(c.real()) && std::isfinite(c.imag());
}

double FirstMoments::max_abs() const {
    return std::max({std::abs(q), std::abs(p), std::abs(a.real()), std::abs(a.imag()),
                     std::abs(c.real()), std::abs(c.imag())});
}

bool ValidationReport::mentions(const std::string& needle) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

ValidationReport validate_params(const SystemParams& params) {
    ValidationReport report;
    auto require = [&](bool ok, const char* message) {
        if (!ok) report.violations.emplace_back(message);
    };
    auto finite = std::isfinite(params.omega_m) && std::isfinite(params.delta_a) &&
                  std::isfinite(params.kappa) && std::isfinite(params.gamma_m) &&
                  std::isfinite(params.g) && std::isfinite(params.delta_c) &&
                  std::isfinite(params.gamma_a) && std::isfinite(params.g0_collective) &&
                  std::isfinite(params.n_th);
    require(finite, "all parameters must be finite");
    require(params.omega_m > 0.0, "omega_m must be positive");
    require(params.kappa > 0.0, "kappa must be positive");
    require(params.gamma_m > 0.0, "gamma_m must be positive");
    require(params.gamma_a >= 0.0, "gamma_a must be non-negative");
    require(params.n_th >= 0.0, "n_th must be non-negative");
    require(params.g >= 0.0, "g must be non-negative");
    require(params.g0_collective >= 0.0, "g0_collective must be non-negative");
    return report;
}

ValidationReport validate_params(const SystemParams& params, const DriveSpec& drive) {
    ValidationReport report = validate_params(params);
    if (!(drive.big_omega >= 0.0) || !std::isfinite(drive.big_omega)) {
        report.violations.emplace_back("drive Omega must be finite and non-negative");
    }
    for (const auto& [n, en] : drive.components) {
        if (!std::isfinite(en.real()) || !std::isfinite(en.imag())) {
            std::ostringstream os;
            os << "drive component E_" << n << " must be finite";
            report.violations.push_back(os.str());
        }
        if (std::abs(n) > drive.max_harmonic) {
            std::ostringstream os;
            os << "drive component E_" << n << " exceeds the harmonic bound " << drive.max_harmonic;
            report.violations.push_back(os.str());
        }
        if (drive.big_omega == 0.0 && n != 0 && en != cplx{}) {
            std::ostringstream os;
            os << "drive consistency: Omega = 0 but component E_" << n << " is nonzero";
            report.violations.push_back(os.str());
        }
    }
    return report;
}

}  // namespace optomech
