#pragma once

// Synthesis of the drive that makes the effective optomechanical coupling
// follow a prescribed two-tone form G(t) = G1 + G2 exp(-i Omega t).
//
// With <a(t)> fixed by the target, the remaining mean values follow from the
// Laplace transform of the mechanical and atomic equations, starting from
// q = p = c = 0 at t = 0:
//   <p(t)> = sum_{i=1..4} k_i exp(s_i t),   <c(t)> = sum_{i=5..7} k_i exp(s_i t).

#include "optomech/model.hpp"

#include <array>

namespace optomech {

struct LaplaceCoefficients {
    std::array<cplx, 7> s{};  // s[0] is s_1
    std::array<cplx, 7> k{};
};

/// Throws Error{InvalidArgument} for Omega <= 0 and Error{DegenerateExponents}
/// if two of s_1..s_4 or two of s_5..s_7 coincide within 1e-10.
LaplaceCoefficients laplace_coefficients(const SystemParams& params, const EngineeredCoupling& target);

/// Full transient solution, including the decaying exponentials.
FirstMoments transient_first_moments(const SystemParams& params, const LaplaceCoefficients& lc,
                                     const EngineeredCoupling& target, double t);
FirstMoments transient_first_moments(const SystemParams& params, const EngineeredCoupling& target, double t);

/// Long-time closed forms (decaying exponentials dropped, mechanical damping
/// neglected in the driven response). Throws Error{SingularDenominator} if
/// |Omega^2 - omega_m^2| < 1e-9.
FirstMoments asymptotic_first_moments(const SystemParams& params, const EngineeredCoupling& target, double t);

/// Four-component drive {E_2, E_1, E_0, E_-1} realizing the target in the
/// long-time limit.
DriveSpec modulation_components(const SystemParams& params, const EngineeredCoupling& target);

/// Exact drive that reproduces the transient solution at all t >= 0:
/// E(t) = d<a>/dt + (kappa + i delta_a)<a> - i g <a><q> + i G_0 <c>.
DriveSignal exact_drive(const SystemParams& params, const EngineeredCoupling& target);

}  // namespace optomech
