#pragma once

#include <optomech/model.hpp>

namespace fixture {

inline optomech::SystemParams fig2_params() {
    optomech::SystemParams p;
    p.delta_a = 1.0;
    p.kappa = 2.0;
    p.gamma_m = 1e-3;
    p.g = 1e-5;
    p.delta_c = -1.0;
    p.gamma_a = 0.1;
    p.g0_collective = 1.0;
    return p;
}

inline optomech::DriveSpec fig2_drive() {
    optomech::DriveSpec d;
    d.big_omega = 2.0;
    d.components = {{0, 15e4}, {1, 3e4}, {-1, 3e4}};
    return d;
}

inline optomech::SystemParams fig6_params() {
    optomech::SystemParams p;
    p.delta_a = 1.0;
    p.kappa = 10.0;
    p.gamma_m = 1e-3;
    p.g = 1e-3;
    p.delta_c = -1.0;
    p.gamma_a = 1e-3;
    p.g0_collective = 1.0;
    return p;
}

inline optomech::EngineeredCoupling fig6_target() { return {1.2, 0.1, 2.0}; }

}  // namespace fixture
