#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "delaywave/config.hpp"

namespace delaywave {

/// Energy time series E(t_n) produced by one solver.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energies;
    std::string solver;
    SimConfig config;

    std::size_t size() const { return times.size(); }
};

/// Displacement profile at one time on the FDTD grid x_i = i ell / J.
struct Snapshot {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> y;
};

/// Numeric parameters actually used by a run (after any adjustment).
struct ResolvedParams {
    double h = 0.0;                 ///< spatial step (FDTD) or trace step (characteristics)
    std::optional<double> dt;       ///< FDTD time step
    std::optional<long> delay_steps;  ///< FDTD delay length M, dt * M = 2 ell
    std::optional<double> lambda;   ///< FDTD Courant number after adjustment
    std::optional<long> steps;      ///< FDTD steps taken
    std::optional<double> damping;  ///< FDTD damping coefficient eps
};

struct RunResult {
    EnergyTrace energy;
    std::vector<Snapshot> snapshots;
    ResolvedParams resolved;
};

}  // namespace delaywave
