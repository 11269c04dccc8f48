#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delaywave/boundary.hpp"
#include "delaywave/errors.hpp"
#include "delaywave/initial_data.hpp"

namespace delaywave {

enum class SolverKind { Characteristics, Fdtd, Both };

inline std::string_view to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::Characteristics: return "characteristics";
        case SolverKind::Fdtd: return "fdtd";
        case SolverKind::Both: return "both";
    }
    return "?";
}

inline SolverKind parse_solver_kind(std::string_view s) {
    if (s == "characteristics") return SolverKind::Characteristics;
    if (s == "fdtd") return SolverKind::Fdtd;
    if (s == "both") return SolverKind::Both;
    throw ConfigError("solver", "expected characteristics|fdtd|both, got '" + std::string(s) + "'");
}

/// Full description of one experiment.
struct SimConfig {
    double ell = 1.0;
    double mu = 0.0;
    BoundaryKind boundary = BoundaryKind::Delayed;
    SolverKind solver = SolverKind::Characteristics;
    /// Preset name (`sine`, `quarter-sine`, `zero`) or path to a tabulated CSV.
    std::string initial = "sine";
    /// Defaults to 40 ell.
    std::optional<double> t_final;
    /// FDTD spatial intervals J (h = ell / J).
    int nodes = 1000;
    /// Characteristic trace samples per 2 ell.
    int trace_n = 1000;
    /// Requested Courant number; the FDTD solver may lower it slightly.
    double lambda = 0.9;
    /// Record energy every `sample_stride` steps (FDTD) or trace nodes (characteristics).
    int sample_stride = 10;
    /// Empty means five evenly spaced times over [0, t_final].
    std::vector<double> snapshot_times;
    /// Rate-fit window; defaults to [10 ell, t_final].
    std::optional<std::pair<double, double>> window;
    /// FDTD damping while the delayed law is active, as a fraction of its stability limit.
    double damping = 0.9;
    /// Test hook: lengthens the FDTD delay line by this many steps.
    int fault_delay_offset = 0;

    double resolved_t_final() const { return t_final.value_or(40.0 * ell); }

    std::pair<double, double> resolved_window() const {
        return window.value_or(std::pair{10.0 * ell, resolved_t_final()});
    }

    std::vector<double> resolved_snapshot_times() const {
        if (!snapshot_times.empty()) return snapshot_times;
        const double tf = resolved_t_final();
        return {0.0, 0.25 * tf, 0.5 * tf, 0.75 * tf, tf};
    }

    BoundaryMode boundary_mode() const {
        switch (boundary) {
            case BoundaryKind::Free: return BoundaryMode::free();
            case BoundaryKind::Instant: return BoundaryMode::instant(mu);
            case BoundaryKind::Delayed: return BoundaryMode::delayed(mu);
        }
        return BoundaryMode::free();
    }
};

/// Cross-field validation; throws ConfigError naming the first bad field.
inline void validate(const SimConfig& c) {
    if (!(std::isfinite(c.ell) && c.ell > 0.0)) throw ConfigError("ell", "must be positive");
    if (!std::isfinite(c.mu)) throw ConfigError("mu", "must be finite");
    if (!(c.lambda > 0.0 && c.lambda <= 1.0)) {
        throw ConfigError("lambda", "Courant number must lie in (0, 1]");
    }
    if (c.nodes < 8) throw ConfigError("nodes", "need at least 8 spatial intervals");
    if (c.trace_n < 2) throw ConfigError("trace-n", "need at least 2 samples per 2 ell");
    if (c.sample_stride < 1) throw ConfigError("sample-stride", "must be at least 1");
    const double tf = c.resolved_t_final();
    if (!(std::isfinite(tf) && tf > 0.0)) throw ConfigError("t-final", "must be positive");
    if (c.boundary == BoundaryKind::Delayed && !(tf > 2.0 * c.ell)) {
        throw ConfigError("t-final", "delayed feedback needs t_final > 2 ell");
    }
    if (c.boundary == BoundaryKind::Instant) {
        if (c.mu == 1.0) throw ConfigError("mu", "instant feedback is singular at mu = 1");
        if (c.solver != SolverKind::Characteristics && std::abs(1.0 - c.lambda * c.mu) < 1e-9) {
            throw ConfigError("mu", "instant feedback closure is singular at lambda * mu = 1");
        }
    }
    if (c.window) {
        auto [a, b] = *c.window;
        if (!(a >= 0.0 && b > a && b <= tf)) {
            throw ConfigError("window", "need 0 <= t_a < t_b <= t_final");
        }
    }
    for (double t : c.snapshot_times) {
        if (!(t >= 0.0 && t <= tf)) throw ConfigError("snapshots", "times must lie in [0, t_final]");
    }
    if (!(c.damping >= 0.0 && c.damping <= 1.0)) throw ConfigError("damping", "must lie in [0, 1]");
    if (c.fault_delay_offset < 0) throw ConfigError("fault-delay-offset", "must be non-negative");
}

inline InitialData make_initial_data(const SimConfig& c) {
    InitialData data;
    if (c.initial == "sine") {
        data = sine_data(c.ell);
    } else if (c.initial == "quarter-sine") {
        data = quarter_sine_data(c.ell);
    } else if (c.initial == "zero") {
        data = zero_data();
    } else {
        data = load_tabulated_data(c.initial);
    }
    validate(data, c.ell);
    return data;
}

}  // namespace delaywave
