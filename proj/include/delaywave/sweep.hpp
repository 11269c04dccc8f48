#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "delaywave/analysis.hpp"
#include "delaywave/characteristics.hpp"
#include "delaywave/config.hpp"
#include "delaywave/fdtd.hpp"
#include "delaywave/spectral.hpp"

namespace delaywave {

/// Per-round-trip amplification rho of Theta' under the boundary law and the implied
/// energy decay rate omega = -ln(rho) / ell (present only when rho < 1).
struct RoundTripPrediction {
    double rho = 1.0;
    std::optional<double> omega;
};

inline RoundTripPrediction predict(const BoundaryMode& mode, double ell) {
    RoundTripPrediction p;
    switch (mode.kind) {
        case BoundaryKind::Free:
            p.rho = 1.0;
            break;
        case BoundaryKind::Instant:
            p.rho = std::abs((1.0 + mode.mu) / (1.0 - mode.mu));
            if (p.rho < 1.0 && p.rho > 0.0) p.omega = -std::log(p.rho) / ell;
            break;
        case BoundaryKind::Delayed: {
            const auto report = spectral::analyze(mode.mu, ell);
            p.rho = report.rho;
            p.omega = report.predicted_omega;
            break;
        }
    }
    return p;
}

struct SweepRow {
    double mu = 0.0;
    std::string solver;
    RoundTripPrediction prediction;
    std::optional<analysis::DecayFit> fit;  ///< over the configured window
    std::optional<analysis::Classification> classification;
    std::string error;  ///< non-empty when this point failed
};

/// Runs `base` once per mu (and per solver when `base.solver` is Both) on up to
/// `threads` workers. Rows come back in input order; per-point failures are recorded
/// in the row instead of aborting the sweep.
inline std::vector<SweepRow> run_sweep(const SimConfig& base, const std::vector<double>& mus,
                                       unsigned threads = 1) {
    std::vector<SolverKind> solvers;
    if (base.solver == SolverKind::Both) {
        solvers = {SolverKind::Characteristics, SolverKind::Fdtd};
    } else {
        solvers = {base.solver};
    }
    std::vector<SweepRow> rows(mus.size() * solvers.size());

    auto work = [&](std::size_t index) {
        SweepRow& row = rows[index];
        SimConfig c = base;
        c.mu = mus[index / solvers.size()];
        c.solver = solvers[index % solvers.size()];
        c.snapshot_times = {0.0};
        row.mu = c.mu;
        row.solver = std::string(to_string(c.solver));
        try {
            validate(c);
            row.prediction = predict(c.boundary_mode(), c.ell);
            const RunResult r =
                c.solver == SolverKind::Fdtd ? fdtd::run(c) : characteristics::run(c);
            const auto [ta, tb] = c.resolved_window();
            try {
                row.fit = analysis::fit_decay_rate(r.energy, ta, tb, analysis::FitMethod::Peaks);
            } catch (const AnalysisError&) {
                row.fit = analysis::fit_decay_rate(r.energy, ta, tb, analysis::FitMethod::AllPoints);
            }
            row.classification = analysis::classify_stability(r.energy).classification;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) work(i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace delaywave
