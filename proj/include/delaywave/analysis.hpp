#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "delaywave/characteristics.hpp"
#include "delaywave/config.hpp"
#include "delaywave/errors.hpp"
#include "delaywave/fdtd.hpp"
#include "delaywave/trace_types.hpp"

namespace delaywave::analysis {

enum class FitMethod {
    Peaks,      ///< strict local maxima only (tracks the envelope of oscillating energy)
    AllPoints,  ///< every sample in the window
};

enum class Classification { Decaying, Growing, Neutral };

inline std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Decaying: return "Decaying";
        case Classification::Growing: return "Growing";
        case Classification::Neutral: return "Neutral";
    }
    return "?";
}

inline std::string_view to_string(FitMethod m) {
    return m == FitMethod::Peaks ? "peaks" : "all-points";
}

/// Rates within this band (per unit time) count as Neutral.
inline constexpr double kNeutralBand = 1e-3;

/// Energies at or below this are treated as extinct.
inline constexpr double kEnergyFloor = 1e-300;

/// Least-squares fit ln E(t) ~ intercept + rate * t.
struct DecayFit {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    FitMethod method = FitMethod::AllPoints;
    Classification classification = Classification::Neutral;
    /// Energy vanished in the window; rate is -infinity.
    bool extinct = false;
    std::size_t points = 0;
};

inline Classification classify_rate(double rate) {
    if (rate < -kNeutralBand) return Classification::Decaying;
    if (rate > kNeutralBand) return Classification::Growing;
    return Classification::Neutral;
}

inline DecayFit fit_decay_rate(const EnergyTrace& trace, double t_a, double t_b,
                               FitMethod method = FitMethod::Peaks) {
    if (trace.times.size() != trace.energies.size()) {
        throw AnalysisError("energy trace has mismatched lengths");
    }
    DecayFit fit;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.method = method;

    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.times[i] >= t_a && trace.times[i] <= t_b) window.push_back(i);
    }
    if (window.size() < 10) throw AnalysisError("fit window holds fewer than 10 samples");

    const auto& e = trace.energies;
    if (std::all_of(window.begin(), window.end(), [&](std::size_t i) { return e[i] <= kEnergyFloor; })) {
        fit.rate = -std::numeric_limits<double>::infinity();
        fit.intercept = -std::numeric_limits<double>::infinity();
        fit.r_squared = 1.0;
        fit.classification = Classification::Decaying;
        fit.extinct = true;
        fit.points = window.size();
        return fit;
    }

    std::vector<std::size_t> picked;
    if (method == FitMethod::Peaks) {
        for (std::size_t w = 1; w + 1 < window.size(); ++w) {
            const std::size_t i = window[w];
            if (e[i] > e[i - 1] && e[i] > e[i + 1] && e[i] > kEnergyFloor) picked.push_back(i);
        }
        if (picked.size() < 4) throw AnalysisError("fit window holds fewer than 4 energy peaks");
    } else {
        for (std::size_t i : window) {
            if (e[i] > kEnergyFloor) picked.push_back(i);
        }
        if (picked.size() < 2) throw AnalysisError("fit window holds fewer than 2 positive energies");
    }

    const double n = static_cast<double>(picked.size());
    double mt = 0.0, ml = 0.0;
    for (std::size_t i : picked) {
        mt += trace.times[i];
        ml += std::log(e[i]);
    }
    mt /= n;
    ml /= n;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (std::size_t i : picked) {
        const double dt = trace.times[i] - mt;
        const double dl = std::log(e[i]) - ml;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if (stt == 0.0) throw AnalysisError("fit points share a single time");
    fit.rate = stl / stt;
    fit.intercept = ml - fit.rate * mt;
    fit.r_squared = sll == 0.0 ? 1.0 : std::clamp(stl * stl / (stt * sll), 0.0, 1.0);
    fit.classification = classify_rate(fit.rate);
    fit.points = picked.size();
    return fit;
}

/// Fits the last 75% of the trace (peaks, falling back to all points when the energy
/// does not oscillate) and classifies the sign of the rate.
inline DecayFit classify_stability(const EnergyTrace& trace) {
    if (trace.size() < 2) throw AnalysisError("energy trace too short to classify");
    const double t0 = trace.times.front();
    const double t1 = trace.times.back();
    const double span = t1 - t0;
    const double ell = trace.config.ell;
    if (span < 20.0 * ell - 1e-9 * ell) {
        throw AnalysisError("classification needs at least 20 ell of simulated time");
    }
    const double ta = t0 + 0.25 * span;
    try {
        return fit_decay_rate(trace, ta, t1, FitMethod::Peaks);
    } catch (const AnalysisError&) {
        return fit_decay_rate(trace, ta, t1, FitMethod::AllPoints);
    }
}

/// Least-squares slope of ln(error) against ln(step).
inline double convergence_order(std::span<const double> errors, std::span<const double> steps) {
    if (errors.size() != steps.size() || errors.size() < 3) {
        throw AnalysisError("convergence_order needs at least 3 error/step pairs");
    }
    const double n = static_cast<double>(errors.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) {
            throw AnalysisError("convergence_order needs strictly positive errors and steps");
        }
        mx += std::log(steps[i]);
        my += std::log(errors[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double dx = std::log(steps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[i]) - my);
    }
    if (sxx == 0.0) throw AnalysisError("convergence_order needs distinct steps");
    return sxy / sxx;
}

struct ComparisonReport {
    std::vector<double> times;      ///< FDTD times actually compared
    std::vector<double> l2_errors;  ///< ||u_fdtd - y_exact||_L2(0, ell) at each time
    double max_l2_error = 0.0;
    /// max |E_fdtd - E_exact| / E_exact(0) over the FDTD energy samples.
    double energy_max_gap = 0.0;
    double dt = 0.0;
    long delay_steps = 0;
};

/// Runs both solvers on `config` and measures the FDTD displacement error against the
/// characteristics solution at the FDTD step nearest each sample time.
inline ComparisonReport compare_solvers(const SimConfig& config, std::span<const double> sample_times) {
    SimConfig c = config;
    c.snapshot_times.assign(sample_times.begin(), sample_times.end());
    if (c.snapshot_times.empty()) throw ConfigError("sample-times", "need at least one sample time");
    validate(c);
    const double tf = c.resolved_t_final();
    const InitialData init = make_initial_data(c);
    const RunResult fd = fdtd::run(c);
    const auto trace =
        characteristics::build_trace(init, c.ell, c.trace_n, c.boundary_mode(), tf + c.ell);

    ComparisonReport report;
    report.dt = fd.resolved.dt.value_or(0.0);
    report.delay_steps = fd.resolved.delay_steps.value_or(0);
    const double h = fd.resolved.h;
    for (const Snapshot& s : fd.snapshots) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double x = std::min(s.x[i], c.ell);
            const double d = s.y[i] - characteristics::eval_field(trace, x, s.t).y;
            const double w = (i == 0 || i + 1 == s.y.size()) ? 0.5 : 1.0;
            sum += w * d * d;
        }
        const double err = std::sqrt(h * sum);
        report.times.push_back(s.t);
        report.l2_errors.push_back(err);
        report.max_l2_error = std::max(report.max_l2_error, err);
    }

    const double e0 = characteristics::energy_exact(trace, 0.0);
    for (std::size_t i = 0; i < fd.energy.size(); ++i) {
        const double t = fd.energy.times[i];
        if (t > tf) break;
        const double gap = std::abs(fd.energy.energies[i] - characteristics::energy_exact(trace, t));
        report.energy_max_gap = std::max(report.energy_max_gap, e0 > 0.0 ? gap / e0 : gap);
    }
    return report;
}

}  // namespace delaywave::analysis
