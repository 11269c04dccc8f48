#pragma once

// Exact solver built on the travelling-wave form y(x, t) = Theta(x + t) - Theta(t - x).
//
// Only Theta' is stored, sampled on y_k = -ell + k h with h = 2 ell / N. Every boundary
// law turns into an index shift by N (one round trip 2 ell), so extending the trace
// introduces no interpolation error. Each extension rule owns a half-open interval
// (a, b], so the node at b carries the value of the rule on the left of b; Theta' may
// jump at odd multiples of ell.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delaywave/boundary.hpp"
#include "delaywave/config.hpp"
#include "delaywave/errors.hpp"
#include "delaywave/initial_data.hpp"
#include "delaywave/trace_types.hpp"

namespace delaywave::characteristics {

/// How far the trace has been built.
enum class Phase {
    Initial,    ///< [-ell, ell] from the initial data
    Reflected,  ///< [-ell, 3 ell], free Neumann reflection applied
    Extended,   ///< beyond, by a feedback or free rule
};

struct FieldValue {
    double y = 0.0;
    double y_t = 0.0;
    double y_x = 0.0;
};

class ThetaTrace;

ThetaTrace build_theta(const InitialData& init, double ell, int n_per_half);
ThetaTrace extend_reflect(ThetaTrace trace);
ThetaTrace extend_delay(ThetaTrace trace, double mu, double t_max);
ThetaTrace extend_instant(ThetaTrace trace, double mu, double t_max);
ThetaTrace extend_free(ThetaTrace trace, double t_max);

/// Sampled Theta' over [-ell, t_max] plus its running trapezoid integral.
/// Immutable once built; the extension functions consume and return a trace.
class ThetaTrace {
public:
    double ell() const { return ell_; }
    int n_per_half() const { return n_; }
    double h() const { return h_; }
    double t_max() const { return node(samples_.size() - 1); }
    std::size_t size() const { return samples_.size(); }
    Phase phase() const { return phase_; }
    const BoundaryMode& mode() const { return mode_; }

    std::span<const double> samples() const { return samples_; }
    std::span<const double> cumsum() const { return cumsum_; }

    double node(std::size_t k) const { return -ell_ + static_cast<double>(k) * h_; }

    /// Theta'(y), linearly interpolated between nodes.
    double derivative(double y) const {
        auto [k, f] = locate(y);
        if (f == 0.0) return samples_[k];
        return (1.0 - f) * samples_[k] + f * samples_[k + 1];
    }

    /// Theta(y) normalized by Theta(-ell) = 0; exact integral of the interpolant.
    double profile(double y) const {
        auto [k, f] = locate(y);
        if (f == 0.0) return cumsum_[k];
        const double s = (1.0 - f) * samples_[k] + f * samples_[k + 1];
        return cumsum_[k] + 0.5 * f * h_ * (samples_[k] + s);
    }

    /// Node index k and fraction f in [0, 1) with y = y_k + f h. Arguments within 1e-9
    /// cells of a node snap onto it.
    std::pair<std::size_t, double> locate(double y) const {
        const double u = (y + ell_) / h_;
        const double last = static_cast<double>(samples_.size() - 1);
        if (!(u >= -kSnap && u <= last + kSnap)) {
            throw RangeError("argument " + std::to_string(y) + " outside covered range [" +
                             std::to_string(-ell_) + ", " + std::to_string(t_max()) + "]");
        }
        const double r = std::nearbyint(u);
        if (std::abs(u - r) <= kSnap) return {static_cast<std::size_t>(r), 0.0};
        const double k = std::floor(u);
        return {static_cast<std::size_t>(k), u - k};
    }

private:
    static constexpr double kSnap = 1e-9;

    ThetaTrace(double ell, int n) : ell_(ell), n_(n), h_(2.0 * ell / n) {}

    void append(double v) {
        if (samples_.empty()) {
            cumsum_.push_back(0.0);
        } else {
            cumsum_.push_back(cumsum_.back() + 0.5 * h_ * (samples_.back() + v));
        }
        samples_.push_back(v);
    }

    // Last node index needed to reach t_max, rounded up onto the grid.
    std::size_t last_index_for(double t_max) const {
        return static_cast<std::size_t>(std::ceil((t_max + ell_) / h_ - kSnap));
    }

    std::size_t shift() const { return static_cast<std::size_t>(n_); }

    double ell_;
    int n_;
    double h_;
    std::vector<double> samples_;
    std::vector<double> cumsum_;
    BoundaryMode mode_ = BoundaryMode::free();
    Phase phase_ = Phase::Initial;

    friend ThetaTrace build_theta(const InitialData&, double, int);
    friend ThetaTrace extend_reflect(ThetaTrace);
    friend ThetaTrace extend_delay(ThetaTrace, double, double);
    friend ThetaTrace extend_instant(ThetaTrace, double, double);
    friend ThetaTrace extend_free(ThetaTrace, double);
};

/// Theta' on [-ell, ell] from the initial data:
///   x < 0:  Theta'(x) = (y0'(-x) - y1(-x)) / 2
///   x >= 0: Theta'(x) = (y0'(x) + y1(x)) / 2
inline ThetaTrace build_theta(const InitialData& init, double ell, int n_per_half) {
    if (!(std::isfinite(ell) && ell > 0.0)) throw ConfigError("ell", "must be positive");
    if (n_per_half < 2) throw ConfigError("trace-n", "need at least 2 samples per 2 ell");
    ThetaTrace trace(ell, n_per_half);
    const int n = n_per_half;
    trace.samples_.reserve(static_cast<std::size_t>(n) + 1);
    trace.cumsum_.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        // x_k = (2k - N) ell / N keeps the branch point exactly at 0 and mirrors exactly.
        if (2 * k < n) {
            const double s = (n - 2 * k) * ell / n;  // s = -x
            trace.append(0.5 * (init.y0_prime(s) - init.y1(s)));
        } else {
            const double x = (2 * k - n) * ell / n;
            trace.append(0.5 * (init.y0_prime(x) + init.y1(x)));
        }
    }
    return trace;
}

/// Free Neumann phase: Theta'(y) = -Theta'(y - 2 ell) on (ell, 3 ell].
inline ThetaTrace extend_reflect(ThetaTrace trace) {
    if (trace.phase_ != Phase::Initial) {
        throw StateError("extend_reflect: trace already extended past ell");
    }
    const std::size_t n = trace.shift();
    for (std::size_t k = n + 1; k <= 2 * n; ++k) trace.append(-trace.samples_[k - n]);
    trace.phase_ = Phase::Reflected;
    return trace;
}

/// Delayed feedback on (3 ell, t_max]:
///   Theta'(y) = (mu - 1) Theta'(y - 2 ell) - mu Theta'(y - 4 ell).
inline ThetaTrace extend_delay(ThetaTrace trace, double mu, double t_max) {
    if (trace.phase_ != Phase::Reflected) {
        throw StateError("extend_delay: trace must cover exactly [-ell, 3 ell]");
    }
    if (!(t_max > 3.0 * trace.ell_)) throw DomainError("extend_delay: t_max must exceed 3 ell");
    const std::size_t n = trace.shift();
    const std::size_t last = trace.last_index_for(t_max);
    trace.samples_.reserve(last + 1);
    trace.cumsum_.reserve(last + 1);
    for (std::size_t k = 2 * n + 1; k <= last; ++k) {
        trace.append((mu - 1.0) * trace.samples_[k - n] - mu * trace.samples_[k - 2 * n]);
    }
    trace.mode_ = BoundaryMode::delayed(mu);
    trace.phase_ = Phase::Extended;
    return trace;
}

/// Undelayed feedback y_x = mu y_t, active from t = 0:
///   Theta'(y) = -(1 + mu) / (1 - mu) Theta'(y - 2 ell) on (ell, t_max].
inline ThetaTrace extend_instant(ThetaTrace trace, double mu, double t_max) {
    if (trace.phase_ != Phase::Initial) {
        throw StateError("extend_instant: trace must cover exactly [-ell, ell]");
    }
    if (mu == 1.0) throw DomainError("extend_instant: feedback is singular at mu = 1");
    if (!(t_max > trace.ell_)) throw DomainError("extend_instant: t_max must exceed ell");
    const double ratio = -(1.0 + mu) / (1.0 - mu);
    const std::size_t n = trace.shift();
    const std::size_t last = trace.last_index_for(t_max);
    trace.samples_.reserve(last + 1);
    trace.cumsum_.reserve(last + 1);
    for (std::size_t k = n + 1; k <= last; ++k) trace.append(ratio * trace.samples_[k - n]);
    trace.mode_ = BoundaryMode::instant(mu);
    trace.phase_ = Phase::Extended;
    return trace;
}

/// Neumann reflection for all time (no feedback).
inline ThetaTrace extend_free(ThetaTrace trace, double t_max) {
    if (trace.phase_ == Phase::Extended) {
        throw StateError("extend_free: trace already extended by a feedback rule");
    }
    if (!(t_max > trace.ell_)) throw DomainError("extend_free: t_max must exceed ell");
    const std::size_t n = trace.shift();
    const std::size_t last = trace.last_index_for(t_max);
    trace.samples_.reserve(last + 1);
    trace.cumsum_.reserve(last + 1);
    for (std::size_t k = trace.samples_.size(); k <= last; ++k) {
        trace.append(-trace.samples_[k - n]);
    }
    trace.mode_ = BoundaryMode::free();
    trace.phase_ = trace.size() - 1 == 2 * n ? Phase::Reflected : Phase::Extended;
    return trace;
}

/// Builds and extends a trace for `mode` so that it covers at least [-ell, t_max].
inline ThetaTrace build_trace(const InitialData& init, double ell, int n_per_half,
                              const BoundaryMode& mode, double t_max) {
    ThetaTrace trace = build_theta(init, ell, n_per_half);
    switch (mode.kind) {
        case BoundaryKind::Free:
            return t_max > ell ? extend_free(std::move(trace), t_max) : trace;
        case BoundaryKind::Instant:
            return t_max > ell ? extend_instant(std::move(trace), mode.mu, t_max) : trace;
        case BoundaryKind::Delayed: {
            trace = extend_reflect(std::move(trace));
            if (t_max > 3.0 * ell) return extend_delay(std::move(trace), mode.mu, t_max);
            return trace;
        }
    }
    return trace;
}

namespace detail {

inline void require_time(const ThetaTrace& trace, double t) {
    if (!(t >= 0.0 && t + trace.ell() <= trace.t_max() + 1e-9 * trace.h())) {
        throw RangeError("time " + std::to_string(t) + " not covered (need t + ell <= " +
                         std::to_string(trace.t_max()) + ")");
    }
}

}  // namespace detail

/// Displacement, velocity, and slope at (x, t).
inline FieldValue eval_field(const ThetaTrace& trace, double x, double t) {
    detail::require_time(trace, t);
    if (!(x >= 0.0 && x <= trace.ell())) {
        throw RangeError("x = " + std::to_string(x) + " outside [0, ell]");
    }
    const double fwd = trace.derivative(x + t);
    const double bwd = trace.derivative(t - x);
    return {trace.profile(x + t) - trace.profile(t - x), fwd - bwd, fwd + bwd};
}

/// Trapezoid energy over the window of nodes [m, m + N], i.e. at time t = m h.
inline double energy_at_node(const ThetaTrace& trace, std::size_t m) {
    const std::size_t n = static_cast<std::size_t>(trace.n_per_half());
    if (m + n >= trace.size()) {
        throw RangeError("energy window at node " + std::to_string(m) + " not covered");
    }
    auto s = trace.samples();
    double sum = 0.5 * (s[m] * s[m] + s[m + n] * s[m + n]);
    for (std::size_t i = m + 1; i < m + n; ++i) sum += s[i] * s[i];
    return sum * trace.h();
}

/// E(t) = integral of Theta'(y)^2 over [t - ell, t + ell], trapezoid on the trace grid.
inline double energy_exact(const ThetaTrace& trace, double t) {
    detail::require_time(trace, t);
    auto [ka, fa] = trace.locate(t - trace.ell());
    if (fa == 0.0) return energy_at_node(trace, ka);

    const double h = trace.h();
    auto s = trace.samples();
    const auto [kb, fb] = trace.locate(t + trace.ell());
    const double va = trace.derivative(t - trace.ell());
    const double vb = trace.derivative(t + trace.ell());
    // Partial cells at both ends, full cells in between.
    double sum = 0.5 * (1.0 - fa) * h * (va * va + s[ka + 1] * s[ka + 1]);
    for (std::size_t i = ka + 1; i < kb; ++i) sum += 0.5 * h * (s[i] * s[i] + s[i + 1] * s[i + 1]);
    if (fb > 0.0) sum += 0.5 * fb * h * (s[kb] * s[kb] + vb * vb);
    return sum;
}

/// Q(y) = (Theta'(y), Theta'(y - 2 ell)).
inline std::array<double, 2> q_vector(const ThetaTrace& trace, double y) {
    const double lag = y - 2.0 * trace.ell();
    if (lag < -trace.ell() - 1e-9 * trace.h() || y > trace.t_max() + 1e-9 * trace.h()) {
        throw RangeError("q_vector: y = " + std::to_string(y) + " not covered");
    }
    return {trace.derivative(y), trace.derivative(lag)};
}

/// Runs the configured experiment: energy every `sample_stride` trace nodes on [0, t_final]
/// and displacement snapshots on the FDTD grid.
inline RunResult run(const SimConfig& config) {
    validate(config);
    const InitialData init = make_initial_data(config);
    const double ell = config.ell;
    const double tf = config.resolved_t_final();
    const ThetaTrace trace =
        build_trace(init, ell, config.trace_n, config.boundary_mode(), tf + ell);

    RunResult result;
    result.resolved.h = trace.h();
    result.energy.solver = "characteristics";
    result.energy.config = config;
    const std::size_t stride = static_cast<std::size_t>(config.sample_stride);
    const auto last = static_cast<std::size_t>(std::floor(tf / trace.h() + 1e-9));
    for (std::size_t m = 0; m <= last; m += stride) {
        result.energy.times.push_back(static_cast<double>(m) * trace.h());
        result.energy.energies.push_back(energy_at_node(trace, m));
    }

    const int j = config.nodes;
    for (double t : config.resolved_snapshot_times()) {
        Snapshot snap;
        snap.t = t;
        for (int i = 0; i <= j; ++i) {
            const double x = ell * i / j;
            snap.x.push_back(x);
            snap.y.push_back(eval_field(trace, x, t).y);
        }
        result.snapshots.push_back(std::move(snap));
    }
    return result;
}

}  // namespace delaywave::characteristics
