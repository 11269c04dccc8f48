#pragma once

// Explicit leapfrog finite-difference solver for y_tt = y_xx on (0, ell) with
// y(0, t) = 0 and a ghost-node closure at x = ell for the selected boundary law.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "delaywave/boundary.hpp"
#include "delaywave/config.hpp"
#include "delaywave/delay_line.hpp"
#include "delaywave/errors.hpp"
#include "delaywave/initial_data.hpp"
#include "delaywave/trace_types.hpp"

namespace delaywave::fdtd {

class WaveField;

WaveField init_field(const InitialData& init, double ell, int intervals, double lambda,
                     const BoundaryMode& mode, int delay_offset = 0, double damping = 0.9);

/// Two displacement levels u^{n-1}, u^n on x_i = i h, i = 0..J, plus the boundary
/// displacement history for the delayed law. dt is chosen so that dt * M = 2 ell exactly.
///
/// Delayed law: the ghost flux at step n is mu * v^{n-M}, with v the centered boundary
/// velocity (u^{k+1}_J - u^{k-1}_J) / (2 dt) read from the history (v^0 = y1(ell)).
/// While it is active the update also carries the damping term
/// eps * (D2 u^n - D2 u^{n-1}), eps = damping * (1 - lambda^2) / 2, which removes the
/// poorly resolved modes whose numerical round-trip time differs from 2 ell. Those modes
/// see the feedback as mistimed and grow without it; at lambda = 1 the scheme has no
/// dispersion and eps vanishes. With mu = 0 there is no feedback to mistime and eps = 0.
class WaveField {
public:
    double ell() const { return ell_; }
    int intervals() const { return j_; }
    double h() const { return h_; }
    double dt() const { return dt_; }
    double lambda() const { return lambda_; }
    /// Delay length M in steps (dt * M = 2 ell).
    long delay_steps() const { return delay_steps_; }
    /// Coefficient of the damping term while the delayed law is active.
    double damping_coefficient() const { return eps_; }
    /// History lag actually read by the delayed law.
    long delay_lag() const { return lag_; }
    long step_index() const { return n_; }
    double time() const { return static_cast<double>(n_) * dt_; }
    const BoundaryMode& mode() const { return mode_; }

    std::span<const double> current() const { return curr_; }
    std::span<const double> previous() const { return prev_; }

    /// True once t^n >= 2 ell in delayed mode.
    bool delayed_law_active() const {
        return mode_.kind == BoundaryKind::Delayed && n_ >= delay_steps_;
    }

    /// Advances u^{n-1}, u^n to u^n, u^{n+1}.
    void step() {
        const int j = j_;
        const double l2 = lambda_ * lambda_;
        for (int i = 1; i < j; ++i) {
            next_[i] = 2.0 * curr_[i] - prev_[i] + l2 * (curr_[i + 1] - 2.0 * curr_[i] + curr_[i - 1]);
        }
        const double base = 2.0 * curr_[j] - prev_[j] + l2 * (2.0 * curr_[j - 1] - 2.0 * curr_[j]);
        switch (mode_.kind) {
            case BoundaryKind::Free:
                next_[j] = base;
                break;
            case BoundaryKind::Instant: {
                // Ghost flux mu (u^{n+1}_J - u^{n-1}_J) / (2 dt), solved for u^{n+1}_J.
                const double c = lambda_ * mode_.mu;
                next_[j] = (base - c * prev_[j]) / (1.0 - c);
                break;
            }
            case BoundaryKind::Delayed: {
                if (delayed_law_active()) {
                    next_[j] = base + 2.0 * l2 * h_ * mode_.mu * delayed_velocity();
                    for (int i = 1; i < j; ++i) {
                        next_[i] += eps_ * ((curr_[i + 1] - 2.0 * curr_[i] + curr_[i - 1]) -
                                            (prev_[i + 1] - 2.0 * prev_[i] + prev_[i - 1]));
                    }
                    next_[j] += eps_ * (2.0 * (curr_[j - 1] - curr_[j]) - 2.0 * (prev_[j - 1] - prev_[j]));
                } else {
                    next_[j] = base;
                }
                break;
            }
        }
        next_[0] = 0.0;
        std::swap(prev_, curr_);
        std::swap(curr_, next_);
        ++n_;
        if (mode_.kind == BoundaryKind::Delayed) history_.push(curr_[j]);
    }

    /// Discrete energy at t = (n - 1/2) dt: trapezoid kinetic term from
    /// (u^n - u^{n-1}) / dt plus the leapfrog potential sum of
    /// (u^n_{i+1} - u^n_i)(u^{n-1}_{i+1} - u^{n-1}_i) / h^2. Exactly conserved by the
    /// free Neumann scheme.
    double energy() const {
        double kinetic = 0.0;
        for (int i = 0; i <= j_; ++i) {
            const double v = (curr_[i] - prev_[i]) / dt_;
            const double w = (i == 0 || i == j_) ? 0.5 : 1.0;
            kinetic += w * v * v;
        }
        double potential = 0.0;
        for (int i = 0; i < j_; ++i) {
            potential += (curr_[i + 1] - curr_[i]) * (prev_[i + 1] - prev_[i]);
        }
        return 0.5 * h_ * kinetic + 0.5 * potential / h_;
    }

private:
    WaveField(double ell, int j, double dt, long m, long lag, const BoundaryMode& mode)
        : ell_(ell), j_(j), h_(ell / j), dt_(dt), lambda_(dt / (ell / j)), delay_steps_(m),
          lag_(lag), mode_(mode), prev_(j + 1, 0.0), curr_(j + 1, 0.0), next_(j + 1, 0.0),
          history_(mode.kind == BoundaryKind::Delayed ? static_cast<std::size_t>(lag + 2) : 0) {}

    // Boundary velocity at step n - lag.
    double delayed_velocity() const {
        const long k = n_ - lag_;
        if (k < 0) return 0.0;
        if (k == 0) return v0_;
        const auto d = static_cast<std::size_t>(lag_);
        return (history_.lag(d - 1) - history_.lag(d + 1)) / (2.0 * dt_);
    }

    double ell_;
    int j_;
    double h_;
    double dt_;
    double lambda_;
    long delay_steps_;
    long lag_;  // history lag read by the delayed law; equals delay_steps_ unless faulted
    BoundaryMode mode_;
    double eps_ = 0.0;
    double v0_ = 0.0;
    long n_ = 1;
    std::vector<double> prev_;
    std::vector<double> curr_;
    std::vector<double> next_;
    DelayLine history_;

    friend WaveField init_field(const InitialData&, double, int, double, const BoundaryMode&, int,
                                double);
};

/// Largest Courant number <= `lambda` whose time step divides 2 ell; returns (dt, M).
inline std::pair<double, long> aligned_time_step(double ell, int intervals, double lambda) {
    const double h = ell / intervals;
    const long m = static_cast<long>(std::ceil(2.0 * ell / (lambda * h) - 1e-9));
    return {2.0 * ell / static_cast<double>(m), m};
}

/// u^0 = y0 at the nodes, u^1 from the second-order Taylor start
/// u^0 + dt y1 + lambda^2 / 2 * (discrete Laplacian of u^0).
/// `delay_offset` lengthens the delay actually read by the delayed law (fault injection);
/// `damping` in [0, 1] scales the damping term relative to its stability limit.
inline WaveField init_field(const InitialData& init, double ell, int intervals, double lambda,
                            const BoundaryMode& mode, int delay_offset, double damping) {
    if (!(ell > 0.0)) throw ConfigError("ell", "must be positive");
    if (intervals < 8) throw ConfigError("nodes", "need at least 8 spatial intervals");
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda", "CFL condition requires 0 < lambda <= 1");
    }
    if (delay_offset < 0) throw ConfigError("fault-delay-offset", "must be non-negative");
    if (!(damping >= 0.0 && damping <= 1.0)) throw ConfigError("damping", "must lie in [0, 1]");
    const auto [dt, m] = aligned_time_step(ell, intervals, lambda);
    WaveField f(ell, intervals, dt, m, m + delay_offset, mode);
    if (mode.kind == BoundaryKind::Instant && std::abs(1.0 - f.lambda_ * mode.mu) < 1e-9) {
        throw ConfigError("mu", "instant feedback closure is singular at lambda * mu = 1");
    }
    if (mode.kind == BoundaryKind::Delayed && mode.mu != 0.0) {
        f.eps_ = 0.5 * damping * (1.0 - f.lambda_ * f.lambda_);
    }

    const int j = intervals;
    const double h = f.h_;
    const double l2 = f.lambda_ * f.lambda_;
    for (int i = 1; i <= j; ++i) f.prev_[i] = init.y0(i * h);
    for (int i = 1; i < j; ++i) {
        f.curr_[i] = f.prev_[i] + dt * init.y1(i * h) +
                     0.5 * l2 * (f.prev_[i + 1] - 2.0 * f.prev_[i] + f.prev_[i - 1]);
    }
    const double flux0 = mode.kind == BoundaryKind::Instant ? mode.mu * init.y1(ell) : 0.0;
    f.curr_[j] = f.prev_[j] + dt * init.y1(ell) +
                 0.5 * l2 * (2.0 * f.prev_[j - 1] - 2.0 * f.prev_[j] + 2.0 * h * flux0);
    if (mode.kind == BoundaryKind::Delayed) {
        f.v0_ = init.y1(ell);
        f.history_.push(f.prev_[j]);
        f.history_.push(f.curr_[j]);
    }
    return f;
}

/// Steps the configured experiment to t_final, recording the discrete energy every
/// `sample_stride` steps and displacement snapshots at the steps nearest the
/// requested times.
inline RunResult run(const SimConfig& config) {
    validate(config);
    const InitialData init = make_initial_data(config);
    WaveField field = init_field(init, config.ell, config.nodes, config.lambda,
                                 config.boundary_mode(), config.fault_delay_offset, config.damping);
    const double tf = config.resolved_t_final();
    const long last = static_cast<long>(std::ceil(tf / field.dt() - 1e-9));

    RunResult result;
    result.energy.solver = "fdtd";
    result.energy.config = config;
    result.resolved.h = field.h();
    result.resolved.dt = field.dt();
    result.resolved.delay_steps = field.delay_steps();
    result.resolved.lambda = field.lambda();
    result.resolved.steps = last;
    result.resolved.damping = field.damping_coefficient();

    std::vector<std::pair<long, std::size_t>> wanted;  // (step, request index)
    const auto times = config.resolved_snapshot_times();
    result.snapshots.resize(times.size());
    for (std::size_t r = 0; r < times.size(); ++r) {
        wanted.emplace_back(std::min(last, std::lround(times[r] / field.dt())), r);
    }
    std::sort(wanted.begin(), wanted.end());
    std::size_t next_wanted = 0;
    auto take = [&](long n, std::span<const double> u) {
        while (next_wanted < wanted.size() && wanted[next_wanted].first == n) {
            Snapshot& s = result.snapshots[wanted[next_wanted].second];
            s.t = static_cast<double>(n) * field.dt();
            s.y.assign(u.begin(), u.end());
            s.x.resize(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                s.x[i] = config.ell * static_cast<double>(i) / config.nodes;
            }
            ++next_wanted;
        }
    };

    take(0, field.previous());
    const long stride = config.sample_stride;
    for (;;) {
        const long n = field.step_index();
        take(n, field.current());
        if ((n - 1) % stride == 0) {
            result.energy.times.push_back(field.time() - 0.5 * field.dt());
            result.energy.energies.push_back(field.energy());
        }
        if (n >= last) break;
        field.step();
    }
    return result;
}

}  // namespace delaywave::fdtd
