#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "delaywave/analysis.hpp"
#include "delaywave/delay_line.hpp"
#include "delaywave/fdtd.hpp"
#include "delaywave/spectral.hpp"

using namespace delaywave;
using namespace delaywave::fdtd;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Max nodal error against cos(k t) sin(k x), k = pi / 2, after stepping to t ~ t_end.
double standing_wave_error(int j, double t_end) {
    auto f = init_field(quarter_sine_data(1.0), 1.0, j, 0.9, BoundaryMode::free());
    const long steps = std::lround(t_end / f.dt());
    while (f.step_index() < steps) f.step();
    const double k = kPi / 2.0;
    double worst = 0.0;
    const auto u = f.current();
    for (int i = 0; i <= j; ++i) {
        const double x = static_cast<double>(i) / j;
        worst = std::max(worst, std::abs(u[i] - std::cos(k * f.time()) * std::sin(k * x)));
    }
    return worst;
}

SimConfig delayed_config(double mu, int j, double t_final) {
    SimConfig c;
    c.mu = mu;
    c.nodes = j;
    c.t_final = t_final;
    c.solver = SolverKind::Fdtd;
    return c;
}

}  // namespace

TEST_CASE("delay line returns samples by lag", "[fdtd][delay]") {
    DelayLine d(3);
    REQUIRE(d.capacity() == 3);
    REQUIRE(d.size() == 0);
    REQUIRE_THROWS_AS(d.lag(0), RangeError);
    d.push(1.0);
    d.push(2.0);
    REQUIRE(d.size() == 2);
    REQUIRE(d.lag(0) == 2.0);
    REQUIRE(d.lag(1) == 1.0);
    REQUIRE_THROWS_AS(d.lag(2), RangeError);
    d.push(3.0);
    d.push(4.0);
    REQUIRE(d.size() == 3);
    REQUIRE(d.lag(0) == 4.0);
    REQUIRE(d.lag(2) == 2.0);
    REQUIRE_THROWS_AS(d.lag(3), RangeError);
}

TEST_CASE("time step divides the round trip", "[fdtd]") {
    const auto [dt, m] = aligned_time_step(1.0, 1000, 0.9);
    REQUIRE(m == 2223);
    REQUIRE(dt * m == Approx(2.0).epsilon(1e-15));
    REQUIRE(dt / 1e-3 <= 0.9);
    REQUIRE(dt / 1e-3 == Approx(0.89969).margin(1e-5));

    for (int j : {8, 37, 250, 999, 4096}) {
        for (double lambda : {0.3, 0.5, 0.9, 1.0}) {
            const auto [d, steps] = aligned_time_step(2.5, j, lambda);
            REQUIRE(d * steps == Approx(5.0).epsilon(1e-14));
            REQUIRE(d / (2.5 / j) <= lambda * (1.0 + 1e-12));
        }
    }
    const auto exact = aligned_time_step(1.0, 100, 1.0);
    REQUIRE(exact.second == 200);
}

TEST_CASE("free scheme conserves its discrete energy", "[fdtd][energy]") {
    auto f = init_field(sine_data(1.0), 1.0, 400, 0.9, BoundaryMode::free());
    const double e0 = f.energy();
    REQUIRE(e0 == Approx((kPi * kPi + 1.0) / 4.0).epsilon(5e-3));
    double worst = 0.0;
    for (int n = 0; n < 20000; ++n) {
        f.step();
        worst = std::max(worst, std::abs(f.energy() - e0));
    }
    REQUIRE(worst / e0 <= 1e-12);
}

TEST_CASE("standing wave converges at second order", "[fdtd][oracle]") {
    std::vector<double> errors, steps;
    for (int j : {50, 100, 200, 400}) {
        errors.push_back(standing_wave_error(j, 3.0));
        steps.push_back(1.0 / j);
    }
    REQUIRE(analysis::convergence_order(errors, steps) >= 1.8);
    REQUIRE(errors.back() < 1e-4);
}

TEST_CASE("delayed law stays off for the first round trip", "[fdtd]") {
    auto free = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::free());
    auto delayed = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::delayed(0.5));
    const long m = delayed.delay_steps();
    while (delayed.step_index() < m) {
        REQUIRE_FALSE(delayed.delayed_law_active());
        free.step();
        delayed.step();
    }
    REQUIRE(delayed.delayed_law_active());
    for (int i = 0; i <= 100; ++i) REQUIRE(free.current()[i] == delayed.current()[i]);
    free.step();
    delayed.step();
    bool differs = false;
    for (int i = 0; i <= 100; ++i) differs = differs || free.current()[i] != delayed.current()[i];
    REQUIRE(differs);
}

TEST_CASE("zero gain reduces to the free scheme", "[fdtd]") {
    auto free = init_field(sine_data(1.0), 1.0, 64, 0.9, BoundaryMode::free());
    auto delayed = init_field(sine_data(1.0), 1.0, 64, 0.9, BoundaryMode::delayed(0.0));
    REQUIRE(delayed.damping_coefficient() == 0.0);
    for (int n = 0; n < 2000; ++n) {
        free.step();
        delayed.step();
    }
    for (int i = 0; i <= 64; ++i) REQUIRE(free.current()[i] == delayed.current()[i]);
}

TEST_CASE("damping coefficient", "[fdtd]") {
    const auto a = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::delayed(0.5));
    REQUIRE(a.damping_coefficient() == Approx(0.5 * 0.9 * (1.0 - a.lambda() * a.lambda())));
    const auto b = init_field(sine_data(1.0), 1.0, 100, 1.0, BoundaryMode::delayed(0.5));
    REQUIRE(b.damping_coefficient() == 0.0);
    const auto c = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::instant(-0.5));
    REQUIRE(c.damping_coefficient() == 0.0);
    const auto d = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::delayed(0.5), 0, 0.0);
    REQUIRE(d.damping_coefficient() == 0.0);
}

TEST_CASE("delayed scheme decays at the predicted rate", "[fdtd]") {
    for (double mu : {0.3, 0.5, 0.7}) {
        const auto r = run(delayed_config(mu, 250, 40.0));
        const auto fit = analysis::fit_decay_rate(r.energy, 10.0, 40.0, analysis::FitMethod::AllPoints);
        const double omega = spectral::predicted_decay_rate(mu, 1.0);
        REQUIRE(std::abs(-fit.rate - omega) / omega <= 0.25);
    }
}

TEST_CASE("delayed scheme stays bounded across the stable range", "[fdtd]") {
    for (double mu : {0.05, 0.5, 0.95, 1.0}) {
        const auto r = run(delayed_config(mu, 250, 40.0));
        const double e0 = r.energy.energies.front();
        // The damped closure lets E overshoot E(0) by about 2% near mu = 1 before settling.
        for (double e : r.energy.energies) REQUIRE(e <= 1.05 * e0);
        REQUIRE(r.energy.energies.back() <= e0);
    }
}

TEST_CASE("undamped delayed scheme is unstable at lambda 0.9", "[fdtd]") {
    // Documents why the damping term exists: without it, modes whose discrete
    // round-trip time differs from 2 ell are amplified by the feedback.
    auto c = delayed_config(0.5, 250, 40.0);
    c.damping = 0.0;
    const auto r = run(c);
    REQUIRE(r.energy.energies.back() > r.energy.energies.front());
}

TEST_CASE("instant feedback removes 8/9 of the energy per round trip", "[fdtd]") {
    SimConfig c;
    c.mu = -0.5;
    c.boundary = BoundaryKind::Instant;
    c.solver = SolverKind::Fdtd;
    c.t_final = 8.0;
    c.sample_stride = 1;
    const auto r = run(c);
    auto energy_at = [&](double t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < r.energy.size(); ++i) {
            if (std::abs(r.energy.times[i] - t) < std::abs(r.energy.times[best] - t)) best = i;
        }
        return r.energy.energies[best];
    };
    for (double t : {1.0, 3.0, 5.0}) {
        REQUIRE(energy_at(t + 2.0) / energy_at(t) == Approx(1.0 / 9.0).epsilon(0.1));
    }
}

TEST_CASE("converges towards the characteristics solution", "[fdtd][oracle]") {
    // Kinks in the delayed solution are smeared by the O(h) damping, so the observed
    // order sits near 0.8 rather than 1.
    std::vector<double> errors, steps;
    for (int j : {100, 200, 400}) {
        auto c = delayed_config(0.5, j, 10.0);
        c.trace_n = 8000;
        const std::vector<double> times{0.0, 2.5, 5.0, 7.5, 10.0};
        errors.push_back(analysis::compare_solvers(c, times).max_l2_error);
        steps.push_back(1.0 / j);
    }
    REQUIRE(errors[1] < errors[0]);
    REQUIRE(errors[2] < errors[1]);
    REQUIRE(analysis::convergence_order(errors, steps) >= 0.7);
}

TEST_CASE("run reports resolved parameters and samples", "[fdtd]") {
    auto c = delayed_config(0.5, 100, 6.0);
    c.sample_stride = 7;
    c.snapshot_times = {0.0, 3.0, 6.0};
    const auto r = run(c);
    REQUIRE(r.energy.solver == "fdtd");
    REQUIRE(r.resolved.h == Approx(0.01));
    REQUIRE(r.resolved.delay_steps.value() == 223);
    REQUIRE(*r.resolved.dt * 223 == Approx(2.0).epsilon(1e-15));
    REQUIRE(*r.resolved.lambda <= 0.9);
    REQUIRE(r.resolved.damping.value() > 0.0);
    const double dt = *r.resolved.dt;
    REQUIRE(r.energy.times[0] == Approx(0.5 * dt));
    REQUIRE(r.energy.times[1] - r.energy.times[0] == Approx(7 * dt));
    REQUIRE(r.snapshots.size() == 3);
    REQUIRE(r.snapshots[0].t == 0.0);
    REQUIRE(r.snapshots[1].t == Approx(3.0).margin(dt));
    REQUIRE(r.snapshots[2].t == Approx(6.0).margin(dt));
    for (int i = 0; i <= 100; ++i) REQUIRE(r.snapshots[0].y[i] == Approx(std::sin(kPi * i / 100.0)));
    REQUIRE(r.snapshots[1].y[0] == 0.0);
}

TEST_CASE("invalid discretisations are rejected", "[fdtd][errors]") {
    const auto data = sine_data(1.0);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 100, 1.2, BoundaryMode::free()), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 100, 0.0, BoundaryMode::free()), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 4, 0.9, BoundaryMode::free()), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 0.0, 100, 0.9, BoundaryMode::free()), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 100, 0.9, BoundaryMode::delayed(0.5), -1), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 100, 0.9, BoundaryMode::delayed(0.5), 0, 1.5), ConfigError);
    REQUIRE_THROWS_AS(init_field(data, 1.0, 100, 1.0, BoundaryMode::instant(1.0)), ConfigError);
    try {
        init_field(data, 1.0, 100, 1.2, BoundaryMode::free());
    } catch (const ConfigError& e) {
        REQUIRE(e.field() == "lambda");
    }
}

TEST_CASE("fault offset lengthens the delay actually read", "[fdtd]") {
    const auto ok = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::delayed(0.5));
    const auto bad = init_field(sine_data(1.0), 1.0, 100, 0.9, BoundaryMode::delayed(0.5), 3);
    REQUIRE(ok.delay_lag() == ok.delay_steps());
    REQUIRE(bad.delay_lag() == bad.delay_steps() + 3);
}
