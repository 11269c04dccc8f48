#pragma once

// Stability of the round-trip recursion (Theta'(y), Theta'(y - 2 ell)) -> G_mu (..),
// with G_mu = [[mu - 1, -mu], [1, 0]] and characteristic polynomial
// p_mu(lambda) = lambda^2 + (1 - mu) lambda + mu.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include "delaywave/errors.hpp"

namespace delaywave::spectral {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Complex = std::complex<double>;

inline Matrix2 companion_matrix(double mu) { return {{{mu - 1.0, -mu}, {1.0, 0.0}}}; }

/// mu^2 - 6 mu + 1; zero at mu = 3 -+ 2 sqrt(2).
inline double discriminant(double mu) { return mu * mu - 6.0 * mu + 1.0; }

namespace detail {

// Discriminants this close to zero are rounding noise around the double root.
inline bool is_double_root(double mu) {
    const double scale = mu * mu + 6.0 * std::abs(mu) + 1.0;
    return std::abs(discriminant(mu)) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace detail

/// Roots of p_mu, (mu - 1 +- sqrt(mu^2 - 6 mu + 1)) / 2. Real roots use the
/// cancellation-free form (larger root by the quadratic formula, the other from the
/// product mu). Complex pairs are returned with positive imaginary part first.
inline std::array<Complex, 2> eigenvalues_closed_form(double mu) {
    const double b = 1.0 - mu;  // p = lambda^2 + b lambda + mu
    if (detail::is_double_root(mu)) {
        const double r = -0.5 * b;
        return {Complex(r, 0.0), Complex(r, 0.0)};
    }
    const double disc = discriminant(mu);
    if (disc > 0.0) {
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        // q != 0 because disc > 0 forces mu != 1 or b != 0.
        return {Complex(q, 0.0), Complex(mu / q, 0.0)};
    }
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {Complex(re, im), Complex(re, -im)};
}

/// Largest eigenvalue modulus of G_mu from the closed form.
inline double spectral_radius(double mu) {
    const auto ev = eigenvalues_closed_form(mu);
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

/// Spectral radius by repeated normalized squaring, rho = lim ||G^(2^k)||^(1/2^k).
/// Independent of the closed form; converges for complex pairs where plain vector
/// power iteration oscillates.
inline double spectral_radius_iterative(double mu, int iterations = 64) {
    Matrix2 g = companion_matrix(mu);
    auto norm = [](const Matrix2& a) {
        return std::sqrt(a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] +
                         a[1][1] * a[1][1]);
    };
    // Invariant: G^(2^k) = exp(log_scale) * g.
    double log_scale = 0.0;
    double power = 1.0;
    for (int k = 0; k < iterations; ++k) {
        const double s = norm(g);
        if (s == 0.0) return 0.0;
        for (auto& row : g) {
            for (double& v : row) v /= s;
        }
        log_scale += std::log(s);
        const Matrix2 sq{{{g[0][0] * g[0][0] + g[0][1] * g[1][0], g[0][0] * g[0][1] + g[0][1] * g[1][1]},
                          {g[1][0] * g[0][0] + g[1][1] * g[1][0], g[1][0] * g[0][1] + g[1][1] * g[1][1]}}};
        g = sq;
        log_scale *= 2.0;
        power *= 2.0;
    }
    const double s = norm(g);
    if (s == 0.0) return 0.0;
    return std::exp((log_scale + std::log(s)) / power);
}

/// Exponential stability of the delayed system: true exactly for mu in (0, 1).
/// Equivalent to spectral_radius(mu) < 1 wherever that is resolvable in floating point.
inline bool is_stable(double mu) { return mu > 0.0 && mu < 1.0; }

/// Energy decay rate omega = -ln(rho_mu) / ell, so that E(t) <~ exp(-omega t).
inline double predicted_decay_rate(double mu, double ell) {
    if (!is_stable(mu)) throw DomainError("predicted_decay_rate: mu must lie in (0, 1)");
    if (!(ell > 0.0)) throw DomainError("predicted_decay_rate: ell must be positive");
    return -std::log(spectral_radius(mu)) / ell;
}

struct SpectralReport {
    double mu = 0.0;
    std::array<Complex, 2> eigenvalues;
    double rho = 0.0;
    double discriminant = 0.0;
    bool simple = true;
    bool stable = false;
    std::optional<double> predicted_omega;
};

inline SpectralReport analyze(double mu, double ell = 1.0) {
    SpectralReport r;
    r.mu = mu;
    r.eigenvalues = eigenvalues_closed_form(mu);
    r.rho = std::max(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[1]));
    r.discriminant = discriminant(mu);
    r.simple = !detail::is_double_root(mu);
    r.stable = is_stable(mu);
    if (r.stable) r.predicted_omega = predicted_decay_rate(mu, ell);
    return r;
}

}  // namespace delaywave::spectral
