#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "delaywave/errors.hpp"

namespace delaywave {

/// Initial displacement y0, its derivative, and initial velocity y1 on [0, ell].
struct InitialData {
    std::function<double(double)> y0;
    std::function<double(double)> y0_prime;
    std::function<double(double)> y1;
};

/// y0 = y1 = sin(pi x / ell); for ell = 1 this is the standard sin(pi x) test case.
inline InitialData sine_data(double ell) {
    const double k = std::numbers::pi / ell;
    return {
        [k](double x) { return std::sin(k * x); },
        [k](double x) { return k * std::cos(k * x); },
        [k](double x) { return std::sin(k * x); },
    };
}

/// y0 = sin(pi x / (2 ell)), y1 = 0. Satisfies y0'(ell) = 0, so the characteristic
/// profile has no jump at the Neumann corner.
inline InitialData quarter_sine_data(double ell) {
    const double k = std::numbers::pi / (2.0 * ell);
    return {
        [k](double x) { return std::sin(k * x); },
        [k](double x) { return k * std::cos(k * x); },
        [](double) { return 0.0; },
    };
}

inline InitialData zero_data() {
    auto zero = [](double) { return 0.0; };
    return {zero, zero, zero};
}

/// Multiplies displacement and velocity by `c`.
inline InitialData scaled(InitialData data, double c) {
    return {
        [f = data.y0, c](double x) { return c * f(x); },
        [f = data.y0_prime, c](double x) { return c * f(x); },
        [f = data.y1, c](double x) { return c * f(x); },
    };
}

namespace detail {

struct Table {
    std::vector<double> x;
    std::vector<double> y;

    // Index i with x[i] <= s < x[i+1], clamped to the table.
    std::size_t cell(double s) const {
        auto it = std::upper_bound(x.begin(), x.end(), s);
        std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
        return std::min(i, x.size() - 2);
    }

    double value(double s) const {
        const std::size_t i = cell(s);
        const double w = (s - x[i]) / (x[i + 1] - x[i]);
        return (1.0 - w) * y[i] + w * y[i + 1];
    }

    double slope(double s) const {
        const std::size_t i = cell(s);
        return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
};

}  // namespace detail

/// Piecewise-linear initial data from samples. When `y0_prime` is empty the derivative
/// is the slope of the linear interpolant (right-sided at interior samples).
inline InitialData tabulated_data(std::vector<double> x, std::vector<double> y0,
                                  std::vector<double> y1,
                                  std::vector<double> y0_prime = {}) {
    if (x.size() < 2) throw ConfigError("initial", "tabulated data needs at least two samples");
    if (y0.size() != x.size() || y1.size() != x.size() ||
        (!y0_prime.empty() && y0_prime.size() != x.size())) {
        throw ConfigError("initial", "tabulated columns have different lengths");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw ConfigError("initial", "tabulated x must be strictly increasing");
    }
    auto t0 = std::make_shared<detail::Table>(detail::Table{x, std::move(y0)});
    auto t1 = std::make_shared<detail::Table>(detail::Table{x, std::move(y1)});
    InitialData data;
    data.y0 = [t0](double s) { return t0->value(s); };
    data.y1 = [t1](double s) { return t1->value(s); };
    if (y0_prime.empty()) {
        data.y0_prime = [t0](double s) { return t0->slope(s); };
    } else {
        auto tp = std::make_shared<detail::Table>(detail::Table{std::move(x), std::move(y0_prime)});
        data.y0_prime = [tp](double s) { return tp->value(s); };
    }
    return data;
}

/// Reads a CSV with header `x,y0,y1` or `x,y0,y1,y0_prime`.
inline InitialData load_tabulated_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("initial", "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("initial", "empty file '" + path + "'");
    const bool has_prime = line.find("y0_prime") != std::string::npos;
    std::vector<double> x, y0, y1, yp;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        std::vector<double> cols;
        std::string cell;
        while (std::getline(row, cell, ',')) {
            std::istringstream c(cell);
            c.imbue(std::locale::classic());
            double v = 0.0;
            if (!(c >> v)) {
                throw ConfigError("initial", path + ":" + std::to_string(lineno) + ": bad number");
            }
            cols.push_back(v);
        }
        if (cols.size() != (has_prime ? 4u : 3u)) {
            throw ConfigError("initial", path + ":" + std::to_string(lineno) + ": wrong column count");
        }
        x.push_back(cols[0]);
        y0.push_back(cols[1]);
        y1.push_back(cols[2]);
        if (has_prime) yp.push_back(cols[3]);
    }
    return tabulated_data(std::move(x), std::move(y0), std::move(y1), std::move(yp));
}

/// Checks the Dirichlet compatibility y0(0) = 0 and finiteness on `probes` points of [0, ell].
inline void validate(const InitialData& data, double ell, int probes = 257) {
    if (!data.y0 || !data.y0_prime || !data.y1) {
        throw ConfigError("initial", "initial data must provide y0, y0', and y1");
    }
    if (std::abs(data.y0(0.0)) > 1e-12) {
        throw ConfigError("initial", "y0(0) must vanish to match the Dirichlet boundary");
    }
    for (int i = 0; i < probes; ++i) {
        const double x = ell * i / (probes - 1);
        if (!std::isfinite(data.y0(x)) || !std::isfinite(data.y0_prime(x)) ||
            !std::isfinite(data.y1(x))) {
            throw ConfigError("initial", "initial data is not finite at x = " + std::to_string(x));
        }
    }
}

}  // namespace delaywave
