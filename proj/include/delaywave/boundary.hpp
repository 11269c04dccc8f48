#pragma once

#include <string>
#include <string_view>

#include "delaywave/errors.hpp"

namespace delaywave {

enum class BoundaryKind {
    Free,     ///< y_x(ell, t) = 0 for all t
    Instant,  ///< y_x(ell, t) = mu * y_t(ell, t)
    Delayed,  ///< y_x(ell, t) = 0 on (0, 2 ell), then mu * y_t(ell, t - 2 ell)
};

/// Boundary law at x = ell. `mu` is ignored for `Free`.
struct BoundaryMode {
    BoundaryKind kind = BoundaryKind::Free;
    double mu = 0.0;

    static BoundaryMode free() { return {BoundaryKind::Free, 0.0}; }
    static BoundaryMode instant(double mu) { return {BoundaryKind::Instant, mu}; }
    static BoundaryMode delayed(double mu) { return {BoundaryKind::Delayed, mu}; }

    friend bool operator==(const BoundaryMode&, const BoundaryMode&) = default;
};

inline std::string_view to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::Free: return "free";
        case BoundaryKind::Instant: return "instant";
        case BoundaryKind::Delayed: return "delayed";
    }
    return "?";
}

inline BoundaryKind parse_boundary_kind(std::string_view s) {
    if (s == "free") return BoundaryKind::Free;
    if (s == "instant") return BoundaryKind::Instant;
    if (s == "delayed") return BoundaryKind::Delayed;
    throw ConfigError("boundary", "expected free|instant|delayed, got '" + std::string(s) + "'");
}

}  // namespace delaywave
