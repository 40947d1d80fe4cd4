#pragma once

// Observability-time analysis. The sharp conditions integrate the worst
// zero-state speed over the observation window:
//     two-sided:  int_{t0}^{t0+T} inf_x c(t,x,0,0,0) dt > L
//     one-sided:  the same integral > 2L.
// The strict inequality gates the reconstruction pipelines; the boundary
// case integral == threshold is reported as "critical".

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "waveobs/domains.hpp" // ObservationMode
#include "waveobs/errors.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

struct TimeCondition {
    ObservationMode mode = ObservationMode::two_sided;
    double threshold = 1.0;
    double t0 = 0.0;
    double T = 1.0;
    double integral_value = 0.0;
    bool passes = false;
    bool critical = false; // integral within tolerance of the threshold
};

namespace detail {

// inf over the x-lattice of c(t, x, 0, 0, 0).
inline double min_speed_at(const Problem& p, double t, int nx_lattice = 256) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= nx_lattice; ++j)
        m = std::min(m, p.c0(t, p.L * double(j) / double(nx_lattice)));
    return m;
}

} // namespace detail

inline double observability_threshold(const Problem& p, ObservationMode mode) {
    return mode == ObservationMode::two_sided ? p.L : 2.0 * p.L;
}

// Composite Simpson of inf_x c(t,x,0,0,0) over [t0, t0+T].
inline double observability_integral(const Problem& p, double t0, double T,
                                     int nt_intervals = 2048,
                                     int nx_lattice = 256) {
    if (nt_intervals % 2) ++nt_intervals;
    const double h = T / double(nt_intervals);
    double sum = detail::min_speed_at(p, t0, nx_lattice) +
                 detail::min_speed_at(p, t0 + T, nx_lattice);
    for (int i = 1; i < nt_intervals; ++i)
        sum += (i % 2 ? 4.0 : 2.0) *
               detail::min_speed_at(p, t0 + h * double(i), nx_lattice);
    return sum * h / 3.0;
}

inline TimeCondition check_time_condition(const Problem& p, double t0, double T,
                                          ObservationMode mode) {
    if (!(T > 0.0))
        throw ValidationError("obstime", "observation time T must be > 0");
    TimeCondition tc;
    tc.mode = mode;
    tc.threshold = observability_threshold(p, mode);
    tc.t0 = t0;
    tc.T = T;
    tc.integral_value = observability_integral(p, t0, T);
    tc.passes = tc.integral_value > tc.threshold;
    tc.critical =
        std::fabs(tc.integral_value - tc.threshold) <= 1e-9 * std::max(1.0, tc.threshold);
    return tc;
}

struct MinTimeResult {
    bool found = false;
    double T_star = 0.0; // meaningful when found
};

// Smallest T <= horizon with cumulative integral == threshold, by
// bisection (to 1e-8) on the monotone cumulative integral tabulated on a
// dense time lattice. Returns "never within horizon" when even the full
// horizon stays below the threshold.
inline MinTimeResult min_observability_time(const Problem& p, double t0,
                                            ObservationMode mode,
                                            double horizon,
                                            std::optional<double> L_override = {},
                                            int table_intervals = 4096,
                                            int nx_lattice = 256) {
    if (!(horizon > 0.0))
        throw ValidationError("obstime", "horizon must be > 0");
    const double L = L_override.value_or(p.L);
    const double threshold = mode == ObservationMode::two_sided ? L : 2.0 * L;

    if (table_intervals % 2) ++table_intervals;
    const double h = horizon / double(table_intervals);
    std::vector<double> m(std::size_t(table_intervals) + 1);
    for (int i = 0; i <= table_intervals; ++i)
        m[std::size_t(i)] = detail::min_speed_at(p, t0 + h * double(i), nx_lattice);
    // Cumulative Simpson prefix (half-segment Newton-Cotes at odd nodes).
    std::vector<double> prefix(m.size(), 0.0);
    for (std::size_t i = 0; i + 2 < m.size(); i += 2) {
        prefix[i + 1] =
            prefix[i] + h / 12.0 * (5.0 * m[i] + 8.0 * m[i + 1] - m[i + 2]);
        prefix[i + 2] = prefix[i] + h / 3.0 * (m[i] + 4.0 * m[i + 1] + m[i + 2]);
    }

    // "Never within horizon" when the full-horizon integral stays at or
    // below the threshold (tolerance absorbs quadrature roundoff at exact
    // boundary cases such as improper integrals equal to the threshold).
    if (prefix.back() < threshold + 1e-9 * std::max(1.0, threshold))
        return {false, 0.0};

    auto cumulative = [&](double T) {
        const double pos = T / h;
        const std::size_t i = std::min(std::size_t(pos), m.size() - 2);
        const double frac = pos - double(i);
        // Linear interpolation of the prefix within a cell.
        const double inc = 0.5 * (h * frac) *
                           (m[i] + m[i] + frac * (m[i + 1] - m[i]));
        return prefix[i] + inc;
    };

    double lo = 0.0, hi = horizon;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (cumulative(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    return {true, 0.5 * (lo + hi)};
}

enum class ObservabilityClass { all, some, none };
inline const char* observability_class_name(ObservabilityClass k) {
    switch (k) {
    case ObservabilityClass::all: return "all";
    case ObservabilityClass::some: return "some";
    case ObservabilityClass::none: return "none";
    }
    return "?";
}

struct ClassificationRow {
    double t0 = 0.0;
    bool found = false;
    double T_star = 0.0;
};

struct Classification {
    ObservabilityClass kind = ObservabilityClass::none;
    std::vector<ClassificationRow> rows;
};

// Runs min_observability_time for each initial time on the grid and
// classifies: observability holds for all, some, or none of them.
inline Classification classify_initial_times(const Problem& p, double L,
                                             ObservationMode mode,
                                             const std::vector<double>& t0_grid,
                                             double horizon) {
    if (t0_grid.empty())
        throw ValidationError("obstime", "empty t0 grid");
    Classification cls;
    std::size_t hits = 0;
    for (double t0 : t0_grid) {
        const MinTimeResult r = min_observability_time(p, t0, mode, horizon, L);
        cls.rows.push_back({t0, r.found, r.T_star});
        if (r.found) ++hits;
    }
    cls.kind = hits == 0               ? ObservabilityClass::none
               : hits == cls.rows.size() ? ObservabilityClass::all
                                         : ObservabilityClass::some;
    return cls;
}

// Autonomous specialization: when c does not depend on t, observability
// holds for any initial time once T exceeds sup_x L/c (two-sided) or
// sup_x 2L/c (one-sided).
inline double autonomous_bound(const Problem& p, ObservationMode mode,
                               int nx_lattice = 256) {
    // Verify t-independence by sampling.
    constexpr int kTSamples = 16;
    for (int j = 0; j <= nx_lattice; ++j) {
        const double x = p.L * double(j) / double(nx_lattice);
        const double ref = p.c0(p.t0, x);
        for (int i = 1; i < kTSamples; ++i) {
            const double t = p.t0 + double(i) * 0.7318; // spread sample times
            if (std::fabs(p.c0(t, x) - ref) > 1e-10)
                throw ValidationError(
                    "obstime",
                    "autonomous bound requested but c depends on t (c(" +
                        std::to_string(t) + "," + std::to_string(x) +
                        ") differs from c(t0,x))",
                    ErrorCode::not_autonomous);
        }
    }
    const double num = mode == ObservationMode::two_sided ? p.L : 2.0 * p.L;
    double bound = 0.0;
    for (int j = 0; j <= nx_lattice; ++j) {
        const double x = p.L * double(j) / double(nx_lattice);
        bound = std::max(bound, num / p.c0(p.t0, x));
    }
    return bound;
}

} // namespace waveobs
