#pragma once

// Experiment helpers shared by the CLI and the verification suites:
// seeded random smooth initial data (sine series, compatible with
// homogeneous Dirichlet corners) and the observability-ratio trial study.

#include <cmath>
#include <random>
#include <vector>

#include "waveobs/hypersolve.hpp"
#include "waveobs/observe.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

struct RandomData {
    Func1 phi;
    Func1 psi;
};

// Random sine series sum_m a_m sin(m pi x / L), normalized to the given
// sup amplitude. Vanishes with its second derivative at both ends, so the
// data is corner-compatible with homogeneous Dirichlet conditions.
inline RandomData random_fourier_data(std::mt19937_64& rng, double L,
                                      double amplitude, int modes = 4) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> a(std::size_t(modes), 0.0);
    std::vector<double> b(std::size_t(modes), 0.0);
    double sa = 0.0, sb = 0.0;
    for (int m = 0; m < modes; ++m) {
        a[std::size_t(m)] = unit(rng) / double(m + 1);
        b[std::size_t(m)] = unit(rng) / double(m + 1);
        sa += std::fabs(a[std::size_t(m)]);
        sb += std::fabs(b[std::size_t(m)]);
    }
    const double ka = sa > 0.0 ? amplitude / sa : 0.0;
    const double kb = sb > 0.0 ? amplitude / sb : 0.0;
    const double pi = std::acos(-1.0);
    RandomData d;
    d.phi = [a, ka, L, pi](double x) {
        double s = 0.0;
        for (std::size_t m = 0; m < a.size(); ++m)
            s += a[m] * std::sin(double(m + 1) * pi * x / L);
        return ka * s;
    };
    d.psi = [b, kb, L, pi](double x) {
        double s = 0.0;
        for (std::size_t m = 0; m < b.size(); ++m)
            s += b[m] * std::sin(double(m + 1) * pi * x / L);
        return kb * s;
    };
    return d;
}

// Simulates the mixed problem for the given data and evaluates the
// two-sided observability ratio with the true data in the numerator.
inline double
observability_ratio_for_data(const Problem& base, const Grid& g,
                             const Func1& phi, const Func1& psi) {
    Problem p = base;
    p.phi = phi;
    p.psi = psi;
    const Field fwd = simulate_forward(p, g);
    const Observation ol = extract_observation(fwd, p.bc_left);
    const Observation orr = extract_observation(fwd, p.bc_right);
    const double dt = g.dt(), dx = g.dx();

    std::vector<double> phis(std::size_t(g.nx) + 1), psis(std::size_t(g.nx) + 1);
    for (int j = 0; j <= g.nx; ++j) {
        phis[std::size_t(j)] = phi(g.x(j));
        psis[std::size_t(j)] = psi(g.x(j));
    }
    const std::vector<NormedSeries> obs_series{{ol.k, ol.d, dt},
                                               {orr.k, orr.d, dt}};
    const std::vector<NormedSeries> h_series{
        {sample_func(p.bc_left.h.value, g.t0, dt, ol.k.size()), p.bc_left.l(),
         dt},
        {sample_func(p.bc_right.h.value, g.t0, dt, orr.k.size()),
         p.bc_right.l(), dt}};
    return observability_ratio({phis, 2, dx}, {psis, 1, dx}, obs_series,
                               h_series);
}

// Seeded trial study: ratios for `trials` random small data sets.
inline std::vector<double> ratio_study(const Problem& p, const Grid& g,
                                       int trials, std::uint64_t seed,
                                       double amplitude = 0.01) {
    std::mt19937_64 rng(seed);
    std::vector<double> ratios;
    ratios.reserve(std::size_t(trials));
    for (int i = 0; i < trials; ++i) {
        const RandomData d = random_fourier_data(rng, p.L, amplitude);
        ratios.push_back(observability_ratio_for_data(p, g, d.phi, d.psi));
    }
    return ratios;
}

} // namespace waveobs
