// Small dense-vector helpers over raw spans of doubles, plus unit-sphere
// utilities used by the angular sampling and the Fourier grids.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "kacsim/rng.hpp"

namespace kacsim {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return std::sqrt(s);
}

// Surface measure of the unit sphere S^{d-1}.
inline double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Uniform unit vector on S^{d-1}.
inline void random_unit_vector(int d, Rng& rng, double* out) {
    double n = 0.0;
    do {
        n = 0.0;
        for (int k = 0; k < d; ++k) {
            out[k] = normal01(rng);
            n += out[k] * out[k];
        }
    } while (n == 0.0);
    n = std::sqrt(n);
    for (int k = 0; k < d; ++k) out[k] /= n;
}

// Uniform unit vector in the hyperplane orthogonal to u (|u| = 1).
inline void random_orthogonal_unit(std::span<const double> u, Rng& rng, double* out) {
    const int d = static_cast<int>(u.size());
    for (;;) {
        random_unit_vector(d, rng, out);
        double c = dot({out, u.size()}, u);
        double n = 0.0;
        for (int k = 0; k < d; ++k) {
            out[k] -= c * u[k];
            n += out[k] * out[k];
        }
        if (n > 1e-24) {
            n = std::sqrt(n);
            for (int k = 0; k < d; ++k) out[k] /= n;
            return;
        }
    }
}

// Deterministic, roughly equidistributed direction set on S^{d-1}.
// d=1: {+1}; d=2: uniform angles; d=3: spherical Fibonacci lattice.
std::vector<std::vector<double>> direction_set(int d, int n);

}  // namespace kacsim
