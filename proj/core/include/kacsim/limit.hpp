// Mean-field reference solutions of the limiting homogeneous Boltzmann
// dynamics, obtained from the particle simulator at large N_ref, plus the
// contraction and equilibrium diagnostics that validate them.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kacsim/measures.hpp"
#include "kacsim/metrics.hpp"
#include "kacsim/particle.hpp"

namespace kacsim {

struct Maxwellian {
    std::vector<double> mean;
    double temperature = 1.0;  // covariance temperature * Id

    int dim() const { return static_cast<int>(mean.size()); }
    std::vector<double> sample(std::size_t n, Rng& rng) const;  // flat n * d
    CharFn characteristic() const { return gaussian_char_fn(mean, temperature); }
};

struct ReferenceSolution {
    int d = 3;
    std::size_t n_ref = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    std::vector<double> times;
    // Replica-pooled snapshots, plus the two disjoint replica-half pools used
    // as the Monte Carlo noise model.
    std::vector<EmpiricalMeasure> snapshots;
    std::vector<EmpiricalMeasure> half_a, half_b;
};

// Runs `replicas` independent N_ref-particle simulations and pools them.
// Requires n_ref >= 1000 and replicas >= 2.
ReferenceSolution mean_field_reference(const InitialSampler& f0, const KernelSpec& spec,
                                       std::vector<double> times, std::size_t n_ref,
                                       std::size_t replicas, std::uint64_t seed);

// Gaussian with the mean and temperature theta = (M_2 - |u|^2)/d of mu.
// Throws if the centered energy vanishes.
Maxwellian equilibrium(const EmpiricalMeasure& mu);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> toscani2, w2;              // pooled f vs g series
    std::vector<double> noise_toscani2, noise_w2;  // split-half self-distances
    std::vector<bool> toscani2_violation, w2_violation;  // beyond 2x noise
    bool any_violation = false;
};

// Maxwell molecules only (gamma_exponent must be 0).  f0 and g0 must share
// mean and energy; checked on the t=0 pools (tolerance in units of the
// Monte Carlo error).  Distances computed on `subsample`-point subsamples.
ContractionReport contraction_check(const InitialSampler& f0, const InitialSampler& g0,
                                    const KernelSpec& spec, std::vector<double> times,
                                    std::size_t n_ref, std::size_t replicas,
                                    std::uint64_t seed, std::size_t subsample = 512);

struct RelaxationFit {
    double lambda_hat = 0.0;   // fitted decay rate of distance-to-equilibrium
    double r2 = 0.0;
    bool linear_regime = false;  // false means "no decay detected"
    double lambda_bar = 0.0;     // closed-form angular spectral rate
    std::vector<double> times, distances;
};

// Least-squares rate of log W_1(f_t, equilibrium) over the window where the
// signal clears 1.5x the sampling floor, plus the quadrature value of
// lambda_bar = int b(sigma.xi)(1 - (sigma.xi)^2)/2 dsigma.
RelaxationFit relaxation_fit(const ReferenceSolution& ref, const KernelSpec& spec,
                             std::size_t subsample = 1024);

// The closed-form spectral quantity above, by 1-D quadrature of the angular
// law (reduces to |S^{d-2}| int b(cos th) sin^2 th / 2 sin^{d-2} th dth).
double angular_relaxation_rate(const KernelSpec& spec);

}  // namespace kacsim
