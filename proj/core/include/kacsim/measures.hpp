// Empirical measures, moments, tensor observables and the polynomial /
// symmetrized evaluation maps that bridge E^N and P(E).
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kacsim/rng.hpp"

namespace kacsim {

struct EmpiricalMeasure {
    int d = 1;
    std::vector<double> points;   // n * d
    std::vector<double> weights;  // n entries, nonnegative, sum 1

    std::size_t count() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * d, static_cast<std::size_t>(d)};
    }

    static EmpiricalMeasure uniform(int d, std::vector<double> pts);
    static EmpiricalMeasure weighted(int d, std::vector<double> pts, std::vector<double> w);

    void validate() const;  // weights sum to 1 +- 1e-12, sizes consistent
};

// mu^N_V: uniform weights 1/N on the particle velocities.
EmpiricalMeasure empirical(std::span<const double> velocities, int d);

// n points drawn with replacement according to the weights; uniform output
// weights.  Deterministic in (mu, n, seed).
EmpiricalMeasure subsample(const EmpiricalMeasure& mu, std::size_t n, std::uint64_t seed);

// M_k = sum_i w_i |x_i|^k.
double moment(const EmpiricalMeasure& mu, double k);

// Mean of the measure, component-wise.
std::vector<double> mean_vector(const EmpiricalMeasure& mu);

enum class NormKind { Sup, Lipschitz, FourierF };

struct CosineTerm {
    double amplitude = 0.0;
    std::vector<double> frequency;  // xi_m
    double phase = 0.0;
};

struct TestFunction {
    std::function<double(std::span<const double>)> eval;
    NormKind norm_kind = NormKind::Sup;
    double norm = 1.0;
    std::vector<CosineTerm> packet;  // nonempty for cosine packets

    double operator()(std::span<const double> x) const { return eval(x); }

    // Declared norm must dominate the norm probed on a standard grid.
    bool norm_sanity_check(int d) const;
};

// phi(v) = sum_m a_m cos(xi_m . v + theta_m).  The F norm
// sum |a_m| (1 + |xi_m|^4) is exact; Sup and Lipschitz norms use the
// closed-form bounds sum |a_m| and sum |a_m| |xi_m|.
TestFunction cosine_packet(std::vector<CosineTerm> terms, NormKind kind = NormKind::FourierF);

// Smoothed ramp phi(v) = scale * tanh(w . v + c); Lipschitz norm scale * |w|.
TestFunction lipschitz_ramp(std::vector<double> direction, double offset, double scale = 1.0);

struct TensorObservable {
    std::vector<TestFunction> components;  // ell >= 1

    std::size_t order() const { return components.size(); }
    double norm() const;  // product of component norms
};

// R^ell_phi(rho) = prod_i <rho, phi_i>.
double poly_observable(const EmpiricalMeasure& rho, const TensorObservable& phi);

// Average of phi(v_{i_1}, ..., v_{i_ell}) over injective index tuples:
// the symmetrized observable (phi (x) 1^{N-ell})_sym evaluated at V.
// Closed form over set partitions; O(Bell(ell) * N).
double sym_observable(std::span<const double> velocities, int d, const TensorObservable& phi);

// |poly_observable(mu^N_V, phi) - sym_observable(V, phi)|; bounded by
// 2 ell^2 ||phi||_inf / N.  Requires N >= 2 ell.
double symmetrization_gap(std::span<const double> velocities, int d,
                          const TensorObservable& phi);

}  // namespace kacsim
