// Collision kernel families B = Gamma(|v-v_*|) b(cos theta), the elastic
// post-collision map, and angular scattering sampling.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kacsim/rng.hpp"

namespace kacsim {

enum class AngularLaw : std::uint8_t { GradCutoff, PowerLaw, Tabulated };

// Immutable after construction (use the factories); safe to share across
// workers.  Sampling takes an explicit per-worker RNG.
struct KernelSpec {
    int d = 3;                  // velocity dimension, >= 2
    int gamma_exponent = 0;     // 0 = Maxwell, 1 = hard spheres
    AngularLaw law = AngularLaw::GradCutoff;

    double b_const = 0.0;       // GradCutoff: b == b_const
    double nu = 0.0;            // PowerLaw: grazing exponent, in (0,2)
    double eps_cut = 0.0;       // PowerLaw: angular truncation theta >= eps_cut
    double c_b = 1.0;           // PowerLaw: normalization prefactor
    std::vector<double> tab_theta, tab_b;  // Tabulated: b(cos theta) vs theta

    double angular_mass = 0.0;  // ||b||_{L1(S^{d-1})}
    double theta_lo = 0.0, theta_hi = 0.0;

    // Inverse CDF of the deviation angle, 2^14 equispaced quantiles.
    std::vector<double> theta_inv_cdf;

    static KernelSpec maxwell_grad_cutoff(int d, double b_const);
    static KernelSpec hard_sphere(int d, double b_const);
    // gamma_exponent 0 gives the cutoff Maxwell-molecule family.
    static KernelSpec power_law(int d, int gamma_exponent, double nu, double eps_cut,
                                double c_b = 1.0);
    static KernelSpec tabulated(int d, int gamma_exponent,
                                std::vector<double> theta, std::vector<double> b);

    double angular_b(double cos_theta) const;       // b(cos theta)
    double angular_density_theta(double theta) const;  // b(cos th) sin^{d-2} th
    double gamma_of(double z) const { return gamma_exponent == 0 ? 1.0 : z; }

    double sample_theta(Rng& rng) const;  // inverse-CDF table lookup
};

// Elastic collision: midpoint +/- |v - v_*| sigma / 2.  Total momentum and
// kinetic energy are invariant.  v == v_* collapses to (v, v) for any sigma.
void post_collision(std::span<const double> v, std::span<const double> v_star,
                    std::span<const double> sigma, std::span<double> v_out,
                    std::span<double> v_star_out);

// Draw sigma on S^{d-1} with density b(sigma . u_hat) / ||b||_1, azimuthally
// uniform around u_hat.  u_hat must be a unit vector.
void sample_sigma(std::span<const double> u_hat, const KernelSpec& spec, Rng& rng,
                  std::span<double> sigma_out);

// Gamma(|v_i - v_j|) ||b||_1 : the jump rate carried by one ordered pair.
double pair_rate(std::span<const double> v_i, std::span<const double> v_j,
                 const KernelSpec& spec);

}  // namespace kacsim
