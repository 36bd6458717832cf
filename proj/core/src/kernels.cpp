#include "kacsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kacsim/geometry.hpp"

namespace kacsim {

namespace {

constexpr int kInvCdfNodes = 1 << 14;
constexpr int kCdfResolution = 1 << 16;

// Tabulate the inverse CDF of theta with density prop. to
// b(cos theta) sin^{d-2}(theta) on [theta_lo, theta_hi], and compute
// ||b||_1 = |S^{d-2}| * integral of that density.
void finalize(KernelSpec& spec) {
    if (spec.d < 2) throw std::invalid_argument("KernelSpec: dimension must be >= 2");
    const double lo = spec.theta_lo, hi = spec.theta_hi;
    if (!(hi > lo)) throw std::invalid_argument("KernelSpec: empty angular range");

    std::vector<double> cdf(kCdfResolution + 1, 0.0);
    const double h = (hi - lo) / kCdfResolution;
    double prev = spec.angular_density_theta(lo);
    for (int i = 1; i <= kCdfResolution; ++i) {
        double cur = spec.angular_density_theta(lo + i * h);
        cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double total = cdf[kCdfResolution];
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("KernelSpec: angular mass must be positive and finite");
    spec.angular_mass = sphere_area(spec.d - 1) * total;

    spec.theta_inv_cdf.assign(kInvCdfNodes, 0.0);
    int j = 0;
    for (int k = 0; k < kInvCdfNodes; ++k) {
        const double target = total * k / (kInvCdfNodes - 1);
        while (j < kCdfResolution && cdf[j + 1] < target) ++j;
        double t0 = cdf[j], t1 = cdf[j + 1];
        double frac = (t1 > t0) ? (target - t0) / (t1 - t0) : 0.0;
        spec.theta_inv_cdf[k] = lo + (j + frac) * h;
    }
    spec.theta_inv_cdf.back() = hi;
}

}  // namespace

double KernelSpec::angular_b(double cos_theta) const {
    switch (law) {
        case AngularLaw::GradCutoff:
            return b_const;
        case AngularLaw::PowerLaw: {
            double th = std::acos(std::clamp(cos_theta, -1.0, 1.0));
            if (th < eps_cut) return 0.0;
            return c_b * std::pow(th, -(d - 1) - nu);
        }
        case AngularLaw::Tabulated: {
            double th = std::acos(std::clamp(cos_theta, -1.0, 1.0));
            if (th <= tab_theta.front()) return tab_b.front();
            if (th >= tab_theta.back()) return tab_b.back();
            auto it = std::upper_bound(tab_theta.begin(), tab_theta.end(), th);
            std::size_t i = static_cast<std::size_t>(it - tab_theta.begin()) - 1;
            double w = (th - tab_theta[i]) / (tab_theta[i + 1] - tab_theta[i]);
            return (1.0 - w) * tab_b[i] + w * tab_b[i + 1];
        }
    }
    return 0.0;
}

double KernelSpec::angular_density_theta(double theta) const {
    double s = (d == 2) ? 1.0 : std::pow(std::sin(theta), d - 2);
    return angular_b(std::cos(theta)) * s;
}

double KernelSpec::sample_theta(Rng& rng) const {
    const double u = uniform01(rng) * (theta_inv_cdf.size() - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(u), theta_inv_cdf.size() - 2);
    const double frac = u - static_cast<double>(k);
    return theta_inv_cdf[k] + frac * (theta_inv_cdf[k + 1] - theta_inv_cdf[k]);
}

KernelSpec KernelSpec::maxwell_grad_cutoff(int d, double b_const) {
    KernelSpec s;
    s.d = d;
    s.gamma_exponent = 0;
    s.law = AngularLaw::GradCutoff;
    s.b_const = b_const;
    s.theta_lo = 0.0;
    s.theta_hi = std::numbers::pi;
    finalize(s);
    return s;
}

KernelSpec KernelSpec::hard_sphere(int d, double b_const) {
    KernelSpec s = maxwell_grad_cutoff(d, b_const);
    s.gamma_exponent = 1;
    return s;
}

KernelSpec KernelSpec::power_law(int d, int gamma_exponent, double nu, double eps_cut,
                                 double c_b) {
    if (!(nu > 0.0 && nu < 2.0)) throw std::invalid_argument("power_law: nu in (0,2)");
    if (!(eps_cut > 0.0)) throw std::invalid_argument("power_law: eps_cut must be > 0");
    KernelSpec s;
    s.d = d;
    s.gamma_exponent = gamma_exponent;
    s.law = AngularLaw::PowerLaw;
    s.nu = nu;
    s.eps_cut = eps_cut;
    s.c_b = c_b;
    s.theta_lo = eps_cut;
    s.theta_hi = std::numbers::pi;
    finalize(s);
    return s;
}

KernelSpec KernelSpec::tabulated(int d, int gamma_exponent, std::vector<double> theta,
                                 std::vector<double> b) {
    if (theta.size() < 2 || theta.size() != b.size())
        throw std::invalid_argument("tabulated: need matching grids, >= 2 nodes");
    KernelSpec s;
    s.d = d;
    s.gamma_exponent = gamma_exponent;
    s.law = AngularLaw::Tabulated;
    s.theta_lo = theta.front();
    s.theta_hi = theta.back();
    s.tab_theta = std::move(theta);
    s.tab_b = std::move(b);
    finalize(s);
    return s;
}

void post_collision(std::span<const double> v, std::span<const double> v_star,
                    std::span<const double> sigma, std::span<double> v_out,
                    std::span<double> v_star_out) {
    const std::size_t d = v.size();
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        double t = v[k] - v_star[k];
        r2 += t * t;
    }
    const double half_u = 0.5 * std::sqrt(r2);
    for (std::size_t k = 0; k < d; ++k) {
        double mid = 0.5 * (v[k] + v_star[k]);
        v_out[k] = mid + half_u * sigma[k];
        v_star_out[k] = mid - half_u * sigma[k];
    }
}

void sample_sigma(std::span<const double> u_hat, const KernelSpec& spec, Rng& rng,
                  std::span<double> sigma_out) {
    const int d = spec.d;
    const double theta = spec.sample_theta(rng);
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> w(d);
    random_orthogonal_unit(u_hat, rng, w.data());
    for (int k = 0; k < d; ++k) sigma_out[k] = c * u_hat[k] + s * w[k];
}

double pair_rate(std::span<const double> v_i, std::span<const double> v_j,
                 const KernelSpec& spec) {
    return spec.gamma_of(dist(v_i, v_j)) * spec.angular_mass;
}

}  // namespace kacsim
