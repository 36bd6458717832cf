#include "kacsim/limit.hpp"

#include <cmath>
#include <stdexcept>

#include "kacsim/geometry.hpp"
#include "kacsim/quadrature.hpp"
#include "kacsim/stats.hpp"

namespace kacsim {

namespace {

constexpr std::uint64_t kStageRefF = 21;
constexpr std::uint64_t kStageRefG = 22;
constexpr std::uint64_t kStageSub = 23;
constexpr std::uint64_t kStageEq = 24;

EmpiricalMeasure pool(const std::vector<Trajectory>& trajs, std::size_t time_idx, int d,
                      std::size_t lo, std::size_t hi) {
    std::vector<double> pts;
    for (std::size_t r = lo; r < hi; ++r) {
        const auto& s = trajs[r].snapshots[time_idx];
        pts.insert(pts.end(), s.begin(), s.end());
    }
    return EmpiricalMeasure::uniform(d, std::move(pts));
}

}  // namespace

std::vector<double> Maxwellian::sample(std::size_t n, Rng& rng) const {
    const int d = dim();
    const double sd = std::sqrt(temperature);
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) out[i * d + k] = mean[k] + sd * normal01(rng);
    return out;
}

ReferenceSolution mean_field_reference(const InitialSampler& f0, const KernelSpec& spec,
                                       std::vector<double> times, std::size_t n_ref,
                                       std::size_t replicas, std::uint64_t seed) {
    if (n_ref < 1000) throw std::invalid_argument("mean_field_reference: n_ref >= 1000");
    if (replicas < 2) throw std::invalid_argument("mean_field_reference: replicas >= 2");
    auto trajs = simulate(f0, spec, times, replicas, seed);
    ReferenceSolution ref;
    ref.d = spec.d;
    ref.n_ref = n_ref;
    ref.replicas = replicas;
    ref.seed = seed;
    ref.times = std::move(times);
    const std::size_t half = replicas / 2;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
        ref.snapshots.push_back(pool(trajs, k, spec.d, 0, replicas));
        ref.half_a.push_back(pool(trajs, k, spec.d, 0, half));
        ref.half_b.push_back(pool(trajs, k, spec.d, half, replicas));
    }
    return ref;
}

Maxwellian equilibrium(const EmpiricalMeasure& mu) {
    Maxwellian m;
    m.mean = mean_vector(mu);
    double u2 = 0.0;
    for (double x : m.mean) u2 += x * x;
    m.temperature = (moment(mu, 2.0) - u2) / mu.d;
    if (!(m.temperature > 0.0))
        throw std::invalid_argument("equilibrium: zero temperature (degenerate data)");
    return m;
}

ContractionReport contraction_check(const InitialSampler& f0, const InitialSampler& g0,
                                    const KernelSpec& spec, std::vector<double> times,
                                    std::size_t n_ref, std::size_t replicas,
                                    std::uint64_t seed, std::size_t nsub) {
    if (spec.gamma_exponent != 0)
        throw std::invalid_argument("contraction_check: Maxwell molecules only");
    auto rf = mean_field_reference(f0, spec, times, n_ref, replicas,
                                   mix_seed(seed, kStageRefF));
    auto rg = mean_field_reference(g0, spec, times, n_ref, replicas,
                                   mix_seed(seed, kStageRefG));

    // Shared mean and energy are required for |.|_2 to be finite; check at
    // t = 0 against the pooled sampling error.
    {
        const auto& a = rf.snapshots[0];
        const auto& b = rg.snapshots[0];
        auto ma = mean_vector(a), mb = mean_vector(b);
        double m2a = moment(a, 2.0), m2b = moment(b, 2.0);
        double se = std::sqrt((m2a + m2b) / static_cast<double>(a.count()));
        for (int k = 0; k < spec.d; ++k)
            if (std::fabs(ma[k] - mb[k]) > 6.0 * se + 1e-9)
                throw std::invalid_argument("contraction_check: initial means differ");
        double se2 = std::sqrt((moment(a, 4.0) + moment(b, 4.0)) /
                               static_cast<double>(a.count()));
        if (std::fabs(m2a - m2b) > 6.0 * se2 + 1e-9)
            throw std::invalid_argument("contraction_check: initial energies differ");
    }

    ContractionReport rep;
    rep.times = rf.times;
    FourierGrid fg;
    fg.taylor_compensate = true;  // sample means only match statistically
    for (std::size_t k = 0; k < rf.times.size(); ++k) {
        auto sub = [&](const EmpiricalMeasure& m, std::uint64_t tag) {
            return subsample(m, nsub, mix_seed(mix_seed(seed, kStageSub), k * 8 + tag));
        };
        auto f = sub(rf.snapshots[k], 0), g = sub(rg.snapshots[k], 1);
        auto fa = sub(rf.half_a[k], 2), fb = sub(rf.half_b[k], 3);
        auto ga = sub(rg.half_a[k], 4), gb = sub(rg.half_b[k], 5);
        rep.toscani2.push_back(toscani_norm(f, g, 2.0, fg).value);
        rep.w2.push_back(wasserstein(f, g, 2.0));
        rep.noise_toscani2.push_back(std::max(toscani_norm(fa, fb, 2.0, fg).value,
                                              toscani_norm(ga, gb, 2.0, fg).value));
        rep.noise_w2.push_back(
            std::max(wasserstein(fa, fb, 2.0), wasserstein(ga, gb, 2.0)));
    }
    double run_min_t = rep.toscani2[0], run_min_w = rep.w2[0];
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        bool vt = rep.toscani2[k] > run_min_t + 2.0 * rep.noise_toscani2[k];
        bool vw = rep.w2[k] > run_min_w + 2.0 * rep.noise_w2[k];
        rep.toscani2_violation.push_back(vt);
        rep.w2_violation.push_back(vw);
        rep.any_violation = rep.any_violation || vt || vw;
        run_min_t = std::min(run_min_t, rep.toscani2[k]);
        run_min_w = std::min(run_min_w, rep.w2[k]);
    }
    return rep;
}

double angular_relaxation_rate(const KernelSpec& spec) {
    auto integrand = [&](double th) {
        double s = std::sin(th);
        return spec.angular_density_theta(th) * s * s * 0.5;
    };
    return sphere_area(spec.d - 1) *
           integrate_gl(integrand, spec.theta_lo, spec.theta_hi, 16, 32);
}

RelaxationFit relaxation_fit(const ReferenceSolution& ref, const KernelSpec& spec,
                             std::size_t nsub) {
    RelaxationFit fit;
    fit.lambda_bar = angular_relaxation_rate(spec);
    fit.times = ref.times;
    Maxwellian eq = equilibrium(ref.snapshots[0]);
    Rng rng = make_stream(ref.seed, kStageEq);
    auto eq_a = EmpiricalMeasure::uniform(ref.d, eq.sample(nsub, rng));
    auto eq_b = EmpiricalMeasure::uniform(ref.d, eq.sample(nsub, rng));
    const double floor = wasserstein(eq_a, eq_b, 1.0);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
        auto sub = subsample(ref.snapshots[k], nsub,
                             mix_seed(mix_seed(ref.seed, kStageSub), k));
        double dst = wasserstein(sub, eq_a, 1.0);
        fit.distances.push_back(dst);
        if (dst > 1.5 * floor) {
            xs.push_back(ref.times[k]);
            ys.push_back(std::log(dst));
        }
    }
    if (xs.size() >= 3) {
        stats::LineFit lf = stats::fit_line(xs, ys);
        fit.lambda_hat = -lf.slope;
        fit.r2 = lf.r2;
        fit.linear_regime = lf.r2 >= 0.9 && lf.slope < 0.0;
    }
    return fit;
}

}  // namespace kacsim
