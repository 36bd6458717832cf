#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kacsim/limit.hpp"
#include "kacsim/stats.hpp"

using namespace kacsim;

namespace {

constexpr double kInvS2 = 1.0 / (4.0 * std::numbers::pi);

InitialSampler gaussian_sampler(std::size_t n, int d, double theta) {
    return [n, d, theta](Rng& rng) {
        std::vector<double> v(n * d);
        for (auto& x : v) x = std::sqrt(theta) * normal01(rng);
        return v;
    };
}

InitialSampler two_point_sampler(std::size_t n) {
    // half the particles at +e1, half at -e1: mean 0, M2 = 1, far from Gaussian
    return [n](Rng&) {
        std::vector<double> v(n * 3, 0.0);
        for (std::size_t i = 0; i < n; ++i) v[3 * i] = (i % 2 == 0) ? 1.0 : -1.0;
        return v;
    };
}

}  // namespace

TEST_CASE("equilibrium moments: exact two-point case and translation covariance") {
    auto pm = EmpiricalMeasure::uniform(3, {1, 0, 0, -1, 0, 0});
    auto eq = equilibrium(pm);
    CHECK(eq.mean == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(eq.temperature == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto shifted = pm;
    for (std::size_t i = 0; i < shifted.count(); ++i) shifted.points[3 * i + 1] += 2.5;
    auto eq2 = equilibrium(shifted);
    CHECK(eq2.mean[1] == doctest::Approx(2.5));
    CHECK(eq2.temperature == doctest::Approx(eq.temperature).epsilon(1e-12));

    CHECK_THROWS(equilibrium(EmpiricalMeasure::uniform(3, {1, 1, 1})));  // zero variance
}

TEST_CASE("maxwellian sampling matches its declared moments") {
    Maxwellian m;
    m.mean = {0.5, -1.0, 0.0};
    m.temperature = 0.7;
    Rng rng = make_stream(51, 1);
    const std::size_t n = 100000;
    auto v = m.sample(n, rng);
    REQUIRE(v.size() == 3 * n);
    auto mu = empirical(v, 3);
    auto mean = mean_vector(mu);
    double se = std::sqrt(0.7 / n);
    for (int k = 0; k < 3; ++k) CHECK(std::fabs(mean[k] - m.mean[k]) <= 4.0 * se);
    auto back = equilibrium(mu);
    CHECK(std::fabs(back.temperature - 0.7) <= 4.0 * 0.7 * std::sqrt(2.0 / (3.0 * n)));
}

TEST_CASE("angular relaxation rate: closed form and riemann oracle") {
    // constant b = 1/(4 pi): 2 pi int b sin^3/2 = 1/3
    auto mw = KernelSpec::maxwell_grad_cutoff(3, kInvS2);
    CHECK(angular_relaxation_rate(mw) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

    auto pl = KernelSpec::power_law(3, 0, 0.5, 0.2);
    double riemann = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        double th = (i + 0.5) * std::numbers::pi / n;
        riemann += pl.angular_b(std::cos(th)) * 0.5 * std::sin(th) * std::sin(th) *
                   std::sin(th) * std::numbers::pi / n;
    }
    riemann *= 2.0 * std::numbers::pi;  // |S^1|
    CHECK(angular_relaxation_rate(pl) == doctest::Approx(riemann).epsilon(1e-5));
}

TEST_CASE("mean_field_reference pools replicas and conserves the invariants") {
    auto mw = KernelSpec::maxwell_grad_cutoff(3, kInvS2);
    const std::size_t n_ref = 1000, reps = 3;
    auto ref = mean_field_reference(gaussian_sampler(n_ref, 3, 0.5), mw, {0.0, 1.0, 3.0},
                                    n_ref, reps, 61);
    REQUIRE(ref.snapshots.size() == 3);
    CHECK(ref.snapshots[0].count() == n_ref * reps);
    CHECK(ref.half_a[0].count() + ref.half_b[0].count() == n_ref * reps);

    // t = 0 pool reproduces f0
    auto mean0 = mean_vector(ref.snapshots[0]);
    double se = std::sqrt(0.5 / (n_ref * reps));
    for (int k = 0; k < 3; ++k) CHECK(std::fabs(mean0[k]) <= 4.0 * se);
    double m2_0 = moment(ref.snapshots[0], 2.0);
    CHECK(std::fabs(m2_0 - 1.5) <= 4.0 * 1.5 * std::sqrt(2.0 / (3 * n_ref * reps)));

    // energy per particle is conserved exactly along the flow
    for (std::size_t t = 1; t < 3; ++t)
        CHECK(moment(ref.snapshots[t], 2.0) == doctest::Approx(m2_0).epsilon(1e-9));

    CHECK_THROWS(mean_field_reference(gaussian_sampler(10, 3, 1.0), mw, {0.0}, 10, 2, 1));
    CHECK_THROWS(mean_field_reference(gaussian_sampler(1000, 3, 1.0), mw, {0.0}, 1000, 1, 1));
}

TEST_CASE("contraction check: identical initial laws stay within noise") {
    auto mw = KernelSpec::maxwell_grad_cutoff(3, kInvS2);
    auto f0 = gaussian_sampler(1000, 3, 1.0);
    auto rep = contraction_check(f0, f0, mw, {0.0, 0.5, 1.0}, 1000, 2, 71, 256);
    REQUIRE(rep.times.size() == 3);
    int flagged = 0;
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(rep.noise_toscani2[t] > 0.0);
        flagged += rep.toscani2_violation[t] + rep.w2_violation[t];
    }
    CHECK(flagged == 0);
    CHECK(!rep.any_violation);
}

TEST_CASE("contraction check input gates") {
    auto hs = KernelSpec::hard_sphere(3, kInvS2);
    auto f0 = gaussian_sampler(1000, 3, 1.0);
    CHECK_THROWS(contraction_check(f0, f0, hs, {0.0}, 1000, 2, 1, 128));

    auto mw = KernelSpec::maxwell_grad_cutoff(3, kInvS2);
    auto hot = gaussian_sampler(1000, 3, 4.0);  // mismatched energy
    CHECK_THROWS(contraction_check(f0, hot, mw, {0.0}, 1000, 2, 1, 128));
}

TEST_CASE("relaxation fit: decay from a two-point law, flat at equilibrium") {
    auto mw = KernelSpec::maxwell_grad_cutoff(3, kInvS2);
    const std::size_t n_ref = 2000;
    auto ref = mean_field_reference(two_point_sampler(n_ref), mw,
                                    {0.0, 0.4, 0.8, 1.2, 1.6, 2.0}, n_ref, 2, 81);
    auto fit = relaxation_fit(ref, mw, 1024);
    CHECK(fit.lambda_bar == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(fit.linear_regime);
    CHECK(fit.lambda_hat > 0.1);
    CHECK(fit.r2 > 0.9);

    // started at equilibrium: distance sits at the sampling floor
    auto eq_ref = mean_field_reference(gaussian_sampler(n_ref, 3, 1.0 / 3.0), mw,
                                       {0.0, 2.0, 4.0, 6.0}, n_ref, 2, 91);
    auto flat = relaxation_fit(eq_ref, mw, 1024);
    CHECK(!flat.linear_regime);
}
