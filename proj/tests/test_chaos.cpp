#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kacsim/chaos.hpp"
#include "kacsim/stats.hpp"

using namespace kacsim;

namespace {

InitialDataSpec gaussian_spec(int d, InitMode mode, double theta = 1.0) {
    InitialDataSpec spec;
    spec.d = d;
    spec.base.law = BaseLaw::Gaussian;
    spec.base.temperature = theta;
    spec.mode = mode;
    spec.energy = d * theta;
    return spec;
}

double energy_of(std::span<const double> v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

}  // namespace

TEST_CASE("kac sphere draws sit exactly on the energy sphere") {
    auto spec = gaussian_spec(3, InitMode::KacSphere);
    spec.energy = 0.8;
    Rng rng = make_stream(61, 1);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = sample_initial(spec, 40, rng);
        REQUIRE(v.size() == 120);
        CHECK(energy_of(v) == doctest::Approx(40 * 0.8).epsilon(1e-12));
    }
}

TEST_CASE("tensor gaussian coordinates pass an anderson-darling probe") {
    auto spec = gaussian_spec(1, InitMode::Tensor);
    Rng rng = make_stream(62, 1);
    auto v = sample_initial(spec, 10000, rng);
    CHECK(stats::anderson_darling_normal(v) < 2.492);
}

TEST_CASE("two-point and pooled-sample base laws") {
    InitialDataSpec spec;
    spec.d = 2;
    spec.base.law = BaseLaw::TwoPoint;
    spec.base.point_a = {1.0, 0.0};
    spec.base.point_b = {-1.0, 0.0};
    Rng rng = make_stream(63, 1);
    auto v = sample_initial(spec, 500, rng);
    int plus = 0;
    for (std::size_t i = 0; i < 500; ++i) {
        REQUIRE(std::fabs(std::fabs(v[2 * i]) - 1.0) <= 1e-12);
        REQUIRE(v[2 * i + 1] == 0.0);
        plus += v[2 * i] > 0;
    }
    CHECK(std::fabs(plus / 500.0 - 0.5) < 0.1);

    InitialDataSpec pool;
    pool.d = 1;
    pool.base.law = BaseLaw::Samples;
    pool.base.samples = {0.25, 0.5, 0.75};
    auto w = sample_initial(pool, 200, rng);
    for (double x : w)
        CHECK((x == 0.25 || x == 0.5 || x == 0.75));
}

TEST_CASE("conditioned tensor with gaussian base equals the uniform sphere law") {
    // restricted product of Gaussians is constant on the sphere, so the chain
    // must accept everything and agree with the direct sphere sampler
    auto cond = gaussian_spec(3, InitMode::ConditionedTensor);
    auto sphere = gaussian_spec(3, InitMode::KacSphere);
    const std::size_t n = 32;
    const int reps = 200;
    Rng ra = make_stream(64, 1), rb = make_stream(64, 2);
    std::vector<double> xa, xb;
    for (int r = 0; r < reps; ++r) {
        SampleDiagnostics diag;
        auto v = sample_initial(cond, n, ra, &diag);
        CHECK(diag.acceptance == doctest::Approx(1.0));
        CHECK(!diag.mcmc_flagged);
        CHECK(energy_of(v) == doctest::Approx(n * 3.0).epsilon(1e-10));
        auto w = sample_initial(sphere, n, rb);
        xa.push_back(v[0]);
        xb.push_back(w[0]);
    }
    CHECK(stats::ks2_pvalue(xa, xb) > 0.01);
}

TEST_CASE("conditioned tensor with uniform-ball base stays feasible") {
    InitialDataSpec spec;
    spec.d = 3;
    spec.base.law = BaseLaw::UniformBall;
    spec.base.radius = 2.0;
    spec.mode = InitMode::ConditionedTensor;
    spec.energy = 1.0;
    Rng rng = make_stream(65, 1);
    SampleDiagnostics diag;
    auto v = sample_initial(spec, 24, rng, &diag);
    CHECK(energy_of(v) == doctest::Approx(24.0).epsilon(1e-10));
    for (std::size_t i = 0; i < 24; ++i)
        CHECK(energy_of(std::span(v.data() + 3 * i, 3)) <= 4.0 + 1e-12);
    CHECK(diag.acceptance > 0.05);
    CHECK(!diag.mcmc_flagged);
}

TEST_CASE("wn_functional: degenerate law gives zero distance") {
    InitialDataSpec spec;
    spec.d = 1;
    spec.base.law = BaseLaw::TwoPoint;
    spec.base.point_a = {0.0};
    spec.base.point_b = {0.0};
    for (auto kind : {DistanceKind::W1, DistanceKind::W2Squared}) {
        auto e = wn_functional(spec, kind, 4, 20, 66);
        CHECK(e.mean == doctest::Approx(0.0));
        CHECK(e.stderr_ == doctest::Approx(0.0));
    }
}

TEST_CASE("wn_functional W1 against a two-point enumeration oracle, N = 2") {
    // mu^2 from f0 = (delta_1 + delta_-1)/2: W_1 is 1 for the two aligned
    // draws, 0 for the mixed ones, so E W_1 = 1/2
    InitialDataSpec spec;
    spec.d = 1;
    spec.base.law = BaseLaw::TwoPoint;
    spec.base.point_a = {1.0};
    spec.base.point_b = {-1.0};
    WnOptions opt;
    opt.ref_multiple = 5000;
    const int reps = 3000;
    auto e = wn_functional(spec, DistanceKind::W1, 2, reps, 67, opt);
    CHECK(std::fabs(e.mean - 0.5) <= 4.0 * e.stderr_ + 0.02);
    CHECK(e.stderr_ > 0.0);
    CHECK(std::isnan(e.exact));
}

TEST_CASE("wn_functional sobolev path carries the analytic gaussian value") {
    auto spec = gaussian_spec(1, InitMode::Tensor);
    auto e = wn_functional(spec, DistanceKind::SobolevNegSquared, 8, 2000, 68);
    REQUIRE(std::isfinite(e.exact));
    CHECK(e.exact > 0.0);
    CHECK(std::fabs(e.mean - e.exact) <= 4.0 * e.stderr_);
    // exact value scales as 1/n on the shared grid
    auto e2 = wn_functional(spec, DistanceKind::SobolevNegSquared, 16, 10, 68);
    CHECK(e2.exact == doctest::Approx(0.5 * e.exact).epsilon(1e-10));
}

TEST_CASE("lln_rate_scan recovers the 1/N decay of the squared sobolev distance") {
    auto spec = gaussian_spec(1, InitMode::Tensor);
    auto res = lln_rate_scan(spec, DistanceKind::SobolevNegSquared, {4, 8, 16, 32}, 400, 69);
    REQUIRE(res.entries.size() == 4);
    for (const auto& e : res.entries)
        CHECK(std::fabs(e.mean - e.exact) <= 4.0 * e.stderr_);
    CHECK(res.loglog.slope == doctest::Approx(-1.0).epsilon(0.2));
    CHECK(res.loglog.r2 > 0.98);

    CHECK_THROWS(lln_rate_scan(spec, DistanceKind::W1, {4, 8, 16}, 10, 69));
    CHECK_THROWS(lln_rate_scan(spec, DistanceKind::W1, {4, 8, 12, 16}, 10, 69));
}

TEST_CASE("dictionary is seed-stable, normalized and of the declared size") {
    for (auto kind : {NormKind::Sup, NormKind::Lipschitz, NormKind::FourierF}) {
        auto d1 = build_dictionary(1, 2, kind);
        auto d2 = build_dictionary(1, 2, kind);
        REQUIRE(d1.entries.size() == 48);
        REQUIRE(d1.ids == d2.ids);
        std::vector<double> probe{0.37, -0.83};
        for (std::size_t i = 0; i < d1.entries.size(); ++i) {
            CHECK(d1.entries[i].norm() <= 1.0 + 1e-9);
            double a = d1.entries[i].components[0](std::span(probe.data(), 1)) *
                       d1.entries[i].components[1](std::span(probe.data() + 1, 1));
            double b = d2.entries[i].components[0](std::span(probe.data(), 1)) *
                       d2.entries[i].components[1](std::span(probe.data() + 1, 1));
            CHECK(a == b);
        }
        auto d3 = build_dictionary(1, 2, kind, 12345);
        CHECK(d3.ids == d1.ids);  // ids depend on position, functions on seed
    }
}

TEST_CASE("chaos gap vanishes for iid draws from the reference, ell = 1 and 2") {
    Rng rng = make_stream(70, 1);
    const std::size_t n = 100;
    const int reps = 200;
    std::vector<std::vector<double>> replicas(reps);
    for (auto& v : replicas) {
        v.resize(n);
        for (auto& x : v) x = normal01(rng);
    }
    std::vector<double> pool(200000);
    for (auto& x : pool) x = normal01(rng);
    auto reference = empirical(pool, 1);

    auto dict1 = build_dictionary(1, 1, NormKind::Sup);
    auto g1 = chaos_gap(replicas, 1, reference, dict1, 200, 71);
    CHECK(g1.stderr_ > 0.0);
    CHECK(!g1.argmax_id.empty());
    CHECK(g1.gap <= 4.0 * g1.stderr_ + 0.01);

    auto dict2 = build_dictionary(1, 2, NormKind::Sup);
    auto g2 = chaos_gap(replicas, 1, reference, dict2, 200, 72);
    // the symmetrized observable differs from the product by at most 8/N
    CHECK(g2.gap <= 8.0 / n + 4.0 * g2.stderr_ + 0.01);
    CHECK(g2.per_entry.size() == dict2.entries.size());
}

TEST_CASE("chaos gap detects a non-chaotic family") {
    // all particles share one common Gaussian value: mu^N = delta_X
    Rng rng = make_stream(73, 1);
    const int reps = 200;
    std::vector<std::vector<double>> replicas(reps);
    for (auto& v : replicas) v.assign(100, normal01(rng));
    std::vector<double> pool(100000);
    for (auto& x : pool) x = normal01(rng);
    auto reference = empirical(pool, 1);
    auto dict = build_dictionary(1, 2, NormKind::Sup);
    auto g = chaos_gap(replicas, 1, reference, dict, 200, 74);
    CHECK(g.gap > 10.0 * g.stderr_);
    CHECK(g.gap > 0.05);
}

TEST_CASE("mehler marginals: exact N = 1 value and decay in N") {
    // N = 1, d = 1: marginal is (delta_1 + delta_-1)/2; W_1 to the standard
    // Gaussian is int |F - Phi| computed from the normal cdf
    double oracle = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        double x = -8.0 + 16.0 * (i + 0.5) / m;
        double f = x < -1.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0);
        oracle += std::fabs(f - stats::normal_cdf(x)) * 16.0 / m;
    }
    auto rows = mehler_marginal_check({1, 4, 16}, 1, 1, 4, 16384, 75);
    REQUIRE(rows.size() == 3);
    CHECK(std::fabs(rows[0].w1 - oracle) <= 4.0 * rows[0].stderr_ + 0.02);
    CHECK(rows[2].w1 < rows[0].w1);
    CHECK(rows[2].w1 < 0.1);

    CHECK_THROWS(mehler_marginal_check({4}, 3, 2, 2, 100, 1));  // ell * d > 3
}
