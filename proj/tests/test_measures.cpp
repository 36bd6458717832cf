#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kacsim/measures.hpp"
#include "kacsim/rng.hpp"
#include "kacsim/stats.hpp"

using namespace kacsim;

namespace {

// Brute-force average of phi over all injective index tuples.
double injective_average(std::span<const double> v, int d, const TensorObservable& phi) {
    const std::size_t n = v.size() / d;
    const std::size_t ell = phi.order();
    std::vector<std::size_t> idx(ell, 0);
    double sum = 0.0;
    std::size_t tuples = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == ell) {
            double p = 1.0;
            for (std::size_t k = 0; k < ell; ++k)
                p *= phi.components[k]({v.data() + idx[k] * d, static_cast<std::size_t>(d)});
            sum += p;
            ++tuples;
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            bool used = false;
            for (std::size_t k = 0; k < pos; ++k) used = used || idx[k] == j;
            if (used) continue;
            idx[pos] = j;
            rec(pos + 1);
        }
    };
    rec(0);
    return sum / static_cast<double>(tuples);
}

TestFunction random_packet(int d, Rng& rng, NormKind kind = NormKind::Sup) {
    std::vector<CosineTerm> terms;
    int m = 1 + static_cast<int>(uniform01(rng) * 3);
    for (int t = 0; t < m; ++t) {
        CosineTerm ct;
        ct.amplitude = 2.0 * (uniform01(rng) - 0.5);
        ct.phase = 6.28 * uniform01(rng);
        for (int k = 0; k < d; ++k) ct.frequency.push_back(3.0 * (uniform01(rng) - 0.5));
        terms.push_back(std::move(ct));
    }
    return cosine_packet(std::move(terms), kind);
}

}  // namespace

TEST_CASE("empirical measure basics") {
    std::vector<double> v{1.0, 1.0};
    auto mu = empirical(v, 1);
    CHECK(mu.count() == 2);
    CHECK(mu.weights[0] == doctest::Approx(0.5));

    auto single = empirical(std::vector<double>{2.5}, 1);
    CHECK(single.count() == 1);
    CHECK(single.weights[0] == doctest::Approx(1.0));

    Rng rng = make_stream(21, 1);
    std::vector<double> w(30);
    for (auto& x : w) x = normal01(rng);
    auto m = empirical(w, 3);
    double m2 = 0.0;
    for (double x : w) m2 += x * x;
    CHECK(moment(m, 2.0) == doctest::Approx(m2 / 10.0).epsilon(1e-12));
}

TEST_CASE("moments") {
    auto delta0 = empirical(std::vector<double>{0.0, 0.0, 0.0}, 3);
    CHECK(moment(delta0, 2.0) == doctest::Approx(0.0));

    auto pm = empirical(std::vector<double>{1, 0, 0, -1, 0, 0}, 3);
    CHECK(moment(pm, 2.0) == doctest::Approx(1.0));

    Rng rng = make_stream(22, 1);
    const int n = 100000;
    std::vector<double> g(3 * n);
    for (auto& x : g) x = normal01(rng);
    double m2 = moment(empirical(g, 3), 2.0);
    // Var(|X|^2) = 2d for a standard Gaussian in d dimensions
    CHECK(std::fabs(m2 - 3.0) <= 3.0 * std::sqrt(6.0 / n));
}

TEST_CASE("poly_observable") {
    Rng rng = make_stream(23, 1);
    auto phi1 = random_packet(2, rng);
    auto one = cosine_packet({CosineTerm{1.0, {0.0, 0.0}, 0.0}});
    std::vector<double> pts{0.3, -0.2, 1.1, 0.4, -0.6, 0.9};
    auto rho = empirical(pts, 2);

    TensorObservable ones{{one, one, one}};
    CHECK(poly_observable(rho, ones) == doctest::Approx(1.0));

    auto dirac = empirical(std::vector<double>{0.5, -0.8}, 2);
    TensorObservable two{{phi1, phi1}};
    double fx = phi1(std::vector<double>{0.5, -0.8});
    CHECK(poly_observable(dirac, two) == doctest::Approx(fx * fx));

    // multiplicative under concatenation
    auto phi2 = random_packet(2, rng);
    TensorObservable a{{phi1}}, b{{phi2}}, ab{{phi1, phi2}};
    CHECK(poly_observable(rho, ab) ==
          doctest::Approx(poly_observable(rho, a) * poly_observable(rho, b)).epsilon(1e-12));
}

TEST_CASE("sym_observable matches exhaustive enumeration") {
    Rng rng = make_stream(24, 1);
    for (int trial = 0; trial < 20; ++trial) {
        int d = 1 + static_cast<int>(uniform01(rng) * 3);
        std::size_t n = 5;
        std::size_t ell = 1 + static_cast<std::size_t>(uniform01(rng) * 3);
        std::vector<double> v(n * d);
        for (auto& x : v) x = 3.0 * (uniform01(rng) - 0.5);
        TensorObservable phi;
        for (std::size_t k = 0; k < ell; ++k) phi.components.push_back(random_packet(d, rng));
        double fast = sym_observable(v, d, phi);
        double slow = injective_average(v, d, phi);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
}

TEST_CASE("sym_observable small closed forms") {
    Rng rng = make_stream(25, 1);
    auto p1 = random_packet(1, rng), p2 = random_packet(1, rng);
    std::vector<double> v{0.7, -1.3};
    TensorObservable phi{{p1, p2}};
    double expect = 0.5 * (p1(std::vector<double>{0.7}) * p2(std::vector<double>{-1.3}) +
                           p1(std::vector<double>{-1.3}) * p2(std::vector<double>{0.7}));
    CHECK(sym_observable(v, 1, phi) == doctest::Approx(expect).epsilon(1e-12));

    TensorObservable one{{p1}};
    double mean = 0.5 * (p1(std::vector<double>{0.7}) + p1(std::vector<double>{-1.3}));
    CHECK(sym_observable(v, 1, one) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("symmetrization gap: bound, exactness, scaling") {
    Rng rng = make_stream(26, 1);

    // ell = 1: identically zero
    std::vector<double> v8(8);
    for (auto& x : v8) x = normal01(rng);
    TensorObservable phi1{{random_packet(1, rng)}};
    CHECK(symmetrization_gap(v8, 1, phi1) == doctest::Approx(0.0));

    // exhaustive bound check, scaled-down version of the acceptance sweep
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t ell = 1 + static_cast<std::size_t>(uniform01(rng) * 4);
        std::size_t n = 2 * ell + static_cast<std::size_t>(uniform01(rng) * 20);
        std::vector<double> v(n);
        for (auto& x : v) x = 2.0 * normal01(rng);
        TensorObservable phi;
        double norm_inf = 1.0;
        for (std::size_t k = 0; k < ell; ++k) {
            phi.components.push_back(random_packet(1, rng));
            norm_inf *= phi.components.back().norm;
        }
        double gap = symmetrization_gap(v, 1, phi);
        REQUIRE(gap <= 2.0 * ell * ell * norm_inf / n + 1e-12);
    }

    // log-log slope over N for fixed phi, ell = 2
    TensorObservable phi2{{random_packet(1, rng), random_packet(1, rng)}};
    std::vector<double> lx, ly;
    for (std::size_t n = 8; n <= 512; n *= 2) {
        double avg = 0.0;
        int reps = 50;
        for (int r = 0; r < reps; ++r) {
            std::vector<double> v(n);
            for (auto& x : v) x = normal01(rng);
            avg += symmetrization_gap(v, 1, phi2);
        }
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(avg / reps));
    }
    auto fit = stats::fit_line(lx, ly);
    CHECK(fit.slope <= -0.9);

    CHECK_THROWS(symmetrization_gap(std::vector<double>{1.0, 2.0}, 1, phi2));  // N < 2 ell
}

TEST_CASE("test function norms pass their own sanity probe") {
    Rng rng = make_stream(27, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto sup = random_packet(3, rng, NormKind::Sup);
        CHECK(sup.norm_sanity_check(3));
        auto ramp = lipschitz_ramp({0.5, -1.0, 0.25}, 0.3, 2.0);
        CHECK(ramp.norm_sanity_check(3));
    }
}

TEST_CASE("weighted measures validate") {
    CHECK_THROWS(EmpiricalMeasure::weighted(1, {0.0, 1.0}, {0.7, 0.7}));
    CHECK_THROWS(EmpiricalMeasure::weighted(1, {0.0, 1.0}, {1.5, -0.5}));
    auto ok = EmpiricalMeasure::weighted(1, {0.0, 1.0}, {0.25, 0.75});
    CHECK(moment(ok, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("subsample draws from the support with the right frequencies") {
    auto mu = EmpiricalMeasure::weighted(1, {0.0, 1.0}, {0.25, 0.75});
    auto sub = subsample(mu, 40000, 99);
    CHECK(sub.count() == 40000);
    double frac = moment(sub, 1.0);  // fraction of ones
    CHECK(std::fabs(frac - 0.75) < 0.01);
    // deterministic in the seed
    auto again = subsample(mu, 40000, 99);
    CHECK(again.points == sub.points);
}
