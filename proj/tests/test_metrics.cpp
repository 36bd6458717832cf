#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kacsim/metrics.hpp"
#include "kacsim/quadrature.hpp"
#include "kacsim/rng.hpp"

using namespace kacsim;

namespace {

EmpiricalMeasure random_uniform(int d, std::size_t n, Rng& rng, double shift = 0.0) {
    std::vector<double> pts(n * d);
    for (auto& x : pts) x = 2.0 * (uniform01(rng) - 0.5) + shift;
    return EmpiricalMeasure::uniform(d, std::move(pts));
}

// Minimum over all permutations of the average pairwise cost.
double brute_force_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    const std::size_t n = mu.count();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (int k = 0; k < mu.d; ++k) {
                double t = mu.points[i * mu.d + k] - nu.points[perm[i] * mu.d + k];
                d2 += t * t;
            }
            c += std::pow(std::sqrt(d2), p);
        }
        best = std::min(best, c / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("transport cost against brute-force permutations, d = 2") {
    Rng rng = make_stream(41, 1);
    for (int trial = 0; trial < 50; ++trial) {
        auto mu = random_uniform(2, 3, rng);
        auto nu = random_uniform(2, 3, rng, 0.5);
        for (double p : {1.0, 2.0}) {
            double exact = brute_force_cost(mu, nu, p);
            CHECK(transport_cost(mu, nu, p) == doctest::Approx(exact).epsilon(1e-10));
        }
    }
}

TEST_CASE("dirac oracles and root convention") {
    auto dx = EmpiricalMeasure::uniform(2, {0.0, 0.0});
    auto dy = EmpiricalMeasure::uniform(2, {3.0, 4.0});
    CHECK(transport_cost(dx, dy, 2.0) == doctest::Approx(25.0));
    CHECK(wasserstein(dx, dy, 2.0) == doctest::Approx(5.0));
    CHECK(wasserstein(dx, dy, 1.0) == doctest::Approx(5.0));

    Rng rng = make_stream(42, 1);
    auto mu = random_uniform(2, 8, rng);
    auto nu = random_uniform(2, 8, rng, 1.0);
    CHECK(wasserstein(mu, nu, 2.0) * wasserstein(mu, nu, 2.0) ==
          doctest::Approx(transport_cost(mu, nu, 2.0)).epsilon(1e-12));
    CHECK(dual_lipschitz(mu, nu) == wasserstein(mu, nu, 1.0));
}

TEST_CASE("quantile, assignment and flow solvers agree on shared instances") {
    Rng rng = make_stream(43, 1);
    for (int trial = 0; trial < 20; ++trial) {
        // embed a 1-D instance into d = 2 so the dense solvers are exercised
        std::size_t n = 6;
        std::vector<double> xa(n), xb(n), pa(2 * n, 0.0), pb(2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            xa[i] = 3.0 * (uniform01(rng) - 0.5);
            xb[i] = 3.0 * (uniform01(rng) - 0.5);
            pa[2 * i] = xa[i];
            pb[2 * i] = xb[i];
        }
        auto m1 = EmpiricalMeasure::uniform(1, xa), n1 = EmpiricalMeasure::uniform(1, xb);
        auto m2 = EmpiricalMeasure::uniform(2, pa), n2 = EmpiricalMeasure::uniform(2, pb);
        for (double p : {1.0, 2.0}) {
            double q = transport_cost(m1, n1, p);        // quantile coupling
            double a = transport_cost(m2, n2, p);        // assignment
            CHECK(q == doctest::Approx(a).epsilon(1e-10));
        }
        // split one atom in two: same measure, but the flow solver runs
        std::vector<double> pts = pa;
        pts.push_back(pa[0]);
        pts.push_back(pa[1]);
        std::vector<double> w(n + 1, 1.0 / n);
        w[0] = 0.5 / n;
        w[n] = 0.5 / n;
        auto split = EmpiricalMeasure::weighted(2, std::move(pts), std::move(w));
        for (double p : {1.0, 2.0})
            CHECK(transport_cost(split, n2, p) ==
                  doctest::Approx(transport_cost(m2, n2, p)).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein is a metric on random triples") {
    Rng rng = make_stream(44, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_uniform(2, 5, rng);
        auto b = random_uniform(2, 7, rng);  // different sizes force the flow path
        auto c = random_uniform(2, 6, rng);
        for (double q : {1.0, 2.0}) {
            double ab = wasserstein(a, b, q), ba = wasserstein(b, a, q);
            CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
            CHECK(wasserstein(a, c, q) <= ab + wasserstein(b, c, q) + 1e-10);
            CHECK(wasserstein(a, a, q) == doctest::Approx(0.0));
            CHECK(ab > 0.0);
        }
    }
}

TEST_CASE("transport budget refusal") {
    std::vector<double> big(2 * (kTransportBudget + 1), 0.0);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
    auto mu = EmpiricalMeasure::uniform(2, big);
    auto nu = EmpiricalMeasure::uniform(2, {0.0, 0.0});
    CHECK_THROWS_AS(transport_cost(mu, nu, 2.0), std::runtime_error);
    // d = 1 takes the quantile path regardless of size
    std::vector<double> big1(kTransportBudget + 1, 0.5);
    CHECK_NOTHROW(transport_cost(EmpiricalMeasure::uniform(1, big1),
                                 EmpiricalMeasure::uniform(1, {0.0}), 1.0));
}

TEST_CASE("toscani norm of two centered gaussians, s = 2") {
    // |exp(-r^2/2) - exp(-r^2)| / r^2 increases to 1/2 as r -> 0
    auto f = gaussian_char_fn({0.0}, 1.0);
    auto g = gaussian_char_fn({0.0}, 2.0);
    FourierGrid grid;
    grid.n_radii = 256;
    auto res = toscani_norm_cf(f, g, 1, 2.0, grid);
    double oracle = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        double r = 1e-2 * std::pow(1e4, i / 100000.0);
        oracle = std::max(oracle, (std::exp(-0.5 * r * r) - std::exp(-r * r)) / (r * r));
    }
    CHECK(oracle == doctest::Approx(0.5).epsilon(1e-3));  // small-frequency bound
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(res.value <= 0.5 + 1e-12);
}

TEST_CASE("toscani norm enforces vanishing moments unless compensated") {
    auto mu = EmpiricalMeasure::uniform(1, {0.5});
    auto nu = EmpiricalMeasure::uniform(1, {-0.5});
    CHECK_THROWS_WITH_AS(toscani_norm(mu, nu, 1.5).value,
                         doctest::Contains("moment constraint violated"),
                         std::invalid_argument);
    FourierGrid grid;
    grid.taylor_compensate = true;
    CHECK_NOTHROW(toscani_norm(mu, nu, 1.5, grid));
    // s <= 1 needs no moments at all
    CHECK_NOTHROW(toscani_norm(mu, nu, 0.5));
}

TEST_CASE("toscani norm is dilation covariant") {
    Rng rng = make_stream(45, 1);
    const double lam = 2.0, s = 0.5;
    for (int trial = 0; trial < 10; ++trial) {
        auto mu = random_uniform(2, 6, rng);
        auto nu = random_uniform(2, 6, rng, 0.3);
        auto scale = [&](const EmpiricalMeasure& m) {
            auto out = m;
            for (auto& x : out.points) x *= lam;
            return out;
        };
        FourierGrid base, shrunk;
        shrunk.r_min = base.r_min / lam;
        shrunk.r_max = base.r_max / lam;
        double v0 = toscani_norm(mu, nu, s, base).value;
        double v1 = toscani_norm(scale(mu), scale(nu), s, shrunk).value;
        CHECK(v1 == doctest::Approx(std::pow(lam, s) * v0).epsilon(1e-10));
    }
}

TEST_CASE("toscani sup is monotone under radial grid refinement") {
    Rng rng = make_stream(46, 1);
    auto mu = random_uniform(1, 10, rng);
    auto nu = random_uniform(1, 10, rng, 0.4);
    FourierGrid coarse, fine;
    coarse.n_radii = 64;
    fine.n_radii = 127;  // contains every coarse radius
    CHECK(toscani_norm(mu, nu, 0.5, fine).value >=
          toscani_norm(mu, nu, 0.5, coarse).value - 1e-14);
}

TEST_CASE("negative sobolev norm of two diracs against a radial quadrature oracle") {
    auto mu = EmpiricalMeasure::uniform(1, {0.5});
    auto nu = EmpiricalMeasure::uniform(1, {-0.5});
    const double s = 0.75;
    SobolevQuad quad;
    auto res = sobolev_neg_norm(mu, nu, s, quad);
    // |mu^ - nu^|^2 = 4 sin^2(xi/2); both half-lines contribute the factor 2
    double oracle2 = integrate_gl(
        [&](double r) {
            double d = 2.0 * std::sin(0.5 * r);
            return 2.0 * d * d / std::pow(r, 2.0 * s);
        },
        0.0, quad.r_max, 16, 800);
    CHECK(res.value == doctest::Approx(std::sqrt(oracle2)).epsilon(1e-4));
    CHECK(res.diag.truncation_error ==
          doctest::Approx(8.0 * std::pow(quad.r_max, 1.0 - 2.0 * s) / (2.0 * s - 1.0)));

    // refinement stability
    SobolevQuad fine;
    fine.radial_panels = 96;
    fine.gl_order = 16;
    CHECK(sobolev_neg_norm(mu, nu, s, fine).value ==
          doctest::Approx(res.value).epsilon(1e-4));
}

TEST_CASE("negative sobolev moment gate") {
    auto mu = EmpiricalMeasure::uniform(1, {0.5});
    auto nu = EmpiricalMeasure::uniform(1, {-0.5});
    CHECK_THROWS_WITH_AS(sobolev_neg_norm(mu, nu, 1.2).value,
                         doctest::Contains("matching first moments"),
                         std::invalid_argument);
    SobolevQuad off;
    off.enforce_moments = false;
    CHECK_NOTHROW(sobolev_neg_norm(mu, nu, 1.2, off));
    CHECK_THROWS_AS(sobolev_neg_norm(mu, nu, 0.4).value, std::invalid_argument);  // s <= d/2
}

TEST_CASE("all three distances vanish iff the measures coincide") {
    Rng rng = make_stream(47, 1);
    auto mu = random_uniform(1, 12, rng);
    CHECK(wasserstein(mu, mu, 2.0) == doctest::Approx(0.0));
    CHECK(toscani_norm(mu, mu, 0.5).value == doctest::Approx(0.0));
    CHECK(sobolev_neg_norm(mu, mu, 0.75).value == doctest::Approx(0.0).epsilon(1e-10));

    auto nudged = mu;
    nudged.points[3] += 1e-3;
    CHECK(wasserstein(mu, nudged, 2.0) > 1e-5);
    CHECK(toscani_norm(mu, nudged, 0.5).value > 1e-6);
    CHECK(sobolev_neg_norm(mu, nudged, 0.75).value > 1e-6);
}

TEST_CASE("inequality battery: identical pairs never violate") {
    PairGenerator same = [](int, Rng& rng) {
        auto m = random_uniform(1, 8, rng);
        return std::make_pair(m, m);
    };
    BatteryParams params;
    auto rep = inequality_battery(same, 10, params, 7);
    CHECK(rep.rows.size() == 60);  // 6 inequalities per trial
    for (const auto& row : rep.rows) CHECK(!row.violated);
}

TEST_CASE("inequality battery on random mean-matched pairs") {
    BatteryParams params;
    auto rep = inequality_battery(default_pair_generator(1), 40, params, 99);
    CHECK(rep.fitted_constants.size() == 3);
    for (const auto& [id, c] : rep.fitted_constants) CHECK(c > 0.0);
    // the explicit-constant inequalities are theorems; zero tolerance
    CHECK(rep.violations("w1_le_wq") == 0);
    CHECK(rep.violations("wq_interp") == 0);
    CHECK(rep.violations("toscani_le_ws") == 0);
    // fitted ones hold with the slack factor on fresh draws
    CHECK(rep.violations("sobolev_vs_w1") == 0);
    CHECK(rep.violations("w1_vs_toscani") == 0);
    CHECK(rep.violations("w1_vs_sobolev") == 0);
}
