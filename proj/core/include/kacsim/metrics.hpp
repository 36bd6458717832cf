// Distances on (finite) probability measures: exact Wasserstein via
// assignment / transportation solvers, Fourier (Toscani) norms, homogeneous
// negative Sobolev norms, and the distance-comparison battery.
#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kacsim/measures.hpp"
#include "kacsim/rng.hpp"

namespace kacsim {

struct MetricDiagnostics {
    int grid_radii = 0;
    int grid_directions = 0;
    double truncation_radius = 0.0;
    double truncation_error = 0.0;  // tail bound on the squared norm
    double assignment_cost = 0.0;   // unrooted optimal transport cost
};

struct MetricResult {
    std::string kind;
    double value = 0.0;
    MetricDiagnostics diag;
};

// Support size beyond which the exact solvers refuse (subsample instead of
// silently approximating).
inline constexpr std::size_t kTransportBudget = 4096;

// Exact optimal transport cost inf_pi int |x-y|^p dpi, p > 0.  d = 1 with
// p >= 1 uses the quantile coupling; equal-size uniform measures use the
// assignment solver; general weights use successive-shortest-path flow.
double transport_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

// W_q = transport_cost(mu, nu, q)^{1/q}, q >= 1 (metric convention).
double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double q);

// W_1 under its dual-Lipschitz name.
double dual_lipschitz(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Characteristic function, evaluated at a frequency vector.
using CharFn = std::function<std::complex<double>(std::span<const double>)>;
CharFn char_fn(const EmpiricalMeasure& mu);
CharFn gaussian_char_fn(std::vector<double> mean, double temperature);

struct FourierGrid {
    double r_min = 1e-2, r_max = 1e2;
    int n_radii = 64;
    int n_directions = 32;
    // Without compensation, moments of mu - nu up to order ceil(s)-1 must
    // vanish (tolerance 1e-8); with it, a smooth Taylor compensator is
    // subtracted instead.
    bool taylor_compensate = false;
};

// Toscani norm sup_xi |mu^ - nu^| / |xi|^s over a log-radial grid.
MetricResult toscani_norm(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double s,
                          const FourierGrid& grid = {});
MetricResult toscani_norm_cf(const CharFn& f, const CharFn& g, int d, double s,
                             const FourierGrid& grid = {},
                             std::span<const double> moment_mismatch = {});

struct SobolevQuad {
    double r_max = 1e2;
    int radial_panels = 24;
    int gl_order = 8;
    int n_directions = 32;
    bool enforce_moments = true;  // mean matching for s in [d/2+1/2, d/2+1)
};

// Quadrature nodes for int dxi over R^d, radially graded, with per-node
// radius kept so several exponents s can reuse one characteristic-function
// sweep.
struct SphericalGrid {
    int d = 1;
    std::vector<double> xi;      // n_nodes * d
    std::vector<double> weight;  // plain dxi weights
    std::vector<double> radius;
    std::size_t count() const { return weight.size(); }
};
SphericalGrid sobolev_grid(int d, const SobolevQuad& quad);

// || mu - nu ||_{Hdot^{-s}}, s in (d/2, d/2 + 1).
MetricResult sobolev_neg_norm(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                              double s, const SobolevQuad& quad = {});
MetricResult sobolev_neg_norm_cf(const CharFn& f, const CharFn& g, int d, double s,
                                 const SobolevQuad& quad = {});

// Distance selector shared by the law-of-large-numbers functionals and the
// relaxation diagnostics.
enum class DistanceKind { W1, W2Squared, SobolevNegSquared };

// ---- comparison-inequality battery -----------------------------------------

struct BatteryParams {
    int d = 1;
    double q = 2.0;   // exponent in the W_1 / W_q interpolation
    double k = 4.0;   // moment order of the interpolation
    double s_fourier = 0.5;   // exponent for the Toscani comparisons
    double s_sobolev = 0.75;  // in (d/2, d/2 + 1/2): no moment constraint
    double s_sobolev_w1 = 1.2;  // s >= 1 branch (needs mean-matched pairs)
    std::uint64_t calibration_seed = 424242;
    int calibration_trials = 100;
};

struct BatteryRow {
    int trial = 0;
    std::string inequality_id;
    double lhs = 0.0, rhs = 0.0, margin = 0.0;
    bool violated = false;
};

struct BatteryReport {
    std::vector<BatteryRow> rows;
    std::vector<std::pair<std::string, double>> fitted_constants;
    int violations(const std::string& id) const;
};

using PairGenerator =
    std::function<std::pair<EmpiricalMeasure, EmpiricalMeasure>(int trial, Rng& rng)>;

// Mean-matched random discrete pairs (both measures recentered to zero mean),
// suitable for every inequality in the battery.
PairGenerator default_pair_generator(int d, std::size_t max_points = 32);

BatteryReport inequality_battery(const PairGenerator& gen, int trials,
                                 const BatteryParams& params, std::uint64_t seed);

}  // namespace kacsim
