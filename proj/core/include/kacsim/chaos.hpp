// Chaotic initial data (tensor products and Kac-sphere conditioning),
// law-of-large-numbers functionals, chaos-gap estimators, and the
// equilibrium-marginal (Mehler) experiment.
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kacsim/measures.hpp"
#include "kacsim/metrics.hpp"
#include "kacsim/particle.hpp"
#include "kacsim/stats.hpp"

namespace kacsim {

enum class BaseLaw { Gaussian, UniformBall, TwoPoint, Samples };

struct BaseLawSpec {
    BaseLaw law = BaseLaw::Gaussian;
    std::vector<double> mean;        // Gaussian (empty = 0)
    double temperature = 1.0;        // Gaussian covariance temperature * Id
    double radius = 1.0;             // UniformBall
    std::vector<double> point_a, point_b;  // TwoPoint: 1/2 each
    std::vector<double> samples;     // Samples: flat n * d pool
    bool sub_gaussian = true;        // declared tail hypothesis for conditioning

    void sample_point(int d, Rng& rng, double* out) const;
    // log density w.r.t. Lebesgue; -inf outside the support.  Only Gaussian
    // and UniformBall have one (needed by ConditionedTensor).
    double log_pdf(int d, std::span<const double> v) const;
};

enum class InitMode { Tensor, KacSphere, ConditionedTensor };

struct McmcParams {
    int burn_in = 80;              // burn-in pair rotations per particle
    int steps_per_particle = 120;  // post-burn-in pair rotations per particle
    double step_angle = 0.9;      // rotation angle scale (radians)
};

struct InitialDataSpec {
    int d = 3;
    BaseLawSpec base;
    InitMode mode = InitMode::Tensor;
    double energy = 1.0;  // KacSphere / ConditionedTensor: M_2^N = energy
    McmcParams mcmc;
};

struct SampleDiagnostics {
    bool mcmc_flagged = false;  // split-chain R-hat on M_4 exceeded 1.1
    double r_hat = 1.0;
    double acceptance = 1.0;
};

// One configuration V in R^{Nd}.  Tensor: i.i.d. base draws.  KacSphere:
// uniform on the energy sphere via a normalized Gaussian vector.
// ConditionedTensor: Metropolis walk of local pair rotations on the sphere
// targeting the restricted product density.
std::vector<double> sample_initial(const InitialDataSpec& spec, std::size_t n, Rng& rng,
                                   SampleDiagnostics* diag = nullptr);

// Adapter for the simulator.
InitialSampler make_sampler(const InitialDataSpec& spec, std::size_t n);

// ---- law of large numbers --------------------------------------------------

struct WnOptions {
    double s = 0.75;               // Sobolev exponent
    std::size_t ref_multiple = 50;  // reference sample size per evaluation
    SobolevQuad quad{.radial_panels = 12, .gl_order = 4, .n_directions = 8};
};

struct LLNEntry {
    std::size_t n = 0;
    double mean = 0.0, stderr_ = 0.0;
    // Closed-form value when available (Gaussian base, Sobolev distance,
    // Tensor mode), evaluated on the same quadrature grid.
    double exact = std::numeric_limits<double>::quiet_NaN();
};

struct LLNResult {
    DistanceKind kind{};
    std::vector<LLNEntry> entries;
    stats::LineFit loglog;  // log mean vs log N
};

// Monte Carlo mean over reps of D(mu^N_V, f0).
LLNEntry wn_functional(const InitialDataSpec& spec, DistanceKind kind, std::size_t n,
                       int reps, std::uint64_t seed, const WnOptions& opt = {});

// Requires a geometric N grid with at least 4 points.
LLNResult lln_rate_scan(const InitialDataSpec& spec, DistanceKind kind,
                        std::vector<std::size_t> n_grid, int reps, std::uint64_t seed,
                        const WnOptions& opt = {});

// ---- chaos gap -------------------------------------------------------------

struct Dictionary {
    int d = 1;
    int ell = 1;
    std::vector<TensorObservable> entries;  // unit declared norm (product)
    std::vector<std::string> ids;
};

// 32 cosine packets (|xi| in [0.25, 4]) plus 16 smoothed ramps, each
// normalized to declared norm 1; FourierF norm kind drops the ramps (their
// F norm is not finite) and uses 48 packets.  Seed-stable.
Dictionary build_dictionary(int d, int ell, NormKind kind, std::uint64_t seed = 0x4ac5);

struct ChaosGapResult {
    double gap = 0.0;      // max over the dictionary; lower bound of the sup
    double stderr_ = 0.0;  // bootstrap standard error of the max
    std::string argmax_id;
    std::vector<double> per_entry;  // signed mean - reference, dictionary order
};

// replica_velocities: R independent N-particle configurations at a common
// time; reference: pooled mean-field snapshot.
ChaosGapResult chaos_gap(std::span<const std::vector<double>> replica_velocities, int d,
                         const EmpiricalMeasure& reference, const Dictionary& dict,
                         int n_bootstrap = 200, std::uint64_t seed = 0);

// ---- equilibrium marginals -------------------------------------------------

struct MehlerRow {
    std::size_t n = 0;
    double w1 = 0.0, stderr_ = 0.0;
};

// W_1 between the ell-particle marginal of the uniform sphere measure
// (energy 1) and the product standard Gaussian, per N; `points` independent
// sphere draws form the marginal sample, reps repeats give the error bar.
std::vector<MehlerRow> mehler_marginal_check(const std::vector<std::size_t>& n_grid, int d,
                                             int ell, int reps, std::size_t points,
                                             std::uint64_t seed);

}  // namespace kacsim
