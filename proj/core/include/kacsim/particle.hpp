// Event-driven simulation of the N-particle collision jump process.  The
// clock runs in mean-field scaled time: the total jump intensity is
// Lambda(V) = (2/N) sum_{i<j} Gamma(|v_i - v_j|) ||b||_1.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "kacsim/kernels.hpp"
#include "kacsim/rng.hpp"

namespace kacsim {

struct SystemState {
    int d = 3;
    std::vector<double> v;  // flat, N * d
    double t = 0.0;
    std::uint64_t n_events = 0;

    SystemState() = default;
    SystemState(int dim, std::vector<double> velocities);

    std::size_t count() const { return v.size() / static_cast<std::size_t>(d); }
    std::span<double> vel(std::size_t i) { return {v.data() + i * d, static_cast<std::size_t>(d)}; }
    std::span<const double> vel(std::size_t i) const {
        return {v.data() + i * d, static_cast<std::size_t>(d)};
    }

    double momentum(int axis) const;
    double energy() const;  // sum |v_j|^2

    // Hard-sphere rate cache: row_sums[i] = sum_j |v_i - v_j|, refreshed
    // incrementally and rebuilt periodically to stop drift.
    mutable std::vector<double> row_sums;
    mutable double row_total = 0.0;  // sum_{i<j} |v_i - v_j|
    mutable std::uint64_t cache_age = 0;
    mutable bool cache_valid = false;
    // Running upper bound on max_j |v_j|, for the majorant-rate fast path.
    mutable double speed_bound = 0.0;

    void invalidate_cache() const { cache_valid = false; }
};

inline constexpr double kTimeSentinel = std::numeric_limits<double>::infinity();

// Exact rate table by default; fictitious-collision (majorant) rejection
// sampling beyond this size.
inline constexpr std::size_t kExactRateTableLimit = 4096;

double total_rate(const SystemState& state, const KernelSpec& spec);

// What a single step changed; lets callers reconstruct the pre-event state
// without copying the full velocity array.
struct StepEvent {
    bool collided = false;
    std::size_t i = 0, j = 0;
    std::vector<double> old_i, old_j;
};

// One collision event: exponential waiting time, pair selection proportional
// to Gamma(|v_i - v_j|), sigma drawn from the angular law.  If the total rate
// vanishes, sets t to +infinity and leaves velocities unchanged.
void step(SystemState& state, const KernelSpec& spec, Rng& rng, StepEvent* event = nullptr);

struct Trajectory {
    int d = 3;
    std::uint64_t replica = 0;
    std::uint64_t seed = 0;
    std::uint64_t n_events = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;  // velocity arrays, one per time
};

using InitialSampler = std::function<std::vector<double>(Rng&)>;

// R independent replicas on independent substreams of master_seed.  The
// snapshot at time s is the state after every event with event time <= s.
std::vector<Trajectory> simulate(const InitialSampler& initial, const KernelSpec& spec,
                                 std::vector<double> snapshot_times, std::size_t replicas,
                                 std::uint64_t master_seed);

struct GeneratorValue {
    double value = 0.0;
    bool converged = true;
    double rel_change = 0.0;  // between quadrature orders Q and 2Q
};

// Numerical (G^N phi)(V) by product quadrature over the sphere
// (Gauss-Legendre in cos theta x uniform azimuth); d in {2, 3} only.
GeneratorValue apply_generator(const std::function<double(std::span<const double>)>& phi,
                               const SystemState& state, const KernelSpec& spec,
                               int quadrature_order = 16);

}  // namespace kacsim
