#include "kacsim/particle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kacsim/geometry.hpp"
#include "kacsim/parallel.hpp"
#include "kacsim/quadrature.hpp"

namespace kacsim {

namespace {

constexpr std::uint64_t kStageInit = 1;
constexpr std::uint64_t kStageDynamics = 2;
constexpr std::uint64_t kCacheRebuildPeriod = 4096;

double exp_waiting_time(double rate, Rng& rng) {
    double u;
    do { u = uniform01(rng); } while (u <= 0.0);
    return -std::log(u) / rate;
}

void rebuild_rate_cache(const SystemState& s) {
    const std::size_t n = s.count();
    s.row_sums.assign(n, 0.0);
    double total = 0.0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        vmax = std::max(vmax, norm2(s.vel(i)));
        for (std::size_t j = i + 1; j < n; ++j) {
            double r = dist(s.vel(i), s.vel(j));
            s.row_sums[i] += r;
            s.row_sums[j] += r;
            total += r;
        }
    }
    s.row_total = total;
    s.speed_bound = vmax;
    s.cache_age = 0;
    s.cache_valid = true;
}

void collide_pair(SystemState& s, const KernelSpec& spec, std::size_t i, std::size_t j,
                  Rng& rng, StepEvent* ev) {
    if (ev) {
        ev->collided = true;
        ev->i = std::min(i, j);
        ev->j = std::max(i, j);
        ev->old_i.assign(s.vel(ev->i).begin(), s.vel(ev->i).end());
        ev->old_j.assign(s.vel(ev->j).begin(), s.vel(ev->j).end());
    }
    const int d = s.d;
    std::vector<double> u_hat(d), sigma(d);
    double un = 0.0;
    for (int k = 0; k < d; ++k) {
        u_hat[k] = s.vel(i)[k] - s.vel(j)[k];
        un += u_hat[k] * u_hat[k];
    }
    un = std::sqrt(un);
    if (un > 0.0) {
        for (int k = 0; k < d; ++k) u_hat[k] /= un;
    } else {
        // Coincident velocities: fixed axis; the midpoint map is a no-op.
        for (int k = 0; k < d; ++k) u_hat[k] = 0.0;
        u_hat[0] = 1.0;
    }
    sample_sigma(u_hat, spec, rng, sigma);
    post_collision(s.vel(i), s.vel(j), sigma, s.vel(i), s.vel(j));
    s.n_events += 1;
}

// Update the hard-sphere row sums after particles i and j changed from
// (oi, oj) to their current values.  O(N).
void update_rate_cache(SystemState& s, std::size_t i, std::size_t j,
                       std::span<const double> oi, std::span<const double> oj) {
    const std::size_t n = s.count();
    double di = 0.0, dj = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        double ni = dist(s.vel(k), s.vel(i));
        double nj = dist(s.vel(k), s.vel(j));
        double pi = dist(s.vel(k), oi);
        double pj = dist(s.vel(k), oj);
        s.row_sums[k] += (ni - pi) + (nj - pj);
        s.row_total += (ni - pi) + (nj - pj);
        di += ni;
        dj += nj;
    }
    double rij = dist(s.vel(i), s.vel(j));
    s.row_sums[i] = di + rij;
    s.row_sums[j] = dj + rij;
    s.speed_bound = std::max({s.speed_bound, norm2(s.vel(i)), norm2(s.vel(j))});
    if (++s.cache_age >= kCacheRebuildPeriod) rebuild_rate_cache(s);
}

void step_maxwell(SystemState& s, const KernelSpec& spec, Rng& rng, StepEvent* ev) {
    const std::size_t n = s.count();
    const double rate = (static_cast<double>(n) - 1.0) * spec.angular_mass;
    s.t += exp_waiting_time(rate, rng);
    std::size_t i = static_cast<std::size_t>(uniform01(rng) * n) % n;
    std::size_t j = static_cast<std::size_t>(uniform01(rng) * (n - 1)) % (n - 1);
    if (j >= i) ++j;
    collide_pair(s, spec, i, j, rng, ev);
}

void step_hs_exact(SystemState& s, const KernelSpec& spec, Rng& rng, StepEvent* ev) {
    const std::size_t n = s.count();
    if (!s.cache_valid) rebuild_rate_cache(s);
    const double rate = 2.0 / static_cast<double>(n) * s.row_total * spec.angular_mass;
    if (!(rate > 0.0)) {
        s.t = kTimeSentinel;
        return;
    }
    s.t += exp_waiting_time(rate, rng);
    // i proportional to its row sum, then j proportional to |v_i - v_j|.
    double target = uniform01(rng) * 2.0 * s.row_total;
    std::size_t i = 0;
    double acc = 0.0;
    for (; i < n - 1; ++i) {
        acc += s.row_sums[i];
        if (acc > target) break;
    }
    target = uniform01(rng) * s.row_sums[i];
    std::size_t j = (i == 0) ? 1 : 0;
    acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        acc += dist(s.vel(i), s.vel(k));
        if (acc > target) { j = k; break; }
    }
    std::vector<double> oi(s.vel(i).begin(), s.vel(i).end());
    std::vector<double> oj(s.vel(j).begin(), s.vel(j).end());
    collide_pair(s, spec, i, j, rng, ev);
    update_rate_cache(s, i, j, oi, oj);
}

void step_hs_majorant(SystemState& s, const KernelSpec& spec, Rng& rng, StepEvent* ev) {
    const std::size_t n = s.count();
    if (s.speed_bound <= 0.0 || !s.cache_valid) {
        double vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, norm2(s.vel(i)));
        s.speed_bound = vmax;
        s.cache_valid = true;  // only the speed bound is tracked on this path
    }
    const double gamma_cap = 2.0 * s.speed_bound;
    if (!(gamma_cap > 0.0)) {
        s.t = kTimeSentinel;
        return;
    }
    const double majorant = (static_cast<double>(n) - 1.0) * gamma_cap * spec.angular_mass;
    for (std::uint64_t rejections = 0;; ++rejections) {
        if (rejections > 0 && rejections % 100000 == 0) {
            // Pathological state (e.g. all velocities equal but nonzero):
            // verify the true rate before spinning further.
            double total = 0.0;
            for (std::size_t a = 0; a < n && total == 0.0; ++a)
                for (std::size_t b = a + 1; b < n; ++b) total += dist(s.vel(a), s.vel(b));
            if (total == 0.0) {
                s.t = kTimeSentinel;
                return;
            }
        }
        s.t += exp_waiting_time(majorant, rng);
        std::size_t i = static_cast<std::size_t>(uniform01(rng) * n) % n;
        std::size_t j = static_cast<std::size_t>(uniform01(rng) * (n - 1)) % (n - 1);
        if (j >= i) ++j;
        double r = dist(s.vel(i), s.vel(j));
        if (uniform01(rng) * gamma_cap < r) {
            collide_pair(s, spec, i, j, rng, ev);
            s.speed_bound = std::max({s.speed_bound, norm2(s.vel(i)), norm2(s.vel(j))});
            return;
        }
    }
}

}  // namespace

SystemState::SystemState(int dim, std::vector<double> velocities)
    : d(dim), v(std::move(velocities)) {
    if (d < 1 || v.size() % static_cast<std::size_t>(d) != 0)
        throw std::invalid_argument("SystemState: velocity array not a multiple of d");
    if (count() < 2) throw std::invalid_argument("SystemState: need N >= 2");
}

double SystemState::momentum(int axis) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count(); ++i) s += vel(i)[axis];
    return s;
}

double SystemState::energy() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double total_rate(const SystemState& state, const KernelSpec& spec) {
    const std::size_t n = state.count();
    if (spec.gamma_exponent == 0)
        return (static_cast<double>(n) - 1.0) * spec.angular_mass;
    if (!state.cache_valid || state.row_sums.size() != n) rebuild_rate_cache(state);
    return 2.0 / static_cast<double>(n) * state.row_total * spec.angular_mass;
}

void step(SystemState& state, const KernelSpec& spec, Rng& rng, StepEvent* event) {
    if (spec.d != state.d) throw std::invalid_argument("step: dimension mismatch");
    if (event) event->collided = false;
    if (spec.gamma_exponent == 0) {
        step_maxwell(state, spec, rng, event);
    } else if (state.count() <= kExactRateTableLimit) {
        if (state.row_sums.size() != state.count()) state.cache_valid = false;
        step_hs_exact(state, spec, rng, event);
    } else {
        step_hs_majorant(state, spec, rng, event);
    }
}

std::vector<Trajectory> simulate(const InitialSampler& initial, const KernelSpec& spec,
                                 std::vector<double> snapshot_times, std::size_t replicas,
                                 std::uint64_t master_seed) {
    for (std::size_t i = 0; i + 1 < snapshot_times.size(); ++i)
        if (!(snapshot_times[i] < snapshot_times[i + 1]))
            throw std::invalid_argument("simulate: snapshot times must be strictly increasing");
    if (!snapshot_times.empty() && snapshot_times.front() < 0.0)
        throw std::invalid_argument("simulate: snapshot times must be nonnegative");
    if (replicas < 1) throw std::invalid_argument("simulate: replicas >= 1");

    std::vector<Trajectory> out(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        Rng init_rng = make_stream(master_seed, kStageInit, r);
        std::vector<double> v0 = initial(init_rng);
        if (v0.empty() || v0.size() % static_cast<std::size_t>(spec.d) != 0)
            throw std::invalid_argument("simulate: sampler output has wrong dimension");
        SystemState s(spec.d, std::move(v0));
        Rng rng = make_stream(master_seed, kStageDynamics, r);

        Trajectory traj;
        traj.d = spec.d;
        traj.replica = r;
        traj.seed = master_seed;
        traj.times = snapshot_times;
        std::size_t next_snap = 0;
        StepEvent ev;
        while (next_snap < snapshot_times.size()) {
            step(s, spec, rng, &ev);
            if (next_snap < snapshot_times.size() && snapshot_times[next_snap] < s.t) {
                // Pre-event state: current velocities with the collided pair
                // rolled back.
                std::vector<double> pre = s.v;
                if (ev.collided) {
                    for (int k = 0; k < spec.d; ++k) {
                        pre[ev.i * spec.d + k] = ev.old_i[k];
                        pre[ev.j * spec.d + k] = ev.old_j[k];
                    }
                }
                while (next_snap < snapshot_times.size() && snapshot_times[next_snap] < s.t) {
                    traj.snapshots.push_back(pre);
                    ++next_snap;
                }
            }
            if (s.t == kTimeSentinel) break;
        }
        while (next_snap < snapshot_times.size()) {
            traj.snapshots.push_back(s.v);
            ++next_snap;
        }
        traj.n_events = s.n_events;
        // The loop exits on the first event past the last snapshot; do not
        // count that event as part of the recorded trajectory.
        if (!snapshot_times.empty() && s.t != kTimeSentinel && traj.n_events > 0)
            traj.n_events -= 1;
        out[r] = std::move(traj);
    });
    return out;
}

GeneratorValue apply_generator(const std::function<double(std::span<const double>)>& phi,
                               const SystemState& state, const KernelSpec& spec,
                               int quadrature_order) {
    if (quadrature_order < 8) throw std::invalid_argument("apply_generator: order >= 8");
    if (spec.d != 2 && spec.d != 3)
        throw std::invalid_argument("apply_generator: sphere quadrature implemented for d in {2,3}");

    auto evaluate = [&](int q) {
        const std::size_t n = state.count();
        const int d = spec.d;
        const GaussLegendre gl = gauss_legendre(q);
        const double phi_v = phi(state.v);
        std::vector<double> work = state.v;
        std::vector<double> u_hat(d), e1(d), e2(d), sigma(d);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                double un = dist(state.vel(i), state.vel(j));
                double gam = spec.gamma_of(un);
                if (gam == 0.0) continue;
                if (un > 0.0) {
                    for (int k = 0; k < d; ++k) u_hat[k] = (state.vel(i)[k] - state.vel(j)[k]) / un;
                } else {
                    for (int k = 0; k < d; ++k) u_hat[k] = 0.0;
                    u_hat[0] = 1.0;
                }
                // Deterministic orthonormal frame around u_hat.
                int pivot = 0;
                for (int k = 1; k < d; ++k)
                    if (std::fabs(u_hat[k]) < std::fabs(u_hat[pivot])) pivot = k;
                for (int k = 0; k < d; ++k) e1[k] = (k == pivot) ? 1.0 : 0.0;
                double c0 = dot(e1, u_hat);
                double nn = 0.0;
                for (int k = 0; k < d; ++k) {
                    e1[k] -= c0 * u_hat[k];
                    nn += e1[k] * e1[k];
                }
                nn = std::sqrt(nn);
                for (int k = 0; k < d; ++k) e1[k] /= nn;
                if (d == 3) {
                    e2[0] = u_hat[1] * e1[2] - u_hat[2] * e1[1];
                    e2[1] = u_hat[2] * e1[0] - u_hat[0] * e1[2];
                    e2[2] = u_hat[0] * e1[1] - u_hat[1] * e1[0];
                }

                double pair_sum = 0.0;
                const double c_lo = std::cos(spec.theta_hi), c_hi = std::cos(spec.theta_lo);
                const int n_az = (d == 3) ? 2 * q : 1;
                for (int a = 0; a < q; ++a) {
                    double c = 0.5 * (c_lo + c_hi) + 0.5 * (c_hi - c_lo) * gl.nodes[a];
                    double wc = 0.5 * (c_hi - c_lo) * gl.weights[a];
                    double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
                    double b = spec.angular_b(c);
                    if (b == 0.0) continue;
                    for (int m = 0; m < n_az; ++m) {
                        double waz;
                        if (d == 3) {
                            double az = 2.0 * std::numbers::pi * (m + 0.5) / n_az;
                            for (int k = 0; k < 3; ++k)
                                sigma[k] = c * u_hat[k] + sn * (std::cos(az) * e1[k] + std::sin(az) * e2[k]);
                            waz = 2.0 * std::numbers::pi / n_az;
                        } else {
                            // d = 2: dsigma = d(theta) over both half circles; the
                            // cos-theta substitution carries 1/sin(theta).
                            for (int k = 0; k < 2; ++k) sigma[k] = c * u_hat[k] + sn * e1[k];
                            waz = (sn > 1e-14) ? 2.0 / sn : 0.0;
                        }
                        post_collision(state.vel(i), state.vel(j), sigma,
                                       {work.data() + i * d, static_cast<std::size_t>(d)},
                                       {work.data() + j * d, static_cast<std::size_t>(d)});
                        pair_sum += wc * waz * b * (phi(work) - phi_v);
                    }
                }
                for (int k = 0; k < d; ++k) {
                    work[i * d + k] = state.vel(i)[k];
                    work[j * d + k] = state.vel(j)[k];
                }
                sum += gam * pair_sum;
            }
        }
        return sum / static_cast<double>(n);
    };

    GeneratorValue g;
    const double v1 = evaluate(quadrature_order);
    const double v2 = evaluate(2 * quadrature_order);
    g.value = v2;
    const double scale = std::max({std::fabs(v1), std::fabs(v2), 1e-300});
    g.rel_change = std::fabs(v2 - v1) / scale;
    g.converged = g.rel_change <= 1e-6 || std::fabs(v2 - v1) < 1e-10;
    return g;
}

}  // namespace kacsim
