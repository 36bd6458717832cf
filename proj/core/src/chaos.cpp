#include "kacsim/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kacsim/geometry.hpp"
#include "kacsim/parallel.hpp"

namespace kacsim {

namespace {

constexpr std::uint64_t kStageWn = 31;
constexpr std::uint64_t kStageWnRef = 32;
constexpr std::uint64_t kStageBoot = 34;
constexpr std::uint64_t kStageMehler = 35;

}  // namespace

void BaseLawSpec::sample_point(int d, Rng& rng, double* out) const {
    switch (law) {
        case BaseLaw::Gaussian: {
            const double sd = std::sqrt(temperature);
            for (int k = 0; k < d; ++k)
                out[k] = (mean.empty() ? 0.0 : mean[k]) + sd * normal01(rng);
            return;
        }
        case BaseLaw::UniformBall: {
            random_unit_vector(d, rng, out);
            double r = radius * std::pow(uniform01(rng), 1.0 / d);
            for (int k = 0; k < d; ++k) out[k] *= r;
            return;
        }
        case BaseLaw::TwoPoint: {
            const auto& p = uniform01(rng) < 0.5 ? point_a : point_b;
            if (static_cast<int>(p.size()) != d)
                throw std::invalid_argument("BaseLawSpec: two-point support has wrong dimension");
            std::copy(p.begin(), p.end(), out);
            return;
        }
        case BaseLaw::Samples: {
            const std::size_t n = samples.size() / d;
            if (n == 0) throw std::invalid_argument("BaseLawSpec: empty sample pool");
            std::size_t i = std::min<std::size_t>(n - 1,
                                                  static_cast<std::size_t>(uniform01(rng) * n));
            std::copy(samples.begin() + i * d, samples.begin() + (i + 1) * d, out);
            return;
        }
    }
    throw std::logic_error("BaseLawSpec: unknown law");
}

double BaseLawSpec::log_pdf(int d, std::span<const double> v) const {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    switch (law) {
        case BaseLaw::Gaussian: {
            double q = 0.0;
            for (int k = 0; k < d; ++k) {
                double c = v[k] - (mean.empty() ? 0.0 : mean[k]);
                q += c * c;
            }
            return -0.5 * q / temperature -
                   0.5 * d * std::log(2.0 * std::numbers::pi * temperature);
        }
        case BaseLaw::UniformBall: {
            double vol = sphere_area(d) / d * std::pow(radius, d);
            return norm2(v) <= radius ? -std::log(vol) : neg_inf;
        }
        default:
            throw std::invalid_argument("BaseLawSpec: law has no density");
    }
}

namespace {

std::vector<double> kac_sphere_draw(int d, std::size_t n, double energy, Rng& rng) {
    std::vector<double> v(n * d);
    double q = 0.0;
    do {
        q = 0.0;
        for (auto& x : v) {
            x = normal01(rng);
            q += x * x;
        }
    } while (q == 0.0);
    double scale = std::sqrt(static_cast<double>(n) * energy / q);
    for (auto& x : v) x *= scale;
    return v;
}

double m4_stat(const std::vector<double>& v, int d) {
    const std::size_t n = v.size() / d;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (int k = 0; k < d; ++k) q += v[i * d + k] * v[i * d + k];
        s += q * q;
    }
    return s / static_cast<double>(n);
}

double product_log_density(const BaseLawSpec& base, const std::vector<double>& v, int d) {
    const std::size_t n = v.size() / d;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += base.log_pdf(d, {v.data() + i * d, static_cast<std::size_t>(d)});
    return s;
}

// Split-chain R-hat with two half chains.
double split_r_hat(std::span<const double> series) {
    const std::size_t half = series.size() / 2;
    if (half < 2) return 1.0;
    auto s1 = stats::summarize(series.subspan(0, half));
    auto s2 = stats::summarize(series.subspan(half, half));
    double w = 0.5 * (s1.stddev * s1.stddev + s2.stddev * s2.stddev);
    if (w <= 0.0) return 1.0;
    double mbar = 0.5 * (s1.mean + s2.mean);
    double b = static_cast<double>(half) *
               ((s1.mean - mbar) * (s1.mean - mbar) + (s2.mean - mbar) * (s2.mean - mbar));
    double var_plus = (static_cast<double>(half) - 1.0) / half * w + b / half;
    return std::sqrt(var_plus / w);
}

std::vector<double> conditioned_tensor_draw(const InitialDataSpec& spec, std::size_t n,
                                            Rng& rng, SampleDiagnostics* diag) {
    if (!spec.base.sub_gaussian)
        throw std::invalid_argument(
            "sample_initial: ConditionedTensor requires a sub-Gaussian base law");
    const int d = spec.d;
    // A centered Gaussian base has constant restricted density on the sphere:
    // the conditioned law is exactly uniform, no chain needed.
    if (spec.base.law == BaseLaw::Gaussian) {
        bool centered = true;
        for (double m : spec.base.mean) centered = centered && m == 0.0;
        if (centered) {
            if (diag) *diag = SampleDiagnostics{};
            return kac_sphere_draw(d, n, spec.energy, rng);
        }
    }
    // Feasible start: a sphere draw if the base supports it, otherwise i.i.d.
    // base draws rescaled to the energy sphere (retried until in-support).
    std::vector<double> v = kac_sphere_draw(d, n, spec.energy, rng);
    if (product_log_density(spec.base, v, d) == -std::numeric_limits<double>::infinity()) {
        bool feasible = false;
        for (int attempt = 0; attempt < 256 && !feasible; ++attempt) {
            for (std::size_t i = 0; i < n; ++i)
                spec.base.sample_point(d, rng, v.data() + i * d);
            double q = 0.0;
            for (double x : v) q += x * x;
            if (q == 0.0) continue;
            double scale = std::sqrt(static_cast<double>(n) * spec.energy / q);
            for (auto& x : v) x *= scale;
            feasible = product_log_density(spec.base, v, d) >
                       -std::numeric_limits<double>::infinity();
        }
        if (!feasible)
            throw std::invalid_argument(
                "sample_initial: no in-support configuration at the requested energy");
    }

    // Local pair rotations: pick two particles and rotate their stacked
    // 2d-vector on its own energy sphere.  O(d) per step with O(1)
    // acceptance, so the walk mixes at every N.
    const int total = static_cast<int>(n) *
                      (spec.mcmc.burn_in + spec.mcmc.steps_per_particle);
    const int burn = static_cast<int>(n) * spec.mcmc.burn_in;
    const int thin = std::max<int>(1, static_cast<int>(n) / 8);
    std::vector<double> u(2 * d), w(2 * d), trial(2 * d), m4_series;
    double sum4 = static_cast<double>(n) * m4_stat(v, d);
    std::size_t accepted = 0;
    for (int step = 0; step < total; ++step) {
        std::size_t i = rng() % n, j = rng() % (n - 1);
        if (j >= i) ++j;
        double wn2 = 0.0;
        for (int k = 0; k < d; ++k) {
            w[k] = v[i * d + k];
            w[d + k] = v[j * d + k];
        }
        for (double x : w) wn2 += x * x;
        if (wn2 == 0.0) continue;
        double c = 0.0, un = 0.0;
        for (auto& x : u) x = normal01(rng);
        for (int k = 0; k < 2 * d; ++k) c += u[k] * w[k];
        c /= wn2;
        for (int k = 0; k < 2 * d; ++k) {
            u[k] -= c * w[k];
            un += u[k] * u[k];
        }
        if (un <= 0.0) continue;
        double h = spec.mcmc.step_angle * normal01(rng);
        double ch = std::cos(h), sh = std::sin(h) * std::sqrt(wn2 / un);
        for (int k = 0; k < 2 * d; ++k) trial[k] = ch * w[k] + sh * u[k];
        double delta = spec.base.log_pdf(d, {trial.data(), static_cast<std::size_t>(d)}) +
                       spec.base.log_pdf(d, {trial.data() + d, static_cast<std::size_t>(d)}) -
                       spec.base.log_pdf(d, {w.data(), static_cast<std::size_t>(d)}) -
                       spec.base.log_pdf(d, {w.data() + d, static_cast<std::size_t>(d)});
        if (std::log(uniform01(rng) + 1e-300) < delta) {
            double qi = 0.0, qj = 0.0, oi = 0.0, oj = 0.0;
            for (int k = 0; k < d; ++k) {
                oi += w[k] * w[k];
                oj += w[d + k] * w[d + k];
                qi += trial[k] * trial[k];
                qj += trial[d + k] * trial[d + k];
                v[i * d + k] = trial[k];
                v[j * d + k] = trial[d + k];
            }
            sum4 += qi * qi + qj * qj - oi * oi - oj * oj;
            ++accepted;
        }
        if (step >= burn && (step - burn) % thin == 0)
            m4_series.push_back(sum4 / static_cast<double>(n));
    }
    if (diag) {
        diag->r_hat = split_r_hat(m4_series);
        diag->mcmc_flagged = diag->r_hat > 1.1;
        diag->acceptance = static_cast<double>(accepted) / total;
    }
    return v;
}

}  // namespace

std::vector<double> sample_initial(const InitialDataSpec& spec, std::size_t n, Rng& rng,
                                   SampleDiagnostics* diag) {
    if (n == 0) throw std::invalid_argument("sample_initial: empty system");
    const int d = spec.d;
    switch (spec.mode) {
        case InitMode::Tensor: {
            std::vector<double> v(n * d);
            for (std::size_t i = 0; i < n; ++i) spec.base.sample_point(d, rng, v.data() + i * d);
            return v;
        }
        case InitMode::KacSphere:
            if (!(spec.energy > 0.0))
                throw std::invalid_argument("sample_initial: KacSphere energy must be positive");
            return kac_sphere_draw(d, n, spec.energy, rng);
        case InitMode::ConditionedTensor:
            if (!(spec.energy > 0.0))
                throw std::invalid_argument("sample_initial: energy must be positive");
            return conditioned_tensor_draw(spec, n, rng, diag);
    }
    throw std::logic_error("sample_initial: unknown mode");
}

InitialSampler make_sampler(const InitialDataSpec& spec, std::size_t n) {
    return [spec, n](Rng& rng) { return sample_initial(spec, n, rng); };
}

// ---- law of large numbers --------------------------------------------------

LLNEntry wn_functional(const InitialDataSpec& spec, DistanceKind kind, std::size_t n,
                       int reps, std::uint64_t seed, const WnOptions& opt) {
    const int d = spec.d;
    LLNEntry entry;
    entry.n = n;
    std::vector<double> values(reps);

    if (kind == DistanceKind::SobolevNegSquared) {
        const SphericalGrid grid = sobolev_grid(d, opt.quad);
        const double s2 = 2.0 * opt.s;
        if (!(opt.s > 0.5 * d && opt.s < 0.5 * d + 1.0))
            throw std::invalid_argument("wn_functional: s must lie in (d/2, d/2+1)");
        // characteristic function of f0 on the nodes
        const std::size_t nodes = grid.count();
        std::vector<double> fre(nodes), fim(nodes);
        const bool analytic =
            spec.base.law == BaseLaw::Gaussian && spec.mode == InitMode::Tensor;
        if (analytic) {
            std::vector<double> mean = spec.base.mean;
            mean.resize(d, 0.0);
            CharFn cf = gaussian_char_fn(mean, spec.base.temperature);
            for (std::size_t b = 0; b < nodes; ++b) {
                auto z = cf({grid.xi.data() + b * d, static_cast<std::size_t>(d)});
                fre[b] = z.real();
                fim[b] = z.imag();
            }
            double ex = 0.0;
            for (std::size_t b = 0; b < nodes; ++b) {
                double a2 = fre[b] * fre[b] + fim[b] * fim[b];
                ex += grid.weight[b] * (1.0 - a2) / std::pow(grid.radius[b], s2);
            }
            entry.exact = ex / static_cast<double>(n);
        } else {
            Rng rng = make_stream(seed, kStageWnRef);
            std::size_t m = opt.ref_multiple * n;
            std::vector<double> ref(m * d);
            for (std::size_t i = 0; i < m; ++i)
                spec.base.sample_point(d, rng, ref.data() + i * d);
            CharFn cf = char_fn(EmpiricalMeasure::uniform(d, std::move(ref)));
            for (std::size_t b = 0; b < nodes; ++b) {
                auto z = cf({grid.xi.data() + b * d, static_cast<std::size_t>(d)});
                fre[b] = z.real();
                fim[b] = z.imag();
            }
        }
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
            Rng rng = make_stream(seed, kStageWn, rep);
            std::vector<double> v = sample_initial(spec, n, rng);
            double acc = 0.0;
            for (std::size_t b = 0; b < nodes; ++b) {
                const double* xi = grid.xi.data() + b * d;
                double re = 0.0, im = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double ph = 0.0;
                    for (int k = 0; k < d; ++k) ph -= xi[k] * v[i * d + k];
                    re += std::cos(ph);
                    im += std::sin(ph);
                }
                re = re / n - fre[b];
                im = im / n - fim[b];
                acc += grid.weight[b] * (re * re + im * im) / std::pow(grid.radius[b], s2);
            }
            values[rep] = acc;
        });
    } else {
        const double p = kind == DistanceKind::W1 ? 1.0 : 2.0;
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
            Rng rng = make_stream(seed, kStageWn, rep);
            std::vector<double> v = sample_initial(spec, n, rng);
            Rng ref_rng = make_stream(seed, kStageWnRef, rep);
            std::size_t m = opt.ref_multiple * n;
            std::vector<double> ref(m * d);
            for (std::size_t i = 0; i < m; ++i)
                spec.base.sample_point(d, ref_rng, ref.data() + i * d);
            double c = transport_cost(EmpiricalMeasure::uniform(d, std::move(v)),
                                      EmpiricalMeasure::uniform(d, std::move(ref)), p);
            values[rep] = c;  // W1 cost equals the distance; W2 branch keeps the square
        });
    }
    auto sum = stats::summarize(values);
    entry.mean = sum.mean;
    entry.stderr_ = sum.stderr_;
    return entry;
}

LLNResult lln_rate_scan(const InitialDataSpec& spec, DistanceKind kind,
                        std::vector<std::size_t> n_grid, int reps, std::uint64_t seed,
                        const WnOptions& opt) {
    if (n_grid.size() < 4)
        throw std::invalid_argument("lln_rate_scan: need a geometric grid of >= 4 sizes");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("lln_rate_scan: grid must be increasing");
    // near-constant ratio, so the log-log fit weights scales evenly
    for (std::size_t i = 2; i < n_grid.size(); ++i) {
        double r0 = static_cast<double>(n_grid[1]) / n_grid[0];
        double ri = static_cast<double>(n_grid[i]) / n_grid[i - 1];
        if (ri > r0 * 1.25 || ri < r0 / 1.25)
            throw std::invalid_argument("lln_rate_scan: grid must be geometric");
    }
    LLNResult res;
    res.kind = kind;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        res.entries.push_back(
            wn_functional(spec, kind, n_grid[i], reps, mix_seed(seed, i), opt));
        lx.push_back(std::log(static_cast<double>(n_grid[i])));
        ly.push_back(std::log(res.entries.back().mean));
    }
    res.loglog = stats::fit_line(lx, ly);
    return res;
}

// ---- dictionary and chaos gap ----------------------------------------------

Dictionary build_dictionary(int d, int ell, NormKind kind, std::uint64_t seed) {
    if (ell < 1) throw std::invalid_argument("build_dictionary: ell >= 1");
    Dictionary dict;
    dict.d = d;
    dict.ell = ell;
    Rng rng = make_stream(seed, 33, static_cast<std::uint64_t>(d));

    std::vector<TestFunction> base;
    std::vector<std::string> base_ids;
    const int n_packets = kind == NormKind::FourierF ? 48 : 32;
    for (int i = 0; i < n_packets; ++i) {
        int terms = 1 + static_cast<int>(uniform01(rng) * 3.0);
        std::vector<CosineTerm> packet;
        for (int t = 0; t < terms; ++t) {
            CosineTerm ct;
            ct.frequency.resize(d);
            random_unit_vector(d, rng, ct.frequency.data());
            double r = 0.25 * std::pow(16.0, uniform01(rng));  // |xi| in [0.25, 4]
            for (auto& x : ct.frequency) x *= r;
            ct.amplitude = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * (0.3 + uniform01(rng));
            ct.phase = 2.0 * std::numbers::pi * uniform01(rng);
            packet.push_back(std::move(ct));
        }
        // normalize so every norm kind in play is at most 1
        double total = 0.0;
        for (const auto& ct : packet) {
            double r = norm2(ct.frequency);
            double factor = kind == NormKind::FourierF ? 1.0 + r * r * r * r
                            : kind == NormKind::Sup    ? 1.0
                                                       : 1.0 + r;
            total += std::fabs(ct.amplitude) * factor;
        }
        for (auto& ct : packet) ct.amplitude /= total;
        NormKind packet_kind = kind == NormKind::Lipschitz ? NormKind::Sup : kind;
        TestFunction tf = cosine_packet(std::move(packet), packet_kind);
        if (kind == NormKind::Lipschitz) {
            // declared-norm bookkeeping: the joint normalization above bounds
            // both the sup and the Lipschitz seminorm by 1
            tf.norm_kind = NormKind::Lipschitz;
            tf.norm = 1.0;
        }
        base.push_back(std::move(tf));
        base_ids.push_back("pkt" + std::to_string(i));
    }
    if (kind != NormKind::FourierF) {
        for (int i = 0; i < 16; ++i) {
            std::vector<double> w(d);
            random_unit_vector(d, rng, w.data());
            double r = 0.25 * std::pow(16.0, uniform01(rng));
            for (auto& x : w) x *= r;
            double offset = 2.0 * (uniform01(rng) - 0.5);
            base.push_back(lipschitz_ramp(std::move(w), offset, 1.0 / (1.0 + r)));
            base.back().norm = 1.0;
            base_ids.push_back("ramp" + std::to_string(i));
        }
    }

    const std::size_t nb = base.size();
    for (std::size_t i = 0; i < nb; ++i) {
        TensorObservable obs;
        std::string id = base_ids[i];
        for (int c = 0; c < ell; ++c) {
            std::size_t j = (i + c * 17) % nb;
            obs.components.push_back(base[j]);
            if (c > 0) id += "*" + base_ids[j];
        }
        dict.entries.push_back(std::move(obs));
        dict.ids.push_back(std::move(id));
    }
    return dict;
}

ChaosGapResult chaos_gap(std::span<const std::vector<double>> replica_velocities, int d,
                         const EmpiricalMeasure& reference, const Dictionary& dict,
                         int n_bootstrap, std::uint64_t seed) {
    if (dict.entries.empty()) throw std::invalid_argument("chaos_gap: empty dictionary");
    const std::size_t nr = replica_velocities.size();
    const std::size_t ne = dict.entries.size();
    if (nr == 0) throw std::invalid_argument("chaos_gap: no replicas");

    // per-entry, per-replica symmetrized observables
    std::vector<double> table(ne * nr);
    parallel_for(nr, [&](std::size_t r) {
        for (std::size_t e = 0; e < ne; ++e)
            table[e * nr + r] = sym_observable(replica_velocities[r], d, dict.entries[e]);
    });
    std::vector<double> ref_val(ne), diff(ne);
    ChaosGapResult res;
    for (std::size_t e = 0; e < ne; ++e) {
        ref_val[e] = poly_observable(reference, dict.entries[e]);
        double m = 0.0;
        for (std::size_t r = 0; r < nr; ++r) m += table[e * nr + r];
        diff[e] = m / static_cast<double>(nr) - ref_val[e];
        if (std::fabs(diff[e]) >= res.gap) {
            res.gap = std::fabs(diff[e]);
            res.argmax_id = dict.ids[e];
        }
    }
    res.per_entry = diff;

    if (n_bootstrap > 1) {
        Rng rng = make_stream(seed, kStageBoot);
        std::vector<double> gaps(n_bootstrap);
        std::vector<double> sums(ne);
        for (int b = 0; b < n_bootstrap; ++b) {
            std::fill(sums.begin(), sums.end(), 0.0);
            for (std::size_t r = 0; r < nr; ++r) {
                std::size_t pick = std::min<std::size_t>(
                    nr - 1, static_cast<std::size_t>(uniform01(rng) * nr));
                for (std::size_t e = 0; e < ne; ++e) sums[e] += table[e * nr + pick];
            }
            double g = 0.0;
            for (std::size_t e = 0; e < ne; ++e)
                g = std::max(g, std::fabs(sums[e] / static_cast<double>(nr) - ref_val[e]));
            gaps[b] = g;
        }
        res.stderr_ = stats::summarize(gaps).stddev;
    }
    return res;
}

// ---- Mehler marginals ------------------------------------------------------

std::vector<MehlerRow> mehler_marginal_check(const std::vector<std::size_t>& n_grid, int d,
                                             int ell, int reps, std::size_t points,
                                             std::uint64_t seed) {
    if (ell * d > 3)
        throw std::invalid_argument("mehler_marginal_check: ell * d must be <= 3");
    std::vector<MehlerRow> rows;
    const int dm = ell * d;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        if (n < static_cast<std::size_t>(ell))
            throw std::invalid_argument("mehler_marginal_check: N < ell");
        std::vector<double> w1s(reps);
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
            Rng rng = make_stream(mix_seed(seed, gi), kStageMehler, rep);
            // Exact marginal of the uniform sphere: dm Gaussian coordinates
            // normalized by the full chi-square radius, so each point costs
            // O(dm) instead of O(N d).
            const double rest_dof = static_cast<double>(n) * d - dm;
            std::gamma_distribution<double> chi2(0.5 * rest_dof, 2.0);
            const double radius = std::sqrt(static_cast<double>(n));  // energy 1 per particle
            std::vector<double> marg(points * dm), gauss(points * dm);
            for (std::size_t p = 0; p < points; ++p) {
                double q = rest_dof > 0.0 ? chi2(rng) : 0.0;
                for (int k = 0; k < dm; ++k) {
                    marg[p * dm + k] = normal01(rng);
                    q += marg[p * dm + k] * marg[p * dm + k];
                }
                const double scale = radius / std::sqrt(q);
                for (int k = 0; k < dm; ++k) marg[p * dm + k] *= scale;
                for (int k = 0; k < dm; ++k) gauss[p * dm + k] = normal01(rng);
            }
            w1s[rep] = wasserstein(EmpiricalMeasure::uniform(dm, std::move(marg)),
                                   EmpiricalMeasure::uniform(dm, std::move(gauss)), 1.0);
        });
        auto sum = stats::summarize(w1s);
        rows.push_back({n, sum.mean, sum.stderr_});
    }
    return rows;
}

}  // namespace kacsim
