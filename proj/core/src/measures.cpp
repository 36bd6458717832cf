#include "kacsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kacsim/geometry.hpp"

namespace kacsim {

EmpiricalMeasure EmpiricalMeasure::uniform(int d, std::vector<double> pts) {
    EmpiricalMeasure m;
    m.d = d;
    if (d < 1 || pts.empty() || pts.size() % static_cast<std::size_t>(d) != 0)
        throw std::invalid_argument("EmpiricalMeasure: point array not a multiple of d");
    const std::size_t n = pts.size() / d;
    m.points = std::move(pts);
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    return m;
}

EmpiricalMeasure EmpiricalMeasure::weighted(int d, std::vector<double> pts,
                                            std::vector<double> w) {
    EmpiricalMeasure m;
    m.d = d;
    m.points = std::move(pts);
    m.weights = std::move(w);
    m.validate();
    return m;
}

void EmpiricalMeasure::validate() const {
    if (d < 1 || points.size() != weights.size() * static_cast<std::size_t>(d))
        throw std::invalid_argument("EmpiricalMeasure: inconsistent sizes");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("EmpiricalMeasure: negative weight");
        sum += w;
    }
    // rounding in the sum grows with the support size
    const double tol = 1e-12 + 8.0 * std::numeric_limits<double>::epsilon() *
                                   static_cast<double>(weights.size());
    if (std::fabs(sum - 1.0) > tol)
        throw std::invalid_argument("EmpiricalMeasure: weights must sum to 1");
}

EmpiricalMeasure empirical(std::span<const double> velocities, int d) {
    return EmpiricalMeasure::uniform(d, {velocities.begin(), velocities.end()});
}

EmpiricalMeasure subsample(const EmpiricalMeasure& mu, std::size_t n, std::uint64_t seed) {
    mu.validate();
    if (n == 0) throw std::invalid_argument("subsample: n must be positive");
    std::vector<double> cdf(mu.count());
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.count(); ++i) {
        acc += mu.weights[i];
        cdf[i] = acc;
    }
    Rng rng = make_stream(seed, 12);
    std::vector<double> pts(n * mu.d);
    for (std::size_t k = 0; k < n; ++k) {
        double u = uniform01(rng) * acc;
        std::size_t i = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (i >= mu.count()) i = mu.count() - 1;
        auto p = mu.point(i);
        std::copy(p.begin(), p.end(), pts.begin() + k * mu.d);
    }
    return EmpiricalMeasure::uniform(mu.d, std::move(pts));
}

double moment(const EmpiricalMeasure& mu, double k) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.count(); ++i)
        s += mu.weights[i] * std::pow(norm2(mu.point(i)), k);
    return s;
}

std::vector<double> mean_vector(const EmpiricalMeasure& mu) {
    std::vector<double> m(mu.d, 0.0);
    for (std::size_t i = 0; i < mu.count(); ++i)
        for (int k = 0; k < mu.d; ++k) m[k] += mu.weights[i] * mu.point(i)[k];
    return m;
}

bool TestFunction::norm_sanity_check(int d) const {
    Rng rng = make_stream(0xbead5ull, 11, static_cast<std::uint64_t>(d));
    std::vector<double> x(d), y(d);
    for (int trial = 0; trial < 256; ++trial) {
        for (int k = 0; k < d; ++k) {
            x[k] = 8.0 * (uniform01(rng) - 0.5);
            y[k] = 8.0 * (uniform01(rng) - 0.5);
        }
        switch (norm_kind) {
            case NormKind::Sup:
                if (std::fabs(eval(x)) > norm * (1.0 + 1e-9)) return false;
                break;
            case NormKind::Lipschitz: {
                double r = dist(x, y);
                if (r > 1e-12 && std::fabs(eval(x) - eval(y)) > norm * r * (1.0 + 1e-9))
                    return false;
                break;
            }
            case NormKind::FourierF:
                break;  // exact by construction for packets
        }
    }
    return true;
}

TestFunction cosine_packet(std::vector<CosineTerm> terms, NormKind kind) {
    if (terms.empty()) throw std::invalid_argument("cosine_packet: empty");
    TestFunction tf;
    tf.norm_kind = kind;
    double norm = 0.0;
    for (const auto& t : terms) {
        double xi = norm2(t.frequency);
        switch (kind) {
            case NormKind::FourierF: norm += std::fabs(t.amplitude) * (1.0 + xi * xi * xi * xi); break;
            case NormKind::Sup: norm += std::fabs(t.amplitude); break;
            case NormKind::Lipschitz: norm += std::fabs(t.amplitude) * xi; break;
        }
    }
    tf.norm = norm;
    tf.packet = terms;
    tf.eval = [terms = std::move(terms)](std::span<const double> v) {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.amplitude * std::cos(dot(t.frequency, v) + t.phase);
        return s;
    };
    return tf;
}

TestFunction lipschitz_ramp(std::vector<double> direction, double offset, double scale) {
    TestFunction tf;
    tf.norm_kind = NormKind::Lipschitz;
    tf.norm = scale * norm2(direction);
    tf.eval = [w = std::move(direction), offset, scale](std::span<const double> v) {
        return scale * std::tanh(dot(w, v) + offset);
    };
    return tf;
}

double TensorObservable::norm() const {
    double p = 1.0;
    for (const auto& c : components) p *= c.norm;
    return p;
}

double poly_observable(const EmpiricalMeasure& rho, const TensorObservable& phi) {
    if (phi.components.empty()) throw std::invalid_argument("poly_observable: ell >= 1");
    double prod = 1.0;
    for (const auto& c : phi.components) {
        double s = 0.0;
        for (std::size_t i = 0; i < rho.count(); ++i) s += rho.weights[i] * c(rho.point(i));
        prod *= s;
    }
    return prod;
}

namespace {

// Enumerate set partitions of {0..ell-1} via restricted growth strings,
// accumulating coeff * prod_B T_B where T_B = sum_j prod_{k in B} phi_k(v_j)
// and coeff = prod_B (-1)^{|B|-1} (|B|-1)!.
double injective_sum(const std::vector<std::vector<double>>& table, std::size_t n) {
    const std::size_t ell = table.size();
    std::vector<int> assign(ell, 0);
    double total = 0.0;
    for (;;) {
        int blocks = 0;
        for (std::size_t k = 0; k < ell; ++k) blocks = std::max(blocks, assign[k] + 1);
        double term = 1.0;
        for (int b = 0; b < blocks; ++b) {
            double tb = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double p = 1.0;
                for (std::size_t k = 0; k < ell; ++k)
                    if (assign[k] == b) p *= table[k][j];
                tb += p;
            }
            int size = 0;
            for (std::size_t k = 0; k < ell; ++k)
                if (assign[k] == b) ++size;
            double coeff = (size % 2 == 1) ? 1.0 : -1.0;
            for (int m = 2; m < size; ++m) coeff *= m;
            term *= coeff * tb;
        }
        total += term;

        // next restricted growth string
        std::size_t k = ell;
        while (k-- > 1) {
            int maxprev = 0;
            for (std::size_t m = 0; m < k; ++m) maxprev = std::max(maxprev, assign[m]);
            if (assign[k] <= maxprev) {
                ++assign[k];
                for (std::size_t m = k + 1; m < ell; ++m) assign[m] = 0;
                break;
            }
            if (k == 1) return total;
        }
        if (ell == 1) return total;
    }
}

}  // namespace

double sym_observable(std::span<const double> velocities, int d, const TensorObservable& phi) {
    const std::size_t ell = phi.order();
    if (ell == 0) throw std::invalid_argument("sym_observable: ell >= 1");
    if (d < 1 || velocities.size() % static_cast<std::size_t>(d) != 0)
        throw std::invalid_argument("sym_observable: bad velocity array");
    const std::size_t n = velocities.size() / d;
    if (n < ell) throw std::invalid_argument("sym_observable: N >= ell required");
    if (ell > 10) throw std::invalid_argument("sym_observable: ell too large");

    std::vector<std::vector<double>> table(ell, std::vector<double>(n));
    for (std::size_t k = 0; k < ell; ++k)
        for (std::size_t j = 0; j < n; ++j)
            table[k][j] = phi.components[k]({velocities.data() + j * d, static_cast<std::size_t>(d)});

    double falling = 1.0;
    for (std::size_t m = 0; m < ell; ++m) falling *= static_cast<double>(n - m);
    return injective_sum(table, n) / falling;
}

double symmetrization_gap(std::span<const double> velocities, int d,
                          const TensorObservable& phi) {
    const std::size_t n = velocities.size() / d;
    if (n < 2 * phi.order())
        throw std::invalid_argument("symmetrization_gap: N >= 2 ell required");
    double poly = poly_observable(empirical(velocities, d), phi);
    double sym = sym_observable(velocities, d, phi);
    return std::fabs(poly - sym);
}

}  // namespace kacsim
