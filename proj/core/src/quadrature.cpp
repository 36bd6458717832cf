#include "kacsim/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kacsim/geometry.hpp"

namespace kacsim {

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order >= 1");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.weights[n - 1 - i] = gl.weights[i];
    }
    return gl;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order, int panels) {
    const GaussLegendre gl = gauss_legendre(order);
    double sum = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < order; ++i) {
            double x = lo + 0.5 * h * (gl.nodes[i] + 1.0);
            sum += 0.5 * h * gl.weights[i] * f(x);
        }
    }
    return sum;
}

double integrate_gl_graded(const std::function<double(double)>& f, double a, double b,
                           int order, int panels, double grading) {
    const GaussLegendre gl = gauss_legendre(order);
    // Panel edges cluster towards a: a + (b-a) * (k/panels)^grading.
    double sum = 0.0;
    double prev = a;
    for (int p = 1; p <= panels; ++p) {
        double edge = a + (b - a) * std::pow(static_cast<double>(p) / panels, grading);
        const double h = edge - prev;
        for (int i = 0; i < order; ++i) {
            double x = prev + 0.5 * h * (gl.nodes[i] + 1.0);
            sum += 0.5 * h * gl.weights[i] * f(x);
        }
        prev = edge;
    }
    return sum;
}

std::vector<std::vector<double>> direction_set(int d, int n) {
    std::vector<std::vector<double>> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
        return dirs;
    }
    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            double a = std::numbers::pi * i / n;  // half circle; +/- xi symmetric
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    if (d == 3) {
        // Spherical Fibonacci lattice.
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            double z = 1.0 - (2.0 * i + 1.0) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double a = ga * i;
            dirs.push_back({r * std::cos(a), r * std::sin(a), z});
        }
        return dirs;
    }
    // d > 3: low-discrepancy via a fixed-seed Gaussian normalization.
    Rng rng = make_stream(0x8d5e1ull, 77, static_cast<std::uint64_t>(d));
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(d);
        random_unit_vector(d, rng, v.data());
        dirs.push_back(std::move(v));
    }
    return dirs;
}

}  // namespace kacsim
