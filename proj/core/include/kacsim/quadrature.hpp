#pragma once

#include <functional>
#include <vector>

namespace kacsim {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Nodes/weights via Newton iteration on the Legendre polynomial.
GaussLegendre gauss_legendre(int n);

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order = 16, int panels = 8);

// Composite Gauss-Legendre over geometrically graded panels on [a, b],
// suited to integrands with a power singularity at a.
double integrate_gl_graded(const std::function<double(double)>& f, double a, double b,
                           int order = 16, int panels = 24, double grading = 2.0);

}  // namespace kacsim
