// Statistical test statistics and small fitting helpers used by the
// verification suites and the experiment reports.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kacsim::stats {

double normal_cdf(double x);

// Regularized incomplete gamma functions P(a,x), Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic with dof degrees of freedom.
double chi2_pvalue(double stat, int dof);

// One-sample Kolmogorov-Smirnov against a CDF given as values at the sorted
// sample points.  Returns the asymptotic p-value.
double ks_statistic(std::span<const double> sorted_sample,
                    std::span<const double> cdf_at_sample);
double ks_pvalue(double d, std::size_t n);

// Two-sample KS p-value.
double ks2_pvalue(std::span<const double> a, std::span<const double> b);

// Anderson-Darling A^2 against the standard normal (fully specified case).
double anderson_darling_normal(std::span<const double> sample);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;   // sample standard deviation
    double stderr_ = 0.0;  // standard error of the mean
    std::size_t n = 0;
};
Summary summarize(std::span<const double> values);

}  // namespace kacsim::stats
