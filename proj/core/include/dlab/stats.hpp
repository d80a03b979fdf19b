#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlab {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> v);
double standard_error(std::span<const double> v);
/// Quantile with linear interpolation between order statistics, q in [0, 1].
double quantile(std::span<const double> v, double q);
double median(std::span<const double> v);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of y against x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Fit of log y against log x; pairs with a non-positive coordinate are skipped.
LineFit fit_log_log(std::span<const double> x, std::span<const double> y);

}  // namespace dlab
