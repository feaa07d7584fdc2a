#pragma once

#include <span>

namespace wavinv {

/// Composite Simpson over uniformly spaced samples with spacing h.
/// An odd interval count closes with the 3/8 rule; two samples fall back to the trapezoid.
double integrate_uniform(std::span<const double> f, double h);

/// Same rule, integrand f*g sampled on the same grid.
double integrate_product(std::span<const double> f, std::span<const double> g, double h);

/// sin(z)/z with the removable singularity filled in.
double sinc(double z);

}  // namespace wavinv
