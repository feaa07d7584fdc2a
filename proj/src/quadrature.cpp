#include "wavinv/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wavinv {
namespace {

template <class F>
double simpson_core(std::size_t n, double h, F&& f) {
  if (n < 2) return 0.0;
  const std::size_t intervals = n - 1;
  if (intervals == 1) return 0.5 * h * (f(0) + f(1));
  std::size_t simpson_end = intervals;  // last index covered by Simpson panels
  double tail = 0.0;
  if (intervals % 2 == 1) {
    simpson_end = intervals - 3;
    const std::size_t a = simpson_end;
    tail = 3.0 * h / 8.0 * (f(a) + 3.0 * f(a + 1) + 3.0 * f(a + 2) + f(a + 3));
  }
  double s = 0.0;
  if (simpson_end > 0) {
    s = f(0) + f(simpson_end);
    for (std::size_t i = 1; i < simpson_end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(i);
    s *= h / 3.0;
  }
  return s + tail;
}

}  // namespace

double integrate_uniform(std::span<const double> f, double h) {
  return simpson_core(f.size(), h, [&](std::size_t i) { return f[i]; });
}

double integrate_product(std::span<const double> f, std::span<const double> g, double h) {
  if (f.size() != g.size()) throw std::invalid_argument("integrate_product: size mismatch");
  return simpson_core(f.size(), h, [&](std::size_t i) { return f[i] * g[i]; });
}

double sinc(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace wavinv
