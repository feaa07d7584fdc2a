#include "wavinv/recon.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <limits>
#include <numbers>
#include <sstream>

namespace wavinv {
namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

double nu_of(std::size_t n, BoundaryVariant v) {
  return static_cast<double>(n) + (v == BoundaryVariant::DirichletAtZero ? 0.5 : 0.0);
}

// Limit of s(nu) = L + c/nu^2 from two samples.
double richardson(double nu_a, double s_a, double nu_b, double s_b) {
  const double a2 = nu_a * nu_a, b2 = nu_b * nu_b;
  return (a2 * s_a - b2 * s_b) / (a2 - b2);
}

// Limit of f(nu) = L + c/nu^2 + d/nu^4 through three points (Neville in x = 1/nu^2).
double richardson3(double nu_a, double s_a, double nu_b, double s_b, double nu_c, double s_c) {
  const double xa = 1.0 / (nu_a * nu_a), xb = 1.0 / (nu_b * nu_b), xc = 1.0 / (nu_c * nu_c);
  const double pab = (xb * s_a - xa * s_b) / (xb - xa);
  const double pbc = (xc * s_b - xb * s_c) / (xc - xb);
  return (xc * pab - xa * pbc) / (xc - xa);
}

// Extrapolated limit of f along the tail ending at index hi: three levels hi, hi/2, hi/4 when
// hi/4 is already asymptotic, two otherwise.
template <class F>
double tail_limit(F&& f, std::size_t hi, BoundaryVariant variant) {
  const std::size_t mid = std::max<std::size_t>(hi / 2, 1), lo = hi / 4;
  if (lo >= 6)
    return richardson3(nu_of(hi, variant), f(hi), nu_of(mid, variant), f(mid), nu_of(lo, variant), f(lo));
  return richardson(nu_of(hi, variant), f(hi), nu_of(mid, variant), f(mid));
}

void require_entries(const SpectralData& d, std::size_t n, const char* who) {
  if (d.size() < n) throw ValidationError(std::string(who) + ": needs at least " + std::to_string(n) + " entries");
  for (const auto& e : d.entries())
    if (!(e.lambda > 0.0) && &e != &d[0])
      throw ValidationError(std::string(who) + ": only the first eigenvalue may be non-positive");
}

// sin(c x)/c, continued to c = 0 and to complex c.
double S(double c, double x) {
  const double z = c * x;
  if (std::abs(z) < 1e-4) return x * (1.0 - z * z / 6.0);
  return std::sin(z) / c;
}
cplx S(cplx c, double x) {
  const cplx z = c * x;
  if (std::abs(z) < 1e-4) return x * (1.0 - z * z / 6.0);
  return std::sin(z) / c;
}

// One term of the separable kernel F: frequency k (imaginary for negative lambda), weight s.
struct Term {
  double lambda;
  double k;        // sqrt|lambda|
  bool imag;       // lambda < 0
  double weight;   // +1/alpha^2 for data, -1/alpha0^2 for the reference
};

struct Row {
  double diag = 0.0;   // K(x,x)
  double slope = 0.0;  // d/dx K(x,x)
  double rcond = 0.0;
  double residual = 0.0;
};

class GlSolver {
 public:
  GlSolver(const SpectralData& data, double ell, BoundaryVariant v)
      : robin_(v == BoundaryVariant::RobinAtZero), ell_(ell), N_(data.size()) {
    const std::size_t N = data.size();
    auto ref_k = [&](std::size_t n) { return nu_of(n, v) * kPi / ell; };
    auto ref_alpha = [&](std::size_t n) {
      if (robin_) return n == 0 ? ell : 0.5 * ell;
      return ell / (2.0 * ref_k(n) * ref_k(n));
    };
    // lambda_n - k_n^2 -> shift + e/k_n^2
    {
      const std::size_t a = N - 1, b = N / 2;
      const double ka = ref_k(a), kb = ref_k(b);
      shift_ = richardson(ka, data[a].lambda - ka * ka, kb, data[b].lambda - kb * kb);
    }
    // Normalized weight differences approach c/k_n^2; estimated away from the top modes,
    // whose norming constants carry the largest relative error.
    {
      auto cn = [&](std::size_t n) {
        const double k = ref_k(n);
        const double norm = robin_ ? 1.0 : 1.0 / (k * k);
        return k * k * norm * (1.0 / data[n].alpha_sq - 1.0 / ref_alpha(n));
      };
      const std::size_t a = std::max<std::size_t>(N / 2, 2), b = std::max<std::size_t>(N / 4, 1);
      tail_c_ = richardson(ref_k(a), cn(a), ref_k(b), cn(b));
    }
    for (std::size_t n = 0; n < N; ++n) {
      const double lam = data[n].lambda - shift_;
      terms_.push_back({lam, std::sqrt(std::abs(lam)), lam < 0.0, 1.0 / data[n].alpha_sq});
    }
    for (std::size_t n = 0; n < N; ++n) {
      const double k = ref_k(n);
      terms_.push_back({k * k, k, false, -1.0 / ref_alpha(n)});
    }
  }

  double tail_coefficient() const { return tail_c_; }

  // First-order effect of the modes n >= N on the diagonal, from the asymptotic model
  // weight difference c/k_n^2 at the reference frequencies: returns {F_tail(x,x), d/dx F_tail(x,x)}.
  std::pair<double, double> tail(double x) const {
    const double c = tail_c_;
    const auto N = static_cast<double>(N_);
    if (robin_) {
      const double th = std::clamp(2.0 * kPi * x / ell_, 0.0, 2.0 * kPi);
      double cos_head = 0.0, sin_head = 0.0;
      for (std::size_t n = 1; n < N_; ++n) {
        const double dn = static_cast<double>(n);
        cos_head += std::cos(dn * th) / (dn * dn);
        sin_head += std::sin(dn * th) / dn;
      }
      const double cos_tail = kPi * kPi / 6.0 - kPi * th / 2.0 + th * th / 4.0 - cos_head;
      // One-sided limits at the ends of the interval.
      const double sin_tail = (kPi - th) / 2.0 - sin_head;
      const double r = ell_ / kPi;
      return {0.5 * c * r * r * (trigamma(N) + cos_tail), -c * r * sin_tail};
    }
    const double ph = std::clamp(kPi * x / ell_, 0.0, kPi);
    double cos_head = 0.0, sin_head = 0.0, inv_sq_head = 0.0;
    for (std::size_t n = 0; n < N_; ++n) {
      const double m = 2.0 * static_cast<double>(n) + 1.0;
      cos_head += std::cos(m * ph) / (m * m);
      sin_head += std::sin(m * ph) / m;
      inv_sq_head += 1.0 / (m * m);
    }
    const double inv_sq_tail = kPi * kPi / 8.0 - inv_sq_head;
    const double cos_tail = kPi / 8.0 * (kPi - 2.0 * ph) - cos_head;
    const double sin_tail = kPi / 4.0 - sin_head;
    const double r = 2.0 * ell_ / kPi;
    return {0.5 * c * r * r * (inv_sq_tail - cos_tail), 2.0 * c * ell_ / kPi * sin_tail};
  }

  double shift() const { return shift_; }

  Row solve(double x) const {
    const auto P = static_cast<Eigen::Index>(terms_.size());
    Eigen::VectorXd phi(P), dphi(P), s(P);
    for (Eigen::Index p = 0; p < P; ++p) {
      const Term& t = terms_[static_cast<std::size_t>(p)];
      s(p) = t.weight;
      basis(t, x, phi(p), dphi(p));
    }
    Eigen::MatrixXd M(P, P);
    for (Eigen::Index p = 0; p < P; ++p)
      for (Eigen::Index m = p; m < P; ++m) {
        const double g = gram(terms_[static_cast<std::size_t>(p)], terms_[static_cast<std::size_t>(m)], x);
        M(p, m) = g;
        M(m, p) = g;
      }
    // (I + G S) B = phi
    Eigen::MatrixXd A = M * s.asDiagonal();
    A.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd B = lu.solve(phi);
    Row r;
    r.rcond = lu.rcond();
    r.residual = (A * B - phi).norm() / std::max(phi.norm(), 1e-300);
    r.diag = -(s.array() * phi.array() * B.array()).sum();
    const Eigen::VectorXd dB = lu.solve(dphi + r.diag * phi);
    r.slope = -((s.array() * dphi.array() * B.array()).sum() + (s.array() * phi.array() * dB.array()).sum());
    return r;
  }

 private:
  void basis(const Term& t, double x, double& f, double& df) const {
    const double z = t.k * x;
    if (robin_) {
      if (t.imag) {
        f = std::cosh(z);
        df = t.k * std::sinh(z);
      } else {
        f = std::cos(z);
        df = -t.k * std::sin(z);
      }
    } else {
      if (t.imag) {
        f = S(cplx(0.0, t.k), x).real();  // sinh(kx)/k
        df = std::cosh(z);
      } else {
        f = S(t.k, x);
        df = std::cos(z);
      }
    }
  }

  // int_0^x phi_a phi_b
  double gram(const Term& a, const Term& b, double x) const {
    if (!a.imag && !b.imag) {
      if (robin_) return 0.5 * (S(a.k - b.k, x) + S(a.k + b.k, x));
      if (a.k * x < 1e-4 || b.k * x < 1e-4) return gram_small(a.k * x < 1e-4 ? b : a, x);
      return 0.5 * (S(a.k - b.k, x) - S(a.k + b.k, x)) / (a.k * b.k);
    }
    const cplx ka = a.imag ? cplx(0.0, a.k) : cplx(a.k, 0.0);
    const cplx kb = b.imag ? cplx(0.0, b.k) : cplx(b.k, 0.0);
    if (robin_) return (0.5 * (S(ka - kb, x) + S(ka + kb, x))).real();
    if (a.k * x < 1e-4 || b.k * x < 1e-4) return gram_small(a.k * x < 1e-4 ? b : a, x);
    return (0.5 * (S(ka - kb, x) - S(ka + kb, x)) / (ka * kb)).real();
  }

  // Dirichlet pair where one frequency is negligible: int_0^x t sin(k t)/k dt.
  static double gram_small(const Term& other, double x) {
    const double z = other.k * x;
    if (z < 1e-3) return x * x * x / 3.0;
    const double k3 = other.k * other.k * other.k;
    if (other.imag) return (z * std::cosh(z) - std::sinh(z)) / k3;
    return (std::sin(z) - z * std::cos(z)) / k3;
  }

  // sum_{n >= N} 1/n^2
  static double trigamma(double N) {
    double acc = 0.0;
    while (N < 10.0) {
      acc += 1.0 / (N * N);
      N += 1.0;
    }
    const double i = 1.0 / N, i2 = i * i;
    return acc + i + 0.5 * i2 + i * i2 / 6.0 - i * i2 * i2 / 30.0 + i * i2 * i2 * i2 / 42.0;
  }

  bool robin_;
  double ell_;
  std::size_t N_;
  double shift_ = 0.0;
  double tail_c_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace

double estimate_length(const SpectralData& data, BoundaryVariant variant) {
  require_entries(data, 8, "estimate_length");
  const std::size_t N = data.size();
  std::vector<double> s(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const double nu = nu_of(n, variant);
    if (nu > 0.0) s[n] = nu * kPi / std::sqrt(data[n].lambda);
  }
  const double ell = tail_limit([&](std::size_t n) { return s[n]; }, N - 1, variant);

  // The tail approaches the limit from one side; a sign change in the increments means the
  // eigenvalues are not a clean asymptotic sequence.
  int sign = 0;
  for (std::size_t n = std::max<std::size_t>(3 * N / 4, 2); n < N; ++n) {
    const double d = s[n] - s[n - 1];
    if (std::abs(d) <= 1e-10 * std::abs(ell)) continue;
    const int sg = d > 0 ? 1 : -1;
    if (sign != 0 && sg != sign)
      throw NumericError("estimate_length: non-monotone tail of nu*pi/sqrt(lambda) near n=" + std::to_string(n));
    sign = sg;
  }
  if (!(ell > 0.0) || !std::isfinite(ell)) throw NumericError("estimate_length: extrapolation failed");
  return ell;
}

double estimate_a1(const SpectralData& data, double ell_hat, BoundaryVariant variant) {
  require_entries(data, 8, "estimate_a1");
  if (!(ell_hat > 0.0)) throw ValidationError("estimate_a1: ell_hat must be positive");
  const std::size_t N = data.size();
  auto a = [&](std::size_t n) {
    const double nu = nu_of(n, variant);
    return nu * (ell_hat * std::sqrt(data[n].lambda) - nu * kPi) * kPi / ell_hat;
  };
  auto level = [&](std::size_t hi) { return tail_limit(a, hi, variant); };
  const double fine = level(N - 1);
  const double coarse = level(std::max<std::size_t>(3 * (N - 1) / 4, 2));
  if (!std::isfinite(fine) || std::abs(fine - coarse) > 0.1 * std::max(1.0, std::abs(fine)))
    throw NumericError("estimate_a1: sequence does not settle (" + std::to_string(coarse) + " vs " +
                       std::to_string(fine) + ")");
  return fine;
}

double recover_H(double a1_hat, double h_known, double q_integral, BoundaryVariant variant) {
  const double h = variant == BoundaryVariant::RobinAtZero ? h_known : 0.0;
  return a1_hat - h - 0.5 * q_integral;
}

double recover_H(double a1_hat, double h_known, const PiecewiseLinear& q_hat, double ell_hat,
                 BoundaryVariant variant) {
  return recover_H(a1_hat, h_known, q_hat.integral(0.0, ell_hat), variant);
}

GlResult gl_reconstruct(const SpectralData& data, double ell_hat, BoundaryVariant variant, const GlOptions& options) {
  require_entries(data, 10, "gl_reconstruct");
  if (!(ell_hat > 0.0)) throw ValidationError("gl_reconstruct: ell_hat must be positive");
  if (!(options.margin > 0.0 && options.margin <= 1.0)) throw ValidationError("gl_reconstruct: margin must be in (0,1]");
  if (options.nodes < 3) throw ValidationError("gl_reconstruct: needs at least 3 nodes");
  const GlSolver solver(data, ell_hat, variant);
  GlResult out;
  out.modes = data.size();
  out.shift = solver.shift();
  out.grid = UniformGrid::spanning(0.0, options.margin * ell_hat, options.nodes);
  out.min_rcond = std::numeric_limits<double>::infinity();
  auto track = [&](const Row& r) {
    out.min_rcond = std::min(out.min_rcond, r.rcond);
    out.max_residual = std::max(out.max_residual, r.residual);
    if (!std::isfinite(r.diag) || r.rcond < 1e-14) {
      std::ostringstream msg;
      msg << "gl_reconstruct: near-singular Gelfand-Levitan system (rcond " << r.rcond << ")";
      throw NumericError(msg.str());
    }
  };
  out.tail_coefficient = solver.tail_coefficient();
  for (std::size_t i = 0; i < out.grid.size; ++i) {
    const double x = out.grid.at(i);
    const Row r = solver.solve(x);
    track(r);
    const auto [f_tail, df_tail] = solver.tail(x);
    out.kernel_diagonal.push_back(r.diag - f_tail);
    out.q_hat.push_back(2.0 * (r.slope - df_tail) + out.shift);
  }
  out.h_hat = variant == BoundaryVariant::RobinAtZero ? out.kernel_diagonal.front() : 0.0;
  const Row end = solver.solve(ell_hat);
  track(end);
  const double k_end = end.diag - solver.tail(ell_hat).first;
  out.q_integral = 2.0 * (k_end - out.h_hat) + out.shift * ell_hat;
  if (out.max_residual > options.residual_tolerance) {
    std::ostringstream msg;
    msg << "gl_reconstruct: algebraic residual " << out.max_residual << " above " << options.residual_tolerance;
    throw NumericError(msg.str());
  }
  return out;
}

double gl_kernel_diagonal(const SpectralData& data, double ell_hat, BoundaryVariant variant, double x) {
  require_entries(data, 10, "gl_kernel_diagonal");
  const GlSolver solver(data, ell_hat, variant);
  return solver.solve(x).diag - solver.tail(x).first;
}

ReconstructionReport reconstruct(const KnownPrefix& prefix, const SpectralData& data, const ReconOptions& options) {
  validate_prefix(prefix);
  ReconstructionReport r;
  r.variant = prefix.variant();
  r.ell_hat = estimate_length(data, r.variant);
  r.a1_hat = estimate_a1(data, r.ell_hat, r.variant);
  r.gl = gl_reconstruct(data, r.ell_hat, r.variant, options.gl);
  r.h_known = prefix.left.is_robin() ? prefix.left.h() : 0.0;
  r.h_hat = r.gl.h_hat;
  r.H_hat = recover_H(r.a1_hat, r.h_known, r.gl.q_integral, r.variant);
  for (std::size_t i = 0; i < r.gl.grid.size; ++i) {
    const double x = r.gl.grid.at(i);
    if (x > prefix.epsilon) break;
    r.prefix_mismatch = std::max(r.prefix_mismatch, std::abs(r.gl.q_hat[i] - prefix.q(x)));
  }
  if (prefix.left.is_robin() && std::abs(r.h_hat - r.h_known) > options.h_tolerance) {
    std::ostringstream msg;
    msg << "reconstruct: recovered h=" << r.h_hat << " differs from the known h=" << r.h_known << " by more than "
        << options.h_tolerance;
    throw NumericError(msg.str());
  }
  return r;
}

}  // namespace wavinv
