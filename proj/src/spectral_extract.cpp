#include "wavinv/spectral_extract.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavinv/transmutation.hpp"

namespace wavinv {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRoundoffFloor = 1e-13;

struct Model {
  bool linear = true;
  double a0 = 0.0;
  std::vector<double> omega;
  std::vector<double> amp;

  std::size_t params() const { return (linear ? 1 : 0) + 2 * omega.size(); }
};

Eigen::VectorXd evaluate(const Model& m, const Eigen::VectorXd& t) {
  Eigen::VectorXd out = m.linear ? Eigen::VectorXd(m.a0 * t) : Eigen::VectorXd::Zero(t.size());
  for (std::size_t k = 0; k < m.omega.size(); ++k) out += m.amp[k] * (m.omega[k] * t).array().sin().matrix();
  return out;
}

double rel_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& fit) {
  const double nu = u.norm();
  return nu > 0.0 ? (u - fit).norm() / nu : (u - fit).norm();
}

// Amplitudes (and A0) by linear least squares for fixed frequencies.
void refit_amplitudes(Model& m, const Eigen::VectorXd& t, const Eigen::VectorXd& u) {
  const std::size_t off = m.linear ? 1 : 0;
  Eigen::MatrixXd B(t.size(), off + m.omega.size());
  if (m.linear) B.col(0) = t;
  for (std::size_t k = 0; k < m.omega.size(); ++k) B.col(off + k) = (m.omega[k] * t).array().sin().matrix();
  const Eigen::VectorXd c = B.colPivHouseholderQr().solve(u);
  if (m.linear) m.a0 = c(0);
  for (std::size_t k = 0; k < m.omega.size(); ++k) m.amp[k] = c(off + k);
}

// Joint Levenberg-Marquardt over A0, all frequencies and all amplitudes.
// Marquardt scaling: damping is proportional to the diagonal of J^T J.
double levenberg_marquardt(Model& m, const Eigen::VectorXd& t, const Eigen::VectorXd& u, int max_iter) {
  const std::size_t K = m.omega.size();
  const std::size_t off = m.linear ? 1 : 0;
  const auto P = static_cast<Eigen::Index>(m.params());
  Eigen::VectorXd r = u - evaluate(m, t);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  Eigen::MatrixXd J(t.size(), P);
  for (int it = 0; it < max_iter; ++it) {
    if (m.linear) J.col(0) = t;
    for (std::size_t k = 0; k < K; ++k) {
      const Eigen::ArrayXd ph = m.omega[k] * t.array();
      J.col(static_cast<Eigen::Index>(off + k)) = (m.amp[k] * t.array() * ph.cos()).matrix();
      J.col(static_cast<Eigen::Index>(off + K + k)) = ph.sin().matrix();
    }
    Eigen::MatrixXd JtJ = Eigen::MatrixXd::Zero(P, P);
    JtJ.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    JtJ = JtJ.selfadjointView<Eigen::Lower>();
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index i = 0; i < P; ++i) A(i, i) += mu * std::max(JtJ(i, i), 1e-300);
      const Eigen::VectorXd step = A.ldlt().solve(g);
      Model trial = m;
      if (trial.linear) trial.a0 += step(0);
      for (std::size_t k = 0; k < K; ++k) {
        trial.omega[k] += step(static_cast<Eigen::Index>(off + k));
        trial.amp[k] += step(static_cast<Eigen::Index>(off + K + k));
      }
      const Eigen::VectorXd rt = u - evaluate(trial, t);
      const double ct = rt.squaredNorm();
      if (ct < cost) {
        const double gain = (cost - ct) / cost;
        m = trial;
        r = rt;
        cost = ct;
        mu = std::max(mu * 0.2, 1e-12);
        improved = true;
        if (gain < 1e-12) return std::sqrt(cost);
        break;
      }
      mu *= 10.0;
    }
    if (!improved) break;
  }
  return std::sqrt(cost);
}

class Spectrum {
 public:
  Spectrum(std::size_t n, double dt) : n_(n), pad_(4 * n), dt_(dt), window_(n) {
    in_ = fftw_alloc_real(pad_);
    out_ = fftw_alloc_complex(pad_ / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(pad_), in_, out_, FFTW_ESTIMATE);
    for (std::size_t i = 0; i < n_; ++i)
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_ - 1));
  }
  ~Spectrum() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Spectrum(const Spectrum&) = delete;
  Spectrum& operator=(const Spectrum&) = delete;

  // Magnitude spectrum of the Hann-windowed, zero-padded signal.
  std::vector<double> magnitude(const Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < pad_; ++i) in_[i] = i < n_ ? r(static_cast<Eigen::Index>(i)) * window_[i] : 0.0;
    fftw_execute(plan_);
    std::vector<double> mag(pad_ / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out_[k][0], out_[k][1]);
    return mag;
  }

  double bin_omega(double k) const { return 2.0 * kPi * k / (static_cast<double>(pad_) * dt_); }

 private:
  std::size_t n_, pad_;
  double dt_;
  std::vector<double> window_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

// Largest spectral peak away from zero frequency and from already accepted frequencies.
bool next_peak(Spectrum& spec, const Eigen::VectorXd& r, const std::vector<double>& taken, double exclusion,
               double& omega) {
  const std::vector<double> mag = spec.magnitude(r);
  double best = 0.0;
  std::size_t kbest = 0;
  for (std::size_t k = 2; k + 1 < mag.size(); ++k) {
    if (!(mag[k] >= mag[k - 1] && mag[k] >= mag[k + 1])) continue;
    const double w = spec.bin_omega(static_cast<double>(k));
    if (w < exclusion) continue;
    bool near = false;
    for (double o : taken) near = near || std::abs(o - w) < exclusion;
    if (near) continue;
    if (mag[k] > best) {
      best = mag[k];
      kbest = k;
    }
  }
  if (kbest == 0 || best == 0.0) return false;
  // Parabola through the log magnitudes of the peak and its neighbours.
  const double a = std::log(std::max(mag[kbest - 1], 1e-300));
  const double b = std::log(mag[kbest]);
  const double c = std::log(std::max(mag[kbest + 1], 1e-300));
  const double denom = a - 2.0 * b + c;
  const double delta = denom < 0.0 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
  omega = spec.bin_omega(static_cast<double>(kbest) + delta);
  return true;
}

double rms(const Eigen::VectorXd& u, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += u(static_cast<Eigen::Index>(i)) * u(static_cast<Eigen::Index>(i));
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(b - a, 1)));
}

void sort_model(Model& m) {
  std::vector<std::size_t> idx(m.omega.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return m.omega[x] < m.omega[y]; });
  Model s = m;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s.omega[i] = m.omega[idx[i]];
    s.amp[i] = m.amp[idx[i]];
  }
  m = s;
}

}  // namespace

ExtractionResult detect_modes(const Trace& trace, std::size_t max_modes) {
  ExtractOptions o;
  o.max_modes = max_modes;
  return detect_modes(trace, o);
}

ExtractionResult detect_modes(const Trace& trace, const ExtractOptions& options) {
  validate_trace(trace);
  if (trace.channel != Channel::U0 && trace.channel != Channel::Ux0)
    throw ValidationError("channel " + std::string(to_string(trace.channel)) + " not a measurement input");
  if (options.max_modes == 0) throw ValidationError("max_modes must be >= 1");
  const std::size_t n = trace.samples.size();
  if (n < 16) throw ValidationError("trace too short");

  const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(trace.samples.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) t(static_cast<Eigen::Index>(i)) = trace.time(i);
  const double T = trace.duration();
  const double resolution = 2.0 * kPi / T;

  ExtractionResult result;
  // A negative eigenvalue shows up as a sinh term that swamps the late samples.
  const double early = rms(u, n / 4, n / 2);
  const double late = rms(u, 3 * n / 4, n);
  if (early > 0.0 && late / early > 10.0) {
    result.flags.push_back("exponential growth: negative eigenvalues are not supported");
    if (options.strict)
      throw NumericError("detect_modes: exponential growth in the trace (late/early rms " + std::to_string(late / early) +
                         "); negative eigenvalues are not supported");
  }

  Model model;
  model.linear = true;
  model.a0 = t.dot(u) / t.squaredNorm();  // detrend
  Eigen::VectorXd fit = evaluate(model, t);
  double residual = rel_residual(u, fit);

  Spectrum spec(n, trace.dt);
  while (model.omega.size() < options.max_modes) {
    if (residual < kRoundoffFloor) break;  // nothing left but rounding
    double omega = 0.0;
    if (!next_peak(spec, u - fit, model.omega, resolution, omega)) break;
    Model trial = model;
    trial.omega.push_back(omega);
    trial.amp.push_back(0.0);
    refit_amplitudes(trial, t, u);
    levenberg_marquardt(trial, t, u, 60);
    const Eigen::VectorXd trial_fit = evaluate(trial, t);
    const double trial_res = rel_residual(u, trial_fit);
    if (!(trial_res < residual * (1.0 - options.min_improvement))) break;
    model = std::move(trial);
    fit = trial_fit;
    residual = trial_res;
  }

  // Keep the linear term only if dropping it would at least double the residual.
  if (model.linear) {
    Model without = model;
    without.linear = false;
    without.a0 = 0.0;
    refit_amplitudes(without, t, u);
    if (!without.omega.empty()) levenberg_marquardt(without, t, u, 60);
    const double res_without = rel_residual(u, evaluate(without, t));
    if (res_without <= std::max(2.0 * residual, 1e-12)) {
      model = std::move(without);
      residual = res_without;
    }
  }

  sort_model(model);
  // Frequencies closer than the record's resolution cannot be told apart; merge them.
  for (std::size_t k = 1; k < model.omega.size();) {
    if (model.omega[k] - model.omega[k - 1] < resolution) {
      const double a = model.amp[k - 1], b = model.amp[k];
      const double wsum = std::abs(a) + std::abs(b);
      model.omega[k - 1] = wsum > 0 ? (std::abs(a) * model.omega[k - 1] + std::abs(b) * model.omega[k]) / wsum
                                    : model.omega[k - 1];
      model.amp[k - 1] = a + b;
      model.omega.erase(model.omega.begin() + static_cast<std::ptrdiff_t>(k));
      model.amp.erase(model.amp.begin() + static_cast<std::ptrdiff_t>(k));
      result.flags.push_back("merged modes closer than 2*pi/T near omega=" + std::to_string(model.omega[k - 1]));
      refit_amplitudes(model, t, u);
      residual = rel_residual(u, evaluate(model, t));
    } else {
      ++k;
    }
  }

  if (model.linear) result.modes.push_back({0.0, model.a0, true, residual});
  for (std::size_t k = 0; k < model.omega.size(); ++k)
    result.modes.push_back({model.omega[k], model.amp[k], false, residual});
  result.residual = residual;
  result.order = model.omega.size();

  const ResolvabilityReport rep = resolvability_report(trace, result.modes, residual, options.residual_threshold);
  result.flags.insert(result.flags.end(), rep.flags.begin(), rep.flags.end());
  if (options.strict) {
    if (!rep.nyquist_ok || !rep.gap_ok) {
      std::ostringstream msg;
      msg << "detect_modes: under-resolved trace (";
      for (std::size_t i = 0; i < rep.flags.size(); ++i) msg << (i ? "; " : "") << rep.flags[i];
      msg << ")";
      throw ValidationError(msg.str());
    }
    if (!rep.residual_ok)
      throw NumericError("detect_modes: residual " + std::to_string(residual) + " above threshold " +
                         std::to_string(options.residual_threshold) + " after " + std::to_string(result.order) +
                         " modes");
  }
  return result;
}

SpectralData spectral_data_from_modes(const std::vector<ModeEstimate>& modes, double epsilon,
                                      BoundaryVariant variant) {
  std::vector<SpectralEntry> e;
  for (const auto& m : modes) {
    const double lambda = m.is_linear_term ? 0.0 : m.omega * m.omega;
    const double denom = m.is_linear_term ? m.amplitude : m.amplitude * m.omega;
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom))
      throw NumericError("spectral_data_from_modes: zero amplitude at omega=" + std::to_string(m.omega));
    const double alpha_sq = b_closed_form(lambda, epsilon, variant) / denom;
    if (!(alpha_sq > 0.0))
      throw NumericError("spectral_data_from_modes: negative norming constant at omega=" + std::to_string(m.omega));
    e.push_back({lambda, alpha_sq});
  }
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return SpectralData(std::move(e));
}

ResolvabilityReport resolvability_report(const Trace& trace, const std::vector<ModeEstimate>& modes,
                                         double residual, double residual_threshold) {
  ResolvabilityReport r;
  r.residual = residual;
  const double T = trace.samples.size() > 1 ? trace.duration() : 0.0;
  std::vector<double> w;
  for (const auto& m : modes)
    if (!m.is_linear_term) w.push_back(m.omega);
  std::sort(w.begin(), w.end());
  const double wmax = w.empty() ? 0.0 : w.back();
  r.nyquist_margin = wmax > 0.0 ? kPi / (wmax * trace.dt) : std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < w.size(); ++i) gap = std::min(gap, w[i] - w[i - 1]);
  const bool linear = std::any_of(modes.begin(), modes.end(), [](const auto& m) { return m.is_linear_term; });
  if (linear && !w.empty()) gap = std::min(gap, w.front());  // distance to the zero-frequency linear term
  r.gap_margin = std::isfinite(gap) ? gap * T / (8.0 * kPi) : std::numeric_limits<double>::infinity();
  r.nyquist_ok = r.nyquist_margin >= 1.0;
  r.gap_ok = r.gap_margin >= 1.0;
  r.residual_ok = residual <= residual_threshold;
  if (!r.nyquist_ok) r.flags.push_back("nyquist: omega_max*dt = " + std::to_string(wmax * trace.dt) + " >= pi");
  if (!r.gap_ok) r.flags.push_back("gap: min_gap*T = " + std::to_string(gap * T) + " < 8*pi");
  if (!r.residual_ok) r.flags.push_back("residual " + std::to_string(residual) + " above " + std::to_string(residual_threshold));
  return r;
}

}  // namespace wavinv
