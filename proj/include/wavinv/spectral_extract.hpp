#pragma once

// Harmonic retrieval on a boundary trace. The model is
//   u(t) = A0 t + sum_n A_n sin(w_n t),
// which is the trace produced by zero initial displacement (no cosines, no constant).
// Frequencies are seeded from FFT peaks and refined jointly by Levenberg-Marquardt.

#include <cstddef>
#include <string>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

struct ModeEstimate {
  double omega = 0.0;  // 0 for the linear term
  double amplitude = 0.0;
  bool is_linear_term = false;
  double fit_residual = 0.0;  // relative L2 residual of the final joint fit
};

struct ExtractOptions {
  std::size_t max_modes = 60;
  /// Relative L2 residual the final fit must reach.
  double residual_threshold = 1e-6;
  /// Model order stops growing when a new mode improves the residual by less than this fraction.
  double min_improvement = 1e-2;
  /// Throw on contract violations instead of only flagging them.
  bool strict = true;
};

struct ExtractionResult {
  std::vector<ModeEstimate> modes;  // linear term first (if any), then increasing omega
  double residual = 0.0;
  std::size_t order = 0;  // number of sinusoids
  std::vector<std::string> flags;
};

ExtractionResult detect_modes(const Trace& trace, const ExtractOptions& options = {});
/// Convenience overload with only the mode cap.
ExtractionResult detect_modes(const Trace& trace, std::size_t max_modes);

/// lambda = w^2, alpha^2 = b(lambda)/(A w); the linear term gives alpha_0^2 = b(0)/A0.
SpectralData spectral_data_from_modes(const std::vector<ModeEstimate>& modes, double epsilon,
                                      BoundaryVariant variant);

struct ResolvabilityReport {
  double nyquist_margin = 0.0;  // pi / (w_max dt), >= 1 required
  double gap_margin = 0.0;      // min gap * T / (8 pi), >= 1 required
  double residual = 0.0;
  bool nyquist_ok = true;
  bool gap_ok = true;
  bool residual_ok = true;
  std::vector<std::string> flags;
};

ResolvabilityReport resolvability_report(const Trace& trace, const std::vector<ModeEstimate>& modes,
                                         double residual = 0.0, double residual_threshold = 1e-6);

}  // namespace wavinv
