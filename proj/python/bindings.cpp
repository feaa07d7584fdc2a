#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wavinv/cli_io.hpp"
#include "wavinv/endpoint_profile.hpp"
#include "wavinv/recon.hpp"
#include "wavinv/sl_forward.hpp"
#include "wavinv/spectral_extract.hpp"
#include "wavinv/transmutation.hpp"
#include "wavinv/wave_trace.hpp"

namespace py = pybind11;
using namespace wavinv;

namespace {

py::array_t<double> to_numpy(std::span<const double> v) { return py::array_t<double>(v.size(), v.data()); }

Trace trace_from(py::array_t<double, py::array::c_style | py::array::forcecast> samples, double dt,
                 const std::string& channel, double t0) {
  Trace t;
  t.channel = channel_from_string(channel);
  t.t0 = t0;
  t.dt = dt;
  t.samples.assign(samples.data(), samples.data() + samples.size());
  return t;
}

py::dict trace_dict(const Trace& t) {
  py::dict d;
  d["channel"] = std::string(to_string(t.channel));
  d["t0"] = t.t0;
  d["dt"] = t.dt;
  d["samples"] = to_numpy(t.samples);
  return d;
}

std::pair<py::array_t<double>, py::array_t<double>> spectral_arrays(const SpectralData& d) {
  std::vector<double> alpha;
  for (const auto& e : d.entries()) alpha.push_back(e.alpha_sq);
  return {to_numpy(d.lambdas()), to_numpy(alpha)};
}

SpectralData spectral_from(const std::vector<double>& lambda, const std::vector<double>& alpha_sq) {
  if (lambda.size() != alpha_sq.size()) throw ValidationError("lambda and alpha_sq differ in length");
  std::vector<SpectralEntry> e;
  for (std::size_t i = 0; i < lambda.size(); ++i) e.push_back({lambda[i], alpha_sq[i]});
  return SpectralData(std::move(e));
}

UniformGrid grid_for(const Scenario& s, std::size_t N, std::optional<double> dt, std::optional<double> duration) {
  if (!dt && !duration) return default_time_grid(eigenvalues(s, N).back().lambda, s.length);
  const UniformGrid def = default_time_grid(eigenvalues(s, N).back().lambda, s.length);
  return time_grid(duration.value_or(def.back()), dt.value_or(def.dx));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "One-sided inversion for the 1-D wave equation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<BoundaryVariant>(m, "BoundaryVariant")
      .value("ROBIN", BoundaryVariant::RobinAtZero)
      .value("DIRICHLET", BoundaryVariant::DirichletAtZero);

  py::class_<LeftBoundary>(m, "LeftBoundary")
      .def_static("robin", &LeftBoundary::robin, py::arg("h"))
      .def_static("dirichlet", &LeftBoundary::dirichlet)
      .def_property_readonly("variant", &LeftBoundary::variant)
      .def_property_readonly("h", &LeftBoundary::h);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("length", &Scenario::length)
      .def_readonly("H", &Scenario::H)
      .def_readonly("epsilon", &Scenario::epsilon)
      .def_readonly("left", &Scenario::left)
      .def_property_readonly("variant", &Scenario::variant);

  py::class_<KnownPrefix>(m, "KnownPrefix")
      .def_readonly("epsilon", &KnownPrefix::epsilon)
      .def_readonly("left", &KnownPrefix::left)
      .def_property_readonly("variant", &KnownPrefix::variant);

  m.def("make_scenario", &make_scenario, py::arg("length"), py::arg("left"), py::arg("H"), py::arg("epsilon"),
        py::arg("q"), py::arg("nodes") = kDefaultGridNodes,
        "Scenario with q sampled on a uniform grid; q is a callable of x.");
  m.def("make_prefix", &make_prefix, py::arg("epsilon"), py::arg("left"), py::arg("q"), py::arg("nodes") = 201);
  m.def("known_prefix_of", &known_prefix_of);

  m.def(
      "eigenvalues",
      [](const Scenario& s, std::size_t N) {
        const SpectralData d = spectral_data(eigenvalues(s, N));
        return spectral_arrays(d);
      },
      py::arg("scenario"), py::arg("count"), "(lambda, alpha_sq) arrays of the first count modes.");
  m.def("boundary_function", &boundary_function);
  m.def("b_closed_form", py::vectorize([](double lambda, double eps, BoundaryVariant v) {
          return b_closed_form(lambda, eps, v);
        }),
        py::arg("lam"), py::arg("epsilon"), py::arg("variant"));

  m.def(
      "synthesize_trace",
      [](const Scenario& s, std::size_t N, std::optional<double> dt, std::optional<double> duration) {
        const SynthesizedTrace st = synthesize_trace(s, N, grid_for(s, N, dt, duration));
        py::dict d = trace_dict(st.trace);
        d["tail_bound"] = st.tail_bound;
        return d;
      },
      py::arg("scenario"), py::arg("modes"), py::arg("dt") = py::none(), py::arg("duration") = py::none());
  m.def(
      "field_at",
      [](const Scenario& s, double x, double dt, std::size_t samples, std::size_t N) {
        return trace_dict(field_at(s, x, UniformGrid{0.0, dt, samples}, N));
      },
      py::arg("scenario"), py::arg("x"), py::arg("dt"), py::arg("samples"), py::arg("modes"));

  m.def(
      "detect_modes",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> samples, double dt, const std::string& channel,
         std::size_t max_modes, double residual_threshold) {
        ExtractOptions opt;
        opt.max_modes = max_modes;
        opt.residual_threshold = residual_threshold;
        const ExtractionResult r = detect_modes(trace_from(samples, dt, channel, 0.0), opt);
        py::list modes;
        for (const auto& e : r.modes)
          modes.append(py::dict(py::arg("omega") = e.omega, py::arg("amplitude") = e.amplitude,
                                py::arg("linear") = e.is_linear_term));
        return py::dict(py::arg("modes") = modes, py::arg("residual") = r.residual, py::arg("flags") = r.flags);
      },
      py::arg("samples"), py::arg("dt"), py::arg("channel") = "U0", py::arg("max_modes") = 60,
      py::arg("residual_threshold") = 1e-6);
  m.def(
      "spectral_data_from_modes",
      [](const py::list& modes, double eps, BoundaryVariant v) {
        std::vector<ModeEstimate> ms;
        for (const auto& item : modes) {
          const auto d = item.cast<py::dict>();
          ms.push_back({d["omega"].cast<double>(), d["amplitude"].cast<double>(), d["linear"].cast<bool>(), 0.0});
        }
        return spectral_arrays(spectral_data_from_modes(ms, eps, v));
      },
      py::arg("modes"), py::arg("epsilon"), py::arg("variant"));

  m.def(
      "estimate_length",
      [](const std::vector<double>& lambda, BoundaryVariant v) {
        return estimate_length(spectral_from(lambda, std::vector<double>(lambda.size(), 1.0)), v);
      },
      py::arg("lam"), py::arg("variant"));
  m.def(
      "estimate_a1",
      [](const std::vector<double>& lambda, double ell, BoundaryVariant v) {
        return estimate_a1(spectral_from(lambda, std::vector<double>(lambda.size(), 1.0)), ell, v);
      },
      py::arg("lam"), py::arg("ell_hat"), py::arg("variant"));
  m.def(
      "gl_reconstruct",
      [](const std::vector<double>& lambda, const std::vector<double>& alpha_sq, double ell, BoundaryVariant v,
         double margin, std::size_t nodes) {
        GlOptions opt;
        opt.margin = margin;
        opt.nodes = nodes;
        const GlResult g = gl_reconstruct(spectral_from(lambda, alpha_sq), ell, v, opt);
        std::vector<double> x;
        for (std::size_t i = 0; i < g.grid.size; ++i) x.push_back(g.grid.at(i));
        return py::dict(py::arg("x") = to_numpy(x), py::arg("q") = to_numpy(g.q_hat), py::arg("h") = g.h_hat,
                        py::arg("q_integral") = g.q_integral, py::arg("max_residual") = g.max_residual);
      },
      py::arg("lam"), py::arg("alpha_sq"), py::arg("ell_hat"), py::arg("variant"), py::arg("margin") = 0.9,
      py::arg("nodes") = 181);
  m.def(
      "reconstruct",
      [](const KnownPrefix& p, const std::vector<double>& lambda, const std::vector<double>& alpha_sq) {
        const ReconstructionReport r = reconstruct(p, spectral_from(lambda, alpha_sq));
        std::vector<double> x;
        for (std::size_t i = 0; i < r.gl.grid.size; ++i) x.push_back(r.gl.grid.at(i));
        return py::dict(py::arg("ell") = r.ell_hat, py::arg("a1") = r.a1_hat, py::arg("H") = r.H_hat,
                        py::arg("h") = r.h_hat, py::arg("x") = to_numpy(x), py::arg("q") = to_numpy(r.gl.q_hat));
      },
      py::arg("prefix"), py::arg("lam"), py::arg("alpha_sq"));

  m.def(
      "far_end_profile",
      [](const std::vector<double>& lambda, double eps, double ell, BoundaryVariant v, double dt, std::size_t samples) {
        return trace_dict(far_end_profile(lambda, eps, ell, v, UniformGrid{0.0, dt, samples}));
      },
      py::arg("lam"), py::arg("epsilon"), py::arg("ell_hat"), py::arg("variant"), py::arg("dt"), py::arg("samples"));
  m.def(
      "phi",
      [](const std::vector<double>& lambda, double ell, BoundaryVariant v, double at) {
        return phi(BoundaryFunction(lambda, ell, v), at);
      },
      py::arg("lam"), py::arg("ell_hat"), py::arg("variant"), py::arg("at"));

  m.def(
      "simulate",
      [](const std::filesystem::path& config, const std::filesystem::path& out) {
        return trace_dict(cmd_simulate(load_config(config), out));
      },
      py::arg("config"), py::arg("out_dir"));
  m.def(
      "roundtrip",
      [](const std::filesystem::path& config, const std::filesystem::path& out) {
        py::dict d;
        for (const auto& row : cmd_roundtrip(load_config(config), out).rows) d[py::str(row.metric)] = row.value;
        return d;
      },
      py::arg("config"), py::arg("out_dir"));
}
