#include "wavinv/cli_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wavinv/endpoint_profile.hpp"
#include "wavinv/sl_forward.hpp"
#include "wavinv/transmutation.hpp"
#include "wavinv/wave_trace.hpp"

namespace wavinv {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Field access with path-qualified diagnostics and unknown-key rejection.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected a JSON object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ValidationError(name(key) + ": missing required field");
    return *v;
  }
  double number(const std::string& key) { return as_number(need(key), key); }
  std::optional<double> maybe_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, key);
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < 0)
      throw ValidationError(name(key) + ": expected a non-negative integer");
    return v->get<std::size_t>();
  }
  std::string text(const std::string& key) {
    const json& v = need(key);
    if (!v.is_string()) throw ValidationError(name(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    const json& v = need(key);
    if (!v.is_array()) throw ValidationError(name(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, key));
    return out;
  }
  void reject(const std::string& key, const std::string& why) {
    if (j_.contains(key)) throw ValidationError(name(key) + ": " + why);
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ValidationError(name(key) + ": unknown key");
  }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ValidationError(name(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(name(key) + ": must be finite");
    return d;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

LeftBoundary parse_left(const json& j, const std::string& path) {
  Fields f(j, path);
  const std::string type = f.text("type");
  LeftBoundary left = LeftBoundary::robin(0.0);
  if (type == "robin") {
    left = LeftBoundary::robin(f.number("h"));
  } else if (type == "dirichlet") {
    f.reject("h", "a Dirichlet left end carries no h");
    left = LeftBoundary::dirichlet();
  } else {
    throw ValidationError(f.name("type") + ": expected \"robin\" or \"dirichlet\"");
  }
  f.finish();
  return left;
}

struct QSpec {
  std::function<double(double)> fn;
  std::optional<PiecewiseLinear> samples;
};

QSpec parse_q(const json& j, const std::string& path) {
  Fields f(j, path);
  const std::string kind = f.text("kind");
  QSpec out;
  if (kind == "constant") {
    const double c = f.number("value");
    out.fn = [c](double) { return c; };
  } else if (kind == "linear") {
    const double a = f.number("intercept"), b = f.number("slope");
    out.fn = [a, b](double x) { return a + b * x; };
  } else if (kind == "samples") {
    auto x = f.numbers("x");
    auto v = f.numbers("values");
    if (x.size() != v.size() || x.size() < 2)
      throw ValidationError(path + ": x and values need equal length >= 2");
    try {
      out.samples = PiecewiseLinear(std::move(x), std::move(v));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
    const PiecewiseLinear pl = *out.samples;
    out.fn = [pl](double t) { return pl(t); };
  } else {
    throw ValidationError(f.name("kind") + ": expected \"constant\", \"linear\" or \"samples\"");
  }
  f.finish();
  return out;
}

Scenario parse_scenario(const json& j) {
  Fields f(j, "scenario");
  const double length = f.number("length");
  const LeftBoundary left = parse_left(f.need("left"), "scenario.left");
  const double H = f.number("H");
  const double eps = f.number("epsilon");
  const QSpec q = parse_q(f.need("q"), "scenario.q");
  const std::size_t nodes = f.count("grid_nodes", kDefaultGridNodes);
  f.finish();
  if (q.samples) {
    const double tol = 1e-12 * std::max(1.0, length);
    if (q.samples->front() > tol || q.samples->back() < length - tol)
      throw ValidationError("scenario.q: samples must cover [0, length]");
  }
  try {
    return make_scenario(length, left, H, eps, q.fn, nodes);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

KnownPrefix parse_prefix(const json& j) {
  Fields f(j, "prefix");
  for (const char* key : {"length", "ell", "H", "scenario"})
    f.reject(key, "not allowed in a prefix config (information leakage)");
  const double eps = f.number("epsilon");
  const LeftBoundary left = parse_left(f.need("left"), "prefix.left");
  const QSpec q = parse_q(f.need("q"), "prefix.q");
  f.finish();
  try {
    if (!q.samples) return make_prefix(eps, left, q.fn);
    const double tol = 1e-12 * std::max(1.0, eps);
    if (q.samples->back() > eps + tol)
      throw ValidationError("prefix.q: samples extend beyond epsilon (information leakage)");
    KnownPrefix p{eps, left, *q.samples};
    validate_prefix(p);
    return p;
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    throw ValidationError(what.rfind("prefix", 0) == 0 ? what : "prefix: " + what);
  }
}

NumericConfig parse_numeric(const json& j) {
  Fields f(j, "numeric");
  NumericConfig n;
  n.modes = f.count("modes", n.modes);
  n.dt = f.maybe_number("dt");
  n.duration = f.maybe_number("duration");
  n.max_modes = f.count("max_modes", n.max_modes);
  n.residual_threshold = f.maybe_number("residual_threshold").value_or(n.residual_threshold);
  n.min_improvement = f.maybe_number("min_improvement").value_or(n.min_improvement);
  n.gl_margin = f.maybe_number("gl_margin").value_or(n.gl_margin);
  n.gl_nodes = f.count("gl_nodes", n.gl_nodes);
  n.h_tolerance = f.maybe_number("h_tolerance").value_or(n.h_tolerance);
  f.finish();
  if (n.modes < 1) throw ValidationError("numeric.modes: must be >= 1");
  if (n.dt && !(*n.dt > 0.0)) throw ValidationError("numeric.dt: must be > 0");
  if (n.duration && !(*n.duration > 0.0)) throw ValidationError("numeric.duration: must be > 0");
  if (!(n.gl_margin > 0.0 && n.gl_margin < 1.0)) throw ValidationError("numeric.gl_margin: must lie in (0, 1)");
  if (n.gl_nodes < 3) throw ValidationError("numeric.gl_nodes: must be >= 3");
  return n;
}

json left_json(const LeftBoundary& left) {
  if (left.is_robin()) return {{"type", "robin"}, {"h", left.h()}};
  return {{"type", "dirichlet"}};
}

json vector_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

// Re-throws pipeline errors with the stage name in front, keeping the error class.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(name) + ": " + e.what());
  }
}

const KnownPrefix& need_prefix(const RunConfig& c, const char* cmd) {
  if (!c.prefix)
    throw ValidationError(std::string("config: ") + cmd + " needs a prefix block" +
                          (c.scenario ? " (a scenario block would leak the truth)" : ""));
  return *c.prefix;
}

const Scenario& need_scenario(const RunConfig& c, const char* cmd) {
  if (!c.scenario) throw ValidationError(std::string("config: ") + cmd + " needs a scenario block");
  return *c.scenario;
}

Channel expected_channel(BoundaryVariant v) {
  return v == BoundaryVariant::RobinAtZero ? Channel::U0 : Channel::Ux0;
}

Trace load_measurement(const fs::path& path, BoundaryVariant variant) {
  Trace t = read_trace_csv(path);
  if (t.channel != Channel::U0 && t.channel != Channel::Ux0)
    throw ValidationError("channel " + std::string(to_string(t.channel)) + " not a measurement input");
  if (t.channel != expected_channel(variant))
    throw ValidationError("channel " + std::string(to_string(t.channel)) + " does not match the " +
                          std::string(to_string(variant)) + " prefix (expected " +
                          std::string(to_string(expected_channel(variant))) + ")");
  return t;
}

ExtractOutput run_extract(const KnownPrefix& prefix, const Trace& trace, const NumericConfig& numeric) {
  return stage("extract", [&] {
    ExtractOptions opt;
    opt.max_modes = numeric.max_modes;
    opt.residual_threshold = numeric.residual_threshold;
    opt.min_improvement = numeric.min_improvement;
    ExtractOutput out;
    out.extraction = detect_modes(trace, opt);
    out.data = spectral_data_from_modes(out.extraction.modes, prefix.epsilon, prefix.variant());
    out.resolvability = resolvability_report(trace, out.extraction.modes, out.extraction.residual,
                                             numeric.residual_threshold);
    return out;
  });
}

json spectral_json(const KnownPrefix& prefix, const ExtractOutput& x) {
  json modes = json::array();
  for (const auto& m : x.extraction.modes)
    modes.push_back({{"omega", m.omega}, {"amplitude", m.amplitude}, {"linear", m.is_linear_term}});
  std::vector<double> alpha;
  for (const auto& e : x.data.entries()) alpha.push_back(e.alpha_sq);
  const auto& r = x.resolvability;
  return {{"schema", kSpectralSchema},
          {"variant", std::string(to_string(prefix.variant()))},
          {"epsilon", prefix.epsilon},
          {"residual", x.extraction.residual},
          {"order", x.extraction.order},
          {"flags", x.extraction.flags},
          {"resolvability",
           {{"nyquist_margin", r.nyquist_margin}, {"gap_margin", r.gap_margin}, {"flags", r.flags}}},
          {"modes", modes},
          {"lambda", x.data.lambdas()},
          {"alpha_sq", alpha}};
}

// Sanity check of the prefix stage: the transform of g against y at the first eigenvalues
// must equal the closed form that the extraction relied on.
double transmutation_check(const KnownPrefix& prefix, const SpectralData& data) {
  return stage("transmutation", [&] {
    const TransmutationKernel kernel = compute_kernel(prefix);
    const InitialCondition g = build_g(prefix, kernel, UniformGrid::spanning(0.0, prefix.epsilon, 201));
    double worst = 0.0;
    for (std::size_t n = 0; n < std::min<std::size_t>(3, data.size()); ++n) {
      const double exact = b_closed_form(data[n].lambda, prefix.epsilon, prefix.variant());
      const double got = fourier_coefficient(prefix, g, data[n].lambda);
      worst = std::max(worst, std::abs(got / exact - 1.0));
    }
    return worst;
  });
}

ReconstructionReport run_reconstruct(const KnownPrefix& prefix, const ExtractOutput& x,
                                     const NumericConfig& numeric, double* check) {
  *check = transmutation_check(prefix, x.data);
  return stage("recon", [&] {
    ReconOptions opt;
    opt.gl.margin = numeric.gl_margin;
    opt.gl.nodes = numeric.gl_nodes;
    opt.h_tolerance = numeric.h_tolerance;
    return reconstruct(prefix, x.data, opt);
  });
}

json report_json(const KnownPrefix& prefix, const ExtractOutput& x, const ReconstructionReport& r,
                 double check) {
  const bool robin = prefix.variant() == BoundaryVariant::RobinAtZero;
  std::vector<std::string> flags = r.flags;
  flags.insert(flags.end(), x.extraction.flags.begin(), x.extraction.flags.end());
  if (check > 1e-4) flags.push_back("transmutation_check_above_1e-4");
  return {{"schema", kReportSchema},
          {"variant", std::string(to_string(r.variant))},
          {"epsilon", prefix.epsilon},
          {"ell_hat", r.ell_hat},
          {"a1_hat", r.a1_hat},
          {"H_hat", r.H_hat},
          {"h_hat", r.h_hat},
          {"h_known", robin ? json(r.h_known) : json(nullptr)},
          {"q_integral", r.gl.q_integral},
          {"prefix_mismatch", r.prefix_mismatch},
          {"transmutation_check", check},
          {"gl",
           {{"modes", r.gl.modes},
            {"shift", r.gl.shift},
            {"tail_coefficient", r.gl.tail_coefficient},
            {"min_rcond", r.gl.min_rcond},
            {"max_residual", r.gl.max_residual},
            {"x0", r.gl.grid.x0},
            {"dx", r.gl.grid.dx},
            {"nodes", r.gl.grid.size}}},
          {"extraction",
           {{"order", x.extraction.order},
            {"residual", x.extraction.residual},
            {"nyquist_margin", x.resolvability.nyquist_margin},
            {"gap_margin", x.resolvability.gap_margin}}},
          {"flags", flags},
          {"q_hat_file", "q_hat.csv"}};
}

std::string q_hat_csv(const GlResult& gl) {
  std::string out = "x,q\n";
  char buf[96];
  for (std::size_t i = 0; i < gl.grid.size; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", gl.grid.at(i), gl.q_hat[i]);
    out += buf;
  }
  return out;
}

Trace run_endpoint(const KnownPrefix& prefix, const Trace& trace, const ExtractOutput& x) {
  return stage("endpoint", [&] {
    const double ell_hat = estimate_length(x.data, prefix.variant());
    const UniformGrid tg{trace.t0, trace.dt, trace.samples.size()};
    return far_end_profile(x.data, prefix.epsilon, ell_hat, prefix.variant(), tg);
  });
}

UniformGrid simulation_grid(const Scenario& s, const NumericConfig& n, double lambda_max) {
  const UniformGrid def = default_time_grid(lambda_max, s.length);
  if (!n.dt && !n.duration) return def;
  return time_grid(n.duration.value_or(def.back()), n.dt.value_or(def.dx));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("config: JSON syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
  }
  Fields f(j, "");
  const json& version = f.need("version");
  if (!version.is_number_integer() || version.get<int>() != kConfigVersion)
    throw ValidationError("version: expected " + std::to_string(kConfigVersion));
  RunConfig c;
  if (const json* s = f.find("scenario")) c.scenario = parse_scenario(*s);
  if (const json* p = f.find("prefix")) c.prefix = parse_prefix(*p);
  if (const json* n = f.find("numeric")) c.numeric = parse_numeric(*n);
  f.finish();
  if (c.scenario && c.prefix) throw ValidationError("config: give a scenario or a prefix block, not both");
  if (!c.scenario && !c.prefix) throw ValidationError("config: missing scenario or prefix block");
  return c;
}

RunConfig load_config(const fs::path& path) { return parse_config(read_text(path)); }

std::string prefix_config_json(const KnownPrefix& prefix, const NumericConfig& n) {
  json numeric = {{"modes", n.modes},
                  {"max_modes", n.max_modes},
                  {"residual_threshold", n.residual_threshold},
                  {"min_improvement", n.min_improvement},
                  {"gl_margin", n.gl_margin},
                  {"gl_nodes", n.gl_nodes},
                  {"h_tolerance", n.h_tolerance}};
  if (n.dt) numeric["dt"] = *n.dt;
  if (n.duration) numeric["duration"] = *n.duration;
  const json j = {{"version", kConfigVersion},
                  {"prefix",
                   {{"epsilon", prefix.epsilon},
                    {"left", left_json(prefix.left)},
                    {"q", {{"kind", "samples"}, {"x", vector_json(prefix.q.nodes())},
                           {"values", vector_json(prefix.q.values())}}}}},
                  {"numeric", numeric}};
  return dump(j);
}

std::string format_trace_csv(const Trace& trace) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "# channel=%s t0=%.17g dt=%.17g\n", std::string(to_string(trace.channel)).c_str(),
                trace.t0, trace.dt);
  out += buf;
  out += "t,value\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.time(i), trace.samples[i]);
    out += buf;
  }
  return out;
}

Trace parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<Channel> channel;
  std::optional<double> t0, dt;
  bool header = false;
  std::vector<double> t, v;
  std::size_t lineno = 0;
  auto to_double = [&](const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(d))
      throw ValidationError("trace: line " + std::to_string(lineno) + ": bad number '" + s + "'");
    return d;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string w;
      while (words >> w) {
        const auto eq = w.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = w.substr(0, eq), val = w.substr(eq + 1);
        if (key == "channel") channel = channel_from_string(val);
        else if (key == "t0") t0 = to_double(val);
        else if (key == "dt") dt = to_double(val);
      }
      continue;
    }
    if (!header) {
      if (line != "t,value") throw ValidationError("trace: line " + std::to_string(lineno) + ": expected header t,value");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError("trace: line " + std::to_string(lineno) + ": expected two columns");
    t.push_back(to_double(line.substr(0, comma)));
    v.push_back(to_double(line.substr(comma + 1)));
  }
  if (v.size() < 16) throw ValidationError("trace too short");
  if (!channel) throw ValidationError("trace: missing '# channel=' line");
  Trace out;
  out.channel = *channel;
  out.t0 = t0.value_or(t.front());
  out.dt = dt.value_or((t.back() - t.front()) / static_cast<double>(t.size() - 1));
  if (!(out.dt > 0.0)) throw ValidationError("trace: time step must be positive");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - out.time(i)) > 1e-9 * std::max(1.0, std::abs(t[i])))
      throw ValidationError("trace: row " + std::to_string(i) + ": samples are not uniformly spaced");
  out.samples = std::move(v);
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

void write_trace_csv(const fs::path& path, const Trace& trace) { write_text(path, format_trace_csv(trace)); }
Trace read_trace_csv(const fs::path& path) { return parse_trace_csv(read_text(path)); }

Trace cmd_simulate(const RunConfig& config, const fs::path& out_dir) {
  const Scenario& s = need_scenario(config, "simulate");
  const auto [modal, syn] = stage("simulate", [&] {
    const ModalCoefficients m = modal_coefficients(s, config.numeric.modes);
    const UniformGrid tg = simulation_grid(s, config.numeric, m.lambda.back());
    return std::pair{m, synthesize_trace(m, tg, s.length)};
  });
  const bool robin = s.left.is_robin();
  const double q_int = s.q.integral(0.0, s.length);
  const double h = robin ? s.left.h() : 0.0;
  const json manifest = {
      {"schema", kManifestSchema},
      {"truth",
       {{"variant", std::string(to_string(s.variant()))},
        {"length", s.length},
        {"H", s.H},
        {"h", robin ? json(h) : json(nullptr)},
        {"epsilon", s.epsilon},
        {"q_integral", q_int},
        {"a1", h + s.H + 0.5 * q_int},
        {"q", {{"x", vector_json(s.q.nodes())}, {"values", vector_json(s.q.values())}}}}},
      {"modes", {{"lambda", modal.lambda}, {"alpha_sq", modal.alpha_sq}, {"b", modal.b}}},
      {"trace",
       {{"file", "trace.csv"},
        {"channel", std::string(to_string(syn.trace.channel))},
        {"t0", syn.trace.t0},
        {"dt", syn.trace.dt},
        {"samples", syn.trace.samples.size()},
        {"tail_bound", std::isfinite(syn.tail_bound) ? json(syn.tail_bound) : json(nullptr)},
        {"negative_mode", syn.negative_mode}}}};
  write_trace_csv(out_dir / "trace.csv", syn.trace);
  write_text(out_dir / "manifest.json", dump(manifest));
  return syn.trace;
}

ExtractOutput cmd_extract(const RunConfig& config, const fs::path& trace_path, const fs::path& out_dir) {
  const KnownPrefix& prefix = need_prefix(config, "extract");
  const Trace trace = stage("extract", [&] { return load_measurement(trace_path, prefix.variant()); });
  ExtractOutput x = run_extract(prefix, trace, config.numeric);
  write_text(out_dir / "spectral.json", dump(spectral_json(prefix, x)));
  return x;
}

ReconstructionReport cmd_reconstruct(const RunConfig& config, const fs::path& trace_path, const fs::path& out_dir) {
  const KnownPrefix& prefix = need_prefix(config, "reconstruct");
  const Trace trace = stage("reconstruct", [&] { return load_measurement(trace_path, prefix.variant()); });
  const ExtractOutput x = run_extract(prefix, trace, config.numeric);
  double check = 0.0;
  ReconstructionReport r = run_reconstruct(prefix, x, config.numeric, &check);
  json report = report_json(prefix, x, r, check);
  report["spectral"] = spectral_json(prefix, x);
  write_text(out_dir / "report.json", dump(report));
  write_text(out_dir / "q_hat.csv", q_hat_csv(r.gl));
  return r;
}

Trace cmd_endpoint(const RunConfig& config, const fs::path& trace_path, const fs::path& out_dir) {
  const KnownPrefix& prefix = need_prefix(config, "endpoint");
  const Trace trace = stage("endpoint", [&] { return load_measurement(trace_path, prefix.variant()); });
  const ExtractOutput x = run_extract(prefix, trace, config.numeric);
  Trace far = run_endpoint(prefix, trace, x);
  write_trace_csv(out_dir / "far_end.csv", far);
  return far;
}

double Scorecard::value(const std::string& metric) const {
  for (const auto& r : rows)
    if (r.metric == metric) return r.value;
  throw ValidationError("scorecard has no metric '" + metric + "'");
}

std::string Scorecard::table() const {
  std::string out;
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-26s %.6e\n", r.metric.c_str(), r.value);
    out += buf;
  }
  return out;
}

Scorecard cmd_roundtrip(const RunConfig& config, const fs::path& out_dir) {
  const Scenario& s = need_scenario(config, "roundtrip");
  cmd_simulate(config, out_dir);

  // The inverse side sees only the trace file and a prefix config.
  write_text(out_dir / "prefix.json", prefix_config_json(known_prefix_of(s), config.numeric));
  const RunConfig inverse = load_config(out_dir / "prefix.json");
  const KnownPrefix& prefix = *inverse.prefix;
  const Trace trace = stage("roundtrip", [&] { return load_measurement(out_dir / "trace.csv", prefix.variant()); });
  const ExtractOutput x = run_extract(prefix, trace, inverse.numeric);
  write_text(out_dir / "spectral.json", dump(spectral_json(prefix, x)));
  double check = 0.0;
  const ReconstructionReport r = run_reconstruct(prefix, x, inverse.numeric, &check);
  json report = report_json(prefix, x, r, check);
  write_text(out_dir / "report.json", dump(report));
  write_text(out_dir / "q_hat.csv", q_hat_csv(r.gl));
  const Trace far = run_endpoint(prefix, trace, x);
  write_trace_csv(out_dir / "far_end.csv", far);

  // Scoring: manifest truth plus the scenario itself for the far-end reference.
  const json manifest = json::parse(read_text(out_dir / "manifest.json"));
  const json& truth = manifest["truth"];
  Scorecard card;
  auto add = [&](std::string m, double v) { card.rows.push_back({std::move(m), v}); };
  add("ell_abs_error", std::abs(r.ell_hat - truth["length"].get<double>()));
  add("H_abs_error", std::abs(r.H_hat - truth["H"].get<double>()));
  add("a1_abs_error", std::abs(r.a1_hat - truth["a1"].get<double>()));
  if (s.left.is_robin()) add("h_abs_error", std::abs(r.h_hat - truth["h"].get<double>()));

  const PiecewiseLinear q_true(truth["q"]["x"].get<std::vector<double>>(),
                               truth["q"]["values"].get<std::vector<double>>());
  double err2 = 0.0, norm2 = 0.0, sup = 0.0;
  const UniformGrid& g = r.gl.grid;
  for (std::size_t i = 0; i < g.size; ++i) {
    const double w = (i == 0 || i + 1 == g.size) ? 0.5 * g.dx : g.dx;
    const double qt = q_true(std::min(g.at(i), s.length));
    const double e = r.gl.q_hat[i] - qt;
    err2 += w * e * e;
    norm2 += w * qt * qt;
    sup = std::max(sup, std::abs(e));
  }
  // Relative when q is nonzero, absolute L2 otherwise.
  add("q_l2_relative_error", norm2 > 1e-24 ? std::sqrt(err2 / norm2) : std::sqrt(err2));
  add("q_sup_error", sup);

  const auto lam = manifest["modes"]["lambda"].get<std::vector<double>>();
  const auto alpha = manifest["modes"]["alpha_sq"].get<std::vector<double>>();
  const std::size_t m = std::min({std::size_t{15}, lam.size(), x.data.size()});
  double el = 0.0, ea = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    el = std::max(el, std::abs(x.data[n].lambda - lam[n]) / std::max(1.0, std::abs(lam[n])));
    ea = std::max(ea, std::abs(x.data[n].alpha_sq / alpha[n] - 1.0));
  }
  add("lambda_max_rel_error", el);
  add("alpha_sq_max_rel_error", ea);

  const UniformGrid tg{trace.t0, trace.dt, trace.samples.size()};
  const Trace ref = field_at(s, s.length, tg, lam.size());
  double fe = 0.0;
  for (std::size_t i = 0; i < tg.size; ++i) fe = std::max(fe, std::abs(far.samples[i] - ref.samples[i]));
  add("far_end_max_error", fe);
  add("extraction_residual", x.extraction.residual);
  add("transmutation_check", check);

  json rows = json::object();
  for (const auto& row : card.rows) rows[row.metric] = row.value;
  write_text(out_dir / "scorecard.json", dump({{"schema", kScorecardSchema}, {"metrics", rows}}));
  return card;
}

}  // namespace wavinv
