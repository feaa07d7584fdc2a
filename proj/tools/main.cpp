// wavinv command-line front end. Exit codes: 0 ok, 2 validation error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "wavinv/cli_io.hpp"

namespace {

struct Paths {
  std::string config;
  std::string in;
  std::string out;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* help, Paths& p, bool needs_input) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", p.config, "JSON run config")->required();
  auto* in = sub->add_option("--in", p.in, "input trace CSV");
  if (needs_input) in->required();
  sub->add_option("--out", p.out, "output directory")->required();
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-sided inversion for the 1-D wave equation"};
  app.require_subcommand(1);
  Paths p;
  auto* simulate = add_command(app, "simulate", "synthesize a boundary trace and a truth manifest", p, false);
  auto* reconstruct = add_command(app, "reconstruct", "recover length, H and q from a trace", p, true);
  auto* endpoint = add_command(app, "endpoint", "far-end trace u(l,t) from the eigenvalues alone", p, true);
  auto* extract = add_command(app, "extract", "spectral data from a trace", p, true);
  auto* roundtrip = add_command(app, "roundtrip", "simulate, invert and score against the truth", p, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const wavinv::RunConfig config = wavinv::load_config(p.config);
    const std::filesystem::path out = p.out;
    if (simulate->parsed()) {
      const auto trace = wavinv::cmd_simulate(config, out);
      std::printf("wrote %zu samples to %s\n", trace.samples.size(), (out / "trace.csv").c_str());
    } else if (reconstruct->parsed()) {
      const auto r = wavinv::cmd_reconstruct(config, p.in, out);
      std::printf("ell_hat %.10g  H_hat %.6g  a1_hat %.6g  (%s)\n", r.ell_hat, r.H_hat, r.a1_hat,
                  (out / "report.json").c_str());
    } else if (endpoint->parsed()) {
      const auto far = wavinv::cmd_endpoint(config, p.in, out);
      std::printf("wrote %zu samples to %s\n", far.samples.size(), (out / "far_end.csv").c_str());
    } else if (extract->parsed()) {
      const auto x = wavinv::cmd_extract(config, p.in, out);
      std::printf("%zu modes, residual %.3e (%s)\n", x.data.size(), x.extraction.residual,
                  (out / "spectral.json").c_str());
    } else if (roundtrip->parsed()) {
      std::fputs(wavinv::cmd_roundtrip(config, out).table().c_str(), stdout);
    }
  } catch (const wavinv::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const wavinv::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
