#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "szego/errors.hpp"
#include "szego_cli/app.hpp"

namespace szego::cli {

namespace {

struct Overrides {
  std::string config;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<int> nodes;
  std::optional<std::string> route;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration file")->required();
  cmd->add_option("--k-min", o.k_min, "Smallest degree k");
  cmd->add_option("--k-max", o.k_max, "Largest degree k");
  cmd->add_option("--nodes", o.nodes, "Gauss-Legendre nodes per dimension at level 0");
  cmd->add_option("--route", o.route, "boundary, projective or both")
      ->check(CLI::IsMember({"boundary", "projective", "both"}));
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--out", o.out, "Output directory");
}

RunConfig effective_config(const Overrides& o) {
  RunConfig c = load_config(o.config);
  if (o.k_min) c.k_min = *o.k_min;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.nodes) c.quadrature.nodes_per_dim = *o.nodes;
  if (o.route) c.route = parse_route_selection(*o.route);
  if (o.workers) c.quadrature.workers = *o.workers;
  if (o.out) c.out = *o.out;
  c.validate();
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partial Szego kernels of homogeneous Reinhardt domains", "szego"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Overrides o;
  using Command = std::function<int(const RunConfig&, std::ostream&)>;
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"validate", {"Check the domain invariants", run_validate}},
      {"norms", {"Compute and cache monomial norm tables", run_norms}},
      {"szego", {"Evaluate the partial Szego kernel at the point", run_szego}},
      {"coeffs", {"Closed-form expansion coefficients at the point", run_coeffs}},
      {"verify", {"Fit the kernel sequence and compare with the closed forms", run_verify}},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, info] : commands) {
    CLI::App* cmd = app.add_subcommand(name, info.first);
    add_common_options(cmd, o);
    subs.emplace_back(cmd, info.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    const RunConfig config = effective_config(o);
    for (const auto& [cmd, fn] : subs) {
      if (cmd->parsed()) return fn(config, out);
    }
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "expression error: " << e.what() << "\n";
    return kUsageError;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << "\n";
    return kUsageError;
  } catch (const QuadratureError& e) {
    err << "quadrature error: " << e.what() << " (last two estimates " << e.previous_estimate()
        << ", " << e.last_estimate() << ")\n";
    return kNumericalError;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const DomainError& e) {
    err << "evaluation error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace szego::cli
