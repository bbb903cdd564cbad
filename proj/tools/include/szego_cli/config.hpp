#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "szego/boundary_measure.hpp"
#include "szego/domain.hpp"

namespace szego::cli {

inline constexpr const char* kToolVersion = SZEGO_TOOL_VERSION;

/// Malformed or inconsistent run configuration. `line` is 1-based, 0 when
/// the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class RouteSelection { Boundary, Projective, Both };

std::string to_string(RouteSelection r);
RouteSelection parse_route_selection(const std::string& text);
std::vector<Route> routes_of(RouteSelection r);

struct RunConfig {
  // [domain]
  int n = 0;
  double l = 0.0;
  std::string rho;
  std::string u = "0";
  // [point]
  std::optional<ComplexPoint> point;
  // [quadrature]
  QuadratureSpec quadrature;
  // [run]
  int k_min = 1;
  int k_max = 20;
  RouteSelection route = RouteSelection::Boundary;
  std::string out = "szego_out";
  double power_tol = 0.05;
  double a0_tol = 0.02;
  double a1_tol = 0.05;

  /// Throws ConfigError when the fields are inconsistent.
  void validate() const;
};

/// Parses the sectioned key=value format:
///
///   [domain]      n, l, rho = "...", u = "..."
///   [point]       moduli = a, b, ...   or   x = (re,im), (re,im), ...
///   [quadrature]  nodes, mapping = algebraic|tangent, levels, tol, workers
///   [run]         k_min, k_max, route = boundary|projective|both, out,
///                 power_tol, a0_tol, a1_tol
///
/// '#' and ';' start comments outside quoted strings.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text of the fields that determine numerical results (worker
/// count and output directory excluded).
std::string canonical_text(const RunConfig& c);
/// The same restricted to [domain] and [quadrature], which is all a norm
/// table depends on.
std::string canonical_table_text(const RunConfig& c);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

std::string config_hash(const RunConfig& c);
std::string table_hash(const RunConfig& c);

/// The domain described by the config (parse and homogeneity check).
ReinhardtDomain make_domain(const RunConfig& c);

}  // namespace szego::cli
