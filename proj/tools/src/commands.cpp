#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "szego/asymptotics.hpp"
#include "szego/errors.hpp"
#include "szego_cli/app.hpp"
#include "szego_cli/norm_io.hpp"

namespace szego::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kValidationSamples = 100;
constexpr double kBoundaryTolerance = 1e-10;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path prepare_out_dir(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + c.out + "'");
  }
  return dir;
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Json point_json(const ComplexPoint& x) {
  Json arr = Json::array();
  for (const auto& v : x.x) arr.push_back(Json::array({v.real(), v.imag()}));
  return arr;
}

const ComplexPoint& require_point(const RunConfig& c) {
  if (!c.point) throw ConfigError("this command needs a [point] section");
  return *c.point;
}

/// Boundary point used for the expansion and, for interior points, the
/// rescaling that relates the two.
struct ResolvedPoint {
  ComplexPoint boundary;
  std::optional<InteriorRescale> rescale;
};

ResolvedPoint resolve_point(const ReinhardtDomain& d, const ComplexPoint& x) {
  const double rho = d.rho_at(x.moduli().values());
  if (std::abs(rho - 1.0) <= kBoundaryTolerance) return {x, std::nullopt};
  InteriorRescale r = interior_rescale(d, x);
  return {r.boundary, r};
}

void add_interior(Json& j, const ResolvedPoint& p, const std::vector<int>& ks) {
  if (!p.rescale) return;
  Json in;
  in["rho"] = p.rescale->rho;
  in["boundary_projection"] = point_json(p.rescale->boundary);
  in["relation"] = "Pi_k(x) = rho(x)^(2k/l) * Pi_k(x psi(x))";
  Json factors = Json::array();
  for (int k : ks) factors.push_back(p.rescale->factor(k));
  in["rescale_factor"] = factors;
  j["interior"] = in;
}

/// Gate run before any numerical command.
bool domain_admissible(const ReinhardtDomain& d, std::ostream& out) {
  const ValidationReport v = validate_domain(d, kValidationSamples);
  if (v.passed()) return true;
  out << "domain validation failed:";
  for (const auto& f : v.failures()) out << " " << f;
  out << "\n";
  return false;
}

struct TableStats {
  int cached = 0;
  int computed = 0;
};

/// Norm tables for `ks` on one route: cached files in the output directory
/// are reused when they belong to the same domain and quadrature; the rest
/// are computed in one batch and written.
std::vector<NormTable> obtain_tables(const RunConfig& c, const ReinhardtDomain& d, Route route,
                                     const std::vector<int>& ks, const fs::path& dir,
                                     TableStats& stats) {
  std::vector<std::optional<NormTable>> slots(ks.size());
  std::vector<int> missing;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    slots[i] = read_cached_norm_table(norm_table_path(dir, route, ks[i]), c, route, ks[i]);
    if (slots[i]) {
      ++stats.cached;
    } else {
      missing.push_back(ks[i]);
    }
  }
  if (!missing.empty()) {
    NormTableBuilder builder(d, route, c.quadrature);
    std::vector<NormTable> built = builder.build(missing);
    std::size_t next = 0;
    for (auto& slot : slots) {
      if (slot) continue;
      NormTable& t = built[next++];
      write_file_atomic(norm_table_path(dir, route, t.k), format_norm_table(t, c));
      slot = std::move(t);
      ++stats.computed;
    }
  }
  std::vector<NormTable> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<int> k_values(const RunConfig& c) {
  std::vector<int> ks;
  for (int k = c.k_min; k <= c.k_max; ++k) ks.push_back(k);
  return ks;
}

bool all_complete(const std::vector<NormTable>& tables) {
  return std::all_of(tables.begin(), tables.end(), [](const NormTable& t) { return t.complete; });
}

Json base_json(const RunConfig& c, const std::string& command) {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash(c);
  j["tool_version"] = kToolVersion;
  return j;
}

}  // namespace

int run_validate(const RunConfig& c, std::ostream& out) {
  const auto vars = static_cast<std::size_t>(c.n) + 1;
  // Built unchecked so a failed homogeneity test shows up in the report.
  const ReinhardtDomain d = ReinhardtDomain::unchecked(
      c.n, c.l, parse_expression(c.rho, vars), parse_expression(c.u, vars));
  const ValidationReport v = validate_domain(d, kValidationSamples);
  Json j = base_json(c, "validate");
  j["passed"] = v.passed();
  j["failures"] = v.failures();
  Json checks = Json::array();
  for (const auto& ch : v.checks) {
    checks.push_back(Json{{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  }
  j["checks"] = checks;
  out << j.dump(2) << "\n";
  return v.passed() ? kSuccess : kCheckFailed;
}

int run_norms(const RunConfig& c, std::ostream& out) {
  const ReinhardtDomain d = make_domain(c);
  if (!domain_admissible(d, out)) return kCheckFailed;
  const fs::path dir = prepare_out_dir(c);
  const std::vector<int> ks = k_values(c);

  bool complete = true;
  std::vector<std::vector<NormTable>> per_route;
  for (Route route : routes_of(c.route)) {
    TableStats stats;
    per_route.push_back(obtain_tables(c, d, route, ks, dir, stats));
    complete = complete && all_complete(per_route.back());
    out << to_string(route) << ": " << stats.computed << " tables computed, " << stats.cached
        << " reused from cache\n";
  }

  bool consistent = true;
  if (per_route.size() == 2) {
    std::string csv = "# szego norm consistency\n# tool_version: " + std::string(kToolVersion) +
                      "\n# config_hash: " + table_hash(c) + "\n";
    csv += "k,max_rel_diff,max_rel_err_boundary,max_rel_err_projective,consistent\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto& b = per_route[0][i];
      const auto& p = per_route[1][i];
      double diff = 0.0;
      double err_b = 0.0;
      double err_p = 0.0;
      bool ok = true;
      for (std::size_t e = 0; e < b.entries.size(); ++e) {
        const double rel = std::abs(std::expm1(b.entries[e].log_norm - p.entries[e].log_norm));
        const double bound = b.entries[e].rel_err + p.entries[e].rel_err +
                             2.0 * c.quadrature.target_rel_tol;
        ok = ok && rel <= bound;
        diff = std::max(diff, rel);
        err_b = std::max(err_b, b.entries[e].rel_err);
        err_p = std::max(err_p, p.entries[e].rel_err);
      }
      consistent = consistent && ok;
      csv += std::to_string(ks[i]) + "," + number(diff) + "," + number(err_b) + "," +
             number(err_p) + "," + (ok ? "true" : "false") + "\n";
    }
    write_file_atomic(dir / "norms_consistency.csv", csv);
    out << "routes " << (consistent ? "agree" : "DISAGREE") << " within combined error\n";
  }
  if (!complete) {
    out << "some norm tables are incomplete (quadrature did not converge)\n";
    return kNumericalError;
  }
  return consistent ? kSuccess : kCheckFailed;
}

int run_szego(const RunConfig& c, std::ostream& out) {
  const ReinhardtDomain d = make_domain(c);
  const ComplexPoint& x = require_point(c);
  if (!domain_admissible(d, out)) return kCheckFailed;
  const fs::path dir = prepare_out_dir(c);
  const std::vector<int> ks = k_values(c);
  const ResolvedPoint p = resolve_point(d, x);

  std::string csv = "# szego partial kernel\n# tool_version: " + std::string(kToolVersion) +
                    "\n# config_hash: " + config_hash(c) + "\n";
  csv += "k,route,pi_k,log_pi_k,pi_k_boundary,rescale_factor\n";
  bool complete = true;
  for (Route route : routes_of(c.route)) {
    TableStats stats;
    const auto tables = obtain_tables(c, d, route, ks, dir, stats);
    complete = complete && all_complete(tables);
    for (const auto& t : tables) {
      const double log_pi = log_partial_szego(d, t.k, x, t);
      const double log_b = log_partial_szego(d, t.k, p.boundary, t);
      const double factor = p.rescale ? p.rescale->factor(t.k) : 1.0;
      csv += std::to_string(t.k) + "," + to_string(route) + "," + number(std::exp(log_pi)) + "," +
             number(log_pi) + "," + number(std::exp(log_b)) + "," + number(factor) + "\n";
    }
  }
  write_file_atomic(dir / "szego.csv", csv);
  out << "wrote " << (dir / "szego.csv").string() << "\n";
  return complete ? kSuccess : kNumericalError;
}

int run_coeffs(const RunConfig& c, std::ostream& out) {
  const ReinhardtDomain d = make_domain(c);
  const ComplexPoint& x = require_point(c);
  const fs::path dir = prepare_out_dir(c);
  const ResolvedPoint p = resolve_point(d, x);
  const A1Detail a = a1_closed_form_detail(d, p.boundary);

  Json j = base_json(c, "coeffs");
  j["leading_power"] = d.n();
  j["a0"] = a.a0;
  j["a1"] = a.a1;
  j["a1_fd"] = a.a1_fd;
  j["laplacian_log_a0"] = a.laplacian;
  j["laplacian_log_a0_fd"] = a.laplacian_fd;
  j["route_disagreement"] = a.disagreement;
  j["boundary_point"] = p.boundary.moduli().m;
  add_interior(j, p, k_values(c));
  Json warnings = Json::array({leading_power_notice(d.n())});
  const bool agree = a.disagreement <= 1e-4;
  if (!agree) warnings.push_back("jet and finite-difference routes disagree beyond 1e-4");
  j["warnings"] = warnings;
  write_json(dir / "coeffs.json", j);
  out << j.dump(2) << "\n";
  return agree ? kSuccess : kNumericalError;
}

int run_verify(const RunConfig& c, std::ostream& out) {
  const ReinhardtDomain d = make_domain(c);
  const ComplexPoint& x = require_point(c);
  if (!domain_admissible(d, out)) return kCheckFailed;
  if (c.k_min < 1) throw ConfigError("verify needs k_min >= 1");
  const fs::path dir = prepare_out_dir(c);
  const std::vector<int> ks = k_values(c);
  const ResolvedPoint p = resolve_point(d, x);

  int code = kSuccess;
  for (Route route : routes_of(c.route)) {
    TableStats stats;
    const auto tables = obtain_tables(c, d, route, ks, dir, stats);
    ExpansionReport r = expansion_report(d, p.boundary, tables);

    std::vector<std::string> failures;
    if (!(std::abs(r.fitted_power - r.leading_power) <= c.power_tol)) {
      failures.push_back("fitted_power " + number(r.fitted_power) + " differs from " +
                         std::to_string(r.leading_power) + " by more than " + number(c.power_tol));
    }
    if (!(r.rel_err_a0 <= c.a0_tol)) {
      failures.push_back("rel_err_a0 " + number(r.rel_err_a0) + " exceeds " + number(c.a0_tol));
    }
    if (!(r.rel_err_a1 <= c.a1_tol)) {
      failures.push_back("rel_err_a1 " + number(r.rel_err_a1) + " exceeds " + number(c.a1_tol));
    }
    for (const auto& f : failures) r.warnings.push_back("verification failed: " + f);

    Json j;
    j["ks"] = r.ks;
    j["pi_values"] = r.pi_values;
    j["fitted_power"] = r.fitted_power;
    j["fitted_a0"] = r.fitted_a0;
    j["fitted_a1"] = r.fitted_a1;
    j["closed_a0"] = r.closed_a0;
    j["closed_a1"] = r.closed_a1;
    j["rel_err_a0"] = r.rel_err_a0;
    j["rel_err_a1"] = r.rel_err_a1;
    j["residual_curve"] = r.residual_curve;
    j["config_hash"] = config_hash(c);
    j["tool_version"] = kToolVersion;
    j["warnings"] = r.warnings;
    j["leading_power"] = r.leading_power;
    j["route"] = to_string(r.route);
    j["boundary_point"] = r.boundary_point.m;
    j["closed_a1_fd"] = r.a1_fd;
    j["table_rel_err"] = r.table_rel_err;
    add_interior(j, p, r.ks);
    write_json(dir / ("report_" + to_string(route) + ".json"), j);

    std::string csv = "# szego expansion report\n# tool_version: " + std::string(kToolVersion) +
                      "\n# config_hash: " + config_hash(c) + "\n# route: " + to_string(route) +
                      "\n# model uses the closed-form a0, a1\n";
    csv += "k,pi_k,a0*k^n+a1*k^(n-1),residual\n";
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      csv += std::to_string(r.ks[i]) + "," + number(r.pi_values[i]) + "," +
             number(r.model_curve[i]) + "," + number(r.residual_curve[i]) + "\n";
    }
    write_file_atomic(dir / ("report_" + to_string(route) + ".csv"), csv);

    out << to_string(route) << ": fitted_power " << number(r.fitted_power) << ", a0 "
        << number(r.fitted_a0) << " vs " << number(r.closed_a0) << ", a1 "
        << number(r.fitted_a1) << " vs " << number(r.closed_a1) << "\n";
    for (const auto& f : failures) out << "  FAIL " << f << "\n";

    if (!all_complete(tables)) {
      code = kNumericalError;
    } else if (!failures.empty() && code == kSuccess) {
      code = kCheckFailed;
    }
  }
  return code;
}

}  // namespace szego::cli
