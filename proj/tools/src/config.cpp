#include "szego_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "szego/errors.hpp"

namespace szego::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Drops a trailing comment, honouring double quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (!quoted && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
  }
  return s;
}

double to_double(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("'" + key + "' expects a number, got '" + std::string(s) + "'", line);
  }
  return v;
}

int to_int(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

std::string to_text(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.find('"') != std::string_view::npos) {
    throw ConfigError("unbalanced quotes in '" + key + "'", line);
  }
  return std::string(s);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

ComplexPoint parse_moduli(std::string_view value, int line) {
  ComplexPoint p;
  for (auto part : split_commas(value)) {
    const double v = to_double(part, line, "moduli");
    if (v < 0.0) throw ConfigError("moduli must be nonnegative", line);
    p.x.emplace_back(v, 0.0);
  }
  return p;
}

ComplexPoint parse_complex_list(std::string_view value, int line) {
  ComplexPoint p;
  std::string_view rest = trim(value);
  while (!rest.empty()) {
    if (rest.front() != '(') throw ConfigError("x expects a list of (re,im) pairs", line);
    const auto close = rest.find(')');
    if (close == std::string_view::npos) throw ConfigError("unclosed '(' in x", line);
    const auto parts = split_commas(rest.substr(1, close - 1));
    if (parts.size() != 2) throw ConfigError("each entry of x needs exactly re,im", line);
    p.x.emplace_back(to_double(parts[0], line, "x"), to_double(parts[1], line, "x"));
    rest = trim(rest.substr(close + 1));
    if (!rest.empty()) {
      if (rest.front() != ',') throw ConfigError("entries of x must be separated by ','", line);
      rest = trim(rest.substr(1));
      if (rest.empty()) throw ConfigError("trailing ',' in x", line);
    }
  }
  if (p.x.empty()) throw ConfigError("x is empty", line);
  return p;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(RouteSelection r) {
  switch (r) {
    case RouteSelection::Boundary: return "boundary";
    case RouteSelection::Projective: return "projective";
    case RouteSelection::Both: return "both";
  }
  return "boundary";
}

RouteSelection parse_route_selection(const std::string& text) {
  if (text == "boundary") return RouteSelection::Boundary;
  if (text == "projective") return RouteSelection::Projective;
  if (text == "both") return RouteSelection::Both;
  throw ConfigError("route must be boundary, projective or both, got '" + text + "'");
}

std::vector<Route> routes_of(RouteSelection r) {
  switch (r) {
    case RouteSelection::Boundary: return {Route::Boundary};
    case RouteSelection::Projective: return {Route::Projective};
    case RouteSelection::Both: return {Route::Boundary, Route::Projective};
  }
  return {Route::Boundary};
}

void RunConfig::validate() const {
  if (n < 1) throw ConfigError("[domain] n must be at least 1");
  if (!(l > 0.0)) throw ConfigError("[domain] l must be positive");
  if (rho.empty()) throw ConfigError("[domain] rho is required");
  if (point && point->size() != static_cast<std::size_t>(n) + 1) {
    throw ConfigError("[point] needs n+1 = " + std::to_string(n + 1) + " coordinates");
  }
  if (k_min < 0) throw ConfigError("k_min must be nonnegative");
  if (k_max < k_min) throw ConfigError("k_max must be at least k_min");
  if (out.empty()) throw ConfigError("out must not be empty");
  if (!(power_tol > 0.0) || !(a0_tol > 0.0) || !(a1_tol > 0.0)) {
    throw ConfigError("verification tolerances must be positive");
  }
  try {
    quadrature.validate();
  } catch (const szego::Error& e) {
    throw ConfigError(std::string("[quadrature] ") + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  static const std::set<std::string> kSections = {"domain", "point", "quadrature", "run"};
  RunConfig c;
  std::string section;
  std::set<std::string> seen;
  bool have_n = false;
  bool have_l = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(strip_comment(text.substr(pos, eol - pos)));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (kSections.count(section) == 0) {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key outside of a section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
    }
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);

    const std::string where = "[" + section + "] " + key;
    if (section == "domain") {
      if (key == "n") {
        c.n = to_int(value, line_no, key);
        have_n = true;
      } else if (key == "l") {
        c.l = to_double(value, line_no, key);
        have_l = true;
      } else if (key == "rho") {
        c.rho = to_text(value, line_no, key);
      } else if (key == "u") {
        c.u = to_text(value, line_no, key);
      } else {
        throw ConfigError("unknown key " + where, line_no);
      }
    } else if (section == "point") {
      if (c.point) throw ConfigError("[point] takes either moduli or x, not both", line_no);
      if (key == "moduli") {
        c.point = parse_moduli(value, line_no);
      } else if (key == "x") {
        c.point = parse_complex_list(value, line_no);
      } else {
        throw ConfigError("unknown key " + where, line_no);
      }
    } else if (section == "quadrature") {
      if (key == "nodes") {
        c.quadrature.nodes_per_dim = to_int(value, line_no, key);
      } else if (key == "mapping") {
        const std::string m = to_text(value, line_no, key);
        if (m != "algebraic" && m != "tangent") {
          throw ConfigError("mapping must be algebraic or tangent", line_no);
        }
        c.quadrature.mapping = parse_chart_mapping(m);
      } else if (key == "levels") {
        c.quadrature.refinement_levels = to_int(value, line_no, key);
      } else if (key == "tol") {
        c.quadrature.target_rel_tol = to_double(value, line_no, key);
      } else if (key == "workers") {
        c.quadrature.workers = to_int(value, line_no, key);
      } else {
        throw ConfigError("unknown key " + where, line_no);
      }
    } else {
      if (key == "k_min") {
        c.k_min = to_int(value, line_no, key);
      } else if (key == "k_max") {
        c.k_max = to_int(value, line_no, key);
      } else if (key == "route") {
        c.route = parse_route_selection(to_text(value, line_no, key));
      } else if (key == "workers") {
        c.quadrature.workers = to_int(value, line_no, key);
      } else if (key == "out") {
        c.out = to_text(value, line_no, key);
      } else if (key == "power_tol") {
        c.power_tol = to_double(value, line_no, key);
      } else if (key == "a0_tol") {
        c.a0_tol = to_double(value, line_no, key);
      } else if (key == "a1_tol") {
        c.a1_tol = to_double(value, line_no, key);
      } else {
        throw ConfigError("unknown key " + where, line_no);
      }
    }
  }
  if (!have_n) throw ConfigError("[domain] n is required");
  if (!have_l) throw ConfigError("[domain] l is required");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_table_text(const RunConfig& c) {
  std::string s;
  s += "n=" + std::to_string(c.n) + "\n";
  s += "l=" + number(c.l) + "\n";
  s += "rho=" + c.rho + "\n";
  s += "u=" + c.u + "\n";
  s += "nodes=" + std::to_string(c.quadrature.nodes_per_dim) + "\n";
  s += "mapping=" + to_string(c.quadrature.mapping) + "\n";
  s += "levels=" + std::to_string(c.quadrature.refinement_levels) + "\n";
  s += "tol=" + number(c.quadrature.target_rel_tol) + "\n";
  return s;
}

std::string canonical_text(const RunConfig& c) {
  std::string s = canonical_table_text(c);
  if (c.point) {
    s += "point=";
    for (const auto& v : c.point->x) s += number(v.real()) + "," + number(v.imag()) + ";";
    s += "\n";
  }
  s += "k_min=" + std::to_string(c.k_min) + "\n";
  s += "k_max=" + std::to_string(c.k_max) + "\n";
  s += "route=" + to_string(c.route) + "\n";
  s += "power_tol=" + number(c.power_tol) + "\n";
  s += "a0_tol=" + number(c.a0_tol) + "\n";
  s += "a1_tol=" + number(c.a1_tol) + "\n";
  return s;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a(canonical_text(c))); }

std::string table_hash(const RunConfig& c) { return hex64(fnv1a(canonical_table_text(c))); }

ReinhardtDomain make_domain(const RunConfig& c) {
  return ReinhardtDomain::create(c.n, c.l, c.rho, c.u);
}

}  // namespace szego::cli
