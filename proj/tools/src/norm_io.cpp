#include "szego_cli/norm_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "szego/errors.hpp"

namespace szego::cli {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

bool parse_double(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

bool parse_int(const std::string& s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::filesystem::path norm_table_path(const std::filesystem::path& dir, Route route, int k) {
  return dir / ("norms_" + to_string(route) + "_k" + std::to_string(k) + ".csv");
}

std::string format_norm_table(const NormTable& table, const RunConfig& config) {
  std::string s;
  s += "# szego norm table\n";
  s += "# tool_version: " + std::string(kToolVersion) + "\n";
  s += "# config_hash: " + table_hash(config) + "\n";
  s += "# n: " + std::to_string(table.n) + "\n";
  s += "# k: " + std::to_string(table.k) + "\n";
  s += "# route: " + to_string(table.route) + "\n";
  s += std::string("# complete: ") + (table.complete ? "true" : "false") + "\n";
  s += "# rho: " + config.rho + "\n";
  s += "# u: " + config.u + "\n";
  s += "# l: " + number(config.l) + "\n";
  s += "# quadrature: nodes=" + std::to_string(config.quadrature.nodes_per_dim) +
       " mapping=" + to_string(config.quadrature.mapping) +
       " levels=" + std::to_string(config.quadrature.refinement_levels) +
       " tol=" + number(config.quadrature.target_rel_tol) + "\n";
  for (int i = 0; i <= table.n; ++i) s += "j" + std::to_string(i) + ",";
  s += "log_norm,rel_err\n";
  for (const auto& e : table.entries) {
    for (int j : e.index.j) s += std::to_string(j) + ",";
    s += number(e.log_norm) + "," + number(e.rel_err) + "\n";
  }
  return s;
}

std::optional<NormTable> read_cached_norm_table(const std::filesystem::path& path,
                                                const RunConfig& config, Route route, int k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  NormTable t;
  t.n = config.n;
  t.k = k;
  t.route = route;
  bool hash_ok = false;
  bool complete = false;
  bool meta_ok = true;
  bool header_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    if (starts_with(line, "#")) {
      if (line == "# config_hash: " + table_hash(config)) hash_ok = true;
      if (line == "# complete: true") complete = true;
      if (starts_with(line, "# n: ") && line != "# n: " + std::to_string(config.n)) meta_ok = false;
      if (starts_with(line, "# k: ") && line != "# k: " + std::to_string(k)) meta_ok = false;
      if (starts_with(line, "# route: ") && line != "# route: " + to_string(route)) meta_ok = false;
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<std::size_t>(config.n) + 3) return std::nullopt;
    NormEntry e;
    for (int i = 0; i <= config.n; ++i) {
      int j = 0;
      if (!parse_int(cells[static_cast<std::size_t>(i)], j)) return std::nullopt;
      e.index.j.push_back(j);
    }
    if (!parse_double(cells[cells.size() - 2], e.log_norm)) return std::nullopt;
    if (!parse_double(cells.back(), e.rel_err)) return std::nullopt;
    e.converged = e.rel_err <= config.quadrature.target_rel_tol;
    t.entries.push_back(std::move(e));
  }
  if (!hash_ok || !complete || !meta_ok) return std::nullopt;
  try {
    t.validate();
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto expected = enumerate_multi_indices(config.n, k);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (t.entries[i].index != expected[i] || !t.entries[i].converged) return std::nullopt;
  }
  t.complete = true;
  return t;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace szego::cli
