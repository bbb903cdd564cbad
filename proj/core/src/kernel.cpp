#include "szego/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "szego/errors.hpp"
#include "szego/quadrature.hpp"

namespace szego {

namespace {

void enumerate_into(int parts, int remaining, std::vector<int>& prefix,
                    std::vector<MultiIndex>& out) {
  if (parts == 1) {
    prefix.push_back(remaining);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int j = remaining; j >= 0; --j) {
    prefix.push_back(j);
    enumerate_into(parts - 1, remaining - j, prefix, out);
    prefix.pop_back();
  }
}

std::string describe(const MultiIndex& J) {
  std::string s = "(";
  for (std::size_t i = 0; i < J.j.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(J.j[i]);
  }
  return s + ")";
}

/// Sum of 2 j_i log m_i, or -inf when a positive exponent meets a zero modulus.
double log_monomial_square(const MultiIndex& J, std::span<const double> log_m) {
  double t = 0.0;
  for (std::size_t i = 0; i < J.j.size(); ++i) {
    if (J.j[i] == 0) continue;
    if (log_m[i] == -std::numeric_limits<double>::infinity()) {
      return -std::numeric_limits<double>::infinity();
    }
    t += 2.0 * J.j[i] * log_m[i];
  }
  return t;
}

double relative_change(double log_a, double log_b) {
  // |e^a - e^b| / e^b
  return std::abs(std::expm1(log_a - log_b));
}

struct PendingNorm {
  std::size_t table;
  std::size_t entry;
};

}  // namespace

int MultiIndex::degree() const noexcept { return std::accumulate(j.begin(), j.end(), 0); }

std::vector<MultiIndex> enumerate_multi_indices(int n, int k) {
  if (n < 1) throw Error("multi-index enumeration needs n >= 1");
  if (k < 0) throw Error("multi-index enumeration needs k >= 0");
  std::vector<MultiIndex> out;
  out.reserve(multi_index_count(n, k));
  std::vector<int> prefix;
  enumerate_into(n + 1, k, prefix, out);
  return out;
}

std::size_t multi_index_count(int n, int k) {
  // C(n+k, n) = prod_{i=1..n} (k+i)/i, exact at every step
  std::size_t c = 1;
  for (int i = 1; i <= n; ++i) {
    c = c * static_cast<std::size_t>(k + i) / static_cast<std::size_t>(i);
  }
  return c;
}

const NormEntry* NormTable::find(const MultiIndex& J) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), J,
                                   [](const NormEntry& e, const MultiIndex& key) {
                                     return e.index > key;  // descending order
                                   });
  if (it == entries.end() || it->index != J) return nullptr;
  return &*it;
}

void NormTable::require_complete() const {
  for (const auto& e : entries) {
    if (!e.converged) {
      throw QuadratureError("norm of x^" + describe(e.index) + " did not converge (rel_err " +
                                std::to_string(e.rel_err) + ")",
                            e.log_norm, e.log_norm);
    }
  }
}

void NormTable::validate() const {
  if (entries.size() != multi_index_count(n, k)) {
    throw Error("norm table for k=" + std::to_string(k) + " has " +
                std::to_string(entries.size()) + " entries, expected " +
                std::to_string(multi_index_count(n, k)));
  }
  for (const auto& e : entries) {
    if (e.index.degree() != k || e.index.size() != static_cast<std::size_t>(n) + 1) {
      throw Error("norm table entry " + describe(e.index) + " has the wrong degree");
    }
    if (!std::isfinite(e.log_norm)) {
      throw Error("norm table entry " + describe(e.index) + " is not finite");
    }
  }
}

NormTableBuilder::NormTableBuilder(const ReinhardtDomain& domain, Route route,
                                   QuadratureSpec spec)
    : domain_(&domain), route_(route), spec_(spec), main_(domain, route, spec) {}

GridLadder& NormTableBuilder::ladder_for(int k) {
  if (k != 0 || route_ == Route::Boundary) return main_;
  if (!constant_) {
    QuadratureSpec q = spec_;
    q.mapping = ChartMapping::Tangent;
    q.nodes_per_dim *= 2;
    constant_.emplace(*domain_, route_, q);
  }
  return *constant_;
}

NormTable NormTableBuilder::build(int k) {
  const int ks[] = {k};
  return std::move(build(std::span<const int>(ks)).front());
}

std::vector<NormTable> NormTableBuilder::build(std::span<const int> ks) {
  std::vector<NormTable> tables;
  tables.reserve(ks.size());
  for (int k : ks) {
    NormTable t;
    t.n = domain_->n();
    t.k = k;
    t.route = route_;
    for (auto& J : enumerate_multi_indices(domain_->n(), k)) {
      t.entries.push_back(NormEntry{std::move(J), 0.0, 0.0, 0, false});
    }
    tables.push_back(std::move(t));
  }

  // Indices grouped by ladder so each grid level is built once, on this thread.
  for (const bool constant_pass : {false, true}) {
    std::vector<PendingNorm> pending;
    GridLadder* ladder = nullptr;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      GridLadder& l = ladder_for(tables[t].k);
      if ((&l != &main_) != constant_pass) continue;
      ladder = &l;
      for (std::size_t e = 0; e < tables[t].entries.size(); ++e) pending.push_back({t, e});
    }
    if (pending.empty()) continue;

    const int workers = spec_.workers;
    std::vector<double> previous(pending.size());
    const QuadratureGrid& base = ladder->level(0);
    parallel_for(pending.size(), workers, [&](std::size_t p) {
      const auto& J = tables[pending[p].table].entries[pending[p].entry].index;
      previous[p] = base.log_monomial_moment(J.j);
    });

    for (int level = 1; level <= spec_.refinement_levels && !pending.empty(); ++level) {
      const QuadratureGrid& grid = ladder->level(level);
      std::vector<double> current(pending.size());
      parallel_for(pending.size(), workers, [&](std::size_t p) {
        const auto& J = tables[pending[p].table].entries[pending[p].entry].index;
        current[p] = grid.log_monomial_moment(J.j);
      });
      std::vector<PendingNorm> still;
      std::vector<double> still_values;
      for (std::size_t p = 0; p < pending.size(); ++p) {
        NormEntry& e = tables[pending[p].table].entries[pending[p].entry];
        e.log_norm = current[p];
        e.rel_err = relative_change(previous[p], current[p]);
        e.level = level;
        e.converged = e.rel_err <= spec_.target_rel_tol;
        if (!e.converged) {
          still.push_back(pending[p]);
          still_values.push_back(current[p]);
        }
      }
      pending = std::move(still);
      previous = std::move(still_values);
    }
  }

  for (auto& t : tables) {
    t.complete = std::all_of(t.entries.begin(), t.entries.end(),
                             [](const NormEntry& e) { return e.converged; });
  }
  return tables;
}

NormEstimate monomial_norm(const ReinhardtDomain& domain, const MultiIndex& J,
                           const QuadratureSpec& q, Route route) {
  if (J.size() != domain.dim()) throw Error("multi-index size does not match the domain");
  for (int j : J.j) {
    if (j < 0) throw Error("multi-index exponents must be nonnegative");
  }
  const int k = J.degree();
  QuadratureSpec spec = q;
  if (k == 0 && route == Route::Projective) {
    spec.mapping = ChartMapping::Tangent;
    spec.nodes_per_dim *= 2;
  }
  GridLadder ladder(domain, route, spec);
  double previous = ladder.level(0).log_monomial_moment(J.j);
  for (int level = 1; level <= spec.refinement_levels; ++level) {
    const double current = ladder.level(level).log_monomial_moment(J.j);
    const double err = relative_change(previous, current);
    if (err <= spec.target_rel_tol) return NormEstimate{current, err, level};
    if (level == spec.refinement_levels) {
      throw QuadratureError("norm of x^" + describe(J) + " did not converge",
                            std::exp(previous), std::exp(current));
    }
    previous = current;
  }
  throw QuadratureError("norm of x^" + describe(J) + " did not converge", std::exp(previous),
                        std::exp(previous));
}

double log_partial_szego(const ReinhardtDomain& domain, int k, const ComplexPoint& x,
                         const NormTable& table) {
  if (table.k != k) {
    throw Error("norm table has degree " + std::to_string(table.k) + ", requested k=" +
                std::to_string(k));
  }
  if (x.size() != domain.dim()) throw GeometryError("point has the wrong dimension");
  if (table.entries.size() != multi_index_count(domain.n(), k)) {
    throw Error("norm table for k=" + std::to_string(k) + " is missing entries");
  }
  std::vector<double> log_m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) log_m[i] = std::log(std::abs(x.x[i]));
  std::vector<double> terms;
  terms.reserve(table.entries.size());
  for (const auto& e : table.entries) {
    const double t = log_monomial_square(e.index, log_m);
    if (t != -std::numeric_limits<double>::infinity()) terms.push_back(t - e.log_norm);
  }
  return log_sum_exp(terms);
}

double partial_szego(const ReinhardtDomain& domain, int k, const ComplexPoint& x,
                     const NormTable& table) {
  return std::exp(log_partial_szego(domain, k, x, table));
}

double InteriorRescale::factor(int k) const { return std::exp(log_factor(k)); }

double InteriorRescale::log_factor(int k) const { return 2.0 * k / l * std::log(rho); }

InteriorRescale interior_rescale(const ReinhardtDomain& domain, const ComplexPoint& x) {
  if (x.size() != domain.dim()) throw GeometryError("point has the wrong dimension");
  if (x.norm_squared() == 0.0) throw GeometryError("interior rescale of the zero vector");
  const ModuliPoint m = x.moduli();
  const double rho = domain.rho_at(m.values());
  if (!(rho > 0.0)) throw GeometryError("rho is not positive at the point");
  InteriorRescale out;
  out.rho = rho;
  out.l = domain.l();
  out.boundary = x.scaled(std::pow(rho, -1.0 / domain.l()));
  return out;
}

double bergman_diag(const ReinhardtDomain& domain, int k, const ChartPoint& z,
                    const NormTable& table) {
  if (z.size() != static_cast<std::size_t>(domain.n())) {
    throw GeometryError("chart point has the wrong dimension");
  }
  const ComplexPoint x = z.homogeneous();
  const ModuliPoint y = x.moduli();
  const double log_h = log_hE_weight(domain, y);
  const double log_psi = -std::log(domain.rho_at(y.values())) / domain.l();
  // pi^*|x^J|^2 = |y^J|^2 psi(y)^{2k}
  return std::exp(log_h + 2.0 * k * log_psi + log_partial_szego(domain, k, x, table));
}

}  // namespace szego
