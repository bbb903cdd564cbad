#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "szego/boundary_measure.hpp"

namespace szego {

/// Exponents (j_0, ..., j_n) of the monomial x^J.
struct MultiIndex {
  std::vector<int> j;

  [[nodiscard]] int degree() const noexcept;
  [[nodiscard]] std::size_t size() const noexcept { return j.size(); }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All J with |J| = k in n+1 parts, lexicographically descending:
/// n=1, k=2 gives (2,0), (1,1), (0,2). There are C(n+k, n) of them.
std::vector<MultiIndex> enumerate_multi_indices(int n, int k);

/// C(n+k, n) without overflow for the sizes used here.
std::size_t multi_index_count(int n, int k);

struct NormEntry {
  MultiIndex index;
  double log_norm = 0.0;
  double rel_err = 0.0;
  int level = 0;
  bool converged = true;
};

/// log <x^J, x^J>_mu for every |J| = k, in enumeration order.
struct NormTable {
  int n = 0;
  int k = 0;
  Route route = Route::Boundary;
  std::vector<NormEntry> entries;
  /// False when at least one entry missed the quadrature tolerance.
  bool complete = true;

  [[nodiscard]] const NormEntry* find(const MultiIndex& J) const;
  /// Throws QuadratureError naming the first unconverged entry.
  void require_complete() const;
  /// Checks the entry count and that every log-norm is finite.
  void validate() const;
};

/// Builds norm tables for one domain and route, sharing the refinement
/// ladder (and its cached grids) across every k it is asked for.
///
/// Each multi-index is refined independently: all indices are integrated on
/// levels 0 and 1, and only those whose relative change exceeds the tolerance
/// move on to the next level. Work inside a level runs on `spec.workers`
/// threads; results do not depend on the worker count.
class NormTableBuilder {
 public:
  NormTableBuilder(const ReinhardtDomain& domain, Route route, QuadratureSpec spec);

  [[nodiscard]] NormTable build(int k);
  [[nodiscard]] std::vector<NormTable> build(std::span<const int> ks);

  [[nodiscard]] Route route() const noexcept { return route_; }

 private:
  /// The projective chart integral for k = 0 decays slowest; it uses the
  /// tangent map at twice the node count.
  GridLadder& ladder_for(int k);

  const ReinhardtDomain* domain_;
  Route route_;
  QuadratureSpec spec_;
  GridLadder main_;
  std::optional<GridLadder> constant_;
};

struct NormEstimate {
  double log_norm = 0.0;
  double rel_err = 0.0;
  int level = 0;
};

/// log <x^J, x^J>_mu by the chosen route. Throws QuadratureError when the
/// tolerance is not reached.
NormEstimate monomial_norm(const ReinhardtDomain& domain, const MultiIndex& J,
                           const QuadratureSpec& q, Route route);

/// log Pi_k(x, x) = log sum_J |x^J|^2 / <x^J, x^J>. Terms with j_i > 0 on a
/// coordinate axis m_i = 0 vanish and are skipped.
double log_partial_szego(const ReinhardtDomain& domain, int k, const ComplexPoint& x,
                         const NormTable& table);
double partial_szego(const ReinhardtDomain& domain, int k, const ComplexPoint& x,
                     const NormTable& table);

/// Boundary projection x psi(x) and the exact relation
/// Pi_k(x) = rho(x)^{2k/l} Pi_k(x psi(x)).
struct InteriorRescale {
  ComplexPoint boundary;
  double rho = 1.0;
  double l = 1.0;

  [[nodiscard]] double factor(int k) const;
  [[nodiscard]] double log_factor(int k) const;
};

InteriorRescale interior_rescale(const ReinhardtDomain& domain, const ComplexPoint& x);

/// B_k([x], [x]) on the chart U_0, as sum_J pi^*(|x^J|^2) h_E / <x^J, x^J>.
double bergman_diag(const ReinhardtDomain& domain, int k, const ChartPoint& z,
                    const NormTable& table);

}  // namespace szego
