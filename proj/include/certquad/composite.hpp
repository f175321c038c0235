#pragma once

/**
 * @file composite.hpp
 * @brief Composite rules over subdivisions, with per-cell certificates and
 *        greedy adaptive refinement to a target total bound.
 *
 * A composite certificate is nothing but the per-cell single-interval
 * certificates summed in index order: value = sum of cell values, bound =
 * sum of cell bounds. Node evaluations shared by adjacent cells are
 * computed once.
 */

#include <cstddef>
#include <utility>
#include <vector>

#include "certquad/rules.hpp"

namespace certquad {

/// Subdivision a = x_0 < x_1 < ... < x_n = b together with one evaluation
/// point xi_i inside every cell [x_i, x_{i+1}].
class Partition {
 public:
  Partition(std::vector<double> nodes, std::vector<double> xi)
      : nodes_(std::move(nodes)), xi_(std::move(xi)) {
    if (nodes_.size() < 2)
      throw ValidationError("partition needs at least two nodes");
    if (xi_.size() + 1 != nodes_.size())
      throw ValidationError("partition needs one evaluation point per cell");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      detail::require_finite(nodes_[i], "partition node");
      if (i > 0 && !(nodes_[i - 1] < nodes_[i]))
        throw ValidationError("partition nodes must be strictly increasing "
                              "(violated at node " + std::to_string(i) + ")");
    }
    for (std::size_t i = 0; i < xi_.size(); ++i) {
      detail::require_finite(xi_[i], "evaluation point");
      if (xi_[i] < nodes_[i] || xi_[i] > nodes_[i + 1])
        throw ValidationError("evaluation point xi = " + detail::num(xi_[i]) +
                              " outside cell " + std::to_string(i));
    }
  }

  /// Uniform subdivision into `cells` cells with midpoint evaluation points.
  static Partition uniform(const Interval& iv, std::size_t cells) {
    if (cells == 0) throw ValidationError("partition needs at least one cell");
    if (iv.degenerate())
      throw ValidationError("cannot partition a degenerate interval");
    std::vector<double> nodes(cells + 1);
    nodes.front() = iv.a;
    nodes.back() = iv.b;
    for (std::size_t i = 1; i < cells; ++i)
      nodes[i] = iv.a + (static_cast<double>(i) * iv.width()) /
                            static_cast<double>(cells);
    return with_midpoint_xi(std::move(nodes));
  }

  /// Builds the partition with xi_i at each cell midpoint.
  static Partition with_midpoint_xi(std::vector<double> nodes) {
    if (nodes.size() < 2)
      throw ValidationError("partition needs at least two nodes");
    std::vector<double> xi(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      xi[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    return Partition(std::move(nodes), std::move(xi));
  }

  std::size_t cells() const { return xi_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& xi() const { return xi_; }
  Interval cell(std::size_t i) const {
    return Interval(nodes_[i], nodes_[i + 1]);
  }
  double width(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
  Interval span() const { return Interval(nodes_.front(), nodes_.back()); }

 private:
  std::vector<double> nodes_;
  std::vector<double> xi_;
};

/// Per-cell certificates plus their index-order sums.
struct CompositeCertificate {
  double value;
  double bound;
  std::vector<CertifiedEstimate> cells;
  RuleFamily family;
};

/// Applies the selected family on every cell at the given h with x = xi_i
/// and sums values and bounds left to right in index order. Shared nodes
/// are evaluated once. Admissibility and slope-consistency failures name
/// the offending cell.
inline CompositeCertificate composite_general(const Integrand& f,
                                              const Partition& part, double h,
                                              const SlopeBounds& s,
                                              RuleFamily family) {
  if (family == RuleFamily::Lipschitz)
    throw ValidationError("composite families are midrange, lower and upper; "
                          "use slopes (-L, L) with midrange instead");
  const std::vector<double>& nodes = part.nodes();
  std::vector<double> fnode(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) fnode[i] = f(nodes[i]);

  CompositeCertificate out{0.0, 0.0, {}, family};
  out.cells.reserve(part.cells());
  for (std::size_t i = 0; i < part.cells(); ++i) {
    const Interval cell = part.cell(i);
    try {
      const RuleParams p(cell, h, part.xi()[i]);
      const detail::RuleSamples samples{fnode[i], fnode[i + 1],
                                        f(part.xi()[i])};
      CertifiedEstimate est =
          family == RuleFamily::MidRange
              ? detail::midrange_estimate(cell, p, samples, s)
              : family == RuleFamily::Lower
                    ? detail::lower_estimate(cell, p, samples, s.l)
                    : detail::upper_estimate(cell, p, samples, s.L);
      out.value += est.value;
      out.bound += est.bound;
      out.cells.push_back(est);
    } catch (const SlopeConsistencyError& e) {
      throw SlopeConsistencyError("cell " + std::to_string(i) + ": " +
                                  e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("cell " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

/// Composite two-sided rule at h = 1/2.
inline CompositeCertificate composite_midrange(const Integrand& f,
                                               const Partition& part,
                                               const SlopeBounds& s) {
  return composite_general(f, part, 0.5, s, RuleFamily::MidRange);
}

/// Composite lower rule at h = 1/2; every cell secant S_i must satisfy
/// S_i >= l.
inline CompositeCertificate composite_lower(const Integrand& f,
                                            const Partition& part, double l) {
  return composite_general(f, part, 0.5, SlopeBounds(l, l), RuleFamily::Lower);
}

/// Composite upper rule at h = 1/2; every cell secant S_i must satisfy
/// S_i <= L.
inline CompositeCertificate composite_upper(const Integrand& f,
                                            const Partition& part, double L) {
  return composite_general(f, part, 0.5, SlopeBounds(L, L), RuleFamily::Upper);
}

/// Raised when adaptive refinement hits its cell budget before reaching
/// the target bound; carries the best partition found and its bound.
struct BudgetExceededError : Error {
  Partition best;
  double bound;

  BudgetExceededError(const std::string& msg, Partition best_, double bound_)
      : Error(msg), best(std::move(best_)), bound(bound_) {}
};

/// Refines [a, b] until the h = 1/2 midrange certificate with midpoint
/// evaluation points reaches bound <= tol. Each round bisects every cell
/// attaining the current largest bound contribution (the midpoint bound
/// of a cell depends only on its width, so symmetric inputs refine
/// uniformly in powers of two). Throws BudgetExceededError if the budget
/// runs out first.
inline Partition adaptive_partition(const Integrand& /*f*/, const Interval& iv,
                                    const SlopeBounds& s, double tol,
                                    std::size_t max_cells) {
  detail::require_finite(tol, "tolerance");
  if (tol < 0.0) throw ValidationError("tolerance must be nonnegative");
  if (max_cells == 0) throw ValidationError("max_cells must be positive");
  if (iv.degenerate())
    throw ValidationError("cannot partition a degenerate interval");

  struct Cell {
    double lo;
    double hi;
    double bound;
  };
  const auto cell_bound = [&s](double lo, double hi) {
    const Interval c(lo, hi);
    return 0.5 * kernel_abs_integral(c, RuleParams::midpoint(c, 0.5)) *
           s.spread();
  };
  const auto to_partition = [](const std::vector<Cell>& cells) {
    std::vector<double> nodes;
    nodes.reserve(cells.size() + 1);
    nodes.push_back(cells.front().lo);
    for (const Cell& c : cells) nodes.push_back(c.hi);
    return Partition::with_midpoint_xi(std::move(nodes));
  };

  std::vector<Cell> cells{{iv.a, iv.b, cell_bound(iv.a, iv.b)}};
  for (;;) {
    double total = 0.0;
    for (const Cell& c : cells) total += c.bound;
    if (total <= tol) return to_partition(cells);
    if (cells.size() >= max_cells)
      throw BudgetExceededError(
          "cell budget " + std::to_string(max_cells) +
          " exhausted at bound " + detail::num(total) + " > tol " +
          detail::num(tol), to_partition(cells), total);

    double worst = cells.front().bound;
    for (const Cell& c : cells) worst = std::max(worst, c.bound);
    for (std::size_t i = 0; i < cells.size() && cells.size() < max_cells; ++i) {
      if (cells[i].bound != worst) continue;
      const double mid = Interval(cells[i].lo, cells[i].hi).midpoint();
      if (!(mid > cells[i].lo) || !(mid < cells[i].hi))
        throw BudgetExceededError(
            "cell width underflow at bound " + detail::num(total) + " > tol " +
            detail::num(tol), to_partition(cells), total);
      const Cell right{mid, cells[i].hi, cell_bound(mid, cells[i].hi)};
      cells[i] = Cell{cells[i].lo, mid, cell_bound(cells[i].lo, mid)};
      cells.insert(cells.begin() + static_cast<std::ptrdiff_t>(i) + 1, right);
      ++i;  // skip the freshly inserted right half
    }
  }
}

}  // namespace certquad
