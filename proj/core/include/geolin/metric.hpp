#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "geolin/expr.hpp"
#include "geolin/jet.hpp"

namespace geolin {

/// A metric tensor field: symmetric matrix of expressions over named
/// coordinates, with fixed parameter bindings. Pseudo-Riemannian metrics
/// are first-class; only invertibility at sample points is required.
struct MetricField {
  std::vector<std::string> coords;
  std::vector<Expr> comp;  // dim*dim, row-major, symmetric
  std::map<std::string, double> params;

  int dim() const { return static_cast<int>(coords.size()); }
  const Expr& at(int i, int j) const { return comp[i * dim() + j]; }
  Expr& at(int i, int j) { return comp[i * dim() + j]; }

  /// Order-3 jets of every component at p (row-major).
  std::vector<Jet> eval_jets(std::span<const double> p) const;
  std::vector<double> eval_values(std::span<const double> p) const;

  /// Determinant of the component matrix at p (LU with partial pivoting).
  double det_at(std::span<const double> p) const;
};

/// Flat metric helper: diagonal metric of constants.
MetricField diagonal_metric(const std::vector<std::string>& coords,
                            const std::vector<double>& diag);

}  // namespace geolin
