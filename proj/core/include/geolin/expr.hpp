#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geolin/jet.hpp"

namespace geolin {

enum class NodeKind { Constant, Symbol, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class FuncKind { Exp, Ln, Sin, Cos, Sqrt };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable AST node for scalar expressions over named coordinates and
/// parameters. Power exponents are restricted to constants.
struct ExprNode {
  NodeKind kind;
  double value = 0.0;       // Constant payload; Pow exponent lives in b
  std::string name;         // Symbol payload
  FuncKind func = FuncKind::Exp;
  Expr a, b;
};

namespace ex {
Expr constant(double v);
Expr symbol(const std::string& name);
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, double exponent);
Expr call(FuncKind f, Expr a);
}  // namespace ex

/// Parse the expression DSL. Throws ParseError with a byte offset.
Expr parse(const std::string& text);

/// Canonical printer; emits the same grammar parse accepts.
std::string print(const Expr& e);

/// Structural AST equality.
bool equal(const Expr& a, const Expr& b);

/// Sorted, deduplicated list of symbol names not in `allowed`.
std::vector<std::string> validate_symbols(const Expr& e,
                                          const std::vector<std::string>& allowed);

/// Collect all symbol names (sorted, unique).
std::vector<std::string> symbols_of(const Expr& e);

/// Strict IEEE evaluation; domain errors throw EvalError naming the
/// offending subexpression and point.
double eval_scalar(const Expr& e, const std::map<std::string, double>& env);

/// Evaluate as an order-3 jet in the variables `var_order` at `point`.
/// Symbols not in var_order are looked up in `params` as constants.
Jet eval_jet(const Expr& e, std::span<const double> point,
             const std::vector<std::string>& var_order,
             const std::map<std::string, double>& params);

}  // namespace geolin
