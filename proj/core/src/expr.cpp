#include "geolin/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>

#include "geolin/errors.hpp"

namespace geolin {

namespace ex {

Expr constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}
Expr symbol(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Symbol;
  n->name = name;
  return n;
}
static Expr binary(NodeKind k, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
Expr neg(Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Neg;
  n->a = std::move(a);
  return n;
}
Expr add(Expr a, Expr b) { return binary(NodeKind::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return binary(NodeKind::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return binary(NodeKind::Mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return binary(NodeKind::Div, std::move(a), std::move(b)); }
Expr pow(Expr a, double exponent) {
  return binary(NodeKind::Pow, std::move(a), constant(exponent));
}
Expr call(FuncKind f, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Func;
  n->func = f;
  n->a = std::move(a);
  return n;
}

}  // namespace ex

// ---------------------------------------------------------------- parser

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) e = ex::add(e, parse_term());
      else if (accept('-')) e = ex::sub(e, parse_term());
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) e = ex::mul(e, parse_unary());
      else if (accept('/')) e = ex::div(e, parse_unary());
      else return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return ex::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_ws();
    if (accept('^')) {
      std::size_t exp_off = pos;
      Expr exponent = parse_unary();  // right-associative
      auto folded = fold_constant(exponent);
      if (!folded) throw ParseError("non-constant exponent", exp_off);
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::Pow;
      n->a = base;
      n->b = ex::constant(*folded);
      return n;
    }
    return base;
  }

  static std::optional<double> fold_constant(const Expr& e) {
    switch (e->kind) {
      case NodeKind::Constant: return e->value;
      case NodeKind::Symbol: return std::nullopt;
      case NodeKind::Neg: {
        auto a = fold_constant(e->a);
        return a ? std::optional<double>(-*a) : std::nullopt;
      }
      case NodeKind::Add:
      case NodeKind::Sub:
      case NodeKind::Mul:
      case NodeKind::Div:
      case NodeKind::Pow: {
        auto a = fold_constant(e->a), b = fold_constant(e->b);
        if (!a || !b) return std::nullopt;
        switch (e->kind) {
          case NodeKind::Add: return *a + *b;
          case NodeKind::Sub: return *a - *b;
          case NodeKind::Mul: return *a * *b;
          case NodeKind::Div: return *a / *b;
          default: return std::pow(*a, *b);
        }
      }
      case NodeKind::Func: {
        auto a = fold_constant(e->a);
        if (!a) return std::nullopt;
        switch (e->func) {
          case FuncKind::Exp: return std::exp(*a);
          case FuncKind::Ln: return std::log(*a);
          case FuncKind::Sin: return std::sin(*a);
          case FuncKind::Cos: return std::cos(*a);
          case FuncKind::Sqrt: return std::sqrt(*a);
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail("unexpected character");
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t save = pos;
      ++pos;
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      } else {
        pos = save;  // 'e' belongs to an identifier that follows
      }
    }
    if (pos == start) fail("malformed number");
    return ex::constant(std::stod(s.substr(start, pos - start)));
  }

  Expr parse_ident() {
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    std::string name = s.substr(start, pos - start);
    skip_ws();
    if (pos < s.size() && s[pos] == '(') {
      FuncKind f;
      if (name == "exp") f = FuncKind::Exp;
      else if (name == "ln") f = FuncKind::Ln;
      else if (name == "sin") f = FuncKind::Sin;
      else if (name == "cos") f = FuncKind::Cos;
      else if (name == "sqrt") f = FuncKind::Sqrt;
      else {
        pos = start;
        fail("unknown function '" + name + "'");
      }
      ++pos;  // '('
      Expr arg = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return ex::call(f, arg);
    }
    return ex::symbol(name);
  }
};

}  // namespace

Expr parse(const std::string& text) {
  Parser p(text);
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

// --------------------------------------------------------------- printer

namespace {

// precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5
int prec_of(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    case NodeKind::Constant: return e->value < 0 ? 3 : 5;
    default: return 5;
  }
}

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_rec(const Expr& e, std::ostringstream& out, int min_prec) {
  int p = prec_of(e);
  bool paren = p < min_prec;
  if (paren) out << '(';
  switch (e->kind) {
    case NodeKind::Constant: out << num_str(e->value); break;
    case NodeKind::Symbol: out << e->name; break;
    case NodeKind::Neg:
      out << '-';
      print_rec(e->a, out, 3);
      break;
    case NodeKind::Add:
      print_rec(e->a, out, 1);
      out << " + ";
      print_rec(e->b, out, 2);
      break;
    case NodeKind::Sub:
      print_rec(e->a, out, 1);
      out << " - ";
      print_rec(e->b, out, 2);
      break;
    case NodeKind::Mul:
      print_rec(e->a, out, 2);
      out << '*';
      print_rec(e->b, out, 3);
      break;
    case NodeKind::Div:
      print_rec(e->a, out, 2);
      out << '/';
      print_rec(e->b, out, 3);
      break;
    case NodeKind::Pow:
      print_rec(e->a, out, 5);
      out << '^';
      print_rec(e->b, out, 3);
      break;
    case NodeKind::Func:
      switch (e->func) {
        case FuncKind::Exp: out << "exp("; break;
        case FuncKind::Ln: out << "ln("; break;
        case FuncKind::Sin: out << "sin("; break;
        case FuncKind::Cos: out << "cos("; break;
        case FuncKind::Sqrt: out << "sqrt("; break;
      }
      print_rec(e->a, out, 0);
      out << ')';
      break;
  }
  if (paren) out << ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::ostringstream out;
  print_rec(e, out, 0);
  return out.str();
}

bool equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant: return a->value == b->value;
    case NodeKind::Symbol: return a->name == b->name;
    case NodeKind::Neg: return equal(a->a, b->a);
    case NodeKind::Func: return a->func == b->func && equal(a->a, b->a);
    default: return equal(a->a, b->a) && equal(a->b, b->b);
  }
}

static void collect_symbols(const Expr& e, std::set<std::string>& out) {
  switch (e->kind) {
    case NodeKind::Symbol: out.insert(e->name); break;
    case NodeKind::Constant: break;
    case NodeKind::Neg:
    case NodeKind::Func: collect_symbols(e->a, out); break;
    default:
      collect_symbols(e->a, out);
      collect_symbols(e->b, out);
  }
}

std::vector<std::string> symbols_of(const Expr& e) {
  std::set<std::string> s;
  collect_symbols(e, s);
  return {s.begin(), s.end()};
}

std::vector<std::string> validate_symbols(const Expr& e,
                                          const std::vector<std::string>& allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  std::vector<std::string> bad;
  for (const auto& name : symbols_of(e))
    if (!ok.count(name)) bad.push_back(name);
  return bad;
}

// ------------------------------------------------------------- evaluation

namespace {

template <class Ctx>
typename Ctx::V eval_rec(const Expr& e, Ctx& ctx) {
  using V = typename Ctx::V;
  switch (e->kind) {
    case NodeKind::Constant: return ctx.constant(e->value);
    case NodeKind::Symbol: return ctx.symbol(e->name, e);
    case NodeKind::Neg: return -eval_rec(e->a, ctx);
    case NodeKind::Add: return eval_rec(e->a, ctx) + eval_rec(e->b, ctx);
    case NodeKind::Sub: return eval_rec(e->a, ctx) - eval_rec(e->b, ctx);
    case NodeKind::Mul: return eval_rec(e->a, ctx) * eval_rec(e->b, ctx);
    case NodeKind::Div: {
      V num = eval_rec(e->a, ctx);
      V den = eval_rec(e->b, ctx);
      if (ctx.value_of(den) == 0.0) ctx.fail("division by zero", e);
      return num / den;
    }
    case NodeKind::Pow: {
      V base = eval_rec(e->a, ctx);
      double c = e->b->value;
      if (std::round(c) != c && ctx.value_of(base) <= 0.0)
        ctx.fail("non-integer power of non-positive base", e);
      if (c < 0.0 && ctx.value_of(base) == 0.0)
        ctx.fail("negative power of zero", e);
      return ctx.pow(base, c);
    }
    case NodeKind::Func: {
      V arg = eval_rec(e->a, ctx);
      double av = ctx.value_of(arg);
      switch (e->func) {
        case FuncKind::Exp: return ctx.fexp(arg);
        case FuncKind::Ln:
          if (av <= 0.0) ctx.fail("ln of non-positive argument", e);
          return ctx.flog(arg);
        case FuncKind::Sin: return ctx.fsin(arg);
        case FuncKind::Cos: return ctx.fcos(arg);
        case FuncKind::Sqrt:
          if (av <= 0.0) ctx.fail("sqrt of non-positive argument", e);
          return ctx.fsqrt(arg);
      }
      ctx.fail("unhandled function", e);
    }
  }
  ctx.fail("unhandled node", e);
}

struct ScalarCtx {
  using V = double;
  const std::map<std::string, double>& env;

  double constant(double v) const { return v; }
  double symbol(const std::string& name, const Expr& node) {
    auto it = env.find(name);
    if (it == env.end()) fail("unknown symbol '" + name + "'", node);
    return it->second;
  }
  double value_of(double v) const { return v; }
  double pow(double b, double c) const { return std::pow(b, c); }
  double fexp(double v) const { return std::exp(v); }
  double flog(double v) const { return std::log(v); }
  double fsin(double v) const { return std::sin(v); }
  double fcos(double v) const { return std::cos(v); }
  double fsqrt(double v) const { return std::sqrt(v); }

  [[noreturn]] void fail(const std::string& msg, const Expr& node) const {
    std::ostringstream os;
    os << msg << " in '" << print(node) << "' at {";
    bool first = true;
    for (const auto& [k, v] : env) {
      if (!first) os << ", ";
      os << k << "=" << v;
      first = false;
    }
    os << "}";
    throw EvalError(os.str());
  }
};

struct JetCtx {
  using V = Jet;
  std::span<const double> point;
  const std::vector<std::string>& var_order;
  const std::map<std::string, double>& params;
  int n;

  Jet constant(double v) const { return Jet::constant(n, v); }
  Jet symbol(const std::string& name, const Expr& node) {
    for (int i = 0; i < n; ++i)
      if (var_order[i] == name) return Jet::variable(n, i, point[i]);
    auto it = params.find(name);
    if (it == params.end()) fail("unknown symbol '" + name + "'", node);
    return Jet::constant(n, it->second);
  }
  double value_of(const Jet& v) const { return v.value(); }
  Jet pow(const Jet& b, double c) const { return jet_pow(b, c); }
  Jet fexp(const Jet& v) const { return jet_exp(v); }
  Jet flog(const Jet& v) const { return jet_log(v); }
  Jet fsin(const Jet& v) const { return jet_sin(v); }
  Jet fcos(const Jet& v) const { return jet_cos(v); }
  Jet fsqrt(const Jet& v) const { return jet_sqrt(v); }

  [[noreturn]] void fail(const std::string& msg, const Expr& node) const {
    std::ostringstream os;
    os << msg << " in '" << print(node) << "' at (";
    for (int i = 0; i < n; ++i) {
      if (i) os << ", ";
      os << var_order[i] << "=" << point[i];
    }
    os << ")";
    throw EvalError(os.str());
  }
};

}  // namespace

double eval_scalar(const Expr& e, const std::map<std::string, double>& env) {
  ScalarCtx ctx{env};
  return eval_rec(e, ctx);
}

Jet eval_jet(const Expr& e, std::span<const double> point,
             const std::vector<std::string>& var_order,
             const std::map<std::string, double>& params) {
  JetCtx ctx{point, var_order, params, static_cast<int>(var_order.size())};
  return eval_rec(e, ctx);
}

}  // namespace geolin
