#include "rknav/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "rknav/error.hpp"

namespace rknav {

namespace {

ExprPtr make_node(ExprOp op, ExprPtr a = nullptr, ExprPtr b = nullptr,
                  double value = 0.0, int coord = -1) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->coord = coord;
  return n;
}

//---------------------------------------------------------------- lexer

enum class Tok { number, ident, plus, minus, star, slash, caret,
                 lparen, rparen, comma, end };

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  Tok tok = Tok::end;
  double num = 0.0;
  std::string ident;
  size_t tok_col = 0;  // 1-based column of the current token

  explicit Lexer(const std::string& s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression error at column " << tok_col << " in '" << src
       << "': " << what;
    throw ConfigError(os.str());
  }

  void next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
    tok_col = pos + 1;
    if (pos >= src.size()) {
      tok = Tok::end;
      return;
    }
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
      size_t start = pos;
      while (pos < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos])))
        ++pos;
      if (pos < src.size() && src[pos] == '.') {
        ++pos;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          ++pos;
      }
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        size_t mark = pos;
        ++pos;
        if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
        if (pos < src.size() &&
            std::isdigit(static_cast<unsigned char>(src[pos]))) {
          while (pos < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[pos])))
            ++pos;
        } else {
          pos = mark;  // bare 'e' belongs to the next token
        }
      }
      num = std::strtod(src.substr(start, pos - start).c_str(), nullptr);
      tok = Tok::number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) ||
              src[pos] == '_'))
        ++pos;
      ident = src.substr(start, pos - start);
      tok = Tok::ident;
      return;
    }
    ++pos;
    switch (c) {
      case '+': tok = Tok::plus; return;
      case '-': tok = Tok::minus; return;
      case '*': tok = Tok::star; return;
      case '/': tok = Tok::slash; return;
      case '^': tok = Tok::caret; return;
      case '(': tok = Tok::lparen; return;
      case ')': tok = Tok::rparen; return;
      case ',': tok = Tok::comma; return;
      default: {
        std::ostringstream os;
        os << "unexpected character '" << c << "'";
        fail(os.str());
      }
    }
  }
};

//--------------------------------------------------------------- parser

struct Parser {
  Lexer lx;
  int dim;

  Parser(const std::string& s, int d) : lx(s), dim(d) {}

  int coord_index(const std::string& name) const {
    if (name == "x") return 0;
    if (name == "y") return 1;
    if (name == "z") return 2;
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) return std::atoi(name.c_str() + 1) - 1;
    }
    return -1;
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (lx.tok == Tok::plus || lx.tok == Tok::minus) {
      ExprOp op = (lx.tok == Tok::plus) ? ExprOp::add : ExprOp::sub;
      lx.next();
      e = make_node(op, e, parse_term());
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (lx.tok == Tok::star || lx.tok == Tok::slash) {
      ExprOp op = (lx.tok == Tok::star) ? ExprOp::mul : ExprOp::div;
      lx.next();
      e = make_node(op, e, parse_factor());
    }
    return e;
  }

  // unary minus binds looser than '^' (so -x^2 = -(x^2)), and the exponent
  // may itself be signed (2^-3)
  ExprPtr parse_factor() {
    if (lx.tok == Tok::minus) {
      lx.next();
      return make_node(ExprOp::neg, parse_factor());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (lx.tok == Tok::caret) {
      lx.next();
      return make_node(ExprOp::fn_pow, base, parse_factor());  // right assoc
    }
    return base;
  }

  ExprPtr parse_primary() {
    if (lx.tok == Tok::number) {
      double v = lx.num;
      lx.next();
      return make_node(ExprOp::constant, nullptr, nullptr, v);
    }
    if (lx.tok == Tok::lparen) {
      lx.next();
      ExprPtr e = parse_expr();
      if (lx.tok != Tok::rparen) lx.fail("expected ')'");
      lx.next();
      return e;
    }
    if (lx.tok == Tok::ident) {
      std::string name = lx.ident;
      size_t col = lx.tok_col;
      lx.next();
      if (lx.tok == Tok::lparen) {
        lx.next();
        std::vector<ExprPtr> args;
        args.push_back(parse_expr());
        while (lx.tok == Tok::comma) {
          lx.next();
          args.push_back(parse_expr());
        }
        if (lx.tok != Tok::rparen) lx.fail("expected ')'");
        lx.next();
        auto unary = [&](ExprOp op) {
          if (args.size() != 1) {
            lx.tok_col = col;
            lx.fail("function '" + name + "' takes one argument");
          }
          return make_node(op, args[0]);
        };
        if (name == "sin") return unary(ExprOp::fn_sin);
        if (name == "cos") return unary(ExprOp::fn_cos);
        if (name == "exp") return unary(ExprOp::fn_exp);
        if (name == "sqrt") return unary(ExprOp::fn_sqrt);
        if (name == "pow") {
          if (args.size() != 2) {
            lx.tok_col = col;
            lx.fail("function 'pow' takes two arguments");
          }
          return make_node(ExprOp::fn_pow, args[0], args[1]);
        }
        lx.tok_col = col;
        lx.fail("unknown function '" + name + "'");
      }
      int ci = coord_index(name);
      if (ci < 0 || ci >= dim) {
        lx.tok_col = col;
        lx.fail("unknown symbol '" + name + "' (coordinates are x1..x" +
                std::to_string(dim) + ")");
      }
      return make_node(ExprOp::coordinate, nullptr, nullptr, 0.0, ci);
    }
    lx.fail("expected a value");
  }
};

//----------------------------------------------------------- evaluation

bool is_constant(const ExprPtr& e, double& out) {
  if (e->op == ExprOp::constant) {
    out = e->value;
    return true;
  }
  if (e->op == ExprOp::neg) {
    double inner;
    if (is_constant(e->a, inner)) {
      out = -inner;
      return true;
    }
  }
  return false;
}

template <class T>
T eval_node(const ExprNode& n, const Vec& x, int dim);

template <>
double eval_node<double>(const ExprNode& n, const Vec& x, int dim) {
  switch (n.op) {
    case ExprOp::constant: return n.value;
    case ExprOp::coordinate: return x[n.coord];
    case ExprOp::add:
      return eval_node<double>(*n.a, x, dim) + eval_node<double>(*n.b, x, dim);
    case ExprOp::sub:
      return eval_node<double>(*n.a, x, dim) - eval_node<double>(*n.b, x, dim);
    case ExprOp::mul:
      return eval_node<double>(*n.a, x, dim) * eval_node<double>(*n.b, x, dim);
    case ExprOp::div: {
      double b = eval_node<double>(*n.b, x, dim);
      if (b == 0.0) throw NumericalError("division by zero in field expression");
      return eval_node<double>(*n.a, x, dim) / b;
    }
    case ExprOp::neg: return -eval_node<double>(*n.a, x, dim);
    case ExprOp::fn_sin: return std::sin(eval_node<double>(*n.a, x, dim));
    case ExprOp::fn_cos: return std::cos(eval_node<double>(*n.a, x, dim));
    case ExprOp::fn_exp: return std::exp(eval_node<double>(*n.a, x, dim));
    case ExprOp::fn_sqrt: {
      double a = eval_node<double>(*n.a, x, dim);
      if (a < 0.0)
        throw NumericalError("sqrt of negative value in field expression");
      return std::sqrt(a);
    }
    case ExprOp::fn_pow: {
      double a = eval_node<double>(*n.a, x, dim);
      double p;
      if (is_constant(n.b, p)) {
        double v = std::pow(a, p);
        if (!std::isfinite(v))
          throw NumericalError("pow produced a non-finite value");
        return v;
      }
      if (a <= 0.0)
        throw NumericalError("pow with non-constant exponent needs positive base");
      return std::pow(a, eval_node<double>(*n.b, x, dim));
    }
  }
  throw NumericalError("corrupt expression node");
}

template <>
Jet eval_node<Jet>(const ExprNode& n, const Vec& x, int dim) {
  switch (n.op) {
    case ExprOp::constant: return Jet(n.value, dim);
    case ExprOp::coordinate: return Jet::variable(x[n.coord], dim, n.coord);
    case ExprOp::add:
      return eval_node<Jet>(*n.a, x, dim) + eval_node<Jet>(*n.b, x, dim);
    case ExprOp::sub:
      return eval_node<Jet>(*n.a, x, dim) - eval_node<Jet>(*n.b, x, dim);
    case ExprOp::mul:
      return eval_node<Jet>(*n.a, x, dim) * eval_node<Jet>(*n.b, x, dim);
    case ExprOp::div:
      return eval_node<Jet>(*n.a, x, dim) / eval_node<Jet>(*n.b, x, dim);
    case ExprOp::neg: return -eval_node<Jet>(*n.a, x, dim);
    case ExprOp::fn_sin: return sin(eval_node<Jet>(*n.a, x, dim));
    case ExprOp::fn_cos: return cos(eval_node<Jet>(*n.a, x, dim));
    case ExprOp::fn_exp: return exp(eval_node<Jet>(*n.a, x, dim));
    case ExprOp::fn_sqrt: return sqrt(eval_node<Jet>(*n.a, x, dim));
    case ExprOp::fn_pow: {
      Jet a = eval_node<Jet>(*n.a, x, dim);
      double p;
      if (is_constant(n.b, p)) return pow_const(a, p);
      return pow(a, eval_node<Jet>(*n.b, x, dim));
    }
  }
  throw NumericalError("corrupt expression node");
}

//------------------------------------------------------------ printing

void print_node(const ExprNode& n, std::ostream& os);

void print_child(const ExprPtr& e, std::ostream& os) {
  bool atom = e->op == ExprOp::constant || e->op == ExprOp::coordinate ||
              e->op == ExprOp::fn_sin || e->op == ExprOp::fn_cos ||
              e->op == ExprOp::fn_exp || e->op == ExprOp::fn_sqrt;
  if (!atom) os << '(';
  print_node(*e, os);
  if (!atom) os << ')';
}

void print_node(const ExprNode& n, std::ostream& os) {
  switch (n.op) {
    case ExprOp::constant: os << n.value; return;
    case ExprOp::coordinate: os << "x" << (n.coord + 1); return;
    case ExprOp::add: print_child(n.a, os); os << " + "; print_child(n.b, os); return;
    case ExprOp::sub: print_child(n.a, os); os << " - "; print_child(n.b, os); return;
    case ExprOp::mul: print_child(n.a, os); os << "*"; print_child(n.b, os); return;
    case ExprOp::div: print_child(n.a, os); os << "/"; print_child(n.b, os); return;
    case ExprOp::neg: os << "-"; print_child(n.a, os); return;
    case ExprOp::fn_sin: os << "sin("; print_node(*n.a, os); os << ")"; return;
    case ExprOp::fn_cos: os << "cos("; print_node(*n.a, os); os << ")"; return;
    case ExprOp::fn_exp: os << "exp("; print_node(*n.a, os); os << ")"; return;
    case ExprOp::fn_sqrt: os << "sqrt("; print_node(*n.a, os); os << ")"; return;
    case ExprOp::fn_pow:
      os << "pow(";
      print_node(*n.a, os);
      os << ", ";
      print_node(*n.b, os);
      os << ")";
      return;
  }
}

}  // namespace

ScalarField ScalarField::parse(const std::string& source, int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw ConfigError("expression dimension out of range");
  Parser p(source, dim);
  ExprPtr root = p.parse_expr();
  if (p.lx.tok != Tok::end) p.lx.fail("unexpected trailing input");
  return ScalarField(root, dim);
}

ScalarField ScalarField::constant(double c, int dim) {
  return ScalarField(make_node(ExprOp::constant, nullptr, nullptr, c), dim);
}

ScalarField ScalarField::coordinate(int index, int dim) {
  if (index < 0 || index >= dim)
    throw ConfigError("coordinate index out of range");
  return ScalarField(make_node(ExprOp::coordinate, nullptr, nullptr, 0.0, index),
                     dim);
}

double ScalarField::eval(const Vec& x) const {
  return eval_node<double>(*root_, x, dim_);
}

Jet ScalarField::eval_jet(const Vec& x) const {
  return eval_node<Jet>(*root_, x, dim_);
}

std::string ScalarField::to_string() const {
  if (!root_) return "<empty>";
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_node(ExprOp::add, a.root_, b.root_), a.dim_);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_node(ExprOp::sub, a.root_, b.root_), a.dim_);
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_node(ExprOp::mul, a.root_, b.root_), a.dim_);
}

ScalarField operator-(const ScalarField& a) {
  return ScalarField(make_node(ExprOp::neg, a.root_), a.dim_);
}

}  // namespace rknav
