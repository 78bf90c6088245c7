#include "netflow/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace netflow {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

Expr::Expr() : Expr(Number{0.0}) {}
Expr::Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

Expr Expr::number(double v) {
  if (!std::isfinite(v) || v < 0.0 || std::signbit(v)) {
    throw std::invalid_argument("number literal must be finite and nonnegative");
  }
  return Expr(Number{v});
}
Expr Expr::variable(char name) { return Expr(Variable{name}); }
Expr Expr::pi() { return Expr(Pi{}); }
Expr Expr::unary(UnaryOp op, Expr operand) { return Expr(Unary{op, std::move(operand)}); }
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) { return Expr(Binary{op, std::move(lhs), std::move(rhs)}); }
Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("exponent must be nonnegative");
  return Expr(Power{std::move(base), exponent});
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double int_pow(double base, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace

double Expr::operator()(double value) const {
  return std::visit(overloaded{
                        [](const Number& n) { return n.value; },
                        [&](const Variable&) { return value; },
                        [](const Pi&) { return std::numbers::pi; },
                        [&](const Unary& u) {
                          const double a = u.operand(value);
                          switch (u.op) {
                            case UnaryOp::Neg: return -a;
                            case UnaryOp::Sin: return std::sin(a);
                            case UnaryOp::Cos: return std::cos(a);
                          }
                          return a;
                        },
                        [&](const Binary& b) {
                          const double l = b.lhs(value);
                          const double r = b.rhs(value);
                          switch (b.op) {
                            case BinaryOp::Add: return l + r;
                            case BinaryOp::Sub: return l - r;
                            case BinaryOp::Mul: return l * r;
                            case BinaryOp::Div:
                              if (r == 0.0) throw EvalError("division by zero at " + std::to_string(value));
                              return l / r;
                          }
                          return l;
                        },
                        [&](const Power& p) { return int_pow(p.base(value), p.exponent); },
                    },
                    *node_);
}

bool Expr::depends_on_variable() const {
  return std::visit(overloaded{
                        [](const Number&) { return false; },
                        [](const Variable&) { return true; },
                        [](const Pi&) { return false; },
                        [](const Unary& u) { return u.operand.depends_on_variable(); },
                        [](const Binary& b) { return b.lhs.depends_on_variable() || b.rhs.depends_on_variable(); },
                        [](const Power& p) { return p.base.depends_on_variable(); },
                    },
                    *node_);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->index() != b.node_->index()) return false;
  return std::visit(overloaded{
                        [&](const Expr::Number& n) { return n.value == std::get<Expr::Number>(*b.node_).value; },
                        [&](const Expr::Variable& v) { return v.name == std::get<Expr::Variable>(*b.node_).name; },
                        [](const Expr::Pi&) { return true; },
                        [&](const Expr::Unary& u) {
                          const auto& o = std::get<Expr::Unary>(*b.node_);
                          return u.op == o.op && u.operand == o.operand;
                        },
                        [&](const Expr::Binary& x) {
                          const auto& o = std::get<Expr::Binary>(*b.node_);
                          return x.op == o.op && x.lhs == o.lhs && x.rhs == o.rhs;
                        },
                        [&](const Expr::Power& p) {
                          const auto& o = std::get<Expr::Power>(*b.node_);
                          return p.exponent == o.exponent && p.base == o.base;
                        },
                    },
                    *a.node_);
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Number, Var, Pi, Sin, Cos, LParen, RParen, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::vector<Token> tokenize(std::string_view src, char variable) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      while (i < src.size() && is_digit(src[i])) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
          while (j < src.size() && is_digit(src[j])) ++j;
          i = j;
        }
      }
      out.push_back({Tok::Number, start, src.substr(start, i - start)});
      continue;
    }
    if (is_alpha(c)) {
      while (i < src.size() && (is_alpha(src[i]) || is_digit(src[i]))) ++i;
      const auto word = src.substr(start, i - start);
      Tok kind;
      if (word.size() == 1 && word[0] == variable) {
        kind = Tok::Var;
      } else if (word == "pi") {
        kind = Tok::Pi;
      } else if (word == "sin") {
        kind = Tok::Sin;
      } else if (word == "cos") {
        kind = Tok::Cos;
      } else {
        throw ParseError(ParseError::Kind::Lexical, start, "unknown identifier '" + std::string(word) + "'");
      }
      out.push_back({kind, start, word});
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      default:
        throw ParseError(ParseError::Kind::Lexical, start, std::string("unexpected character '") + c + "'");
    }
    ++i;
    out.push_back({kind, start, src.substr(start, 1)});
  }
  out.push_back({Tok::End, src.size(), {}});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, char variable) : toks_(std::move(tokens)), variable_(variable) {}

  Expr parse() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, peek().offset, msg);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const auto op = take().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = Expr::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const auto op = take().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = Expr::binary(op, std::move(lhs), factor());
    }
    return lhs;
  }

  Expr factor() {
    Expr base = atom();
    if (peek().kind != Tok::Caret) return base;
    ++pos_;
    const Token& tok = peek();
    if (tok.kind != Tok::Number) fail("expected integer exponent");
    if (tok.text.find_first_of(".eE") != std::string_view::npos) {
      throw ParseError(ParseError::Kind::NonIntegerExponent, tok.offset,
                       "exponent '" + std::string(tok.text) + "' is not an integer");
    }
    int n = 0;
    const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), n);
    if (ec != std::errc() || n > 1'000'000) {
      throw ParseError(ParseError::Kind::NonIntegerExponent, tok.offset, "exponent out of range");
    }
    ++pos_;
    return Expr::power(std::move(base), n);
  }

  Expr atom() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number: {
        ++pos_;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc() || !std::isfinite(v)) {
          throw ParseError(ParseError::Kind::Lexical, tok.offset, "bad number '" + std::string(tok.text) + "'");
        }
        return Expr::number(v);
      }
      case Tok::Var: ++pos_; return Expr::variable(variable_);
      case Tok::Pi: ++pos_; return Expr::pi();
      case Tok::Sin:
      case Tok::Cos: {
        const auto op = take().kind == Tok::Sin ? UnaryOp::Sin : UnaryOp::Cos;
        expect(Tok::LParen, "'('");
        Expr arg = expr();
        expect(Tok::RParen, "')'");
        return Expr::unary(op, std::move(arg));
      }
      case Tok::LParen: {
        ++pos_;
        Expr inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Minus: ++pos_; return Expr::unary(UnaryOp::Neg, atom());
      case Tok::End: fail("unexpected end of input");
      default: fail("unexpected '" + std::string(tok.text) + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  char variable_;
};

}  // namespace

Expr parse_expr(std::string_view source, char variable) {
  return Parser(tokenize(source, variable), variable).parse();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// 4 atom, 3 factor, 2 term, 1 expr
int level(const Expr& e) {
  return std::visit(overloaded{
                        [](const Expr::Power&) { return 3; },
                        [](const Expr::Binary& b) { return b.op == BinaryOp::Add || b.op == BinaryOp::Sub ? 1 : 2; },
                        [](const auto&) { return 4; },
                    },
                    e.node());
}

void print(const Expr& e, std::string& out);

void print_at(const Expr& e, int required, std::string& out) {
  if (level(e) >= required) {
    print(e, out);
  } else {
    out += '(';
    print(e, out);
    out += ')';
  }
}

void print(const Expr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const Expr::Number& n) {
                   char buf[64];
                   const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
                   out.append(buf, res.ptr);
                 },
                 [&](const Expr::Variable& v) { out += v.name; },
                 [&](const Expr::Pi&) { out += "pi"; },
                 [&](const Expr::Unary& u) {
                   if (u.op == UnaryOp::Neg) {
                     out += '-';
                     print_at(u.operand, 4, out);
                     return;
                   }
                   out += u.op == UnaryOp::Sin ? "sin(" : "cos(";
                   print(u.operand, out);
                   out += ')';
                 },
                 [&](const Expr::Binary& b) {
                   const bool additive = b.op == BinaryOp::Add || b.op == BinaryOp::Sub;
                   print_at(b.lhs, additive ? 1 : 2, out);
                   switch (b.op) {
                     case BinaryOp::Add: out += " + "; break;
                     case BinaryOp::Sub: out += " - "; break;
                     case BinaryOp::Mul: out += '*'; break;
                     case BinaryOp::Div: out += '/'; break;
                   }
                   print_at(b.rhs, additive ? 2 : 3, out);
                 },
                 [&](const Expr::Power& p) {
                   print_at(p.base, 4, out);
                   out += '^';
                   out += std::to_string(p.exponent);
                 },
             },
             e.node());
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Structural analysis

namespace {

struct Affine {
  double slope;
  double intercept;
};

std::optional<Affine> affine(const Expr& e) {
  if (!e.depends_on_variable()) {
    try {
      return Affine{0.0, e(0.0)};
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }
  return std::visit(overloaded{
                        [](const Expr::Variable&) -> std::optional<Affine> { return Affine{1.0, 0.0}; },
                        [](const Expr::Unary& u) -> std::optional<Affine> {
                          if (u.op != UnaryOp::Neg) return std::nullopt;
                          auto a = affine(u.operand);
                          if (!a) return std::nullopt;
                          return Affine{-a->slope, -a->intercept};
                        },
                        [](const Expr::Binary& b) -> std::optional<Affine> {
                          auto l = affine(b.lhs);
                          auto r = affine(b.rhs);
                          if (!l || !r) return std::nullopt;
                          switch (b.op) {
                            case BinaryOp::Add: return Affine{l->slope + r->slope, l->intercept + r->intercept};
                            case BinaryOp::Sub: return Affine{l->slope - r->slope, l->intercept - r->intercept};
                            case BinaryOp::Mul:
                              if (l->slope == 0.0) return Affine{l->intercept * r->slope, l->intercept * r->intercept};
                              if (r->slope == 0.0) return Affine{r->intercept * l->slope, r->intercept * l->intercept};
                              return std::nullopt;
                            case BinaryOp::Div:
                              if (r->slope != 0.0 || r->intercept == 0.0) return std::nullopt;
                              return Affine{l->slope / r->intercept, l->intercept / r->intercept};
                          }
                          return std::nullopt;
                        },
                        [](const Expr::Power& p) -> std::optional<Affine> {
                          if (p.exponent == 1) return affine(p.base);
                          return std::nullopt;
                        },
                        [](const auto&) -> std::optional<Affine> { return std::nullopt; },
                    },
                    e.node());
}

ShiftParity combine_product(ShiftParity a, ShiftParity b) {
  if (a == ShiftParity::Unknown || b == ShiftParity::Unknown) return ShiftParity::Unknown;
  return a == b ? ShiftParity::Periodic : ShiftParity::Antiperiodic;
}

void collect_trig_zeros(const Expr& e, std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const Expr::Unary& u) {
                   collect_trig_zeros(u.operand, out);
                   if (u.op == UnaryOp::Neg || !u.operand.depends_on_variable()) return;
                   const auto a = affine(u.operand);
                   if (!a || a->slope == 0.0) return;
                   // sin vanishes at j*pi, cos at (j + 1/2)*pi.
                   const double shift = u.op == UnaryOp::Cos ? 0.5 * std::numbers::pi : 0.0;
                   const double lo = std::min(a->intercept, a->slope + a->intercept) - shift;
                   const double hi = std::max(a->intercept, a->slope + a->intercept) - shift;
                   const auto j_lo = static_cast<long long>(std::floor(lo / std::numbers::pi)) - 1;
                   const auto j_hi = static_cast<long long>(std::ceil(hi / std::numbers::pi)) + 1;
                   for (long long j = j_lo; j <= j_hi; ++j) {
                     const double t = (static_cast<double>(j) * std::numbers::pi + shift - a->intercept) / a->slope;
                     if (t >= 0.0 && t < 1.0) out.push_back(t);
                   }
                 },
                 [&](const Expr::Binary& b) {
                   collect_trig_zeros(b.lhs, out);
                   collect_trig_zeros(b.rhs, out);
                 },
                 [&](const Expr::Power& p) { collect_trig_zeros(p.base, out); },
                 [](const auto&) {},
             },
             e.node());
}

}  // namespace

ShiftParity shift_parity(const Expr& e) {
  if (!e.depends_on_variable()) return ShiftParity::Periodic;
  return std::visit(overloaded{
                        [](const Expr::Unary& u) {
                          if (u.op == UnaryOp::Neg) return shift_parity(u.operand);
                          const auto a = affine(u.operand);
                          if (!a) return ShiftParity::Unknown;
                          const double k = a->slope / std::numbers::pi;
                          const double rounded = std::round(k);
                          if (std::abs(k - rounded) > 1e-9) return ShiftParity::Unknown;
                          const auto ki = static_cast<long long>(rounded);
                          return ki % 2 == 0 ? ShiftParity::Periodic : ShiftParity::Antiperiodic;
                        },
                        [](const Expr::Binary& b) {
                          const auto l = shift_parity(b.lhs);
                          const auto r = shift_parity(b.rhs);
                          if (b.op == BinaryOp::Mul || b.op == BinaryOp::Div) return combine_product(l, r);
                          return l == r ? l : ShiftParity::Unknown;
                        },
                        [](const Expr::Power& p) {
                          const auto base = shift_parity(p.base);
                          if (base == ShiftParity::Antiperiodic && p.exponent % 2 == 0) return ShiftParity::Periodic;
                          return base;
                        },
                        [](const auto&) { return ShiftParity::Unknown; },
                    },
                    e.node());
}

std::vector<double> trig_zero_times(const Expr& e) {
  std::vector<double> out;
  collect_trig_zeros(e, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            out.end());
  return out;
}

}  // namespace netflow
