#include "hoferlab/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "hoferlab/errors.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab::expr {

namespace {

constexpr double kAbsSmoothing = 1e-24;

Ast make(Op op, double value, int ival, Ast a = nullptr, Ast b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->ival = ival;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool num_value(const Ast& a, double& out) {
  if (a->op != Op::Num) return false;
  out = a->value;
  return true;
}

double apply_unary(Op op, double u) {
  switch (op) {
    case Op::Neg: return -u;
    case Op::Sin: return std::sin(u);
    case Op::Cos: return std::cos(u);
    case Op::Exp: return std::exp(u);
    case Op::Sqrt:
      if (u < 0.0) throw Error(ErrorKind::DomainError, "sqrt of negative value");
      return std::sqrt(u);
    case Op::Abs: return std::sqrt(u * u + kAbsSmoothing);
    default: break;
  }
  return u;
}

double checked_div(double n, double d, int guard) {
  if (d == 0.0 || (guard > 0 && d < 0.0) || (guard < 0 && d > 0.0)) {
    throw Error(ErrorKind::DomainError, "division guard violated");
  }
  return n / d;
}

double int_pow(double u, int n) {
  double r = 1.0;
  double b = u;
  unsigned e = unsigned(n);
  while (e) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1u;
  }
  return r;
}

}  // namespace

char var_name(Var v) {
  static constexpr char names[] = {'x', 'y', 'z', 't'};
  return names[std::size_t(v)];
}

double bump_value(double r, double width, int order) {
  if (order == 0) {
    if (r <= 0.0) return 1.0;
    if (r >= width) return 0.0;
  } else if (r <= 0.0 || r >= width) {
    return 0.0;
  }
  const double u = r / width;
  double s = 0.0;
  switch (order) {
    case 0: return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    case 1: s = 30.0 * u * u * (1.0 - u) * (1.0 - u); break;
    case 2: s = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); break;
    case 3: s = 60.0 - 360.0 * u + 360.0 * u * u; break;
    case 4: s = -360.0 + 720.0 * u; break;
    case 5: s = 720.0; break;
    default: return 0.0;
  }
  return -s / int_pow(width, order);
}

// ---------------------------------------------------------------------------
// Constructors

bool is_num(const Ast& a, double v) { return a->op == Op::Num && a->value == v; }

Ast num(double v) { return make(Op::Num, v == 0.0 ? 0.0 : v, 0); }

Ast var(Var v) { return make(Op::Var, 0.0, int(v)); }

Ast neg(Ast a) {
  double v;
  if (num_value(a, v)) return num(-v);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, 0.0, 0, std::move(a));
}

namespace {
Ast unary(Op op, Ast a) {
  double v;
  if (num_value(a, v)) return num(apply_unary(op, v));
  return make(op, 0.0, 0, std::move(a));
}
}  // namespace

Ast sin(Ast a) { return unary(Op::Sin, std::move(a)); }
Ast cos(Ast a) { return unary(Op::Cos, std::move(a)); }
Ast exp(Ast a) { return unary(Op::Exp, std::move(a)); }
Ast sqrt(Ast a) { return unary(Op::Sqrt, std::move(a)); }
Ast abs(Ast a) { return unary(Op::Abs, std::move(a)); }

Ast add(Ast a, Ast b) {
  double x, y;
  if (num_value(a, x) && num_value(b, y)) return num(x + y);
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return make(Op::Add, 0.0, 0, std::move(a), std::move(b));
}

Ast sub(Ast a, Ast b) {
  double x, y;
  if (num_value(a, x) && num_value(b, y)) return num(x - y);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(std::move(b));
  return make(Op::Sub, 0.0, 0, std::move(a), std::move(b));
}

Ast mul(Ast a, Ast b) {
  double x, y;
  if (num_value(a, x) && num_value(b, y)) return num(x * y);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a, -1.0)) return neg(std::move(b));
  if (is_num(b, -1.0)) return neg(std::move(a));
  return make(Op::Mul, 0.0, 0, std::move(a), std::move(b));
}

Ast div(Ast a, Ast b, int guard_sign) {
  double x, y;
  if (num_value(b, y)) {
    if (y == 0.0 || (guard_sign > 0) != (y > 0.0)) {
      throw Error(ErrorKind::UnguardedDivision, "constant denominator violates its guard");
    }
    if (num_value(a, x)) return num(x / y);
    if (y == 1.0) return a;
  }
  if (is_num(a, 0.0)) return num(0.0);
  return make(Op::Div, 0.0, guard_sign >= 0 ? 1 : -1, std::move(a), std::move(b));
}

Ast pow(Ast a, int n) {
  if (n < 0) throw Error(ErrorKind::SyntaxError, "negative exponent");
  double x;
  if (n == 0) return num(1.0);
  if (n == 1) return a;
  if (num_value(a, x)) return num(int_pow(x, n));
  if (a->op == Op::Pow) return make(Op::Pow, 0.0, a->ival * n, a->a);
  return make(Op::Pow, 0.0, n, std::move(a));
}

Ast bump(Ast r, double width, int order) {
  if (!(width > 0.0)) throw Error(ErrorKind::SyntaxError, "bump width must be positive");
  if (order > 5) return num(0.0);
  double x;
  if (num_value(r, x)) return num(bump_value(x, width, order));
  return make(Op::Bump, width, order, std::move(r));
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const Ast& a, const Bindings& b) {
  switch (a->op) {
    case Op::Num: return a->value;
    case Op::Var: return b[std::size_t(a->ival)];
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Sqrt:
    case Op::Abs: return apply_unary(a->op, evaluate(a->a, b));
    case Op::Add: return evaluate(a->a, b) + evaluate(a->b, b);
    case Op::Sub: return evaluate(a->a, b) - evaluate(a->b, b);
    case Op::Mul: return evaluate(a->a, b) * evaluate(a->b, b);
    case Op::Div: return checked_div(evaluate(a->a, b), evaluate(a->b, b), a->ival);
    case Op::Pow: return int_pow(evaluate(a->a, b), a->ival);
    case Op::Bump: return bump_value(evaluate(a->a, b), a->value, a->ival);
  }
  return 0.0;
}

bool uses_var(const Ast& a, Var v) {
  if (!a) return false;
  if (a->op == Op::Var) return a->ival == int(v);
  return uses_var(a->a, v) || uses_var(a->b, v);
}

std::size_t node_count(const Ast& a) {
  if (!a) return 0;
  return 1 + node_count(a->a) + node_count(a->b);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), std::fabs(v));
  std::string s(buf, res.ptr);
  if (std::signbit(v) && v != 0.0) return "(-" + s + ")";
  return s;
}

void print_to(const Ast& a, std::string& out);

void print_call(const char* name, const Ast& a, std::string& out) {
  out += name;
  out += '(';
  print_to(a, out);
  out += ')';
}

void print_binary(const Ast& a, char op, std::string& out) {
  out += '(';
  print_to(a->a, out);
  out += ' ';
  out += op;
  out += ' ';
  print_to(a->b, out);
  out += ')';
}

void print_to(const Ast& a, std::string& out) {
  switch (a->op) {
    case Op::Num: out += format_number(a->value); break;
    case Op::Var: out += var_name(Var(a->ival)); break;
    case Op::Neg: print_call("neg", a->a, out); break;
    case Op::Sin: print_call("sin", a->a, out); break;
    case Op::Cos: print_call("cos", a->a, out); break;
    case Op::Exp: print_call("exp", a->a, out); break;
    case Op::Sqrt: print_call("sqrt", a->a, out); break;
    case Op::Abs: print_call("abs", a->a, out); break;
    case Op::Add: print_binary(a, '+', out); break;
    case Op::Sub: print_binary(a, '-', out); break;
    case Op::Mul: print_binary(a, '*', out); break;
    case Op::Div: print_binary(a, '/', out); break;
    case Op::Pow: {
      const Op base = a->a->op;
      const bool bare = base == Op::Var || (base == Op::Num && a->a->value >= 0.0);
      if (!bare) out += '(';
      print_to(a->a, out);
      if (!bare) out += ')';
      out += '^';
      out += std::to_string(a->ival);
      break;
    }
    case Op::Bump:
      out += a->ival == 0 ? std::string("bump(") : "bump_d" + std::to_string(a->ival) + "(";
      print_to(a->a, out);
      out += "; ";
      out += format_number(a->value);
      out += ')';
      break;
  }
}

}  // namespace

std::string print(const Ast& a) {
  std::string out;
  print_to(a, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Number: return "NUMBER";
    case Tok::Ident: return "IDENT";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& opts) : src_(src), opts_(opts) { advance(); }

  Ast parse_all() {
    Ast e = parse_expr();
    expect(Tok::End, {Tok::Plus, Tok::Minus, Tok::Star, Tok::Slash, Tok::Caret, Tok::End});
    return e;
  }

 private:
  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    std::ostringstream os;
    os << "at position " << cur_.pos << ": unexpected ";
    if (cur_.kind == Tok::End) {
      os << "end of input";
    } else {
      os << "'" << cur_.text << "'";
    }
    os << "; expected one of {";
    bool first = true;
    for (Tok t : expected) {
      os << (first ? "" : ", ") << tok_name(t);
      first = false;
    }
    os << "}";
    throw Error(ErrorKind::SyntaxError, os.str());
  }

  void expect(Tok kind, std::initializer_list<Tok> expected) {
    if (cur_.kind != kind) fail(expected);
    if (kind != Tok::End) advance();
  }

  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    cur_ = Token{Tok::End, i_, {}, 0.0};
    if (i_ >= src_.size()) return;
    const char c = src_[i_];
    const std::size_t start = i_;
    auto single = [&](Tok k) {
      cur_ = Token{k, start, src_.substr(start, 1), 0.0};
      ++i_;
    };
    switch (c) {
      case '+': single(Tok::Plus); return;
      case '-': single(Tok::Minus); return;
      case '*': single(Tok::Star); return;
      case '/': single(Tok::Slash); return;
      case '^': single(Tok::Caret); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case ';': single(Tok::Semi); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i_;
      bool digits = false;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j, digits = true;
      if (j < src_.size() && src_[j] == '.') {
        ++j;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j, digits = true;
      }
      if (!digits) {
        cur_ = Token{Tok::End, start, src_.substr(start, 1), 0.0};
        throw Error(ErrorKind::SyntaxError,
                    "at position " + std::to_string(start) + ": malformed number");
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          j = k;
        }
      }
      double v = 0.0;
      auto res = std::from_chars(src_.data() + start, src_.data() + j, v);
      if (res.ec != std::errc() || res.ptr != src_.data() + j || !std::isfinite(v)) {
        throw Error(ErrorKind::SyntaxError,
                    "at position " + std::to_string(start) + ": malformed number");
      }
      cur_ = Token{Tok::Number, start, src_.substr(start, j - start), v};
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
        ++j;
      }
      cur_ = Token{Tok::Ident, start, src_.substr(start, j - start), 0.0};
      i_ = j;
      return;
    }
    cur_ = Token{Tok::End, start, src_.substr(start, 1), 0.0};
    cur_.kind = Tok::Semi;  // placeholder so fail() prints the character
    throw Error(ErrorKind::SyntaxError, "at position " + std::to_string(start) +
                                            ": unexpected character '" + std::string(1, c) + "'");
  }

  Ast parse_expr() {
    Ast lhs = parse_term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const bool plus = cur_.kind == Tok::Plus;
      advance();
      Ast rhs = parse_term();
      lhs = plus ? add(lhs, rhs) : sub(lhs, rhs);
    }
    return lhs;
  }

  Ast parse_term() {
    Ast lhs = parse_factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const bool times = cur_.kind == Tok::Star;
      const std::size_t pos = cur_.pos;
      advance();
      Ast rhs = parse_factor();
      lhs = times ? mul(lhs, rhs) : guarded_div(lhs, rhs, pos);
    }
    return lhs;
  }

  Ast parse_factor() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return neg(parse_factor());
    }
    Ast base = parse_atom();
    if (cur_.kind == Tok::Caret) {
      advance();
      if (cur_.kind != Tok::Number || cur_.text.find_first_not_of("0123456789") != std::string_view::npos) {
        fail({Tok::Number});
      }
      int n = 0;
      std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), n);
      advance();
      base = pow(base, n);
    }
    return base;
  }

  Ast parse_atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        const double v = cur_.number;
        advance();
        return num(v);
      }
      case Tok::LParen: {
        advance();
        Ast e = parse_expr();
        expect(Tok::RParen, {Tok::RParen, Tok::Plus, Tok::Minus, Tok::Star, Tok::Slash});
        return e;
      }
      case Tok::Ident: return parse_ident();
      default: fail({Tok::Number, Tok::Ident, Tok::LParen, Tok::Minus});
    }
  }

  Ast parse_ident() {
    const std::string name(cur_.text);
    const std::size_t pos = cur_.pos;
    if (name.size() == 1 && std::strchr("xyzt", name[0])) {
      const Var v = name[0] == 'x' ? Var::X : name[0] == 'y' ? Var::Y : name[0] == 'z' ? Var::Z : Var::T;
      if (!opts_.admitted.contains(v)) {
        throw Error(ErrorKind::UnknownVariable, "at position " + std::to_string(pos) +
                                                     ": variable '" + name + "' not admitted");
      }
      advance();
      return var(v);
    }
    advance();
    if (cur_.kind != Tok::LParen) {
      throw Error(ErrorKind::UnknownVariable,
                  "at position " + std::to_string(pos) + ": unknown variable '" + name + "'");
    }
    int bump_order = -1;
    if (name == "bump") {
      bump_order = 0;
    } else if (name.rfind("bump_d", 0) == 0 && name.size() > 6 &&
               name.find_first_not_of("0123456789", 6) == std::string::npos) {
      bump_order = std::stoi(name.substr(6));
    }
    advance();
    if (bump_order >= 0) {
      Ast arg = parse_expr();
      expect(Tok::Semi, {Tok::Semi});
      bool negative = false;
      if (cur_.kind == Tok::LParen) {
        // printed negative literals look like "(-0.5)"; widths must be positive anyway
        advance();
        if (cur_.kind == Tok::Minus) negative = true, advance();
      }
      if (cur_.kind != Tok::Number) fail({Tok::Number});
      double width = cur_.number;
      advance();
      if (negative) expect(Tok::RParen, {Tok::RParen});
      if (negative || !(width > 0.0)) {
        throw Error(ErrorKind::SyntaxError,
                    "at position " + std::to_string(pos) + ": bump width must be positive");
      }
      expect(Tok::RParen, {Tok::RParen});
      return bump(arg, width, bump_order);
    }
    Ast arg = parse_expr();
    expect(Tok::RParen, {Tok::RParen, Tok::Plus, Tok::Minus, Tok::Star, Tok::Slash});
    if (name == "sin") return sin(arg);
    if (name == "cos") return cos(arg);
    if (name == "exp") return exp(arg);
    if (name == "sqrt") return sqrt(arg);
    if (name == "neg") return neg(arg);
    if (name == "abs") return abs(arg);
    throw Error(ErrorKind::SyntaxError,
                "at position " + std::to_string(pos) + ": unknown function '" + name +
                    "'; expected one of {sin, cos, exp, sqrt, neg, abs, bump}");
  }

  Ast guarded_div(const Ast& n, const Ast& d, std::size_t pos) {
    // Sample the denominator over the declared domain and register its sign.
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    constexpr unsigned bases[] = {2, 3, 5, 7};
    for (std::size_t k = 0; k < 1000; ++k) {
      Bindings b{};
      for (int v = 0; v < kNumVars; ++v) {
        const double u = k == 0 ? 0.5 : halton(k, bases[v]);
        b[std::size_t(v)] = opts_.domain.lo[std::size_t(v)] +
                            u * (opts_.domain.hi[std::size_t(v)] - opts_.domain.lo[std::size_t(v)]);
      }
      double value;
      try {
        value = evaluate(d, b);
      } catch (const Error&) {
        value = 0.0;
      }
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    const double floor = 1e-12;
    int sign = 0;
    if (lo > floor) sign = 1;
    if (hi < -floor) sign = -1;
    if (sign == 0) {
      throw Error(ErrorKind::UnguardedDivision,
                  "at position " + std::to_string(pos) + ": denominator '" + print(d) +
                      "' is not bounded away from zero over the declared domain");
    }
    return div(n, d, sign);
  }

  std::string_view src_;
  const ParseOptions& opts_;
  std::size_t i_ = 0;
  Token cur_{Tok::End, 0, {}, 0.0};
};

}  // namespace

Ast parse(std::string_view source, const ParseOptions& options) {
  Parser p(source, options);
  return p.parse_all();
}

// ---------------------------------------------------------------------------
// Differentiation

Ast differentiate(const Ast& a, Var v) {
  switch (a->op) {
    case Op::Num: return num(0.0);
    case Op::Var: return num(a->ival == int(v) ? 1.0 : 0.0);
    case Op::Neg: return neg(differentiate(a->a, v));
    case Op::Sin: return mul(cos(a->a), differentiate(a->a, v));
    case Op::Cos: return mul(neg(sin(a->a)), differentiate(a->a, v));
    case Op::Exp: return mul(a, differentiate(a->a, v));
    case Op::Sqrt: {
      Ast da = differentiate(a->a, v);
      if (is_num(da, 0.0)) return da;
      return div(da, mul(num(2.0), a), 1);
    }
    case Op::Abs: {
      Ast da = differentiate(a->a, v);
      if (is_num(da, 0.0)) return da;
      return div(mul(a->a, da), a, 1);
    }
    case Op::Add: return add(differentiate(a->a, v), differentiate(a->b, v));
    case Op::Sub: return sub(differentiate(a->a, v), differentiate(a->b, v));
    case Op::Mul:
      return add(mul(differentiate(a->a, v), a->b), mul(a->a, differentiate(a->b, v)));
    case Op::Div: {
      Ast dn = differentiate(a->a, v);
      Ast dd = differentiate(a->b, v);
      if (is_num(dd, 0.0)) return div(dn, a->b, a->ival);
      return div(sub(mul(dn, a->b), mul(a->a, dd)), pow(a->b, 2), 1);
    }
    case Op::Pow:
      return mul(mul(num(double(a->ival)), pow(a->a, a->ival - 1)), differentiate(a->a, v));
    case Op::Bump: return mul(bump(a->a, a->value, a->ival + 1), differentiate(a->a, v));
  }
  return num(0.0);
}

// ---------------------------------------------------------------------------
// Compiled programs

namespace {

struct KeyHash {
  std::size_t operator()(const std::tuple<int, int, std::uint64_t, int, int>& k) const {
    std::size_t h = std::hash<int>()(std::get<0>(k));
    auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<int>()(std::get<1>(k)));
    mix(std::hash<std::uint64_t>()(std::get<2>(k)));
    mix(std::hash<int>()(std::get<3>(k)));
    mix(std::hash<int>()(std::get<4>(k)));
    return h;
  }
};

}  // namespace

Program::Program(const std::vector<Ast>& outputs) {
  using Key = std::tuple<int, int, std::uint64_t, int, int>;
  std::unordered_map<Key, std::int32_t, KeyHash> slots;
  std::unordered_map<const Node*, std::int32_t> seen;

  auto emit = [&](auto&& self, const Ast& n) -> std::int32_t {
    if (auto it = seen.find(n.get()); it != seen.end()) return it->second;
    const std::int32_t a = n->a ? self(self, n->a) : -1;
    const std::int32_t b = n->b ? self(self, n->b) : -1;
    std::uint64_t bits;
    std::memcpy(&bits, &n->value, sizeof bits);
    const Key key{int(n->op), n->ival, bits, a, b};
    std::int32_t slot;
    if (auto it = slots.find(key); it != slots.end()) {
      slot = it->second;
    } else {
      slot = std::int32_t(code_.size());
      code_.push_back(Instr{n->op, n->ival, n->value, a, b});
      slots.emplace(key, slot);
    }
    seen.emplace(n.get(), slot);
    return slot;
  };
  for (const Ast& out : outputs) out_slots_.push_back(emit(emit, out));
}

void Program::run(const Bindings& bind, double* out) const {
  thread_local std::vector<double> scratch;
  const std::size_t n = code_.size();
  if (scratch.size() < n) scratch.resize(n);
  double* r = scratch.data();
  for (std::size_t i = 0; i < n; ++i) {
    const Instr& in = code_[i];
    double v = 0.0;
    switch (in.op) {
      case Op::Num: v = in.value; break;
      case Op::Var: v = bind[std::size_t(in.ival)]; break;
      case Op::Neg: v = -r[in.a]; break;
      case Op::Sin: v = std::sin(r[in.a]); break;
      case Op::Cos: v = std::cos(r[in.a]); break;
      case Op::Exp: v = std::exp(r[in.a]); break;
      case Op::Sqrt: v = apply_unary(Op::Sqrt, r[in.a]); break;
      case Op::Abs: v = apply_unary(Op::Abs, r[in.a]); break;
      case Op::Add: v = r[in.a] + r[in.b]; break;
      case Op::Sub: v = r[in.a] - r[in.b]; break;
      case Op::Mul: v = r[in.a] * r[in.b]; break;
      case Op::Div: v = checked_div(r[in.a], r[in.b], in.ival); break;
      case Op::Pow: v = int_pow(r[in.a], in.ival); break;
      case Op::Bump: v = bump_value(r[in.a], in.value, in.ival); break;
    }
    r[i] = v;
  }
  for (std::size_t k = 0; k < out_slots_.size(); ++k) out[k] = r[out_slots_[k]];
}

// ---------------------------------------------------------------------------
// ScalarField

namespace {
constexpr std::size_t tri_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * kNumVars - i * (i - 1) / 2 + (j - i);
}
}  // namespace

ScalarField::ScalarField(Ast ast) : ast_(std::move(ast)) {
  for (int i = 0; i < kNumVars; ++i) d_[std::size_t(i)] = differentiate(ast_, Var(i));
  for (std::size_t i = 0; i < kNumVars; ++i) {
    for (std::size_t j = i; j < kNumVars; ++j) dd_[tri_index(i, j)] = differentiate(d_[i], Var(j));
  }
  value_prog_ = Program({ast_});
  std::vector<Ast> outs{ast_};
  outs.insert(outs.end(), d_.begin(), d_.end());
  grad_prog_ = Program(outs);
  outs.insert(outs.end(), dd_.begin(), dd_.end());
  hess_prog_ = Program(outs);
}

ScalarField ScalarField::parse(std::string_view source, const ParseOptions& options) {
  return ScalarField(expr::parse(source, options));
}

const Ast& ScalarField::second_derivative(Var u, Var v) const {
  return dd_[tri_index(std::size_t(u), std::size_t(v))];
}

double ScalarField::value(const Bindings& b) const {
  double out;
  value_prog_.run(b, &out);
  return out;
}

Gradient ScalarField::gradient(const Bindings& b) const {
  double out[1 + kNumVars];
  grad_prog_.run(b, out);
  Gradient g;
  g.value = out[0];
  for (std::size_t i = 0; i < kNumVars; ++i) g.d[i] = out[1 + i];
  return g;
}

Hessian ScalarField::hessian(const Bindings& b) const {
  double out[1 + kNumVars + 10];
  hess_prog_.run(b, out);
  Hessian h;
  h.value = out[0];
  for (std::size_t i = 0; i < kNumVars; ++i) h.d[i] = out[1 + i];
  for (std::size_t i = 0; i < kNumVars; ++i) {
    for (std::size_t j = 0; j < kNumVars; ++j) h.dd[i][j] = out[1 + kNumVars + tri_index(i, j)];
  }
  return h;
}

}  // namespace hoferlab::expr
