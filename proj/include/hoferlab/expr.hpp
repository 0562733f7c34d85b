#pragma once

// Expression DSL for Hamiltonians, generating functions and profiles.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' INT)?
//   atom   := NUMBER | VAR | FUNC '(' expr ')' | 'bump' '(' expr ';' NUMBER ')'
//           | 'bump_d' INT '(' expr ';' NUMBER ')' | '(' expr ')'
//   VAR    := 'x' | 'y' | 'z' | 't'
//   FUNC   := 'sin' | 'cos' | 'exp' | 'sqrt' | 'neg' | 'abs'
//
// bump(r; R) is 1 for r <= 0, 0 for r >= R and a quintic smoothstep ramp in
// between. bump_dk is its k-th derivative in r; it is produced by
// differentiate() and accepted by the parser so that printed derivatives
// re-parse. abs is smoothed as sqrt(u^2 + 1e-24).

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hoferlab::expr {

enum class Var : std::uint8_t { X = 0, Y = 1, Z = 2, T = 3 };
inline constexpr int kNumVars = 4;

char var_name(Var v);

/// Bit mask of admitted variables.
struct VarSet {
  std::uint8_t bits = 0;

  static constexpr VarSet all() { return VarSet{0x0F}; }
  static constexpr VarSet of(std::initializer_list<Var> vars) {
    std::uint8_t b = 0;
    for (Var v : vars) b |= std::uint8_t(1u << unsigned(v));
    return VarSet{b};
  }
  constexpr bool contains(Var v) const { return (bits >> unsigned(v)) & 1u; }
};

using Bindings = std::array<double, kNumVars>;

enum class Op : std::uint8_t {
  Num, Var, Neg, Sin, Cos, Exp, Sqrt, Abs, Add, Sub, Mul, Div, Pow, Bump
};

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Num;
  double value = 0.0;  // literal, or bump width R
  int ival = 0;        // variable index, integer exponent, bump derivative order, or guard sign
  Ast a;
  Ast b;
};

// Simplifying constructors. They fold constants and drop neutral elements.
Ast num(double v);
Ast var(Var v);
Ast neg(Ast a);
Ast sin(Ast a);
Ast cos(Ast a);
Ast exp(Ast a);
Ast sqrt(Ast a);
Ast abs(Ast a);
Ast add(Ast a, Ast b);
Ast sub(Ast a, Ast b);
Ast mul(Ast a, Ast b);
/// guard_sign is the registered sign of the denominator (+1 or -1).
Ast div(Ast a, Ast b, int guard_sign = 1);
Ast pow(Ast a, int n);
Ast bump(Ast r, double width, int order = 0);

bool is_num(const Ast& a, double v);

/// Per-variable sampling box used for parse-time division guards.
struct Domain {
  std::array<double, kNumVars> lo{-2.0, -2.0, -2.0, 0.0};
  std::array<double, kNumVars> hi{2.0, 2.0, 2.0, 1.0};
};

struct ParseOptions {
  VarSet admitted = VarSet::all();
  Domain domain{};
};

Ast parse(std::string_view source, const ParseOptions& options = {});

/// Canonical, fully parenthesised text. parse(print(a)) prints identically.
std::string print(const Ast& a);

Ast differentiate(const Ast& a, Var v);

/// Tree-walking evaluation; slow, used as a reference and for one-off values.
double evaluate(const Ast& a, const Bindings& b);

bool uses_var(const Ast& a, Var v);
std::size_t node_count(const Ast& a);

/// Quintic-smoothstep bump profile and its derivatives in r.
double bump_value(double r, double width, int order);

/// Straight-line program evaluating several expressions with shared
/// subexpressions (structural hash-consing).
class Program {
 public:
  Program() = default;
  explicit Program(const std::vector<Ast>& outputs);

  /// Writes one value per output into out. Throws DomainError on guard
  /// violations.
  void run(const Bindings& b, double* out) const;

  std::size_t size() const { return code_.size(); }
  std::size_t outputs() const { return out_slots_.size(); }

 private:
  struct Instr {
    Op op;
    int ival;
    double value;
    std::int32_t a;
    std::int32_t b;
  };
  std::vector<Instr> code_;
  std::vector<std::int32_t> out_slots_;
};

struct Gradient {
  double value = 0.0;
  std::array<double, kNumVars> d{};
};

struct Hessian {
  double value = 0.0;
  std::array<double, kNumVars> d{};
  std::array<std::array<double, kNumVars>, kNumVars> dd{};
};

/// A compiled expression together with its symbolic first and second
/// partial derivatives.
class ScalarField {
 public:
  ScalarField() : ScalarField(num(0.0)) {}
  explicit ScalarField(Ast ast);
  static ScalarField parse(std::string_view source, const ParseOptions& options = {});

  const Ast& ast() const { return ast_; }
  const Ast& derivative(Var v) const { return d_[std::size_t(v)]; }
  const Ast& second_derivative(Var u, Var v) const;
  std::string text() const { return print(ast_); }

  bool depends_on(Var v) const { return uses_var(ast_, v); }
  bool autonomous() const { return !depends_on(Var::T); }

  double value(const Bindings& b) const;
  Gradient gradient(const Bindings& b) const;
  Hessian hessian(const Bindings& b) const;

 private:
  Ast ast_;
  std::array<Ast, kNumVars> d_;
  std::array<Ast, 10> dd_;  // upper triangle, row-major
  Program value_prog_;
  Program grad_prog_;
  Program hess_prog_;
};

}  // namespace hoferlab::expr
