#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dode/error.hpp"
#include "dode/rational.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Jet variables
// ---------------------------------------------------------------------------

/// One coordinate of the delay jet space: the state u and its t-derivatives
/// (orders 0..3) together with the time variable itself, each carried at a
/// shift level in [-2, +2].  Level -1 is the value one delay in the past
/// (u_m, read "u minus"), level +1 one delay ahead (u_p), and so on.  Time
/// variables at distinct levels are independent symbols; they are related to
/// t only when a caller explicitly substitutes t_k -> t + k*tau.
struct JetVar {
    signed char level = 0;  // -2..+2
    signed char order = 0;  // -1 = time variable, 0..3 = derivative order of u

    static constexpr int kMinLevel = -2;
    static constexpr int kMaxLevel = 2;
    static constexpr int kMaxOrder = 3;

    static JetVar time(int level = 0);
    static JetVar state(int level = 0, int order = 0);

    bool is_time() const { return order < 0; }

    /// ASCII token, e.g. "u", "du_m", "ddu_p", "t_mm".
    std::string token() const;

    friend bool operator==(const JetVar& a, const JetVar& b) {
        return a.level == b.level && a.order == b.order;
    }
    friend bool operator!=(const JetVar& a, const JetVar& b) { return !(a == b); }
};

/// Canonical display/sort order: state variables before time variables,
/// higher derivative order first, higher level first.  This is what makes
/// "ddu_p + ddu_m + u_p + u_m" print in that order.
int cmp(const JetVar& a, const JetVar& b);
inline bool operator<(const JetVar& a, const JetVar& b) { return cmp(a, b) < 0; }

/// Recognize a grammar token ("du_mm", "t_p", ...).
std::optional<JetVar> jet_from_token(std::string_view tok);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Ln, Sqrt };
const char* func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);

struct ExprData;

/// Immutable symbolic expression over the delay jet space.
///
/// An Expr is always held in a canonical expanded form: a sorted sum of
/// monomials with rational coefficients, where each monomial is a sorted
/// product of atom powers.  Atoms are jet variables, named constants,
/// elementary function applications (opaque, keyed by their canonical
/// argument) and irreducible power bases (multi-term sums raised to a
/// negative or fractional exponent).  Equal canonical forms compare equal
/// structurally, so construction doubles as simplification and
/// simplify(simplify(e)) == simplify(e) holds by design.
///
/// Expressions are values: cheap to copy, safe to share across threads.
class Expr {
  public:
    Expr();                                  // zero
    Expr(int n);                             // NOLINT: implicit by design
    Expr(const Rational& r);                 // NOLINT
    explicit Expr(const JetVar& v);

    static Expr symbol(const std::string& name);

    const ExprData& data() const { return *p_; }

    bool is_zero() const;                    // literal canonical zero
    bool is_rational() const;
    Rational rational_value() const;         // requires is_rational()

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  private:
    std::shared_ptr<const ExprData> p_;
    explicit Expr(std::shared_ptr<const ExprData> p) : p_(std::move(p)) {}

    friend Expr make_expr(std::vector<struct Term> terms);
};

struct FuncAtom {
    Func fn;
    Expr arg;
};

/// A canonical base kept opaque under a negative or fractional exponent:
/// either a multi-term sum (content-free, no common monomial factor, leading
/// coefficient 1) or a rational constant without an exact root.
struct PowBase {
    Expr base;
};

using Atom = std::variant<JetVar, std::string, FuncAtom, PowBase>;

struct Factor {
    Atom atom;
    Rational exp;  // nonzero
};

struct Mono {
    std::vector<Factor> factors;  // sorted by atom order
};

struct Term {
    Rational coeff;  // nonzero
    Mono mono;
};

struct ExprData {
    std::vector<Term> terms;  // sorted by monomial order
};

int cmp(const Atom& a, const Atom& b);
int cmp(const Mono& a, const Mono& b);
int cmp(const Expr& a, const Expr& b);

/// Normalizing constructor used by the engine: merges, sorts and expands
/// integer powers of sum bases.  Input terms need not be normalized.
Expr make_expr(std::vector<Term> terms);

// Arithmetic (every operation returns a canonical Expr).
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& a, const Rational& e);
inline Expr pow(const Expr& a, long long e) { return pow(a, Rational(e)); }

Expr apply(Func f, const Expr& arg);
inline Expr sin(const Expr& e) { return apply(Func::Sin, e); }
inline Expr cos(const Expr& e) { return apply(Func::Cos, e); }
inline Expr tan(const Expr& e) { return apply(Func::Tan, e); }
inline Expr exp(const Expr& e) { return apply(Func::Exp, e); }
inline Expr ln(const Expr& e) { return apply(Func::Ln, e); }
inline Expr sqrt(const Expr& e) { return apply(Func::Sqrt, e); }

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

std::set<JetVar> jet_vars(const Expr& e);
std::set<std::string> symbols(const Expr& e);
bool contains(const Expr& e, const JetVar& v);

/// Exponents with which a jet variable occurs across the canonical
/// monomials (used for affine-solvability checks).
std::set<Rational> occurring_exponents(const Expr& e, const JetVar& v);

// ---------------------------------------------------------------------------
// Calculus primitives on the canonical form
// ---------------------------------------------------------------------------

/// Formal partial derivative; every other atom is treated as independent.
Expr partial(const Expr& e, const JetVar& v);

struct Substitution {
    std::map<JetVar, Expr> jets;
    std::map<std::string, Expr> consts;
};

/// Simultaneous substitution followed by canonical simplification.
Expr substitute(const Expr& e, const Substitution& s);

// ---------------------------------------------------------------------------
// Numeric evaluation and zero testing
// ---------------------------------------------------------------------------

struct EvalPoint {
    std::map<JetVar, double> jets;
    std::map<std::string, double> consts;
};

/// Floating-point value of e at the point.  Throws UnboundVariableError or
/// DomainError; never returns NaN or infinity.
double eval_numeric(const Expr& e, const EvalPoint& point);

/// Multiply through by the sum bases appearing in denominators so that a
/// quotient combination can be tested for zero canonically.  Sound as a
/// zero test: the result is canonically zero iff e vanishes as a formal
/// rational function of its atoms.
Expr clear_denominators(const Expr& e);

struct ZeroOptions {
    int points = 50;
    double tol = 1e-9;
    std::uint64_t seed = 7;
    double box_lo = -2.0;
    double box_hi = 2.0;
    int max_resample = 100;
    EvalPoint fixed;  // bindings excluded from random sampling
};

struct ZeroCheck {
    enum class Mode { Canonical, CanonicalCleared, Probabilistic };
    bool zero = false;
    Mode mode = Mode::Canonical;
    int points = 0;
    double tol = 0.0;
    double max_abs = 0.0;
    std::uint64_t seed = 0;

    std::string describe() const;
};

ZeroCheck is_zero_canonical(const Expr& e);
ZeroCheck is_zero_probabilistic(const Expr& e, const ZeroOptions& opt);

/// Canonical test first (with denominator clearing), probabilistic fallback.
ZeroCheck check_zero(const Expr& e, const ZeroOptions& opt = {});

/// If a == c*b for a rational constant c (canonically), return c.
std::optional<Rational> proportionality_constant(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

struct ParseOptions {
    std::set<std::string> constants = {"tau"};
};

/// Parse the ASCII expression grammar.  Unknown identifiers raise a
/// ParseError that lists the valid jet-variable tokens.
Expr parse(std::string_view text, const ParseOptions& opt = {});

}  // namespace dode
