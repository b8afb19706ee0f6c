#include <cmath>
#include <random>
#include <sstream>

#include "dode/expr.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Numeric evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_expr(const Expr& e, const EvalPoint& pt);

double eval_atom(const Atom& a, const EvalPoint& pt) {
    if (const auto* v = std::get_if<JetVar>(&a)) {
        auto it = pt.jets.find(*v);
        if (it == pt.jets.end()) throw UnboundVariableError(v->token());
        return it->second;
    }
    if (const auto* s = std::get_if<std::string>(&a)) {
        auto it = pt.consts.find(*s);
        if (it == pt.consts.end()) throw UnboundVariableError(*s);
        return it->second;
    }
    if (const auto* f = std::get_if<FuncAtom>(&a)) {
        const double x = eval_expr(f->arg, pt);
        double y = 0.0;
        switch (f->fn) {
            case Func::Sin: y = std::sin(x); break;
            case Func::Cos: y = std::cos(x); break;
            case Func::Tan: y = std::tan(x); break;
            case Func::Exp: y = std::exp(x); break;
            case Func::Ln:
                if (x <= 0.0) throw DomainError("ln of non-positive argument");
                y = std::log(x);
                break;
            case Func::Sqrt:
                if (x < 0.0) throw DomainError("sqrt of negative argument");
                y = std::sqrt(x);
                break;
        }
        if (!std::isfinite(y))
            throw DomainError(std::string(func_name(f->fn)) + " overflow");
        return y;
    }
    return eval_expr(std::get<PowBase>(a).base, pt);
}

double powered(double v, const Rational& e) {
    if (e.is_integer()) {
        long long n = e.num();
        const bool invert = n < 0;
        if (invert) n = -n;
        double acc = 1.0;
        for (long long i = 0; i < n; ++i) acc *= v;
        if (invert) {
            if (acc == 0.0) throw DomainError("division by zero");
            acc = 1.0 / acc;
        }
        return acc;
    }
    const double r = std::pow(v, e.to_double());
    if (!std::isfinite(r)) throw DomainError("fractional power outside domain");
    return r;
}

double eval_expr(const Expr& e, const EvalPoint& pt) {
    double sum = 0.0;
    for (const Term& t : e.data().terms) {
        double prod = t.coeff.to_double();
        for (const Factor& f : t.mono.factors) prod *= powered(eval_atom(f.atom, pt), f.exp);
        if (!std::isfinite(prod)) throw DomainError("overflow while evaluating term");
        sum += prod;
    }
    if (!std::isfinite(sum)) throw DomainError("overflow while evaluating sum");
    return sum;
}

}  // namespace

double eval_numeric(const Expr& e, const EvalPoint& point) { return eval_expr(e, point); }

// ---------------------------------------------------------------------------
// Denominator clearing
// ---------------------------------------------------------------------------

namespace {

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return cmp(a, b) < 0; }
};

long long ceil_of(const Rational& r) {
    if (r.is_integer()) return r.num();
    long long q = r.num() / r.den();
    if (r.num() > 0) ++q;
    return q;
}

}  // namespace

Expr clear_denominators(const Expr& e) {
    std::map<Expr, Rational, ExprLess> min_exp;
    for (const Term& t : e.data().terms) {
        for (const Factor& f : t.mono.factors) {
            const auto* pb = std::get_if<PowBase>(&f.atom);
            if (!pb || !(cmp(f.exp, Rational(0)) < 0)) continue;
            auto it = min_exp.find(pb->base);
            if (it == min_exp.end())
                min_exp.emplace(pb->base, f.exp);
            else if (cmp(f.exp, it->second) < 0)
                it->second = f.exp;
        }
    }
    if (min_exp.empty()) return e;
    std::vector<Factor> multiplier;
    for (const auto& [base, mn] : min_exp) {
        const long long k = ceil_of(-mn);
        if (k > 0) multiplier.push_back(Factor{Atom(PowBase{base}), Rational(k)});
    }
    if (multiplier.empty()) return e;
    std::vector<Term> raised = e.data().terms;
    for (Term& t : raised)
        t.mono.factors.insert(t.mono.factors.end(), multiplier.begin(), multiplier.end());
    return make_expr(std::move(raised));
}

// ---------------------------------------------------------------------------
// Zero tests
// ---------------------------------------------------------------------------

std::string ZeroCheck::describe() const {
    std::ostringstream os;
    switch (mode) {
        case Mode::Canonical:
            os << (zero ? "canonical" : "canonical nonzero");
            break;
        case Mode::CanonicalCleared:
            os << (zero ? "canonical (denominators cleared)" : "canonical nonzero");
            break;
        case Mode::Probabilistic:
            os << (zero ? "probabilistic zero" : "nonzero at sampled points")
               << " (points=" << points << ", tol=" << tol << ", max|value|=" << max_abs
               << ", seed=" << seed << ")";
            break;
    }
    return os.str();
}

ZeroCheck is_zero_canonical(const Expr& e) {
    ZeroCheck c;
    if (e.is_zero()) {
        c.zero = true;
        c.mode = ZeroCheck::Mode::Canonical;
        return c;
    }
    const Expr cleared = clear_denominators(e);
    c.zero = cleared.is_zero();
    c.mode = ZeroCheck::Mode::CanonicalCleared;
    return c;
}

ZeroCheck is_zero_probabilistic(const Expr& e, const ZeroOptions& opt) {
    ZeroCheck c;
    c.mode = ZeroCheck::Mode::Probabilistic;
    c.points = opt.points;
    c.tol = opt.tol;
    c.seed = opt.seed;

    std::vector<JetVar> jets;
    for (const JetVar& v : jet_vars(e))
        if (!opt.fixed.jets.count(v)) jets.push_back(v);
    std::vector<std::string> syms;
    for (const std::string& s : symbols(e))
        if (!opt.fixed.consts.count(s)) syms.push_back(s);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(opt.box_lo, opt.box_hi);
    double max_abs = 0.0;
    for (int p = 0; p < opt.points; ++p) {
        bool evaluated = false;
        for (int attempt = 0; attempt < opt.max_resample && !evaluated; ++attempt) {
            EvalPoint pt = opt.fixed;
            for (const JetVar& v : jets) pt.jets[v] = dist(rng);
            for (const std::string& s : syms) pt.consts[s] = dist(rng);
            try {
                const double v = std::abs(eval_numeric(e, pt));
                if (v > max_abs) max_abs = v;
                evaluated = true;
            } catch (const EvalError&) {
                if (attempt + 1 == opt.max_resample) throw;
            }
        }
    }
    c.max_abs = max_abs;
    c.zero = max_abs < opt.tol;
    return c;
}

ZeroCheck check_zero(const Expr& e, const ZeroOptions& opt) {
    ZeroCheck c = is_zero_canonical(e);
    if (c.zero) return c;
    return is_zero_probabilistic(e, opt);
}

std::optional<Rational> proportionality_constant(const Expr& a, const Expr& b) {
    if (a.is_zero() && b.is_zero()) return Rational(1);
    if (a.is_zero() || b.is_zero()) return std::nullopt;
    const Term& ta = a.data().terms.front();
    const Term& tb = b.data().terms.front();
    if (cmp(ta.mono, tb.mono) != 0) return std::nullopt;
    const Rational c = ta.coeff / tb.coeff;
    if (is_zero_canonical(a - Expr(c) * b).zero) return c;
    return std::nullopt;
}

}  // namespace dode
