#include "dode/expr.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <ostream>
#include <sstream>

namespace dode {

// ---------------------------------------------------------------------------
// JetVar
// ---------------------------------------------------------------------------

JetVar JetVar::time(int level) {
    if (level < kMinLevel || level > kMaxLevel)
        throw ValidationError("jet level out of range: " + std::to_string(level));
    JetVar v;
    v.level = static_cast<signed char>(level);
    v.order = -1;
    return v;
}

JetVar JetVar::state(int level, int order) {
    if (level < kMinLevel || level > kMaxLevel)
        throw ValidationError("jet level out of range: " + std::to_string(level));
    if (order < 0 || order > kMaxOrder)
        throw ValidationError("jet derivative order out of range: " + std::to_string(order));
    JetVar v;
    v.level = static_cast<signed char>(level);
    v.order = static_cast<signed char>(order);
    return v;
}

static const char* level_suffix(int level) {
    switch (level) {
        case -2: return "_mm";
        case -1: return "_m";
        case 0: return "";
        case 1: return "_p";
        case 2: return "_pp";
        default: return "_?";
    }
}

std::string JetVar::token() const {
    static const char* base[] = {"u", "du", "ddu", "dddu"};
    std::string s = is_time() ? "t" : base[static_cast<int>(order)];
    s += level_suffix(level);
    return s;
}

int cmp(const JetVar& a, const JetVar& b) {
    const int at = a.is_time() ? 1 : 0;
    const int bt = b.is_time() ? 1 : 0;
    if (at != bt) return at < bt ? -1 : 1;          // state vars first
    if (a.order != b.order) return a.order > b.order ? -1 : 1;  // higher order first
    if (a.level != b.level) return a.level > b.level ? -1 : 1;  // higher level first
    return 0;
}

std::optional<JetVar> jet_from_token(std::string_view tok) {
    struct BaseTok { const char* text; int order; };
    static constexpr std::array<BaseTok, 5> bases = {
        BaseTok{"dddu", 3}, BaseTok{"ddu", 2}, BaseTok{"du", 1},
        BaseTok{"u", 0}, BaseTok{"t", -1}};
    for (const auto& b : bases) {
        std::string_view base(b.text);
        if (tok.substr(0, base.size()) != base) continue;
        std::string_view rest = tok.substr(base.size());
        int level;
        if (rest.empty()) level = 0;
        else if (rest == "_m") level = -1;
        else if (rest == "_mm") level = -2;
        else if (rest == "_p") level = 1;
        else if (rest == "_pp") level = 2;
        else continue;
        return b.order < 0 ? JetVar::time(level) : JetVar::state(level, b.order);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Func
// ---------------------------------------------------------------------------

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
    static constexpr std::array<Func, 6> all = {Func::Sin, Func::Cos, Func::Tan,
                                                Func::Exp, Func::Ln, Func::Sqrt};
    for (Func f : all)
        if (name == func_name(f)) return f;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

int cmp(const Atom& a, const Atom& b) {
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    switch (a.index()) {
        case 0:
            return cmp(std::get<JetVar>(a), std::get<JetVar>(b));
        case 1: {
            const auto& sa = std::get<std::string>(a);
            const auto& sb = std::get<std::string>(b);
            if (sa == sb) return 0;
            return sa < sb ? -1 : 1;
        }
        case 2: {
            const auto& fa = std::get<FuncAtom>(a);
            const auto& fb = std::get<FuncAtom>(b);
            if (fa.fn != fb.fn) return static_cast<int>(fa.fn) < static_cast<int>(fb.fn) ? -1 : 1;
            return cmp(fa.arg, fb.arg);
        }
        default:
            return cmp(std::get<PowBase>(a).base, std::get<PowBase>(b).base);
    }
}

int cmp(const Mono& a, const Mono& b) {
    const std::size_t n = std::min(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = cmp(a.factors[i].atom, b.factors[i].atom);
        if (c != 0) return c;
        c = cmp(a.factors[i].exp, b.factors[i].exp);
        if (c != 0) return -c;  // higher exponent first
    }
    if (a.factors.size() != b.factors.size())
        return a.factors.size() < b.factors.size() ? -1 : 1;
    return 0;
}

static int cmp(const Term& a, const Term& b) {
    int c = cmp(a.mono, b.mono);
    if (c != 0) return c;
    return cmp(a.coeff, b.coeff);
}

int cmp(const Expr& a, const Expr& b) {
    const auto& ta = a.data().terms;
    const auto& tb = b.data().terms;
    const std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = cmp(ta[i], tb[i]);
        if (c != 0) return c;
    }
    if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
    return 0;
}

bool operator==(const Expr& a, const Expr& b) { return cmp(a, b) == 0; }

// ---------------------------------------------------------------------------
// Expr basics
// ---------------------------------------------------------------------------

static const std::shared_ptr<const ExprData>& zero_data() {
    static const auto z = std::make_shared<const ExprData>();
    return z;
}

Expr::Expr() : p_(zero_data()) {}

Expr::Expr(int n) : Expr(Rational(n)) {}

Expr::Expr(const Rational& r) {
    if (r.is_zero()) {
        p_ = zero_data();
    } else {
        ExprData d;
        d.terms.push_back(Term{r, Mono{}});
        p_ = std::make_shared<const ExprData>(std::move(d));
    }
}

Expr::Expr(const JetVar& v) {
    JetVar checked = v.is_time() ? JetVar::time(v.level) : JetVar::state(v.level, v.order);
    ExprData d;
    d.terms.push_back(Term{Rational(1), Mono{{Factor{checked, Rational(1)}}}});
    p_ = std::make_shared<const ExprData>(std::move(d));
}

Expr Expr::symbol(const std::string& name) {
    ExprData d;
    d.terms.push_back(Term{Rational(1), Mono{{Factor{Atom(name), Rational(1)}}}});
    return Expr(std::make_shared<const ExprData>(std::move(d)));
}

bool Expr::is_zero() const { return p_->terms.empty(); }

bool Expr::is_rational() const {
    if (p_->terms.empty()) return true;
    return p_->terms.size() == 1 && p_->terms[0].mono.factors.empty();
}

Rational Expr::rational_value() const {
    if (p_->terms.empty()) return Rational(0);
    if (!is_rational()) throw Error("expression is not a rational constant");
    return p_->terms[0].coeff;
}

// ---------------------------------------------------------------------------
// Normalizing constructor
// ---------------------------------------------------------------------------

namespace {

// Sort factors and merge equal atoms; returns false if the coefficient died.
void normalize_mono(Term& t) {
    auto& fs = t.mono.factors;
    std::stable_sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) {
        return cmp(a.atom, b.atom) < 0;
    });
    std::vector<Factor> merged;
    merged.reserve(fs.size());
    for (auto& f : fs) {
        if (!merged.empty() && cmp(merged.back().atom, f.atom) == 0) {
            merged.back().exp += f.exp;
            if (merged.back().exp.is_zero()) merged.pop_back();
        } else if (!f.exp.is_zero()) {
            merged.push_back(f);
        }
    }
    fs = std::move(merged);
}

// Index of a sum-base factor with nonnegative integer exponent, or -1.
int expandable_factor(const Term& t) {
    for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
        const auto& f = t.mono.factors[i];
        if (std::holds_alternative<PowBase>(f.atom) && f.exp.is_nonneg_integer())
            return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

Expr make_expr(std::vector<Term> terms) {
    std::vector<Term> done;
    std::vector<Term>& work = terms;
    while (!work.empty()) {
        Term t = std::move(work.back());
        work.pop_back();
        if (t.coeff.is_zero()) continue;
        normalize_mono(t);
        int idx = expandable_factor(t);
        if (idx < 0) {
            done.push_back(std::move(t));
            continue;
        }
        // Expand base^n back into the sum and requeue the products.
        Factor f = t.mono.factors[static_cast<std::size_t>(idx)];
        t.mono.factors.erase(t.mono.factors.begin() + idx);
        Expr expanded = pow(std::get<PowBase>(f.atom).base, f.exp);
        for (const Term& te : expanded.data().terms) {
            Term prod;
            prod.coeff = t.coeff * te.coeff;
            prod.mono.factors = t.mono.factors;
            prod.mono.factors.insert(prod.mono.factors.end(), te.mono.factors.begin(),
                                     te.mono.factors.end());
            work.push_back(std::move(prod));
        }
    }
    std::stable_sort(done.begin(), done.end(),
                     [](const Term& a, const Term& b) { return cmp(a.mono, b.mono) < 0; });
    std::vector<Term> out;
    out.reserve(done.size());
    for (auto& t : done) {
        if (!out.empty() && cmp(out.back().mono, t.mono) == 0) {
            out.back().coeff += t.coeff;
            if (out.back().coeff.is_zero()) out.pop_back();
        } else {
            out.push_back(std::move(t));
        }
    }
    if (out.empty()) return Expr();
    ExprData d;
    d.terms = std::move(out);
    return Expr(std::make_shared<const ExprData>(std::move(d)));
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    std::vector<Term> ts = a.data().terms;
    ts.insert(ts.end(), b.data().terms.begin(), b.data().terms.end());
    return make_expr(std::move(ts));
}

Expr operator-(const Expr& a) {
    if (a.is_zero()) return a;
    std::vector<Term> ts = a.data().terms;
    for (auto& t : ts) t.coeff = -t.coeff;
    return make_expr(std::move(ts));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    std::vector<Term> out;
    out.reserve(a.data().terms.size() * b.data().terms.size());
    for (const Term& ta : a.data().terms) {
        for (const Term& tb : b.data().terms) {
            Term t;
            t.coeff = ta.coeff * tb.coeff;
            t.mono.factors = ta.mono.factors;
            t.mono.factors.insert(t.mono.factors.end(), tb.mono.factors.begin(),
                                  tb.mono.factors.end());
            out.push_back(std::move(t));
        }
    }
    return make_expr(std::move(out));
}

Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, Rational(-1)); }

namespace {

// coeff^q for fractional q: exact when a perfect root exists, otherwise an
// opaque power base around the constant.
void append_coeff_power(const Rational& c, const Rational& q, Term& t) {
    if (c.is_one()) return;
    if (q.is_integer()) {
        t.coeff *= c.pow(q.num());
        return;
    }
    auto r = Rational::root(c, q.den());
    if (r) {
        t.coeff *= r->pow(q.num());
        return;
    }
    t.mono.factors.push_back(Factor{Atom(PowBase{Expr(c)}), q});
}

Expr pow_int_positive(const Expr& e, long long n) {
    Expr acc(1);
    Expr base = e;
    while (n > 0) {
        if (n & 1) acc = acc * base;
        if (n > 1) base = base * base;
        n >>= 1;
    }
    return acc;
}

}  // namespace

Expr pow(const Expr& e, const Rational& q) {
    if (q.is_zero()) return Expr(1);
    if (q.is_one()) return e;
    if (e.is_zero()) {
        if (q > Rational(0)) return Expr();
        throw DomainError("zero raised to a nonpositive power");
    }
    if (e.is_rational() && q.is_integer()) return Expr(e.rational_value().pow(q.num()));
    if (q.is_nonneg_integer()) return pow_int_positive(e, q.num());

    const auto& terms = e.data().terms;
    if (terms.size() == 1) {
        const Term& src = terms[0];
        Term t;
        t.coeff = Rational(1);
        append_coeff_power(src.coeff, q, t);
        for (const Factor& f : src.mono.factors)
            t.mono.factors.push_back(Factor{f.atom, f.exp * q});
        return make_expr({std::move(t)});
    }

    // Multi-term base with a negative or fractional exponent: pull out the
    // common monomial factor and the leading coefficient, keep the rest as
    // an opaque power base.  The common factor per atom is the minimum
    // exponent across terms, counting absence as zero.
    std::vector<std::pair<Atom, Rational>> content;
    {
        std::vector<std::pair<Atom, Rational>> mins;
        bool first = true;
        for (const Term& t : terms) {
            if (first) {
                for (const Factor& f : t.mono.factors) mins.emplace_back(f.atom, f.exp);
                first = false;
                continue;
            }
            std::vector<std::pair<Atom, Rational>> next;
            for (auto& [atom, mn] : mins) {
                Rational here(0);
                for (const Factor& f : t.mono.factors)
                    if (cmp(f.atom, atom) == 0) { here = f.exp; break; }
                next.emplace_back(atom, (cmp(here, mn) < 0) ? here : mn);
            }
            for (const Factor& f : t.mono.factors) {
                bool known = false;
                for (auto& [atom, mn] : mins)
                    if (cmp(atom, f.atom) == 0) { known = true; break; }
                if (!known && cmp(f.exp, Rational(0)) < 0) next.emplace_back(f.atom, f.exp);
            }
            mins = std::move(next);
        }
        for (auto& [atom, mn] : mins)
            if (!mn.is_zero()) content.emplace_back(atom, mn);
    }

    std::vector<Term> reduced;
    reduced.reserve(terms.size());
    for (const Term& t : terms) {
        Term r = t;
        for (auto& [atom, mn] : content)
            r.mono.factors.push_back(Factor{atom, -mn});
        reduced.push_back(std::move(r));
    }
    Expr base = make_expr(std::move(reduced));
    Rational lead = base.data().terms.front().coeff;
    if (!lead.is_one()) base = base * Expr(Rational(1) / lead);

    Term t;
    t.coeff = Rational(1);
    append_coeff_power(lead, q, t);
    for (auto& [atom, mn] : content) t.mono.factors.push_back(Factor{atom, mn * q});
    if (base.is_rational()) {
        append_coeff_power(base.rational_value(), q, t);
    } else if (base.data().terms.size() == 1) {
        const Term& src = base.data().terms[0];
        append_coeff_power(src.coeff, q, t);
        for (const Factor& f : src.mono.factors)
            t.mono.factors.push_back(Factor{f.atom, f.exp * q});
    } else {
        t.mono.factors.push_back(Factor{Atom(PowBase{base}), q});
    }
    return make_expr({std::move(t)});
}

Expr apply(Func f, const Expr& arg) {
    if (arg.is_rational()) {
        const Rational v = arg.rational_value();
        switch (f) {
            case Func::Sin:
            case Func::Tan:
                if (v.is_zero()) return Expr(0);
                break;
            case Func::Cos:
                if (v.is_zero()) return Expr(1);
                break;
            case Func::Exp:
                if (v.is_zero()) return Expr(1);
                break;
            case Func::Ln:
                if (v.is_one()) return Expr(0);
                break;
            case Func::Sqrt: {
                if (auto r = Rational::root(v, 2)) return Expr(*r);
                break;
            }
        }
    }
    Term t;
    t.coeff = Rational(1);
    t.mono.factors.push_back(Factor{Atom(FuncAtom{f, arg}), Rational(1)});
    return make_expr({std::move(t)});
}

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

namespace {

template <typename JetFn, typename SymFn>
void walk_atoms(const Expr& e, const JetFn& on_jet, const SymFn& on_sym) {
    for (const Term& t : e.data().terms) {
        for (const Factor& f : t.mono.factors) {
            if (const auto* v = std::get_if<JetVar>(&f.atom)) {
                on_jet(*v);
            } else if (const auto* s = std::get_if<std::string>(&f.atom)) {
                on_sym(*s);
            } else if (const auto* fn = std::get_if<FuncAtom>(&f.atom)) {
                walk_atoms(fn->arg, on_jet, on_sym);
            } else {
                walk_atoms(std::get<PowBase>(f.atom).base, on_jet, on_sym);
            }
        }
    }
}

}  // namespace

std::set<JetVar> jet_vars(const Expr& e) {
    std::set<JetVar> out;
    walk_atoms(e, [&](const JetVar& v) { out.insert(v); }, [](const std::string&) {});
    return out;
}

std::set<std::string> symbols(const Expr& e) {
    std::set<std::string> out;
    walk_atoms(e, [](const JetVar&) {}, [&](const std::string& s) { out.insert(s); });
    return out;
}

bool contains(const Expr& e, const JetVar& v) {
    bool found = false;
    walk_atoms(e, [&](const JetVar& w) { found = found || w == v; },
               [](const std::string&) {});
    return found;
}

std::set<Rational> occurring_exponents(const Expr& e, const JetVar& v) {
    std::set<Rational> out;
    for (const Term& t : e.data().terms) {
        Rational exp(0);
        for (const Factor& f : t.mono.factors) {
            if (const auto* w = std::get_if<JetVar>(&f.atom); w && *w == v) exp = f.exp;
        }
        out.insert(exp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partial derivative
// ---------------------------------------------------------------------------

namespace {

Expr atom_to_expr(const Atom& a) {
    if (const auto* v = std::get_if<JetVar>(&a)) return Expr(*v);
    if (const auto* s = std::get_if<std::string>(&a)) return Expr::symbol(*s);
    if (const auto* f = std::get_if<FuncAtom>(&a)) return apply(f->fn, f->arg);
    return std::get<PowBase>(a).base;
}

Expr atom_partial(const Atom& a, const JetVar& v) {
    if (const auto* w = std::get_if<JetVar>(&a)) return (*w == v) ? Expr(1) : Expr(0);
    if (std::holds_alternative<std::string>(a)) return Expr(0);
    if (const auto* f = std::get_if<FuncAtom>(&a)) {
        Expr inner = partial(f->arg, v);
        if (inner.is_zero()) return inner;
        Expr outer;
        switch (f->fn) {
            case Func::Sin: outer = cos(f->arg); break;
            case Func::Cos: outer = -sin(f->arg); break;
            case Func::Tan: outer = Expr(1) + pow(tan(f->arg), 2); break;
            case Func::Exp: outer = exp(f->arg); break;
            case Func::Ln: outer = pow(f->arg, Rational(-1)); break;
            case Func::Sqrt:
                outer = Expr(Rational(1, 2)) * pow(sqrt(f->arg), Rational(-1));
                break;
        }
        return outer * inner;
    }
    return partial(std::get<PowBase>(a).base, v);
}

}  // namespace

Expr partial(const Expr& e, const JetVar& v) {
    Expr out;
    for (const Term& t : e.data().terms) {
        for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
            const Factor& f = t.mono.factors[i];
            Expr da = atom_partial(f.atom, v);
            if (da.is_zero()) continue;
            Term rest;
            rest.coeff = t.coeff * f.exp;
            for (std::size_t j = 0; j < t.mono.factors.size(); ++j)
                if (j != i) rest.mono.factors.push_back(t.mono.factors[j]);
            Expr piece = make_expr({rest});
            Rational down = f.exp - Rational(1);
            if (!down.is_zero()) piece = piece * pow(atom_to_expr(f.atom), down);
            out = out + piece * da;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

Expr substitute(const Expr& e, const Substitution& s) {
    if (s.jets.empty() && s.consts.empty()) return e;
    Expr out;
    for (const Term& t : e.data().terms) {
        Expr acc(t.coeff);
        for (const Factor& f : t.mono.factors) {
            Expr replaced;
            if (const auto* v = std::get_if<JetVar>(&f.atom)) {
                auto it = s.jets.find(*v);
                if (it == s.jets.end()) {
                    acc = acc * make_expr({Term{Rational(1), Mono{{f}}}});
                    continue;
                }
                replaced = it->second;
            } else if (const auto* name = std::get_if<std::string>(&f.atom)) {
                auto it = s.consts.find(*name);
                if (it == s.consts.end()) {
                    acc = acc * make_expr({Term{Rational(1), Mono{{f}}}});
                    continue;
                }
                replaced = it->second;
            } else if (const auto* fn = std::get_if<FuncAtom>(&f.atom)) {
                replaced = apply(fn->fn, substitute(fn->arg, s));
            } else {
                replaced = substitute(std::get<PowBase>(f.atom).base, s);
            }
            acc = acc * pow(replaced, f.exp);
            if (acc.is_zero()) break;
        }
        out = out + acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

std::string exp_suffix(const Rational& e) {
    if (e.is_one()) return "";
    if (e.is_integer() && e.num() > 0) return "^" + e.str();
    return "^(" + e.str() + ")";
}

std::string atom_str(const Atom& a) {
    if (const auto* v = std::get_if<JetVar>(&a)) return v->token();
    if (const auto* s = std::get_if<std::string>(&a)) return *s;
    if (const auto* f = std::get_if<FuncAtom>(&a))
        return std::string(func_name(f->fn)) + "(" + to_string(f->arg) + ")";
    return "(" + to_string(std::get<PowBase>(a).base) + ")";
}

std::string term_str(const Term& t) {
    const Rational mag = cmp(t.coeff, Rational(0)) < 0 ? -t.coeff : t.coeff;
    std::vector<std::string> num;
    std::vector<std::string> den;
    for (const Factor& f : t.mono.factors) {
        if (cmp(f.exp, Rational(0)) > 0) {
            num.push_back(atom_str(f.atom) + exp_suffix(f.exp));
        } else {
            den.push_back(atom_str(f.atom) + exp_suffix(-f.exp));
        }
    }
    std::string ns;
    if (!mag.is_one() || num.empty()) ns = mag.str();
    for (const auto& p : num) {
        if (!ns.empty()) ns += "*";
        ns += p;
    }
    if (den.empty()) return ns;
    std::string ds;
    for (const auto& p : den) {
        if (!ds.empty()) ds += "*";
        ds += p;
    }
    if (den.size() > 1) ds = "(" + ds + ")";
    return ns + "/" + ds;
}

}  // namespace

std::string to_string(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : e.data().terms) {
        const bool neg = cmp(t.coeff, Rational(0)) < 0;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        out += term_str(t);
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace dode
