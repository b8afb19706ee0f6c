#include <cctype>
#include <sstream>

#include "dode/expr.hpp"

namespace dode {

namespace {

struct Token {
    enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind = End;
    std::size_t pos = 0;
    Rational value;      // Number
    std::string text;    // Ident
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_;

    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        tok_ = Token{};
        tok_.pos = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::End;
            return;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': tok_.kind = Token::Plus; ++pos_; return;
            case '-': tok_.kind = Token::Minus; ++pos_; return;
            case '*': tok_.kind = Token::Star; ++pos_; return;
            case '/': tok_.kind = Token::Slash; ++pos_; return;
            case '^': tok_.kind = Token::Caret; ++pos_; return;
            case '(': tok_.kind = Token::LParen; ++pos_; return;
            case ')': tok_.kind = Token::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.kind = Token::Number;
            tok_.value = lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    Rational lex_number() {
        Rational value(0);
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            value = value * Rational(10) + Rational(src_[pos_] - '0');
            ++pos_;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw ParseError(pos_, "digits expected after decimal point");
            Rational scale(1);
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                value = value * Rational(10) + Rational(src_[pos_] - '0');
                scale = scale * Rational(10);
                ++pos_;
            }
            value = value / scale;
        }
        return value;
    }
};

class Parser {
  public:
    Parser(std::string_view src, const ParseOptions& opt) : lex_(src), opt_(opt) {}

    Expr run() {
        Expr e = expression();
        const Token& t = lex_.peek();
        if (t.kind != Token::End)
            throw ParseError(t.pos, "unexpected trailing input");
        return e;
    }

  private:
    Lexer lex_;
    const ParseOptions& opt_;

    Expr expression() {
        Expr e = term();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::Plus) {
                lex_.take();
                e = e + term();
            } else if (t.kind == Token::Minus) {
                lex_.take();
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = factor();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::Star) {
                lex_.take();
                e = e * factor();
            } else if (t.kind == Token::Slash) {
                lex_.take();
                const Token at = lex_.peek();
                Expr d = factor();
                if (d.is_zero()) throw ParseError(at.pos, "division by zero");
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr factor() {
        if (lex_.peek().kind == Token::Minus) {
            lex_.take();
            return -factor();
        }
        Expr base = primary();
        if (lex_.peek().kind == Token::Caret) {
            lex_.take();
            const Rational e = exponent();
            if (base.is_zero() && !(e > Rational(0)))
                throw ParseError(lex_.peek().pos, "zero raised to a nonpositive power");
            return pow(base, e);
        }
        return base;
    }

    Rational exponent() {
        bool neg = false;
        if (lex_.peek().kind == Token::Minus) {
            lex_.take();
            neg = true;
        }
        const Token t = lex_.peek();
        Rational value;
        if (t.kind == Token::Number) {
            lex_.take();
            value = t.value;
        } else if (t.kind == Token::LParen) {
            lex_.take();
            Expr e = expression();
            expect(Token::RParen, ")");
            if (!e.is_rational())
                throw ParseError(t.pos, "exponent must be a rational constant");
            value = e.rational_value();
        } else {
            throw ParseError(t.pos, "exponent expected");
        }
        return neg ? -value : value;
    }

    Expr primary() {
        const Token t = lex_.take();
        switch (t.kind) {
            case Token::Number:
                return Expr(t.value);
            case Token::LParen: {
                Expr e = expression();
                expect(Token::RParen, ")");
                return e;
            }
            case Token::Ident: {
                if (lex_.peek().kind == Token::LParen) {
                    auto fn = func_from_name(t.text);
                    if (!fn)
                        throw ParseError(t.pos, "unknown function '" + t.text + "'");
                    lex_.take();
                    Expr arg = expression();
                    expect(Token::RParen, ")");
                    return apply(*fn, arg);
                }
                if (auto v = jet_from_token(t.text)) return Expr(*v);
                if (opt_.constants.count(t.text)) return Expr::symbol(t.text);
                throw ParseError(t.pos, unknown_identifier_message(t.text));
            }
            default:
                throw ParseError(t.pos, "expression expected");
        }
    }

    void expect(Token::Kind k, const char* what) {
        const Token t = lex_.take();
        if (t.kind != k)
            throw ParseError(t.pos, std::string("'") + what + "' expected");
    }

    std::string unknown_identifier_message(const std::string& name) const {
        std::ostringstream os;
        os << "unknown identifier '" << name << "'; valid jet variables:";
        for (int order = -1; order <= JetVar::kMaxOrder; ++order)
            for (int level = JetVar::kMinLevel; level <= JetVar::kMaxLevel; ++level) {
                JetVar v = order < 0 ? JetVar::time(level) : JetVar::state(level, order);
                os << ' ' << v.token();
            }
        os << "; declared constants:";
        for (const auto& c : opt_.constants) os << ' ' << c;
        return os.str();
    }
};

}  // namespace

Expr parse(std::string_view text, const ParseOptions& opt) {
    Parser p(text, opt);
    return p.run();
}

}  // namespace dode
