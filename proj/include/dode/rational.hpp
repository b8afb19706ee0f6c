#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "dode/error.hpp"

namespace dode {

/// Exact rational number on int64 with overflow-checked arithmetic.
/// Invariant: den > 0, gcd(|num|, den) = 1.
class Rational {
  public:
    Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_integer() const { return den_ == 1; }
    bool is_nonneg_integer() const { return den_ == 1 && num_ >= 0; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator-(const Rational& a) {
        Rational r;
        r.num_ = checked(-static_cast<__int128>(a.num_));
        r.den_ = a.den_;
        return r;
    }
    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                     static_cast<__int128>(b.num_) * a.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + (-b);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.num_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw DomainError("rational division by zero");
        __int128 n = static_cast<__int128>(a.num_) * b.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.num_;
        return from128(n, d);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }

    /// Integer power; negative exponents invert (throws on 0^negative).
    Rational pow(long long e) const {
        if (e < 0) {
            if (num_ == 0) throw DomainError("0 raised to a negative power");
            return Rational(den_, num_).pow(-e);
        }
        Rational acc(1), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base = (e > 1) ? base * base : base;
            e >>= 1;
        }
        return acc;
    }

    /// Exact r-th root when one exists (r >= 1).
    static std::optional<Rational> root(const Rational& a, long long r) {
        if (r == 1) return a;
        if (a.num_ < 0) return std::nullopt;
        auto iroot = [](long long v, long long k) -> std::optional<long long> {
            if (v == 0) return 0;
            long long lo = 1, hi = v;
            while (lo <= hi) {
                long long mid = lo + (hi - lo) / 2;
                __int128 p = 1;
                bool over = false;
                for (long long i = 0; i < k; ++i) {
                    p *= mid;
                    if (p > v) { over = true; break; }
                }
                if (!over && p == v) return mid;
                if (over || p > v) hi = mid - 1; else lo = mid + 1;
            }
            return std::nullopt;
        };
        auto rn = iroot(a.num_, r);
        auto rd = iroot(a.den_, r);
        if (rn && rd) return Rational(*rn, *rd);
        return std::nullopt;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ <
               static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

  private:
    long long num_ = 0;
    long long den_ = 1;

    static long long checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw Error("rational arithmetic overflow");
        return static_cast<long long>(v);
    }

    static Rational from128(__int128 n, __int128 d) {
        if (d == 0) throw DomainError("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        r.num_ = checked(n);
        r.den_ = checked(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        Rational r = from128(num_, den_);
        num_ = r.num_;
        den_ = r.den_;
    }
};

inline int cmp(const Rational& a, const Rational& b) {
    if (a == b) return 0;
    return a < b ? -1 : 1;
}

}  // namespace dode
