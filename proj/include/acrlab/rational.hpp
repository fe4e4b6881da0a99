#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "acrlab/common.hpp"

namespace acrlab {

/// Exact rational on int64 with overflow-checked arithmetic (128-bit intermediates).
/// Denominator is always positive; gcd-reduced.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return Rational(-num_, den_, nocheck{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.num_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw Error("rational division by zero");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        return make_checked(n, d);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational pow(int e) const {
        if (e < 0) return Rational(1) / pow(-e);
        Rational r(1), base = *this;
        while (e > 0) {
            if (e & 1) r *= base;
            base = (e > 1) ? base * base : base;
            e >>= 1;
        }
        return r;
    }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parse a decimal literal ("3", "0.25", "1e-3") into an exact rational.
    static Rational from_decimal(const std::string& text) {
        std::size_t i = 0;
        bool neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
        std::int64_t mant = 0;
        int frac_digits = 0;
        bool any = false;
        for (; i < text.size() && std::isdigit((unsigned char)text[i]); ++i) {
            mant = mul_add_checked(mant, 10, text[i] - '0');
            any = true;
        }
        if (i < text.size() && text[i] == '.') {
            ++i;
            for (; i < text.size() && std::isdigit((unsigned char)text[i]); ++i) {
                mant = mul_add_checked(mant, 10, text[i] - '0');
                ++frac_digits;
                any = true;
            }
        }
        int exp10 = 0;
        if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
            ++i;
            bool eneg = false;
            if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
            int ev = 0;
            bool edig = false;
            for (; i < text.size() && std::isdigit((unsigned char)text[i]); ++i) {
                ev = ev * 10 + (text[i] - '0');
                edig = true;
            }
            if (!edig) throw Error("bad exponent in numeric literal '" + text + "'");
            exp10 = eneg ? -ev : ev;
        }
        if (!any || i != text.size())
            throw Error("bad numeric literal '" + text + "'");
        Rational r(neg ? -mant : mant);
        int net = exp10 - frac_digits;
        Rational ten(10);
        return r * ten.pow(net);
    }

    /// Best rational approximation of a double (continued fractions, denominator
    /// capped at 2^31). Exact for every short decimal literal; used where exact
    /// comparisons are wanted but only a double is available.
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw Error("cannot convert non-finite value to rational");
        bool neg = v < 0;
        double x = std::fabs(v);
        std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        double frac = x;
        for (int it = 0; it < 64; ++it) {
            double fl = std::floor(frac);
            if (fl > 9e18) throw Error("value too large for rational conversion");
            std::int64_t a = (std::int64_t)fl;
            std::int64_t p2 = mul_add_checked(a, p1, p0);
            std::int64_t q2 = mul_add_checked(a, q1, q0);
            if (q2 > (std::int64_t(1) << 31)) break;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            if (std::fabs((double)p1 / (double)q1 - x) < 1e-15 * (1 + x)) break;
            double rem = frac - fl;
            if (rem < 1e-15) break;
            frac = 1.0 / rem;
        }
        return Rational(neg ? -p1 : p1, q1);
    }

private:
    struct nocheck {};
    Rational(std::int64_t n, std::int64_t d, nocheck) : num_(n), den_(d) {}

    static std::int64_t mul_add_checked(std::int64_t a, std::int64_t b, std::int64_t c) {
        __int128 r = (__int128)a * b + c;
        return narrow(r);
    }

    static std::int64_t narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw Error("rational arithmetic overflow");
        return (std::int64_t)v;
    }

    static Rational make_checked(__int128 n, __int128 d) {
        if (d == 0) throw Error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a != 0) { n /= a; d /= a; }
        return Rational(narrow(n), narrow(d), nocheck{});
    }

    void normalize() { *this = make_checked(num_, den_); }

    std::int64_t num_, den_;
};

}  // namespace acrlab
