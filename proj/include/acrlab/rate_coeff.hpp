#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acrlab/rational.hpp"
#include "acrlab/time_expr.hpp"

namespace acrlab {

/// Exact rational expression in named rate constants: a sum of terms, each a
/// rational scalar times a product of constant names with integer exponents.
/// Canonical form: terms sorted by monomial, no zero terms.
class RateCoeff {
public:
    // monomial in constants: name -> nonzero integer exponent
    using Mono = std::map<std::string, int>;

    RateCoeff() = default;
    RateCoeff(const Rational& r) {
        if (!r.is_zero()) terms_[Mono{}] = r;
    }
    RateCoeff(std::int64_t n) : RateCoeff(Rational(n)) {}

    static RateCoeff constant_name(const std::string& name, int exp = 1) {
        RateCoeff c;
        if (exp != 0) c.terms_[Mono{{name, exp}}] = Rational(1);
        else c.terms_[Mono{}] = Rational(1);
        return c;
    }

    bool is_zero() const { return terms_.empty(); }

    bool is_single_term() const { return terms_.size() == 1; }

    /// True when every term has a positive scalar (then the value is positive
    /// for any positive binding of the constants).
    bool all_terms_positive() const {
        if (terms_.empty()) return false;
        for (const auto& [m, r] : terms_)
            if (r.sign() <= 0) return false;
        return true;
    }

    /// Constant term (empty monomial), if this is a pure rational scalar.
    std::optional<Rational> as_rational() const {
        if (terms_.empty()) return Rational(0);
        if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
        return std::nullopt;
    }

    friend RateCoeff operator+(const RateCoeff& a, const RateCoeff& b) {
        RateCoeff out = a;
        for (const auto& [m, r] : b.terms_) {
            auto it = out.terms_.find(m);
            if (it == out.terms_.end()) {
                out.terms_[m] = r;
            } else {
                it->second += r;
                if (it->second.is_zero()) out.terms_.erase(it);
            }
        }
        return out;
    }
    friend RateCoeff operator-(const RateCoeff& a, const RateCoeff& b) { return a + (-b); }
    RateCoeff operator-() const {
        RateCoeff out = *this;
        for (auto& [m, r] : out.terms_) r = -r;
        return out;
    }
    friend RateCoeff operator*(const RateCoeff& a, const RateCoeff& b) {
        RateCoeff out;
        for (const auto& [ma, ra] : a.terms_) {
            for (const auto& [mb, rb] : b.terms_) {
                Mono m = ma;
                for (const auto& [name, e] : mb) {
                    int ne = (m.count(name) ? m[name] : 0) + e;
                    if (ne == 0) m.erase(name);
                    else m[name] = ne;
                }
                Rational r = ra * rb;
                auto it = out.terms_.find(m);
                if (it == out.terms_.end()) {
                    if (!r.is_zero()) out.terms_[m] = r;
                } else {
                    it->second += r;
                    if (it->second.is_zero()) out.terms_.erase(it);
                }
            }
        }
        return out;
    }
    RateCoeff& operator+=(const RateCoeff& b) { return *this = *this + b; }
    RateCoeff& operator-=(const RateCoeff& b) { return *this = *this - b; }
    RateCoeff& operator*=(const RateCoeff& b) { return *this = *this * b; }

    RateCoeff pow(int e) const {
        if (e < 0) {
            if (!is_single_term()) throw Error("cannot invert a multi-term rate expression");
            return inverse_single().pow(-e);
        }
        RateCoeff r(Rational(1)), base = *this;
        for (int i = 0; i < e; ++i) r = r * base;
        return r;
    }

    /// Division. Exact when the divisor is a single term, or when the quotient
    /// is a single term times the divisor; nullopt otherwise (true multivariate
    /// division is never needed here).
    static std::optional<RateCoeff> divide(const RateCoeff& num, const RateCoeff& den) {
        if (den.is_zero()) return std::nullopt;
        if (den.is_single_term()) {
            return num * den.inverse_single();
        }
        if (num.is_zero()) return RateCoeff();
        // try q = lead(num)/lead(den), verify q*den == num
        RateCoeff lead_num = num.lead_term(), lead_den = den.lead_term();
        RateCoeff q = lead_num * lead_den.inverse_single();
        if (q * den == num) return q;
        return std::nullopt;
    }

    friend bool operator==(const RateCoeff& a, const RateCoeff& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const RateCoeff& a, const RateCoeff& b) { return !(a == b); }

    double eval(const Bindings& values) const {
        double sum = 0;
        for (const auto& [m, r] : terms_) {
            double p = r.to_double();
            for (const auto& [name, e] : m) {
                auto it = values.find(name);
                if (it == values.end())
                    throw UnboundParamError("unbound rate constant '" + name + "'");
                p *= pow_int(it->second, e);
            }
            sum += p;
        }
        return sum;
    }

    void collect_names(std::vector<std::string>& out) const {
        for (const auto& [m, r] : terms_)
            for (const auto& [name, e] : m)
                if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, r] : terms_) {
            Rational ra = r;
            if (first) {
                if (ra.sign() < 0) { out += "-"; ra = -ra; }
            } else {
                out += ra.sign() < 0 ? " - " : " + ";
                if (ra.sign() < 0) ra = -ra;
            }
            out += term_string(m, ra);
            first = false;
        }
        return out;
    }

    const std::map<Mono, Rational>& terms() const { return terms_; }

    /// Parse "k2/k1", "k3/k4*(1 + k5/k6)", "2.5", ... via the expression
    /// grammar, restricted to constants/identifiers/(+,-,*,/,integer ^).
    static RateCoeff parse(const std::string& text) {
        return from_expr(parse_expr(text));
    }

    static RateCoeff from_expr(const TimeExpr& e) {
        switch (e.kind()) {
            case ExprKind::Constant:
                return RateCoeff(Rational::from_double(e.value()));
            case ExprKind::Param:
                return constant_name(e.name());
            case ExprKind::Add: {
                RateCoeff acc;
                for (const auto& k : e.kids()) acc += from_expr(k);
                return acc;
            }
            case ExprKind::Mul: {
                RateCoeff acc{Rational(1)};
                for (const auto& k : e.kids()) acc *= from_expr(k);
                return acc;
            }
            case ExprKind::Pow: {
                double ex = e.value();
                if (ex != std::round(ex)) throw Error("rate expression needs integer exponents");
                return from_expr(e.kids()[0]).pow((int)ex);
            }
            default:
                throw Error("rate expression may only use constants, names, +, -, *, /, ^int");
        }
    }

private:
    RateCoeff lead_term() const {
        RateCoeff out;
        out.terms_[terms_.begin()->first] = terms_.begin()->second;
        return out;
    }

    RateCoeff inverse_single() const {
        if (terms_.size() != 1) throw Error("inverse of non-single-term rate expression");
        const auto& [m, r] = *terms_.begin();
        if (r.is_zero()) throw Error("inverse of zero");
        Mono inv;
        for (const auto& [name, e] : m) inv[name] = -e;
        RateCoeff out;
        out.terms_[inv] = Rational(1) / r;
        return out;
    }

    static std::string term_string(const Mono& m, const Rational& r) {
        std::vector<std::string> numf, denf;
        for (const auto& [name, e] : m) {
            std::string f = name;
            int ae = e < 0 ? -e : e;
            if (ae != 1) f += "^" + std::to_string(ae);
            (e > 0 ? numf : denf).push_back(f);
        }
        std::string out;
        bool scalar_one = (r.num() == 1);
        if (!scalar_one || numf.empty()) out += std::to_string(r.num());
        for (const auto& f : numf) {
            if (!out.empty()) out += "*";
            out += f;
        }
        std::string den;
        if (r.den() != 1) den = std::to_string(r.den());
        for (const auto& f : denf) {
            if (!den.empty()) den += "*";
            den += f;
        }
        if (!den.empty()) {
            bool paren = (r.den() != 1 ? 1 : 0) + denf.size() > 1;
            out += "/" + (paren ? "(" + den + ")" : den);
        }
        return out;
    }

    std::map<Mono, Rational> terms_;
};

}  // namespace acrlab
