#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "acrlab/time_expr.hpp"

namespace acrlab {

// Growth analysis over the exp-poly class: finite sums of c * t^d * e^{r t}.
// This is what mechanizes the symbolic hypothesis checks of the limit rules
// (G -> infinity, alpha = lim g_a/G, boundedness, integral divergence, ...).

struct ExpPolyTerm {
    double coeff;
    double deg;   // real exponent of t (>= 0 for anything parsed as an inflow)
    double rate;  // coefficient of t inside e^{rate t}
};

using ExpPoly = std::vector<ExpPolyTerm>;

namespace detail {
constexpr double kKeyTol = 1e-12;

inline bool key_eq(double a, double b) { return std::fabs(a - b) <= kKeyTol * (1 + std::fabs(a) + std::fabs(b)); }
}  // namespace detail

inline ExpPoly exp_poly_normalize(ExpPoly terms) {
    ExpPoly out;
    for (const auto& t : terms) {
        if (t.coeff == 0.0) continue;
        bool merged = false;
        for (auto& o : out) {
            if (detail::key_eq(o.deg, t.deg) && detail::key_eq(o.rate, t.rate)) {
                o.coeff += t.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(t);
    }
    std::erase_if(out, [](const ExpPolyTerm& t) { return std::fabs(t.coeff) < 1e-300; });
    std::sort(out.begin(), out.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
        if (!detail::key_eq(a.rate, b.rate)) return a.rate > b.rate;
        if (!detail::key_eq(a.deg, b.deg)) return a.deg > b.deg;
        return false;
    });
    return out;
}

inline ExpPoly exp_poly_mul(const ExpPoly& a, const ExpPoly& b) {
    ExpPoly out;
    for (const auto& x : a)
        for (const auto& y : b)
            out.push_back({x.coeff * y.coeff, x.deg + y.deg, x.rate + y.rate});
    return exp_poly_normalize(std::move(out));
}

inline ExpPoly exp_poly_add(const ExpPoly& a, const ExpPoly& b) {
    ExpPoly out = a;
    out.insert(out.end(), b.begin(), b.end());
    return exp_poly_normalize(std::move(out));
}

/// Convert an AST to exp-poly normal form; nullopt when outside the class.
inline std::optional<ExpPoly> to_exp_poly(const TimeExpr& e) {
    switch (e.kind()) {
        case ExprKind::Constant:
            if (e.value() == 0.0) return ExpPoly{};
            return ExpPoly{{e.value(), 0, 0}};
        case ExprKind::Time:
            return ExpPoly{{1, 1, 0}};
        case ExprKind::Param:
            return std::nullopt;  // params must be bound before analysis
        case ExprKind::Add: {
            ExpPoly acc;
            for (const auto& k : e.kids()) {
                auto p = to_exp_poly(k);
                if (!p) return std::nullopt;
                acc = exp_poly_add(acc, *p);
            }
            return acc;
        }
        case ExprKind::Mul: {
            ExpPoly acc{{1, 0, 0}};
            for (const auto& k : e.kids()) {
                auto p = to_exp_poly(k);
                if (!p) return std::nullopt;
                acc = exp_poly_mul(acc, *p);
            }
            return acc;
        }
        case ExprKind::Pow: {
            auto p = to_exp_poly(e.kids()[0]);
            if (!p) return std::nullopt;
            double ex = e.value();
            if (p->size() == 1) {
                const auto& t = (*p)[0];
                if (t.coeff < 0 && ex != std::round(ex)) return std::nullopt;
                return ExpPoly{{std::pow(t.coeff, ex), t.deg * ex, t.rate * ex}};
            }
            if (ex == std::round(ex) && ex >= 0 && ex <= 8) {
                ExpPoly acc{{1, 0, 0}};
                for (int i = 0; i < (int)ex; ++i) acc = exp_poly_mul(acc, *p);
                return acc;
            }
            return std::nullopt;
        }
        case ExprKind::Exp: {
            // exp(c + r*t) = e^c * e^{r t}; anything else is outside the class
            auto p = to_exp_poly(e.kids()[0]);
            if (!p) return std::nullopt;
            double c = 0, r = 0;
            for (const auto& t : *p) {
                if (detail::key_eq(t.deg, 0) && detail::key_eq(t.rate, 0)) c += t.coeff;
                else if (detail::key_eq(t.deg, 1) && detail::key_eq(t.rate, 0)) r += t.coeff;
                else return std::nullopt;
            }
            return ExpPoly{{std::exp(c), 0, r}};
        }
        case ExprKind::Log:
            return std::nullopt;
    }
    return std::nullopt;
}

inline std::optional<ExpPolyTerm> leading_term(const ExpPoly& p) {
    if (p.empty()) return std::nullopt;
    return p.front();  // normalized order is (rate desc, deg desc)
}

/// Limit of a(t)/b(t) as t -> infinity, when both are exp-poly.
/// Returns the finite limit (0 included); nullopt when the ratio diverges.
inline std::optional<double> exp_poly_ratio_limit(const ExpPoly& a, const ExpPoly& b) {
    auto lb = leading_term(b);
    if (!lb) return std::nullopt;  // dividing by the zero function
    auto la = leading_term(a);
    if (!la) return 0.0;
    if (la->rate < lb->rate - detail::kKeyTol) return 0.0;
    if (la->rate > lb->rate + detail::kKeyTol) return std::nullopt;
    if (la->deg < lb->deg - detail::kKeyTol) return 0.0;
    if (la->deg > lb->deg + detail::kKeyTol) return std::nullopt;
    return la->coeff / lb->coeff;
}

/// Finite limit of p(t) as t -> infinity, if one exists.
inline std::optional<double> exp_poly_limit(const ExpPoly& p) {
    double lim = 0;
    for (const auto& t : p) {
        if (t.rate > detail::kKeyTol) return std::nullopt;
        if (t.rate < -detail::kKeyTol) continue;  // decays
        if (t.deg > detail::kKeyTol) return std::nullopt;
        if (t.deg < -detail::kKeyTol) continue;
        lim += t.coeff;
    }
    return lim;
}

enum class IntegralTrend { DivergesToPlusInfinity, DivergesToMinusInfinity, Converges, Zero };

/// Behavior of the improper integral over [0, inf) of an exp-poly function,
/// decided from the leading term.
inline IntegralTrend exp_poly_integral_trend(const ExpPoly& p) {
    auto l = leading_term(p);
    if (!l) return IntegralTrend::Zero;
    bool diverges = l->rate > detail::kKeyTol ||
                    (std::fabs(l->rate) <= detail::kKeyTol && l->deg >= -1.0 + 1e-9);
    if (!diverges) return IntegralTrend::Converges;
    return l->coeff > 0 ? IntegralTrend::DivergesToPlusInfinity
                        : IntegralTrend::DivergesToMinusInfinity;
}

/// Leading term of the antiderivative \int_0^t p, valid whenever the integral
/// diverges; nullopt when the integral stays bounded.
inline std::optional<ExpPolyTerm> exp_poly_integral_leading(const ExpPoly& p) {
    auto l = leading_term(p);
    if (!l) return std::nullopt;
    if (l->rate > detail::kKeyTol)
        return ExpPolyTerm{l->coeff / l->rate, l->deg, l->rate};
    if (std::fabs(l->rate) <= detail::kKeyTol && l->deg > -1.0 + 1e-9)
        return ExpPolyTerm{l->coeff / (l->deg + 1), l->deg + 1, 0};
    return std::nullopt;
}

/// Exact definite integral \int_0^t p(s) ds as an exp-poly in t.
/// Requires integer degrees for terms with nonzero rate; nullopt otherwise.
inline std::optional<ExpPoly> exp_poly_integral0(const ExpPoly& p) {
    ExpPoly out;
    for (const auto& term : p) {
        if (std::fabs(term.rate) <= detail::kKeyTol) {
            if (term.deg <= -1.0 + 1e-9) return std::nullopt;
            out.push_back({term.coeff / (term.deg + 1), term.deg + 1, 0});
            continue;
        }
        double dint = std::round(term.deg);
        if (std::fabs(term.deg - dint) > 1e-9 || dint < 0 || dint > 30) return std::nullopt;
        int d = (int)dint;
        // \int_0^t s^d e^{rs} ds = e^{rt} sum_{j=0..d} (-1)^j d!/(d-j)! t^{d-j} / r^{j+1}
        //                          - (-1)^d d! / r^{d+1}
        double fall = 1.0;  // d!/(d-j)!
        double sgn = 1.0;
        for (int j = 0; j <= d; ++j) {
            out.push_back({term.coeff * sgn * fall / std::pow(term.rate, j + 1),
                           (double)(d - j), term.rate});
            fall *= (d - j);
            sgn = -sgn;
        }
        double dfact = 1.0;
        for (int j = 2; j <= d; ++j) dfact *= j;
        out.push_back({-term.coeff * ((d % 2 == 0) ? 1.0 : -1.0) * dfact /
                           std::pow(term.rate, d + 1),
                       0, 0});
    }
    return exp_poly_normalize(std::move(out));
}

inline double exp_poly_eval(const ExpPoly& p, double t) {
    double sum = 0;
    for (const auto& term : p)
        sum += term.coeff * std::pow(t, term.deg) * std::exp(term.rate * t);
    return sum;
}

inline ExpPoly exp_poly_diff(const ExpPoly& p) {
    ExpPoly out;
    for (const auto& term : p) {
        if (term.rate != 0) out.push_back({term.coeff * term.rate, term.deg, term.rate});
        if (term.deg != 0) out.push_back({term.coeff * term.deg, term.deg - 1, term.rate});
    }
    return exp_poly_normalize(std::move(out));
}

/// Rebuild a TimeExpr from an exp-poly form (used by the feeder reduction).
inline TimeExpr exp_poly_to_expr(const ExpPoly& p) {
    std::vector<TimeExpr> terms;
    for (const auto& t : p) {
        std::vector<TimeExpr> fs{TimeExpr::constant(t.coeff)};
        if (std::fabs(t.deg) > 1e-15) fs.push_back(TimeExpr::pow(TimeExpr::time(), t.deg));
        if (std::fabs(t.rate) > 1e-15)
            fs.push_back(TimeExpr::exp(TimeExpr::mul({TimeExpr::constant(t.rate), TimeExpr::time()})));
        terms.push_back(TimeExpr::mul(std::move(fs)));
    }
    return TimeExpr::add(std::move(terms));
}

// ---------------------------------------------------------------------------

enum class GrowthTag { Zero, BoundedNonzero, PolyGrowth, ExpGrowth, DoubleExp, Unclassified };

struct GrowthClass {
    GrowthTag tag = GrowthTag::Unclassified;
    double degree = 0.0;  // PolyGrowth degree, or ExpGrowth polynomial prefactor degree
    double rate = 0.0;    // ExpGrowth rate

    bool bounded() const { return tag == GrowthTag::Zero || tag == GrowthTag::BoundedNonzero; }
    bool diverges() const {
        return tag == GrowthTag::PolyGrowth || tag == GrowthTag::ExpGrowth ||
               tag == GrowthTag::DoubleExp;
    }
};

namespace detail {

// matches C * exp(E(t)) with C > 0 and E exp-poly growing to +infinity;
// yields the leading term of E
inline std::optional<ExpPolyTerm> double_exp_inner(const TimeExpr& e) {
    const TimeExpr* arg = nullptr;
    if (e.kind() == ExprKind::Exp) {
        arg = &e.kids()[0];
    } else if (e.kind() == ExprKind::Mul) {
        const TimeExpr* expPart = nullptr;
        double c = 1;
        for (const auto& k : e.kids()) {
            if (k.kind() == ExprKind::Exp && !to_exp_poly(k)) {
                if (expPart) return std::nullopt;
                expPart = &k;
            } else if (k.kind() == ExprKind::Constant) {
                c *= k.value();
            } else {
                return std::nullopt;
            }
        }
        if (!expPart || c <= 0) return std::nullopt;
        arg = &expPart->kids()[0];
    } else {
        return std::nullopt;
    }
    auto p = to_exp_poly(*arg);
    if (!p) return std::nullopt;
    auto l = leading_term(*p);
    if (!l || l->rate <= kKeyTol || l->coeff <= 0) return std::nullopt;
    return l;
}

inline bool is_double_exp(const TimeExpr& e) { return double_exp_inner(e).has_value(); }

}  // namespace detail

/// Deterministic classification; exact on the exp-poly class and on
/// C*exp(E(t)) double-exponentials, Unclassified otherwise.
inline GrowthClass classify_growth(const TimeExpr& e) {
    if (e.has_unbound_params())
        throw UnboundParamError("classify_growth requires all identifiers bound");
    if (auto p = to_exp_poly(e)) {
        auto l = leading_term(*p);
        if (!l) return {GrowthTag::Zero, 0, 0};
        if (l->rate > detail::kKeyTol) {
            if (l->coeff <= 0) return {GrowthTag::Unclassified, 0, 0};
            return {GrowthTag::ExpGrowth, l->deg, l->rate};
        }
        if (l->rate < -detail::kKeyTol)  // decays to zero: bounded, not identically zero
            return {GrowthTag::BoundedNonzero, 0, 0};
        if (l->deg > detail::kKeyTol) {
            if (l->coeff <= 0) return {GrowthTag::Unclassified, 0, 0};
            return {GrowthTag::PolyGrowth, l->deg, 0};
        }
        return {GrowthTag::BoundedNonzero, 0, 0};
    }
    if (detail::is_double_exp(e)) return {GrowthTag::DoubleExp, 0, 0};
    return {GrowthTag::Unclassified, 0, 0};
}

}  // namespace acrlab
