#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>

#include "acrlab/growth.hpp"
#include "acrlab/quadrature.hpp"
#include "acrlab/time_expr.hpp"

namespace acrlab {

// Closed-form reference solutions used as independent ground truth against the
// integrator and the limit predictor.

/// b(t) for the closed pair  A+B -> 2B (k1), B -> A (k2)  from (a0, b0).
/// Two-case formula with a 1e-12 band around a0+b0 = k2/k1 selecting the
/// rational-decay branch; overflow-safe for strongly incompatible data.
inline double canonical_b(double k1, double k2, double a0, double b0, double t) {
    double k = k2 / k1;
    if (b0 == 0.0) return 0.0;
    double D = a0 + b0 - k;
    if (std::fabs(D) <= 1e-12 * (1 + std::fabs(a0) + std::fabs(b0) + std::fabs(k))) {
        double c = k - a0;  // equals b0 on this branch
        return c / (1 + c * k1 * t);
    }
    double expo = -k1 * D * t;
    double r = (a0 - k) / b0;
    if (expo > 700.0) {
        // denominator dominated by r*e^{expo}; b ~ (D/r) e^{-expo} -> 0
        return (D / r) * std::exp(-expo);
    }
    return D / (1 + r * std::exp(expo));
}

inline double canonical_a(double k1, double k2, double a0, double b0, double t) {
    return a0 + b0 - canonical_b(k1, k2, a0, b0, t);
}

/// G(t) = int_0^t (gA + gB): closed form on the exp-poly class, adaptive
/// quadrature otherwise.
inline double total_G(const TimeExpr& gA, const TimeExpr& gB, double t) {
    TimeExpr sum = TimeExpr::add({gA, gB});
    if (auto p = to_exp_poly(sum)) {
        if (auto anti = exp_poly_integral0(*p)) return exp_poly_eval(*anti, t);
    }
    return gk_integrate([&](double s) { return sum.eval(s); }, 0.0, t, 1e-10);
}

/// H(t) = e^{-l t} int_0^t g(s) e^{l s} ds, evaluated in the shifted form
/// int_0^t e^{l (s-t)} g(s) ds so nothing overflows.
inline double H_outflow(const TimeExpr& g, double ell, double t) {
    if (auto p = to_exp_poly(g)) {
        ExpPoly shifted = *p;
        for (auto& term : shifted) term.rate += ell;
        if (auto anti = exp_poly_integral0(shifted)) {
            ExpPoly back = *anti;  // multiply by e^{-l t}: shift every rate down
            for (auto& term : back) term.rate -= ell;
            return exp_poly_eval(back, t);
        }
    }
    return gk_integrate([&](double s) { return std::exp(ell * (s - t)) * g.eval(s); }, 0.0, t,
                        1e-10);
}

/// Explicit solution of the forced pair with no inflow on B:
///   da/dt = -k1 (a - k)(a0 + b0 + G_a(t) - a) + g_a(t)
///   a(t)  = a0 + b0 + G_a(t) - b0 q(t) / (1 + k1 b0 Q(t))
/// with q = exp[k1 (a0+b0-k) t + k1 int_0^t G_a] and Q = int_0^t q.
/// q and Q are handled in the log domain; the ratio is formed via logsumexp.
class Motif2GeneralOracle {
public:
    Motif2GeneralOracle(double k1, double k2, double a0, double b0, TimeExpr gA)
        : k1_(k1), k_(k2 / k1), a0_(a0), b0_(b0), gA_(std::move(gA)) {
        if (auto p = to_exp_poly(gA_)) {
            auto anti = exp_poly_integral0(*p);
            if (anti) {
                Ga_closed_ = anti;  // G_a as exp-poly
                IGa_closed_ = exp_poly_integral0(*anti);
            }
        }
    }

    double Ga(double t) const {
        if (Ga_closed_) return exp_poly_eval(*Ga_closed_, t);
        return gk_integrate([&](double s) { return gA_.eval(s); }, 0.0, t, 1e-10);
    }

    /// log q(t) = k1 (a0 + b0 - k) t + k1 int_0^t G_a
    double log_q(double t) const {
        double iga;
        if (IGa_closed_) {
            iga = exp_poly_eval(*IGa_closed_, t);
        } else {
            iga = gk_integrate([&](double s) { return Ga(s); }, 0.0, t, 1e-9);
        }
        return k1_ * ((a0_ + b0_ - k_) * t + iga);
    }

    double a(double t) const {
        if (t == 0.0) return a0_;
        double head = a0_ + b0_ + Ga(t);
        if (b0_ == 0.0) return head;
        double log_num = std::log(b0_) + log_q(t);
        double logQ = gk_log_integrate([&](double s) { return log_q(s); }, 0.0, t, 1e-10);
        double log_k1b0Q = std::log(k1_ * b0_) + logQ;
        // log(1 + k1 b0 Q)
        double log_den = log_k1b0Q > 0 ? log_k1b0Q + std::log1p(std::exp(-log_k1b0Q))
                                       : std::log1p(std::exp(log_k1b0Q));
        return head - std::exp(log_num - log_den);
    }

private:
    double k1_, k_, a0_, b0_;
    TimeExpr gA_;
    std::optional<ExpPoly> Ga_closed_, IGa_closed_;
};

inline double motif2_general_a(double k1, double k2, double a0, double b0, const TimeExpr& gA,
                               double t) {
    return Motif2GeneralOracle(k1, k2, a0, b0, gA).a(t);
}

/// Closed solution of the degradation cascade
///   dx2/dt = -k2 x2^2,  dx1/dt = -k1 x1^2 - k2 x1 x2,  from (b1, b2) > 0.
/// x1 carries the slow 1/(k1 t log t) tail that defeats the t*x1 criterion.
inline std::pair<double, double> counterexample_x1_x2(double k1, double k2, double b1, double b2,
                                                      double t) {
    double u = 1 + k2 * b2 * t;
    double x2 = b2 / u;
    double x1 = b1 * b2 * k2 / (u * (b2 * k2 + b1 * k1 * std::log(u)));
    return {x1, x2};
}

/// Exact int_0^t x1 ds for the system above (log-log growth; diverges).
inline double counterexample_int_x1(double k1, double k2, double b1, double b2, double t) {
    double L = std::log(1 + k2 * b2 * t);
    return std::log(1 + (b1 * k1 / (b2 * k2)) * L) / k1;
}

// ---------------------------------------------------------------------------

/// A named closed-form evaluator with its validity domain; samples can be
/// packed into a Trajectory and written through the same CSV schema for
/// plotting overlays.
struct OracleFn {
    std::string name;
    std::function<std::vector<double>(double)> eval;  // t -> covered components
    std::string domain;
};

inline OracleFn make_canonical_oracle(double k1, double k2, double a0, double b0) {
    return {"closed-pair",
            [=](double t) {
                double b = canonical_b(k1, k2, a0, b0, t);
                return std::vector<double>{a0 + b0 - b, b};
            },
            "t >= 0; closed pair from (a0, b0)"};
}

inline OracleFn make_pair_source_oracle(double k1, double k2, double a0, double b0,
                                        const TimeExpr& gA) {
    auto oracle = std::make_shared<Motif2GeneralOracle>(k1, k2, a0, b0, gA);
    return {"pair-with-source",
            [oracle](double t) { return std::vector<double>{oracle->a(t)}; },
            "t >= 0; source on the robust species only, none on the driver"};
}

inline OracleFn make_slow_decay_oracle(double k1, double k2, double b1, double b2) {
    return {"slow-decay-pair",
            [=](double t) {
                auto [x1, x2] = counterexample_x1_x2(k1, k2, b1, b2, t);
                return std::vector<double>{x1, x2};
            },
            "t >= 0; b1, b2 > 0"};
}

/// Sample an oracle on a time grid as a Trajectory (aux columns left empty),
/// ready for write_csv.
template <typename Traj>
Traj sample_oracle(const OracleFn& fn, const std::vector<double>& times) {
    Traj out;
    for (double t : times) {
        out.times.push_back(t);
        auto v = fn.eval(t);
        out.states.emplace_back(v.begin(), v.end());
    }
    return out;
}

}  // namespace acrlab
