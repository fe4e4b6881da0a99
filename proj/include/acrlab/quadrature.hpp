#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "acrlab/common.hpp"

namespace acrlab {

// Adaptive quadrature on a nested Gauss(7)/Kronrod(15) pair, plus a log-domain
// variant for integrands of the form exp(phi) whose values overflow doubles.

namespace detail {

// classical 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b] to a relative target.
template <typename F>
double gk_integrate(const F& f, double a, double b, double rel_tol = 1e-10) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b, value, error;
    };
    auto evaluate = [&](double lo, double hi) {
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        double fk = 0, fg = 0;
        for (int i = 0; i < 8; ++i) {
            double x = h * detail::kGK15Nodes[i];
            double v = (i == 7) ? f(c) : f(c - x) + f(c + x);
            fk += detail::kGK15WeightsK[i] * v;
            if (i == 1) fg += detail::kGauss7Weights[0] * v;
            if (i == 3) fg += detail::kGauss7Weights[1] * v;
            if (i == 5) fg += detail::kGauss7Weights[2] * v;
            if (i == 7) fg += detail::kGauss7Weights[3] * v;
        }
        return Seg{lo, hi, fk * h, std::fabs((fk - fg) * h)};
    };
    std::vector<Seg> segs{evaluate(a, b)};
    for (int iter = 0; iter < 2000; ++iter) {
        double total = 0, err = 0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= rel_tol * std::max(std::fabs(total), 1e-300) || segs.size() > 1500) return total;
        Seg w = segs[worst];
        segs[worst] = evaluate(w.a, 0.5 * (w.a + w.b));
        segs.push_back(evaluate(0.5 * (w.a + w.b), w.b));
    }
    double total = 0;
    for (const auto& s : segs) total += s.value;
    return total;
}

/// log of the integral of exp(phi) over [a, b]; phi supplied directly so the
/// integrand may exceed the double range by astronomical margins.
template <typename F>
double gk_log_integrate(const F& phi, double a, double b, double rel_tol = 1e-10) {
    if (a == b) return -std::numeric_limits<double>::infinity();
    struct Seg {
        double a, b, log_value, rel_error;
    };
    auto evaluate = [&](double lo, double hi) {
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        double vals[15], xs[15];
        int m = 0;
        for (int i = 0; i < 8; ++i) {
            double x = h * detail::kGK15Nodes[i];
            if (i == 7) {
                xs[m++] = c;
            } else {
                xs[m++] = c - x;
                xs[m++] = c + x;
            }
        }
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            vals[i] = phi(xs[i]);
            mx = std::max(mx, vals[i]);
        }
        double fk = 0, fg = 0;
        int idx = 0;
        for (int i = 0; i < 8; ++i) {
            double v;
            if (i == 7) {
                v = std::exp(vals[idx++] - mx);
            } else {
                v = std::exp(vals[idx] - mx) + std::exp(vals[idx + 1] - mx);
                idx += 2;
            }
            fk += detail::kGK15WeightsK[i] * v;
            if (i == 1) fg += detail::kGauss7Weights[0] * v;
            if (i == 3) fg += detail::kGauss7Weights[1] * v;
            if (i == 5) fg += detail::kGauss7Weights[2] * v;
            if (i == 7) fg += detail::kGauss7Weights[3] * v;
        }
        double log_value = mx + std::log(fk * h);
        double rel_error = std::fabs(fk - fg) / std::max(fk, 1e-300);
        return Seg{lo, hi, log_value, rel_error};
    };
    // refine by absolute error contribution: a segment with terrible relative
    // error but negligible mass must not eat the refinement budget
    std::vector<Seg> segs{evaluate(a, b)};
    for (int iter = 0; iter < 2000; ++iter) {
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto& s : segs) mx = std::max(mx, s.log_value);
        if (!std::isfinite(mx)) break;
        double total = 0, err = 0;
        std::size_t worst = 0;
        double worst_contrib = -1;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            double mass = std::exp(segs[i].log_value - mx);
            total += mass;
            double contrib = mass * segs[i].rel_error;
            err += contrib;
            if (contrib > worst_contrib) {
                worst_contrib = contrib;
                worst = i;
            }
        }
        if (err <= rel_tol * total || segs.size() > 1500) break;
        Seg w = segs[worst];
        segs[worst] = evaluate(w.a, 0.5 * (w.a + w.b));
        segs.push_back(evaluate(0.5 * (w.a + w.b), w.b));
    }
    // logsumexp across segments
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& s : segs) mx = std::max(mx, s.log_value);
    if (!std::isfinite(mx)) return mx;
    double acc = 0;
    for (const auto& s : segs) acc += std::exp(s.log_value - mx);
    return mx + std::log(acc);
}

}  // namespace acrlab
