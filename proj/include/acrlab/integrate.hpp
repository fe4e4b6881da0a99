#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "acrlab/growth.hpp"
#include "acrlab/poly_field.hpp"

namespace acrlab {

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for the non-autonomous
// mass-action system, with along-trajectory auxiliary integrals riding inside
// the state vector so they see the same error control as the solution.
// The stepper is generic over the scalar type; `double` covers everything
// except checks that must resolve |x* - x_i| below the double quantization
// floor, which instantiate it with `long double`.

enum class IntegrationStatus {
    ReachedEnd,
    StepSizeUnderflow,
    MaxStepsExceeded,
    OverflowGuard,   // forcing exceeded the log-domain cap
    StateNegative,   // component fell below -100*atol
};

inline const char* to_string(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::ReachedEnd: return "ReachedEnd";
        case IntegrationStatus::StepSizeUnderflow: return "StepSizeUnderflow";
        case IntegrationStatus::MaxStepsExceeded: return "MaxStepsExceeded";
        case IntegrationStatus::OverflowGuard: return "OverflowGuard";
        case IntegrationStatus::StateNegative: return "StateNegative";
    }
    return "?";
}

/// Bound decomposition evaluators attached to an integration run. The ratio
/// column integrates F_i/(x* - x_i) in its regular form: for a zero load this
/// quotient equals the power f identically, which is the case the ratio
/// identity needs. With a nonzero load the raw quotient is singular wherever
/// the trajectory crosses the hyperplane x_i = x* (constant-inflow runs do
/// cross it), so the column carries the regular part f there as well.
struct AuxSpec {
    CompiledPoly f;
    CompiledPoly g_poly;
    bool has_forcing = false;
    ExprProgram g_forcing;
    double x_star = 0;
    int species = 0;

    template <typename Real = double>
    Real eval_f(const Real* x) const {
        return f.eval(x);
    }
    template <typename Real = double>
    Real eval_g(const Real* x, Real t) const {
        Real g = g_poly.eval(x);
        if (has_forcing) g += g_forcing.eval(t);
        return g;
    }
};

template <typename Real>
struct BasicTrajectory {
    std::vector<Real> times;
    std::vector<std::vector<Real>> states;               // species components per time
    std::vector<Real> int_f, int_absg, int_ratio;        // present iff aux attached
    long accepted = 0, rejected = 0;
    IntegrationStatus status = IntegrationStatus::ReachedEnd;
    std::string message;

    bool has_aux() const { return !int_f.empty(); }
    Real t_end() const { return times.empty() ? Real(0) : times.back(); }
    const std::vector<Real>& last_state() const { return states.back(); }
    bool reached_end() const { return status == IntegrationStatus::ReachedEnd; }
};

using Trajectory = BasicTrajectory<double>;

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    long max_steps = 20'000'000;
    double h_min = 0.0;        // stop cleanly (StepSizeUnderflow) once h falls below
    double h_max = std::numeric_limits<double>::infinity();
    double fixed_step = 0.0;   // > 0: no adaptivity (order tests)
    int store_every = 1;       // thin stored output; the last point is always kept
    const AuxSpec* aux = nullptr;
};

namespace detail {

// classical Dormand-Prince 5(4) tableau
struct Dopri5Tableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// step ceiling resolving exponentially / double-exponentially growing forcing
class ForcingCeiling {
public:
    explicit ForcingCeiling(const PolyField& field) {
        for (std::size_t i = 0; i < field.size(); ++i) {
            if (!field.has_inflow[i]) continue;
            GrowthClass g = classify_growth(field.inflows[i]);
            if (g.tag == GrowthTag::ExpGrowth) {
                fixed_rate_ = std::max(fixed_rate_, g.rate);
            } else if (g.tag == GrowthTag::DoubleExp) {
                auto inner = double_exp_inner(field.inflows[i]);
                if (inner) {
                    // d/dt log(C e^{c e^{rt}}) = c r e^{rt}
                    dexp_.push_back({inner->coeff * inner->rate, inner->rate});
                }
            }
        }
    }

    double max_h(double t) const {
        double rate = fixed_rate_;
        for (const auto& [cr, r] : dexp_) rate = std::max(rate, cr * std::exp(r * t));
        if (rate <= 1e-12) return std::numeric_limits<double>::infinity();
        return 0.1 / rate;
    }

private:
    double fixed_rate_ = 0.0;
    std::vector<std::pair<double, double>> dexp_;
};

}  // namespace detail

template <typename Real>
BasicTrajectory<Real> integrate_real(const PolyField& field, const Bindings& values,
                                     const std::vector<double>& x0, double t_end_in,
                                     const IntegrateOptions& opts = {}) {
    using T = detail::Dopri5Tableau;
    const std::size_t n = field.size();
    if (x0.size() != n) throw std::invalid_argument("x0 dimension mismatch");
    for (double v : x0)
        if (v < 0) throw std::invalid_argument("x0 must be nonnegative");
    if (!(t_end_in > 0)) throw std::invalid_argument("t_end must be positive");
    if (!(opts.rtol > 0) || !(opts.atol > 0))
        throw std::invalid_argument("tolerances must be positive");

    CompiledField cf(field, values);
    detail::ForcingCeiling ceiling(field);
    const bool with_aux = opts.aux != nullptr;
    const std::size_t dim = n + (with_aux ? 3 : 0);
    const Real t_end = Real(t_end_in);
    const Real atol = Real(opts.atol), rtol = Real(opts.rtol);

    std::vector<Real> y(dim, Real(0)), ynew(dim), ystage(dim);
    std::vector<std::vector<Real>> k(7, std::vector<Real>(dim));
    for (std::size_t i = 0; i < n; ++i) y[i] = Real(x0[i]);

    BasicTrajectory<Real> traj;
    traj.status = IntegrationStatus::ReachedEnd;

    bool forcing_ok = true;
    auto rhs = [&](Real t, const Real* yy, Real* dy) {
        forcing_ok &= cf.eval(yy, t, dy);
        if (with_aux) {
            const AuxSpec& aux = *opts.aux;
            Real fv = aux.eval_f(yy);
            dy[n] = fv;
            dy[n + 1] = std::fabs(aux.eval_g(yy, t));
            dy[n + 2] = fv;  // regular part of F_i/(x* - x_i); exact for zero load
        }
    };

    Real t(0);
    long stored_gap = 0;
    auto store = [&](bool force) {
        if (!force && ++stored_gap < opts.store_every) return;
        stored_gap = 0;
        traj.times.push_back(t);
        traj.states.emplace_back(y.begin(), y.begin() + n);
        if (with_aux) {
            traj.int_f.push_back(y[n]);
            traj.int_absg.push_back(y[n + 1]);
            traj.int_ratio.push_back(y[n + 2]);
        }
    };
    auto stop = [&](IntegrationStatus s, const std::string& msg) {
        traj.status = s;
        traj.message = msg;
        if (traj.times.empty() || traj.times.back() != t) store(true);
        return traj;
    };

    store(true);
    rhs(t, y.data(), k[0].data());
    if (!forcing_ok)
        return stop(IntegrationStatus::OverflowGuard, "forcing overflow at t=0");

    // initial step size: crude second-derivative probe, as in standard codes
    Real h;
    if (opts.fixed_step > 0) {
        h = Real(opts.fixed_step);
    } else {
        Real dnf(0), dny(0);
        for (std::size_t i = 0; i < dim; ++i) {
            Real sc = atol + rtol * std::fabs(y[i]);
            dnf += (k[0][i] / sc) * (k[0][i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= Real(1e-10) || dny <= Real(1e-10)) ? Real(1e-6)
                                                       : Real(0.01) * std::sqrt(dny / dnf);
        h = std::min({h, t_end, Real(opts.h_max), Real(ceiling.max_h((double)t))});
    }

    const Real safe(0.9), facl(0.2), facr(10.0), beta(0.04);
    Real facold(1e-4);
    const Real uround = std::numeric_limits<Real>::epsilon();

    while (t < t_end) {
        if (traj.accepted + traj.rejected >= opts.max_steps)
            return stop(IntegrationStatus::MaxStepsExceeded,
                        "max step count reached at t=" + format_double((double)t));
        if (opts.fixed_step <= 0) {
            h = std::min({h, Real(opts.h_max), Real(ceiling.max_h((double)t))});
            if (h < Real(opts.h_min) || Real(0.1) * h <= std::fabs(t) * uround)
                return stop(IntegrationStatus::StepSizeUnderflow,
                            "step size underflow at t=" + format_double((double)t) +
                                " (h=" + format_double((double)h) + ")");
        }
        bool last = false;
        if (t + Real(1.01) * h >= t_end) {
            h = t_end - t;
            last = true;
        }

        // stages (k1 via FSAL)
        auto stage = [&](double c, std::initializer_list<std::pair<int, double>> as, int kout) {
            for (std::size_t i = 0; i < dim; ++i) {
                Real acc = y[i];
                for (const auto& [j, a] : as) acc += h * Real(a) * k[j][i];
                ystage[i] = acc;
            }
            rhs(t + Real(c) * h, ystage.data(), k[kout].data());
        };
        forcing_ok = true;
        stage(T::c2, {{0, T::a21}}, 1);
        stage(T::c3, {{0, T::a31}, {1, T::a32}}, 2);
        stage(T::c4, {{0, T::a41}, {1, T::a42}, {2, T::a43}}, 3);
        stage(T::c5, {{0, T::a51}, {1, T::a52}, {2, T::a53}, {3, T::a54}}, 4);
        stage(1.0, {{0, T::a61}, {1, T::a62}, {2, T::a63}, {3, T::a64}, {4, T::a65}}, 5);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (Real(T::a71) * k[0][i] + Real(T::a73) * k[2][i] +
                                  Real(T::a74) * k[3][i] + Real(T::a75) * k[4][i] +
                                  Real(T::a76) * k[5][i]);
        rhs(t + h, ynew.data(), k[6].data());
        if (!forcing_ok)
            return stop(IntegrationStatus::OverflowGuard,
                        "forcing exceeded the log-domain cap near t=" +
                            format_double((double)(t + h)));

        bool finite = true;
        Real errnorm(0);
        for (std::size_t i = 0; i < dim; ++i) {
            Real e = h * (Real(T::e1) * k[0][i] + Real(T::e3) * k[2][i] + Real(T::e4) * k[3][i] +
                          Real(T::e5) * k[4][i] + Real(T::e6) * k[5][i] + Real(T::e7) * k[6][i]);
            Real sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            errnorm += (e / sc) * (e / sc);
            finite = finite && std::isfinite((double)ynew[i]);
        }
        errnorm = std::sqrt(errnorm / Real((double)dim));
        if (!finite) errnorm = Real(1e10);

        if (opts.fixed_step <= 0 && errnorm > Real(1)) {
            Real fac11 = std::pow(errnorm, Real(0.2) - beta * Real(0.75));
            h /= std::min(Real(1) / facl, fac11 / safe);
            ++traj.rejected;
            continue;
        }

        // accept
        Real fac11 = std::pow(std::max(errnorm, Real(1e-32)), Real(0.2) - beta * Real(0.75));
        Real fac = fac11 / std::pow(facold, beta);
        fac = std::max(Real(1) / facr, std::min(Real(1) / facl, fac / safe));
        Real hnew = h / fac;
        facold = std::max(errnorm, Real(1e-4));

        t += h;
        y.swap(ynew);
        std::swap(k[0], k[6]);  // FSAL
        ++traj.accepted;

        // nonnegativity: clamp small undershoots, hard-stop on large ones
        bool reeval = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] < Real(0)) {
                if (y[i] < Real(-100) * atol)
                    return stop(IntegrationStatus::StateNegative,
                                "state component " + field.species[i] + " = " +
                                    format_double((double)y[i]) +
                                    " at t=" + format_double((double)t));
                y[i] = Real(0);
                reeval = true;
            }
        }
        if (reeval) rhs(t, y.data(), k[0].data());  // keep FSAL consistent with the clamp

        store(last);
        if (last) break;
        if (opts.fixed_step <= 0) h = hnew;
    }
    return traj;
}

inline Trajectory integrate(const PolyField& field, const Bindings& values,
                            const std::vector<double>& x0, double t_end,
                            const IntegrateOptions& opts = {}) {
    return integrate_real<double>(field, values, x0, t_end, opts);
}

// ---------------------------------------------------------------------------
// empirical convergence detection

enum class ConvergenceStatus { Converged, Drifting, Unbounded, Undecided };

inline const char* to_string(ConvergenceStatus s) {
    switch (s) {
        case ConvergenceStatus::Converged: return "Converged";
        case ConvergenceStatus::Drifting: return "Drifting";
        case ConvergenceStatus::Unbounded: return "Unbounded";
        case ConvergenceStatus::Undecided: return "Undecided";
    }
    return "?";
}

struct ConvergenceOptions {
    double rtol_conv = 1e-3;
    double slope_tol = 1e-4;   // per unit time
    double ceiling = 1e8;
};

struct ConvergenceReport {
    ConvergenceStatus status = ConvergenceStatus::Undecided;
    double limit = 0;                    // meaningful when Converged
    std::vector<double> window_means;    // [T/8,T/4], [T/4,T/2], [T/2,T]
    double tail_slope = 0;
};

inline ConvergenceReport detect_convergence(const Trajectory& traj, int species,
                                            const ConvergenceOptions& opts = {}) {
    ConvergenceReport rep;
    if (traj.times.size() < 16) return rep;
    double T = traj.times.back();
    if (!(T > 0)) return rep;

    auto window_mean = [&](double lo, double hi) -> std::pair<double, int> {
        double area = 0;
        int pts = 0;
        for (std::size_t i = 1; i < traj.times.size(); ++i) {
            double t0 = traj.times[i - 1], t1 = traj.times[i];
            if (t1 < lo || t0 > hi) continue;
            double v0 = traj.states[i - 1][species], v1 = traj.states[i][species];
            double c0 = std::max(t0, lo), c1 = std::min(t1, hi);
            if (c1 <= c0) continue;
            // trapezoid on the clipped segment
            double va = v0 + (v1 - v0) * (c0 - t0) / (t1 - t0);
            double vb = v0 + (v1 - v0) * (c1 - t0) / (t1 - t0);
            area += 0.5 * (va + vb) * (c1 - c0);
            ++pts;
        }
        if (pts == 0 || hi <= lo) return {0.0, 0};
        return {area / (hi - lo), pts};
    };

    auto [m3, p3] = window_mean(T / 8, T / 4);
    auto [m2, p2] = window_mean(T / 4, T / 2);
    auto [m1, p1] = window_mean(T / 2, T);
    if (p1 < 2 || p2 < 2 || p3 < 2) return rep;
    rep.window_means = {m3, m2, m1};

    // least-squares slope over the last half
    double st = 0, sv = 0, stt = 0, stv = 0;
    int ns = 0;
    double tail_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < T / 2) continue;
        double tt = traj.times[i], vv = traj.states[i][species];
        st += tt; sv += vv; stt += tt * tt; stv += tt * vv;
        tail_max = std::max(tail_max, vv);
        ++ns;
    }
    double denom = ns * stt - st * st;
    rep.tail_slope = denom > 0 ? (ns * stv - st * sv) / denom : 0.0;

    double scale1 = 1 + std::fabs(m1), scale2 = 1 + std::fabs(m2);
    bool means_agree = std::fabs(m1 - m2) <= opts.rtol_conv * scale1 &&
                       std::fabs(m2 - m3) <= opts.rtol_conv * scale2;
    bool slope_small = std::fabs(rep.tail_slope) <= opts.slope_tol * scale1;
    if (means_agree && slope_small) {
        rep.status = ConvergenceStatus::Converged;
        rep.limit = m1;
    } else if (tail_max > opts.ceiling && rep.tail_slope > 0) {
        rep.status = ConvergenceStatus::Unbounded;
    } else if (!slope_small) {
        rep.status = ConvergenceStatus::Drifting;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// (x, beta) = (a+b, b/(a+b)) change of coordinates along a trajectory

struct XBetaSeries {
    std::vector<double> times, x, beta;
};

struct DegenerateSumError : Error {
    using Error::Error;
};

inline XBetaSeries change_coords_xbeta(const Trajectory& traj, int a_idx, int b_idx) {
    XBetaSeries out;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double a = traj.states[i][a_idx], b = traj.states[i][b_idx];
        double s = a + b;
        if (!(s > 0))
            throw DegenerateSumError("a+b is not positive at t=" +
                                     format_double(traj.times[i]));
        out.times.push_back(traj.times[i]);
        out.x.push_back(s);
        out.beta.push_back(b / s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV trajectory schema: t,<species...>,int_f,int_absg,int_ratio

inline void write_csv(const Trajectory& traj, const std::vector<std::string>& species,
                      std::ostream& os) {
    os << "t";
    for (const auto& s : species) os << "," << s;
    os << ",int_f,int_absg,int_ratio\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double17(traj.times[i]);
        for (double v : traj.states[i]) os << "," << format_double17(v);
        if (traj.has_aux())
            os << "," << format_double17(traj.int_f[i]) << ","
               << format_double17(traj.int_absg[i]) << ","
               << format_double17(traj.int_ratio[i]);
        else
            os << ",0,0,0";
        os << "\n";
    }
}

}  // namespace acrlab
