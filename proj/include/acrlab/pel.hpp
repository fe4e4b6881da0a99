#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "acrlab/integrate.hpp"
#include "acrlab/poly_field.hpp"

namespace acrlab {

// Power-engine-load decomposition  F_i = f * (x* - x_i) + g  and the limit
// predictor built on it. The canonical decomposition divides F_i by the monic
// linear factor (x_i - x*): f is the negated quotient and g the remainder,
// the unique choice with g free of x_i; equivalently g = F_i at x_i = x*.

struct PelDecomposition {
    std::string species;
    int index = -1;
    RateCoeff x_star;
    SpeciesPoly power;        // f; may involve x_i when deg_{x_i} F > 2
    SpeciesPoly load_poly;    // remainder (no x_i dependence)
    TimeExpr load_forcing;    // bound inflow forcing of the species
    bool has_forcing = false;

    bool load_is_zero() const { return load_poly.is_zero() && !has_forcing; }
};

inline PelDecomposition decompose(const PolyField& field, const std::string& species,
                                  const RateCoeff& x_star) {
    int i = field.species_index(species);
    if (i < 0) throw Error("unknown species '" + species + "'");
    const std::size_t n = field.size();
    auto C = field.polys[i].univariate_in(i);
    int deg = (int)C.size() - 1;

    PelDecomposition dec;
    dec.species = species;
    dec.index = i;
    dec.x_star = x_star;
    dec.power = SpeciesPoly(n);
    dec.load_poly = C[0];
    dec.load_forcing = field.has_inflow[i] ? field.inflows[i] : TimeExpr::constant(0.0);
    dec.has_forcing = field.has_inflow[i];

    if (deg >= 1) {
        // synthetic division by (x_i - x*): q_{deg-1} = C_deg, q_{j-1} = C_j + x* q_j
        std::vector<SpeciesPoly> q(deg, SpeciesPoly(n));
        q[deg - 1] = C[deg];
        for (int j = deg - 1; j >= 1; --j) q[j - 1] = C[j] + q[j].scaled(x_star);
        dec.load_poly = C[0] + q[0].scaled(x_star);
        for (int j = 0; j < deg; ++j) {
            for (const auto& [m, c] : q[j].terms()) {
                SpeciesMono mono = m;
                mono[i] = j;
                dec.power.add_term(mono, -c);
            }
        }
    }
    return dec;
}

namespace detail {

/// c such that P == c * Q (term-by-term), or nullopt.
inline std::optional<RateCoeff> poly_ratio(const SpeciesPoly& P, const SpeciesPoly& Q) {
    if (Q.is_zero()) return std::nullopt;
    if (P.is_zero()) return RateCoeff();
    const auto& qt = *Q.terms().begin();
    auto it = P.terms().find(qt.first);
    if (it == P.terms().end()) return std::nullopt;
    auto c = RateCoeff::divide(it->second, qt.second);
    if (!c) return std::nullopt;
    if (P == Q.scaled(*c)) return c;
    return std::nullopt;
}

inline std::set<int> species_support(const SpeciesPoly& p) {
    std::set<int> s;
    for (const auto& [m, c] : p.terms())
        for (std::size_t j = 0; j < m.size(); ++j)
            if (m[j]) s.insert((int)j);
    return s;
}

/// terms of p whose monomial touches any species in s (constants excluded)
inline SpeciesPoly project_onto(const SpeciesPoly& p, const std::set<int>& s) {
    SpeciesPoly out(p.nspecies());
    for (const auto& [m, c] : p.terms()) {
        bool touches = false;
        for (int j : s)
            if (m[j]) touches = true;
        if (touches) out.add_term(m, c);
    }
    return out;
}

}  // namespace detail

/// Positive rational-in-constants values c for which the remainder of F_i at
/// x_i = c decouples from the power's species (identically-zero remainder, or
/// a remainder reducible to pure forcing). Degree in x_i must be 1 or 2.
inline std::vector<RateCoeff> find_acr_candidates(const PolyField& field,
                                                  const std::string& species) {
    int i = field.species_index(species);
    if (i < 0) throw Error("unknown species '" + species + "'");
    auto C = field.polys[i].univariate_in(i);
    int deg = (int)C.size() - 1;
    std::vector<RateCoeff> out;
    if (deg < 1 || deg > 2) return out;

    std::set<int> drv;
    for (int j = 1; j <= deg; ++j)
        for (int s : detail::species_support(C[j])) drv.insert(s);

    auto project = [&](const SpeciesPoly& p) {
        return drv.empty() ? p : detail::project_onto(p, drv);
    };
    auto verify = [&](const RateCoeff& c) {
        // remainder's driver-coupled part must vanish identically
        SpeciesPoly rem = C[0];
        RateCoeff cp = c;
        for (int j = 1; j <= deg; ++j) {
            rem = rem + C[j].scaled(cp);
            cp = cp * c;
        }
        return project(rem).is_zero();
    };
    auto consider = [&](std::optional<RateCoeff> c) {
        if (!c || c->is_zero() || !c->all_terms_positive()) return;
        if (!verify(*c)) return;
        for (const auto& prev : out)
            if (prev == *c) return;
        out.push_back(*c);
    };

    consider(detail::poly_ratio(-project(C[0]), project(C[1])));
    if (deg == 2) {
        consider(detail::poly_ratio(-project(C[1]), project(C[2])));
        if (project(C[1]).is_zero())
            consider(detail::poly_ratio(-project(C[0]), project(C[2])));  // c^2 root, rarely rational
    }
    return out;
}

/// Compile a decomposition against bindings for use inside the integrator.
inline AuxSpec make_aux(const PelDecomposition& dec, const Bindings& values) {
    AuxSpec aux;
    aux.f = CompiledPoly(dec.power, values);
    aux.g_poly = CompiledPoly(dec.load_poly, values);
    aux.has_forcing = dec.has_forcing;
    if (dec.has_forcing) aux.g_forcing = ExprProgram(dec.load_forcing);
    aux.x_star = dec.x_star.eval(values);
    aux.species = dec.index;
    return aux;
}

// ---------------------------------------------------------------------------
// numeric tail estimate of alpha = lim g/f along a trajectory

enum class AlphaStatus { Ok, NotConverged, PowerVanishes };

struct AlphaEstimate {
    double alpha = 0;
    AlphaStatus status = AlphaStatus::NotConverged;
    double window_full = 0, window_half = 0;  // medians over last 20% / last 10%
    int tail_points = 0;
};

inline AlphaEstimate estimate_alpha(const Trajectory& traj, const AuxSpec& aux,
                                    double rel_tol = 1e-3) {
    AlphaEstimate est;
    if (traj.times.empty()) return est;
    double T = traj.times.back();
    std::vector<double> full, half;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        double t = traj.times[j];
        if (t < 0.8 * T) continue;
        const double* x = traj.states[j].data();
        double f = aux.eval_f(x);
        if (!(f > 0)) {
            est.status = AlphaStatus::PowerVanishes;
            return est;
        }
        double r = aux.eval_g(x, t) / f;
        full.push_back(r);
        if (t >= 0.9 * T) half.push_back(r);
    }
    est.tail_points = (int)full.size();
    if (full.size() < 50 || half.size() < 5) return est;  // NotConverged: tail too short
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    est.window_full = median(full);
    est.window_half = median(half);
    est.alpha = est.window_full;
    if (std::fabs(est.window_full - est.window_half) <=
        rel_tol * (1 + std::fabs(est.window_full)))
        est.status = AlphaStatus::Ok;
    return est;
}

// ---------------------------------------------------------------------------
// zero-load trajectory diagnostics

struct LoadNotZeroError : Error {
    using Error::Error;
};

struct ZeroLoadReport {
    enum class Trend { AppearsDivergent, AppearsConvergent, Undecided };

    bool sign_preserved = true;
    double max_ratio_residual = 0;   // | |x*-x(t)| e^{int f} / |x*-x(0)| - 1 |
    int ratio_points = 0;
    Trend integral_trend = Trend::Undecided;
    double int_f_final = 0;
    double integral_tail_slope = 0;
    std::vector<double> t_power_tail;  // samples of t * f along the tail
    bool t_power_vanishing = false;    // t*f decayed below half its peak
};

/// `meaningful_abs`: the identity is only scored where |x* - x_i| exceeds this
/// cutoff. Note the hard floor of the scalar type: with states stored as Real
/// near x*, |x* - x_i| is quantized in units of ulp(x*), so a relative band of
/// width w is only resolvable where |x* - x_i| >= ulp(x*)/w. Runs that must
/// score the band near 1e-12 use the long double instantiation of integrate.
template <typename Real = double>
inline ZeroLoadReport check_zero_load_iff(const BasicTrajectory<Real>& traj,
                                          const PelDecomposition& dec, const AuxSpec& aux,
                                          double meaningful_abs = 1e-12) {
    if (!dec.load_is_zero()) throw LoadNotZeroError("decomposition has a nonzero load");
    if (!traj.has_aux() || traj.times.empty())
        throw Error("trajectory lacks the auxiliary integrals");
    ZeroLoadReport rep;
    Real x0 = traj.states.front()[aux.species];
    Real d0 = Real(aux.x_star) - x0;
    if (d0 == Real(0)) throw Error("x_i(0) equals x*; diagnostics are vacuous");
    int s0 = d0 > 0 ? 1 : -1;

    double T = (double)traj.times.back();
    double peak_tf = 0;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        Real d = Real(aux.x_star) - traj.states[j][aux.species];
        if (d != Real(0) && (d > 0 ? 1 : -1) != s0 &&
            std::fabs(d) > Real(1e-13) * Real(1 + std::fabs(aux.x_star)))
            rep.sign_preserved = false;
        if (std::fabs(d) > Real(meaningful_abs)) {
            double resid =
                (double)(std::fabs(d) * std::exp(traj.int_f[j]) / std::fabs(d0) - Real(1));
            rep.max_ratio_residual = std::max(rep.max_ratio_residual, std::fabs(resid));
            ++rep.ratio_points;
        }
        double tf = (double)traj.times[j] * (double)aux.eval_f(traj.states[j].data());
        peak_tf = std::max(peak_tf, tf);
        if ((double)traj.times[j] >= 0.5 * T) rep.t_power_tail.push_back(tf);
    }
    rep.int_f_final = (double)traj.int_f.back();

    // "numerically divergent": the auxiliary integral still accumulates at a
    // near-linear-or-better pace over the tail; never claimed proven
    double st = 0, sv = 0, stt = 0, stv = 0;
    int ns = 0;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        double tj = (double)traj.times[j];
        if (tj < 0.5 * T) continue;
        st += tj;
        sv += (double)traj.int_f[j];
        stt += tj * tj;
        stv += tj * (double)traj.int_f[j];
        ++ns;
    }
    double denom = ns * stt - st * st;
    double slope = denom > 0 ? (ns * stv - st * sv) / denom : 0;
    rep.integral_tail_slope = slope;
    if (rep.int_f_final > 0 && T > 0) {
        double avg_rate = rep.int_f_final / T;
        if (slope >= 0.5 * avg_rate)
            rep.integral_trend = ZeroLoadReport::Trend::AppearsDivergent;
        else if (slope <= 0.05 * avg_rate)
            rep.integral_trend = ZeroLoadReport::Trend::AppearsConvergent;
    }
    if (!rep.t_power_tail.empty())
        rep.t_power_vanishing = rep.t_power_tail.back() < 0.5 * peak_tf &&
                                  rep.t_power_tail.back() < rep.t_power_tail.front();
    return rep;
}

// ---------------------------------------------------------------------------
// feeder elimination: solve triangular auxiliary species in closed form and
// turn them into time-dependent forcing (constant, polynomial, exponential,
// and nested-exponential chains)

struct FeederReduction {
    std::map<int, TimeExpr> solved;
    std::map<int, bool> pure_source;  // solved via x(t) = x(0) + int S (no self term)
    std::vector<int> remaining;
};

namespace detail {

inline std::optional<TimeExpr> mono_to_expr(const SpeciesMono& m, double coeff,
                                            const std::map<int, TimeExpr>& solved,
                                            int skip = -1) {
    std::vector<TimeExpr> fs{TimeExpr::constant(coeff)};
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (!m[j] || (int)j == skip) continue;
        auto it = solved.find((int)j);
        if (it == solved.end()) return std::nullopt;
        fs.push_back(TimeExpr::pow(it->second, m[j]));
    }
    return TimeExpr::mul(std::move(fs));
}

}  // namespace detail

inline FeederReduction reduce_feeders(const PolyField& field, const Bindings& values, int target,
                                      const std::optional<std::vector<double>>& x0) {
    FeederReduction red;
    const int n = (int)field.size();
    std::vector<bool> done(n, false);
    if (!x0) {  // nothing can be anchored without initial values
        for (int s = 0; s < n; ++s) red.remaining.push_back(s);
        return red;
    }
    bool progress = true;
    while (progress) {
        progress = false;
        for (int s = 0; s < n; ++s) {
            if (s == target || done[s]) continue;
            std::vector<TimeExpr> source, linear;
            bool blocked = false;
            for (const auto& [m, c] : field.polys[s].terms()) {
                int self = m[s];
                bool others_unsolved = false;
                for (int j = 0; j < n; ++j)
                    if (j != s && m[j] && !done[j]) others_unsolved = true;
                if (others_unsolved || self > 1) {
                    blocked = true;
                    break;
                }
                auto e = detail::mono_to_expr(m, c.eval(values), red.solved, s);
                if (!e) {
                    blocked = true;
                    break;
                }
                (self == 0 ? source : linear).push_back(*e);
            }
            if (blocked) continue;
            TimeExpr S = TimeExpr::add(std::move(source));
            if (field.has_inflow[s]) S = TimeExpr::add({S, field.inflows[s]});
            TimeExpr L = TimeExpr::add(std::move(linear));
            bool s_zero = S.kind() == ExprKind::Constant && S.value() == 0.0;
            bool l_zero = L.kind() == ExprKind::Constant && L.value() == 0.0;
            TimeExpr sol;
            bool pure = false;
            if (l_zero) {
                // x(t) = x(0) + int_0^t S
                auto p = to_exp_poly(S);
                if (!p) continue;
                auto anti = exp_poly_integral0(*p);
                if (!anti) continue;
                sol = TimeExpr::add({TimeExpr::constant((*x0)[s]), exp_poly_to_expr(*anti)});
                pure = true;
            } else if (s_zero) {
                // x(t) = x(0) exp(int_0^t L)
                auto p = to_exp_poly(L);
                if (!p) continue;
                auto anti = exp_poly_integral0(*p);
                if (!anti) continue;
                sol = TimeExpr::mul({TimeExpr::constant((*x0)[s]),
                                     TimeExpr::exp(exp_poly_to_expr(*anti))});
            } else {
                continue;  // inhomogeneous linear feeders are not needed here
            }
            red.solved[s] = sol;
            red.pure_source[s] = pure;
            done[s] = true;
            progress = true;
        }
    }
    for (int s = 0; s < n; ++s)
        if (!done[s]) red.remaining.push_back(s);
    return red;
}

// ---------------------------------------------------------------------------
// the limit predictor

enum class PredictRule {
    ZeroLoadThm,
    NonzeroLoadThm,
    Motif1Thm,
    Motif2Thm,
    Motif2PolyCor,
    EqualOutflowThm,
    EqualOutflowLHopital,
    Motif5Thm,
    Motif5MainThm,
    Motif3Thm,
    EnzymeInflowC,
    EnzymeNoCE,
    NumericFallback,
};

inline const char* to_string(PredictRule r) {
    switch (r) {
        case PredictRule::ZeroLoadThm: return "ZeroLoadThm";
        case PredictRule::NonzeroLoadThm: return "NonzeroLoadThm";
        case PredictRule::Motif1Thm: return "Motif1Thm";
        case PredictRule::Motif2Thm: return "Motif2Thm";
        case PredictRule::Motif2PolyCor: return "Motif2PolyCor";
        case PredictRule::EqualOutflowThm: return "EqualOutflowThm";
        case PredictRule::EqualOutflowLHopital: return "EqualOutflowLHopital";
        case PredictRule::Motif5Thm: return "Motif5Thm";
        case PredictRule::Motif5MainThm: return "Motif5MainThm";
        case PredictRule::Motif3Thm: return "Motif3Thm";
        case PredictRule::EnzymeInflowC: return "EnzymeInflowC";
        case PredictRule::EnzymeNoCE: return "EnzymeNoCE";
        case PredictRule::NumericFallback: return "NumericFallback";
    }
    return "?";
}

enum class HypothesisStatus { VerifiedSymbolic, VerifiedNumeric, Unverified };

inline const char* to_string(HypothesisStatus s) {
    switch (s) {
        case HypothesisStatus::VerifiedSymbolic: return "verified-symbolic";
        case HypothesisStatus::VerifiedNumeric: return "verified-numeric";
        case HypothesisStatus::Unverified: return "unverified";
    }
    return "?";
}

struct Hypothesis {
    std::string name;
    HypothesisStatus status;
};

struct AcrPrediction {
    std::string species;
    RateCoeff x_star;
    double x_star_value = 0;
    double alpha = 0;
    double limit = 0;
    std::string limit_expr;
    PredictRule rule = PredictRule::NumericFallback;
    std::vector<Hypothesis> hypotheses;
    std::vector<std::string> warnings;
};

struct PredictOptions {
    std::optional<std::vector<double>> x0;
    const Trajectory* trajectory = nullptr;  // enables NumericFallback
    double alpha_rel_tol = 1e-3;
};

inline nlohmann::json prediction_to_json(const AcrPrediction& p) {
    nlohmann::json hyp = nlohmann::json::array();
    for (const auto& h : p.hypotheses) hyp.push_back({{"name", h.name}, {"status", to_string(h.status)}});
    nlohmann::json out{{"species", p.species},
                       {"x_star", p.x_star.to_string()},
                       {"alpha", p.alpha},
                       {"limit", p.limit},
                       {"rule", to_string(p.rule)},
                       {"hypotheses", hyp}};
    if (!p.warnings.empty()) out["warnings"] = p.warnings;
    if (!p.limit_expr.empty()) out["limit_expr"] = p.limit_expr;
    return out;
}

namespace detail {

inline void add_boundary_warning(AcrPrediction& p) {
    if (p.alpha <= -p.x_star_value + 1e-12)
        p.warnings.push_back("alpha <= -x_star: predicted limit leaves the positive values");
}

// growth facts about a forcing expression
struct ForcingInfo {
    TimeExpr expr;
    std::optional<ExpPoly> poly;  // exp-poly normal form, when in the class
    GrowthClass cls;
    bool is_zero() const { return cls.tag == GrowthTag::Zero; }
};

inline ForcingInfo forcing_info(TimeExpr e) {
    ForcingInfo fi;
    fi.expr = std::move(e);
    fi.poly = to_exp_poly(fi.expr);
    fi.cls = classify_growth(fi.expr);
    return fi;
}

}  // namespace detail

// The full predictor lives below; see predict_limits().

namespace detail {

struct PairStructure {
    int driver = -1;
    int p = 1;
    RateCoeff c_f;          // coefficient of the driver monomial in f
    double c_f_val = 0;
    double ell_a = 0, ell_b = 0;
    int coupling_sign = 0;  // -1: negative slope (motif2/5); +1: positive slope (motif1)
    TimeExpr g_a, g_b;      // effective source terms (inflow-side convention)
};

struct ScalarStructure {
    TimeExpr g_t;           // load as a function of time
    double f_const = 0;     // when the power is constant
    bool f_is_const = false;
    // zero-slope shape: f = c_f * b(t) with b a pure-source feeder
    bool is_motif3 = false;
    double c_f_val = 0;
    TimeExpr driver_expr;   // b(t) for the zero-slope shape
};

struct EnzymeStructure {
    int x = -1, e = -1, c = -1;
    double k4 = 0;
    double g_x = 0, g_y = 0, g_e = 0, g_c = 0;
};

}  // namespace detail

}  // namespace acrlab

#include "acrlab/pel_predict.hpp"
