#pragma once

// Rule-matching half of the limit predictor; included at the end of pel.hpp.

namespace acrlab {

namespace detail {

// effective source term seen by the target (inflow-side convention): the
// substituted load plus inflow forcing, with the outflow shift -l*x* added
// back so the result is exactly the inflow-side source.
inline std::optional<TimeExpr> effective_source(const PelDecomposition& dec,
                                                const PolyField& field, const Bindings& values,
                                                const FeederReduction& red, double x_star_val) {
    std::vector<TimeExpr> parts;
    for (const auto& [m, c] : dec.load_poly.terms()) {
        auto e = mono_to_expr(m, c.eval(values), red.solved);
        if (!e) return std::nullopt;  // load still depends on a remaining species
        parts.push_back(*e);
    }
    if (dec.has_forcing) parts.push_back(dec.load_forcing);
    double ell_a = field.outflow_rates[dec.index].to_double();
    if (ell_a != 0) parts.push_back(TimeExpr::constant(ell_a * x_star_val));
    return TimeExpr::add(std::move(parts));
}

inline std::optional<PairStructure> match_pair(const PelDecomposition& dec,
                                               const PolyField& field, const Bindings& values,
                                               const FeederReduction& red, double x_star_val) {
    const int n = (int)field.size();
    std::vector<int> others;
    for (int s : red.remaining)
        if (s != dec.index) others.push_back(s);
    if (others.size() != 1) return std::nullopt;
    const int b = others[0];

    PairStructure ps;
    ps.driver = b;
    ps.ell_a = field.outflow_rates[dec.index].to_double();
    ps.ell_b = field.outflow_rates[b].to_double();

    bool seen_driver = false;
    double const_val = 0;
    for (const auto& [m, c] : dec.power.terms()) {
        if (m[dec.index]) return std::nullopt;
        bool clean = true;
        for (int j = 0; j < n; ++j)
            if (m[j] && j != b) clean = false;  // no solved/extra species inside f
        if (!clean) return std::nullopt;
        if (m[b] == 0) {
            const_val += c.eval(values);
        } else {
            if (seen_driver) return std::nullopt;
            seen_driver = true;
            ps.p = m[b];
            ps.c_f = c;
        }
    }
    if (!seen_driver || (ps.p != 1 && ps.p != 2)) return std::nullopt;
    if (!ps.c_f.all_terms_positive()) return std::nullopt;
    ps.c_f_val = ps.c_f.eval(values);
    // the only admissible constant inside f is the target's linear outflow
    if (std::fabs(const_val - ps.ell_a) > 1e-12 * (1 + std::fabs(ps.ell_a))) return std::nullopt;

    auto ga = effective_source(dec, field, values, red, x_star_val);
    if (!ga) return std::nullopt;
    ps.g_a = *ga;

    // driver equation must be  F_b = sign * c_f (x* - a) b^p - l_b b + sources
    SpeciesMono mono_bp(n, 0), mono_abp(n, 0), mono_b1(n, 0);
    mono_bp[b] = ps.p;
    mono_abp[b] = ps.p;
    mono_abp[dec.index] = 1;
    mono_b1[b] = 1;
    RateCoeff cf_xstar = ps.c_f * dec.x_star;
    for (int sign : {-1, +1}) {
        SpeciesPoly R = field.polys[b];
        R.add_term(mono_bp, sign == -1 ? cf_xstar : -cf_xstar);
        R.add_term(mono_abp, sign == -1 ? -ps.c_f : ps.c_f);
        R.add_term(mono_b1, RateCoeff(field.outflow_rates[b]));
        std::vector<TimeExpr> parts;
        bool ok = true;
        for (const auto& [m, c] : R.terms()) {
            auto e = mono_to_expr(m, c.eval(values), red.solved);
            if (!e) {
                ok = false;
                break;
            }
            parts.push_back(*e);
        }
        if (!ok) continue;
        if (field.has_inflow[b]) parts.push_back(field.inflows[b]);
        ps.coupling_sign = sign;
        ps.g_b = TimeExpr::add(std::move(parts));
        return ps;
    }
    return std::nullopt;
}

inline std::optional<ScalarStructure> match_scalar(const PelDecomposition& dec,
                                                   const PolyField& field, const Bindings& values,
                                                   const FeederReduction& red,
                                                   double x_star_val) {
    for (int s : red.remaining)
        if (s != dec.index) return std::nullopt;

    ScalarStructure ss;
    auto g = effective_source(dec, field, values, red, x_star_val);
    if (!g) return std::nullopt;
    ss.g_t = *g;

    int nonconst_terms = 0;
    int lone_driver = -1;
    double fconst = 0;
    for (const auto& [m, c] : dec.power.terms()) {
        if (m[dec.index]) return std::nullopt;
        if (!mono_to_expr(m, c.eval(values), red.solved)) return std::nullopt;
        bool is_const = true;
        int only = -1, factors = 0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (!m[j]) continue;
            is_const = false;
            only = (int)j;
            factors += m[j];
        }
        if (is_const) {
            fconst += c.eval(values);
        } else {
            ++nonconst_terms;
            if (factors == 1) {
                lone_driver = only;
                ss.c_f_val = c.eval(values);
            }
        }
    }
    if (nonconst_terms == 0) {
        ss.f_is_const = true;
        ss.f_const = fconst;
        return ss;
    }
    if (nonconst_terms == 1 && lone_driver >= 0 && fconst == 0) {
        auto it = red.pure_source.find(lone_driver);
        if (it != red.pure_source.end() && it->second) {
            // f = c_f * b(t) with b(t) = b(0) + integral of its inflow
            ss.is_motif3 = true;
            ss.driver_expr = red.solved.at(lone_driver);
            return ss;
        }
    }
    return std::nullopt;
}

inline std::optional<EnzymeStructure> match_enzyme(const PelDecomposition& dec,
                                                   const PolyField& field, const Bindings& values,
                                                   const FeederReduction& red) {
    const int n = (int)field.size();
    std::vector<int> others;
    for (int s : red.remaining)
        if (s != dec.index) others.push_back(s);
    if (others.size() != 3) return std::nullopt;
    if (!dec.load_poly.is_zero()) return std::nullopt;  // load must be pure forcing
    for (int s = 0; s < n; ++s)
        if (!field.outflow_rates[s].is_zero()) return std::nullopt;

    // driver c from the power: a single monomial k4 * c
    auto single = dec.power.single_term();
    if (!single) return std::nullopt;
    const auto& [mono, coeff] = *single;
    int c_idx = -1;
    for (int j = 0; j < n; ++j) {
        if (!mono[j]) continue;
        if (mono[j] != 1 || c_idx >= 0 || j == dec.index) return std::nullopt;
        c_idx = j;
    }
    if (c_idx < 0 || !coeff.all_terms_positive()) return std::nullopt;
    if (std::find(others.begin(), others.end(), c_idx) == others.end()) return std::nullopt;

    EnzymeStructure es;
    es.c = c_idx;
    es.k4 = coeff.eval(values);

    // identify the enzyme species by the exact conservation structure
    for (int u : others) {
        if (u == c_idx) continue;
        if ((field.polys[u] + field.polys[c_idx]).is_zero()) es.e = u;
    }
    if (es.e < 0) return std::nullopt;
    for (int u : others)
        if (u != c_idx && u != es.e) es.x = u;
    if (es.x < 0) return std::nullopt;
    if (!(field.polys[es.x] + field.polys[dec.index] + field.polys[c_idx]).is_zero())
        return std::nullopt;

    // all inflows must be nonnegative constants
    auto const_inflow = [&](int s) -> std::optional<double> {
        if (!field.has_inflow[s]) return 0.0;
        auto p = to_exp_poly(field.inflows[s]);
        if (!p) return std::nullopt;
        if (p->empty()) return 0.0;
        if (p->size() == 1 && std::fabs((*p)[0].deg) < 1e-12 && std::fabs((*p)[0].rate) < 1e-12)
            return (*p)[0].coeff;
        return std::nullopt;
    };
    auto gx = const_inflow(es.x), gy = const_inflow(dec.index), ge = const_inflow(es.e),
         gc = const_inflow(es.c);
    if (!gx || !gy || !ge || !gc) return std::nullopt;
    es.g_x = *gx;
    es.g_y = *gy;
    es.g_e = *ge;
    es.g_c = *gc;
    return es;
}

// ---------------------------------------------------------------------------

inline HypothesisStatus integral_divergence_status(const Trajectory* traj, const AuxSpec& aux) {
    if (!traj || traj->times.size() < 8) return HypothesisStatus::Unverified;
    // trapezoid of f along the stored states, then the tail-slope criterion
    double T = traj->times.back();
    double I = 0, tail_lo = 0.5 * T;
    double I_at_tail_lo = 0, prev_f = aux.eval_f(traj->states[0].data());
    for (std::size_t j = 1; j < traj->times.size(); ++j) {
        double f = aux.eval_f(traj->states[j].data());
        I += 0.5 * (prev_f + f) * (traj->times[j] - traj->times[j - 1]);
        prev_f = f;
        if (traj->times[j] <= tail_lo) I_at_tail_lo = I;
    }
    if (!(I > 0) || !(T > 0)) return HypothesisStatus::Unverified;
    double tail_rate = (I - I_at_tail_lo) / (T - tail_lo);
    return tail_rate >= 0.5 * (I / T) ? HypothesisStatus::VerifiedNumeric
                                      : HypothesisStatus::Unverified;
}

inline std::optional<AcrPrediction> predict_candidate(const PolyField& field,
                                                      const Bindings& values,
                                                      const std::string& species,
                                                      const RateCoeff& cand,
                                                      const PredictOptions& opts) {
    PelDecomposition dec = decompose(field, species, cand);
    AcrPrediction pred;
    pred.species = species;
    pred.x_star = cand;
    pred.x_star_value = cand.eval(values);
    pred.limit_expr = cand.to_string();

    bool f_positive = true;
    if (dec.power.is_zero()) f_positive = false;
    for (const auto& [m, c] : dec.power.terms())
        if (!c.all_terms_positive()) f_positive = false;
    Hypothesis f_pos_hyp{"power positive on the positive orthant",
                         f_positive ? HypothesisStatus::VerifiedSymbolic
                                    : HypothesisStatus::Unverified};

    auto finish = [&](PredictRule rule, double alpha, double limit) -> AcrPrediction {
        pred.rule = rule;
        pred.alpha = alpha;
        pred.limit = limit;
        if (alpha != 0)
            pred.limit_expr = cand.to_string() + " + " + format_double6(limit - pred.x_star_value);
        add_boundary_warning(pred);
        return pred;
    };

    if (dec.load_is_zero()) {
        pred.hypotheses.push_back(f_pos_hyp);
        AuxSpec aux = make_aux(dec, values);
        pred.hypotheses.push_back(
            {"integral of f along the trajectory diverges",
             integral_divergence_status(opts.trajectory, aux)});
        return finish(PredictRule::ZeroLoadThm, 0.0, pred.x_star_value);
    }

    FeederReduction red = reduce_feeders(field, values, dec.index, opts.x0);

    if (auto ps = match_pair(dec, field, values, red, pred.x_star_value)) {
        ForcingInfo ga = forcing_info(ps->g_a);
        ForcingInfo gb = forcing_info(ps->g_b);
        TimeExpr g_sum_expr = TimeExpr::add({ps->g_a, ps->g_b});
        auto gsum = to_exp_poly(g_sum_expr);

        if (ps->coupling_sign == +1 && ps->p == 1 && ps->ell_a == 0 && ps->ell_b == 0) {
            // positive-slope motif: g_a bounded and int (g_b - g_a) infinite
            if (ga.cls.bounded() || ga.is_zero()) {
                auto diff = to_exp_poly(TimeExpr::sub(ps->g_b, ps->g_a));
                if (diff && exp_poly_integral_trend(*diff) ==
                                IntegralTrend::DivergesToPlusInfinity) {
                    pred.hypotheses.push_back({"g_a bounded", HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back({"integral of (g_b - g_a) diverges",
                                               HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back(f_pos_hyp);
                    return finish(PredictRule::Motif1Thm, 0.0, pred.x_star_value);
                }
            }
        } else if (ps->coupling_sign == -1 && ps->ell_a == 0 && ps->ell_b == 0) {
            // negative-slope motifs, no outflows
            bool g_inf = false;
            if (gsum)
                g_inf = exp_poly_integral_trend(*gsum) == IntegralTrend::DivergesToPlusInfinity;
            else if (ga.cls.tag == GrowthTag::DoubleExp)
                g_inf = true;
            if (g_inf) {
                pred.hypotheses.push_back({"G(t) -> infinity", HypothesisStatus::VerifiedSymbolic});
                pred.hypotheses.push_back(f_pos_hyp);
                if (ps->p == 1 && ga.poly) {
                    bool ga_polynomial = true;
                    for (const auto& term : *ga.poly)
                        if (std::fabs(term.rate) > 1e-12) ga_polynomial = false;
                    if (ga_polynomial) {
                        pred.hypotheses.push_back(
                            {"g_a polynomial with nonnegative values",
                             HypothesisStatus::VerifiedSymbolic});
                        return finish(PredictRule::Motif2PolyCor, 0.0, pred.x_star_value);
                    }
                    if (gsum) {
                        auto Glead = exp_poly_integral_leading(*gsum);
                        if (Glead) {
                            auto alpha = exp_poly_ratio_limit(*ga.poly, ExpPoly{*Glead});
                            if (alpha) {
                                pred.hypotheses.push_back({"alpha = lim g_a/G exists",
                                                           HypothesisStatus::VerifiedSymbolic});
                                return finish(PredictRule::Motif2Thm, *alpha,
                                              pred.x_star_value + *alpha / ps->c_f_val);
                            }
                        }
                    }
                } else if (ps->p == 2) {
                    if (ga.cls.bounded() || ga.is_zero()) {
                        pred.hypotheses.push_back(
                            {"g_a bounded", HypothesisStatus::VerifiedSymbolic});
                        return finish(PredictRule::Motif5MainThm, 0.0, pred.x_star_value);
                    }
                    if (ga.cls.tag == GrowthTag::DoubleExp) {
                        // g_a = C e^{E}: dg_a/dt / (g_a^{1/2} g) <= E' e^{-E/2} / sqrt(C) -> 0
                        pred.hypotheses.push_back({gb.is_zero()
                                                       ? "dg_a/dt / g_a^{3/2} -> 0"
                                                       : "dg_a/dt / (g_a^{1/2} g) -> 0",
                                                   HypothesisStatus::VerifiedSymbolic});
                        return finish(PredictRule::Motif5MainThm, 0.0, pred.x_star_value);
                    }
                    if (ga.poly && gsum) {
                        auto Glead = exp_poly_integral_leading(*gsum);
                        if (Glead) {
                            ExpPolyTerm G2{Glead->coeff * Glead->coeff, 2 * Glead->deg,
                                           2 * Glead->rate};
                            auto alpha = exp_poly_ratio_limit(*ga.poly, ExpPoly{G2});
                            if (alpha) {
                                pred.hypotheses.push_back({"alpha = lim g_a/G^2 exists",
                                                           HypothesisStatus::VerifiedSymbolic});
                                return finish(PredictRule::Motif5Thm, *alpha,
                                              pred.x_star_value + *alpha / ps->c_f_val);
                            }
                        }
                    }
                }
            }
        } else if (ps->coupling_sign == -1 && ps->p == 1 && ps->ell_a > 0 &&
                   std::fabs(ps->ell_a - ps->ell_b) <= 1e-12 * (1 + ps->ell_a)) {
            // equal outflows: alpha = lim g_a/H with H = e^{-lt} int g e^{ls}
            GrowthClass gsum_cls = classify_growth(g_sum_expr);
            bool g_to_inf = gsum_cls.tag == GrowthTag::PolyGrowth ||
                            gsum_cls.tag == GrowthTag::ExpGrowth ||
                            gsum_cls.tag == GrowthTag::DoubleExp;
            if (g_to_inf && gsum && ga.poly) {
                double ell = ps->ell_a;
                auto glead = leading_term(*gsum);
                std::optional<double> alpha;
                if (glead) {
                    ExpPolyTerm Hlead{glead->coeff / (glead->rate + ell), glead->deg, glead->rate};
                    alpha = exp_poly_ratio_limit(*ga.poly, ExpPoly{Hlead});
                }
                PredictRule rule = PredictRule::EqualOutflowThm;
                // derivative form of the same limit (L'Hospital route)
                std::optional<double> alpha_lh;
                auto r1 = exp_poly_ratio_limit(*ga.poly, *gsum);
                auto r2 = exp_poly_ratio_limit(exp_poly_diff(*ga.poly), *gsum);
                if (r1 && r2) alpha_lh = ell * *r1 + *r2;
                if (!alpha && alpha_lh) {
                    alpha = alpha_lh;
                    rule = PredictRule::EqualOutflowLHopital;
                }
                if (alpha) {
                    pred.hypotheses.push_back({"g(t) -> infinity", HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back(
                        {"alpha = lim g_a/H exists", HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back(
                        {"derivative form agrees",
                         alpha_lh && std::fabs(*alpha_lh - *alpha) <= 1e-9 * (1 + std::fabs(*alpha))
                             ? HypothesisStatus::VerifiedSymbolic
                             : HypothesisStatus::Unverified});
                    bool gb_zero = gb.is_zero();
                    HypothesisStatus b0_st = HypothesisStatus::VerifiedSymbolic;
                    if (gb_zero) {
                        b0_st = (opts.x0 && (*opts.x0)[ps->driver] > 0)
                                    ? HypothesisStatus::VerifiedSymbolic
                                    : HypothesisStatus::Unverified;
                    }
                    pred.hypotheses.push_back({"b(0) > 0 or g_b not identically zero", b0_st});
                    pred.hypotheses.push_back(f_pos_hyp);
                    return finish(rule, *alpha, pred.x_star_value + *alpha / ps->c_f_val);
                }
            }
        }
        // unequal outflows or unmatched growth: fall through
    }

    if (auto ss = match_scalar(dec, field, values, red, pred.x_star_value)) {
        ForcingInfo g = forcing_info(ss->g_t);
        if (ss->is_motif3 && g.poly) {
            auto bexp = to_exp_poly(ss->driver_expr);
            if (bexp &&
                exp_poly_integral_trend(*bexp) == IntegralTrend::DivergesToPlusInfinity) {
                auto alpha = exp_poly_ratio_limit(*g.poly, *bexp);
                if (alpha) {
                    pred.hypotheses.push_back(
                        {"integral of b diverges", HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back({"alpha = lim g_a/(b(0) + int g_b) exists",
                                               HypothesisStatus::VerifiedSymbolic});
                    pred.hypotheses.push_back(f_pos_hyp);
                    return finish(PredictRule::Motif3Thm, *alpha,
                                  pred.x_star_value + *alpha / ss->c_f_val);
                }
            }
        }
        if (ss->f_is_const && ss->f_const > 0 && g.poly) {
            auto alpha = exp_poly_limit(*g.poly);
            if (alpha) {
                pred.hypotheses.push_back(
                    {"power is a positive constant", HypothesisStatus::VerifiedSymbolic});
                pred.hypotheses.push_back(
                    {"load limit exists", HypothesisStatus::VerifiedSymbolic});
                return finish(PredictRule::NonzeroLoadThm, *alpha,
                              pred.x_star_value + *alpha / ss->f_const);
            }
        }
    }

    if (auto es = match_enzyme(dec, field, values, red)) {
        if (es->g_c > 0) {
            pred.hypotheses.push_back({"g_c > 0", HypothesisStatus::VerifiedSymbolic});
            pred.hypotheses.push_back({"all inflows constant", HypothesisStatus::VerifiedSymbolic});
            return finish(PredictRule::EnzymeInflowC, 0.0, pred.x_star_value);
        }
        if (es->g_c == 0 && es->g_e == 0 && es->g_x + es->g_y > 0 && opts.x0) {
            double e0c0 = (*opts.x0)[es->e] + (*opts.x0)[es->c];
            if (e0c0 > 0) {
                pred.hypotheses.push_back({"g_c = g_e = 0", HypothesisStatus::VerifiedSymbolic});
                pred.hypotheses.push_back(
                    {"g_x + g_y > 0", HypothesisStatus::VerifiedSymbolic});
                pred.hypotheses.push_back(
                    {"e(0) + c(0) > 0", HypothesisStatus::VerifiedSymbolic});
                double alpha = es->g_y / e0c0;
                return finish(PredictRule::EnzymeNoCE, alpha,
                              pred.x_star_value + alpha / es->k4);
            }
        }
    }

    if (opts.trajectory) {
        AuxSpec aux = make_aux(dec, values);
        AlphaEstimate est = estimate_alpha(*opts.trajectory, aux, opts.alpha_rel_tol);
        if (est.status == AlphaStatus::Ok) {
            pred.hypotheses.push_back(
                {"alpha tail estimate converged", HypothesisStatus::VerifiedNumeric});
            pred.hypotheses.push_back(
                {"power positive along the trajectory tail", HypothesisStatus::VerifiedNumeric});
            return finish(PredictRule::NumericFallback, est.alpha,
                          pred.x_star_value + est.alpha);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Apply the first matching convergence rule for each ACR candidate of the
/// species; one prediction per candidate that admits a rule (possibly the
/// numeric fallback when a trajectory is supplied).
inline std::vector<AcrPrediction> predict_limits(const Network& net, const std::string& species,
                                                 const Bindings& overrides = {},
                                                 const PredictOptions& opts = {},
                                                 const std::optional<RateCoeff>& x_star = {}) {
    PolyField field = build_field(net, overrides);
    Bindings values = net.bindings_with(overrides);
    std::vector<RateCoeff> cands;
    if (x_star)
        cands.push_back(*x_star);
    else
        cands = find_acr_candidates(field, species);
    std::vector<AcrPrediction> out;
    for (const auto& c : cands) {
        if (auto p = detail::predict_candidate(field, values, species, c, opts))
            out.push_back(std::move(*p));
    }
    return out;
}

/// First candidate's prediction (the worked networks all have a unique candidate).
inline AcrPrediction predict_limit(const Network& net, const std::string& species,
                                   const Bindings& overrides = {}, const PredictOptions& opts = {},
                                   const std::optional<RateCoeff>& x_star = {}) {
    auto all = predict_limits(net, species, overrides, opts, x_star);
    if (all.empty()) throw Error("no convergence rule applies to species '" + species + "'");
    return all.front();
}

}  // namespace acrlab
