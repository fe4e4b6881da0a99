#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acrlab/growth.hpp"
#include "acrlab/linalg_exact.hpp"
#include "acrlab/network.hpp"
#include "acrlab/rate_coeff.hpp"

namespace acrlab {

/// Monomial in species concentrations: exponent per species index.
using SpeciesMono = std::vector<int>;

/// Sparse multivariate polynomial in species concentrations over RateCoeff.
class SpeciesPoly {
public:
    SpeciesPoly() = default;
    explicit SpeciesPoly(std::size_t nspecies) : n_(nspecies) {}

    std::size_t nspecies() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<SpeciesMono, RateCoeff>& terms() const { return terms_; }

    void add_term(const SpeciesMono& m, const RateCoeff& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend SpeciesPoly operator+(const SpeciesPoly& a, const SpeciesPoly& b) {
        SpeciesPoly out = a;
        for (const auto& [m, c] : b.terms_) out.add_term(m, c);
        return out;
    }
    friend SpeciesPoly operator-(const SpeciesPoly& a, const SpeciesPoly& b) {
        SpeciesPoly out = a;
        for (const auto& [m, c] : b.terms_) out.add_term(m, -c);
        return out;
    }
    SpeciesPoly operator-() const {
        SpeciesPoly out(n_);
        for (const auto& [m, c] : terms_) out.terms_[m] = -c;
        return out;
    }
    friend bool operator==(const SpeciesPoly& a, const SpeciesPoly& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const SpeciesPoly& a, const SpeciesPoly& b) { return !(a == b); }

    SpeciesPoly scaled(const RateCoeff& f) const {
        SpeciesPoly out(n_);
        for (const auto& [m, c] : terms_) out.add_term(m, c * f);
        return out;
    }

    double eval(const Bindings& values, const std::vector<double>& x) const {
        double sum = 0;
        for (const auto& [m, c] : terms_) {
            double p = c.eval(values);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) p *= pow_int(x[i], m[i]);
            sum += p;
        }
        return sum;
    }

    int degree_in(int species) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m[(int)species]);
        return d;
    }

    /// Coefficients as a univariate polynomial in one species, over the others.
    /// result[j] is the coefficient of x_i^j (monomials keep a zero exponent at i).
    std::vector<SpeciesPoly> univariate_in(int species) const {
        std::vector<SpeciesPoly> out(degree_in(species) + 1, SpeciesPoly(n_));
        for (const auto& [m, c] : terms_) {
            SpeciesMono rest = m;
            int j = rest[species];
            rest[species] = 0;
            out[j].add_term(rest, c);
        }
        return out;
    }

    /// The single term (coeff, mono), when the polynomial has exactly one.
    std::optional<std::pair<SpeciesMono, RateCoeff>> single_term() const {
        if (terms_.size() != 1) return std::nullopt;
        return *terms_.begin();
    }

    std::string to_string(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) out += " + ";
            std::string cs = c.to_string();
            bool paren = cs.find(" + ") != std::string::npos || cs.find(" - ") != std::string::npos;
            out += paren ? "(" + cs + ")" : cs;
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (!m[i]) continue;
                out += "*" + names[i];
                if (m[i] != 1) out += "^" + std::to_string(m[i]);
            }
            first = false;
        }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::map<SpeciesMono, RateCoeff> terms_;
};

/// Per-species mass-action polynomial plus time-dependent forcing.
/// Outflows contribute a -l*x_s term to the polynomial part (state-dependent
/// decay), and are also kept as rates for structure detection and JSON export.
struct PolyField {
    std::vector<std::string> species;
    std::vector<SpeciesPoly> polys;            // polynomial part of F_s
    std::vector<TimeExpr> inflows;             // bound forcing (zero constant if none)
    std::vector<bool> has_inflow;
    std::vector<Rational> outflow_rates;

    std::size_t size() const { return species.size(); }
    int species_index(const std::string& name) const {
        for (std::size_t i = 0; i < species.size(); ++i)
            if (species[i] == name) return (int)i;
        return -1;
    }
};

/// Mass-action vector field of a network, with symbolic rate-constant
/// coefficients; inflow expressions are bound against `overrides` merged over
/// the values declared in the DSL.
inline PolyField build_field(const Network& net, const Bindings& overrides = {}) {
    const std::size_t n = net.species.size();
    PolyField f;
    f.species = net.species;
    f.polys.assign(n, SpeciesPoly(n));
    f.inflows.assign(n, TimeExpr::constant(0.0));
    f.has_inflow.assign(n, false);
    f.outflow_rates.assign(n, Rational(0));

    for (const auto& rx : net.reactions) {
        SpeciesMono mono(n, 0);
        for (const auto& [s, c] : rx.reactant.coefficients)
            mono[net.species_index(s)] = c;
        RateCoeff k = RateCoeff::constant_name(rx.rate_name);
        for (std::size_t i = 0; i < n; ++i) {
            int netchange = rx.product.coeff(net.species[i]) - rx.reactant.coeff(net.species[i]);
            if (netchange == 0) continue;
            f.polys[i].add_term(mono, k * RateCoeff(Rational(netchange)));
        }
    }
    Bindings values = net.bindings_with(overrides);
    for (const auto& [s, e] : net.inflows) {
        int i = net.species_index(s);
        TimeExpr bound = e.bind(values);
        if (auto bad = find_negative_sample(bound))
            throw Error("inflow for '" + s + "' is negative at t=" + format_double(*bad));
        f.inflows[i] = bound;
        f.has_inflow[i] = true;
    }
    for (const auto& [s, r] : net.outflows) {
        int i = net.species_index(s);
        f.outflow_rates[i] = r;
        if (!r.is_zero()) {
            SpeciesMono mono(n, 0);
            mono[i] = 1;
            f.polys[i].add_term(mono, RateCoeff(-r));
        }
    }
    // forward-invariance precondition: any negatively-signed term of F_s must
    // contain x_s (true by construction for mass action + linear outflow)
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [m, c] : f.polys[i].terms()) {
            for (const auto& [cm, r] : c.terms()) {
                if (r.sign() < 0 && m[i] == 0)
                    throw Error("internal: field term violates orthant forward-invariance");
            }
        }
    }
    return f;
}

inline std::vector<double> eval_field(const PolyField& f, const Bindings& values,
                                      const std::vector<double>& x, double t) {
    if (x.size() != f.size()) throw Error("state dimension mismatch");
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f.polys[i].eval(values, x);
        if (f.has_inflow[i]) v += f.inflows[i].eval(t);
        out[i] = v;
    }
    return out;
}

inline nlohmann::json field_to_json(const PolyField& f) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        nlohmann::json monos = nlohmann::json::array();
        for (const auto& [m, c] : f.polys[i].terms()) {
            nlohmann::json powers = nlohmann::json::object();
            for (std::size_t j = 0; j < m.size(); ++j)
                if (m[j]) powers[f.species[j]] = m[j];
            monos.push_back({{"coeff", c.to_string()}, {"powers", powers}});
        }
        nlohmann::json entry = {{"species", f.species[i]},
                                {"monomials", monos},
                                {"outflow", f.outflow_rates[i].to_double()}};
        entry["inflow"] = f.has_inflow[i] ? f.inflows[i].print() : "0";
        out.push_back(entry);
    }
    return out;
}

// ---------------------------------------------------------------------------
// kinetic subspace and compatibility

struct KineticSubspace {
    std::vector<std::vector<std::int64_t>> basis;  // primitive integer row vectors
    int rank() const { return (int)basis.size(); }
};

/// Span of the reaction vectors plus one unit vector per inflow/outflow
/// species; `closed_system` drops the flow directions (Open Question hook).
inline KineticSubspace kinetic_subspace(const Network& net, bool closed_system = false) {
    const std::size_t n = net.species.size();
    RatMat rows;
    for (const auto& rx : net.reactions) {
        RatVec v(n, Rational(0));
        for (std::size_t i = 0; i < n; ++i)
            v[i] = Rational(rx.product.coeff(net.species[i]) - rx.reactant.coeff(net.species[i]));
        rows.push_back(std::move(v));
    }
    if (!closed_system) {
        auto unit = [&](const std::string& s) {
            RatVec v(n, Rational(0));
            v[net.species_index(s)] = Rational(1);
            rows.push_back(std::move(v));
        };
        for (const auto& [s, e] : net.inflows) unit(s);
        for (const auto& [s, r] : net.outflows)
            if (!r.is_zero() && !net.inflows.count(s)) unit(s);
    }
    int rank = row_reduce(rows);
    KineticSubspace ks;
    for (int i = 0; i < rank; ++i) ks.basis.push_back(to_primitive_integer(rows[i]));
    return ks;
}

/// Decides whether some y > 0 with y_i = acr_value is compatible with x0,
/// i.e. y - x0 lies in the kinetic subspace. Exact: conservation relations are
/// computed over rationals and strict positivity is decided by Fourier-Motzkin.
inline bool is_compatible(const Network& net, const std::vector<double>& x0,
                          const std::string& species, double acr_value,
                          bool closed_system = false) {
    const std::size_t n = net.species.size();
    if (x0.size() != n) throw Error("state dimension mismatch");
    int idx = net.species_index(species);
    if (idx < 0) throw Error("unknown species '" + species + "'");
    if (!(acr_value > 0)) throw Error("ACR value must be positive");

    KineticSubspace ks = kinetic_subspace(net, closed_system);
    RatMat span;
    for (const auto& row : ks.basis) {
        RatVec v;
        for (auto e : row) v.push_back(Rational(e));
        span.push_back(std::move(v));
    }
    RatMat conservation = null_space(span);  // w.y is invariant for w here

    RatVec x0r, target(n, Rational(0));
    for (double v : x0) x0r.push_back(Rational::from_double(v));
    Rational acr = Rational::from_double(acr_value);

    // unknowns: y_0..y_{n-1}; constraints: y_s > 0, y_idx = acr, w.y = w.x0.
    // equalities enter FM as pairs of opposite non-strict inequalities.
    std::vector<LinConstraint> cons;
    for (std::size_t s = 0; s < n; ++s) {
        LinConstraint c;
        c.a.assign(n, Rational(0));
        c.a[s] = Rational(1);
        c.b = Rational(0);
        c.strict = true;
        cons.push_back(std::move(c));
    }
    auto add_equality = [&](const RatVec& a, const Rational& b) {
        LinConstraint ge{a, b, false};
        LinConstraint le;
        le.a.reserve(n);
        for (const auto& v : a) le.a.push_back(-v);
        le.b = -b;
        le.strict = false;
        cons.push_back(std::move(ge));
        cons.push_back(std::move(le));
    };
    {
        RatVec a(n, Rational(0));
        a[idx] = Rational(1);
        add_equality(a, acr);
    }
    for (const auto& w : conservation) {
        Rational rhs(0);
        for (std::size_t s = 0; s < n; ++s) rhs += w[s] * x0r[s];
        add_equality(w, rhs);
    }
    return fm_feasible(std::move(cons), n);
}

// ---------------------------------------------------------------------------
// Compiled (bound) form for fast evaluation inside the integrator.

class CompiledPoly {
public:
    CompiledPoly() = default;
    CompiledPoly(const SpeciesPoly& p, const Bindings& values) {
        for (const auto& [m, c] : p.terms()) {
            Term t;
            t.coeff = c.eval(values);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) t.powers.push_back({(int)i, m[i]});
            terms_.push_back(std::move(t));
        }
    }

    template <typename Real = double>
    Real eval(const Real* x) const {
        Real sum(0);
        for (const auto& t : terms_) {
            Real p(t.coeff);
            for (const auto& [i, e] : t.powers) p *= pow_int(x[i], e);
            sum += p;
        }
        return sum;
    }

private:
    struct Term {
        double coeff;
        std::vector<std::pair<int, int>> powers;
    };
    std::vector<Term> terms_;
};

class CompiledField {
public:
    CompiledField(const PolyField& f, const Bindings& values) : nspecies_(f.size()) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            polys_.emplace_back(f.polys[i], values);
            forcing_.emplace_back(f.has_inflow[i]
                                      ? std::optional<ExprProgram>(ExprProgram(f.inflows[i]))
                                      : std::nullopt);
        }
    }

    std::size_t size() const { return nspecies_; }

    /// dx/dt into out[0..n); returns false if any forcing value overflowed.
    template <typename Real = double>
    bool eval(const Real* x, Real t, Real* out) const {
        bool ok = true;
        for (std::size_t i = 0; i < nspecies_; ++i) {
            Real v = polys_[i].eval(x);
            if (forcing_[i]) {
                Real g = forcing_[i]->eval(t);
                if (!(g < Real(kForcingCap))) ok = false;
                v += g;
            }
            out[i] = v;
        }
        return ok;
    }

    /// log-domain cap on forcing magnitudes (beyond it the guard trips)
    static constexpr double kForcingCap = 1e300;

private:
    std::size_t nspecies_;
    std::vector<CompiledPoly> polys_;
    std::vector<std::optional<ExprProgram>> forcing_;
};

}  // namespace acrlab
