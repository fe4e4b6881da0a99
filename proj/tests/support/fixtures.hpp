#pragma once

// Shared networks and helpers for the pel / odeint / oracle / acceptance tests.

#include <string>
#include <vector>

#include "acrlab/pel.hpp"
#include "gen.hpp"

namespace fixtures {

using namespace acrlab;

// canonical negative-slope pair, closed
inline const char* kCanonicalClosed =
    "species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 2;";

// negative-slope pair with inflow hooks (text assembled by the caller)
inline std::string motif2_with_inflows(const std::string& ga, const std::string& gb,
                                       double k1 = 1.0, double k2 = 2.0) {
    std::string text = "species A, B; A + B -> 2 B @ k1 = " + format_double(k1) +
                       "; B -> A @ k2 = " + format_double(k2) + ";";
    if (!ga.empty()) text += " inflow A @ " + ga + ";";
    if (!gb.empty()) text += " inflow B @ " + gb + ";";
    return text;
}

// positive-slope pair (A+B -> 0, B -> A+2B) with inflows
inline std::string motif1_with_inflows(const std::string& ga, const std::string& gb,
                                       double k1 = 1.0, double k2 = 2.0) {
    std::string text = "species A, B; A + B -> 0 @ k1 = " + format_double(k1) +
                       "; B -> A + 2 B @ k2 = " + format_double(k2) + ";";
    if (!ga.empty()) text += " inflow A @ " + ga + ";";
    if (!gb.empty()) text += " inflow B @ " + gb + ";";
    return text;
}

// zero-slope pair (A+B -> B, B -> A+B) with inflows
inline std::string motif3_with_inflows(const std::string& ga, const std::string& gb,
                                       double k1 = 1.0, double k2 = 2.0) {
    std::string text = "species A, B; A + B -> B @ k1 = " + format_double(k1) +
                       "; B -> A + B @ k2 = " + format_double(k2) + ";";
    if (!ga.empty()) text += " inflow A @ " + ga + ";";
    if (!gb.empty()) text += " inflow B @ " + gb + ";";
    return text;
}

// squared-driver negative-slope pair (A+2B -> 3B, 2B -> A+B) with inflows
inline std::string motif5_with_inflows(const std::string& ga, const std::string& gb,
                                       double k1 = 1.0, double k2 = 2.0) {
    std::string text = "species A, B; A + 2 B -> 3 B @ k1 = " + format_double(k1) +
                       "; 2 B -> A + B @ k2 = " + format_double(k2) + ";";
    if (!ga.empty()) text += " inflow A @ " + ga + ";";
    if (!gb.empty()) text += " inflow B @ " + gb + ";";
    return text;
}

// bifunctional-enzyme network with constant inflows (0 disables a line)
inline std::string enzyme_with_inflows(double gx, double gy, double ge, double gc,
                                       double k1 = 1, double k2 = 1, double k3 = 1,
                                       double k4 = 1) {
    std::string text = "species X, Y, E, C;";
    text += " X + E -> C @ k1 = " + format_double(k1) + ";";
    text += " C -> X + E @ k2 = " + format_double(k2) + ";";
    text += " C -> Y + E @ k3 = " + format_double(k3) + ";";
    text += " Y + C -> X + C @ k4 = " + format_double(k4) + ";";
    if (gx > 0) text += " inflow X @ " + format_double(gx) + ";";
    if (gy > 0) text += " inflow Y @ " + format_double(gy) + ";";
    if (ge > 0) text += " inflow E @ " + format_double(ge) + ";";
    if (gc > 0) text += " inflow C @ " + format_double(gc) + ";";
    return text;
}

// six-species two-layer enzyme network (the worked decomposition example)
inline const char* kIdhkp =
    "species X, E, C1, Y, C2;"
    "X + E -> C1 @ k1 = 1; C1 -> X + E @ k2 = 1; C1 -> Y + E @ k3 = 1;"
    "Y + C1 -> C2 @ k4 = 1; C2 -> Y + C1 @ k5 = 1; C2 -> X + C1 @ k6 = 1;";

/// Max |f*(x*-x_i) + g - F_i| over random states/constants/times.
inline double decomposition_residual(const Network& net, const std::string& species,
                                     const RateCoeff& x_star, int points, testgen::Rng& rng,
                                     double* scale_out = nullptr) {
    PolyField field = build_field(net);
    PelDecomposition dec = decompose(field, species, x_star);
    double worst = 0;
    for (int it = 0; it < points; ++it) {
        Bindings values;
        for (const auto& r : net.reactions) values[r.rate_name] = rng.uniform(0.1, 3.0);
        std::vector<double> x;
        for (std::size_t i = 0; i < net.species.size(); ++i) x.push_back(rng.uniform(0.0, 3.0));
        double t = rng.uniform(0.0, 5.0);
        double Fi = eval_field(field, values, x, t)[dec.index];
        double f = dec.power.eval(values, x);
        double g = dec.load_poly.eval(values, x);
        if (dec.has_forcing) g += dec.load_forcing.bind(values).eval(t);
        double xs = x_star.eval(values);
        double resid = std::fabs(f * (xs - x[dec.index]) + g - Fi) / (1 + std::fabs(Fi));
        worst = std::max(worst, resid);
        if (scale_out) *scale_out = std::max(*scale_out, std::fabs(Fi));
    }
    return worst;
}

}  // namespace fixtures
