#include <doctest.h>

#include "acrlab/poly_field.hpp"
#include "support/gen.hpp"

using namespace acrlab;

namespace {

// reference evaluation straight off the reaction list
std::vector<double> naive_eval(const Network& n, const Bindings& values,
                               const std::vector<double>& x, double t) {
    std::vector<double> out(n.species.size(), 0.0);
    for (const auto& rx : n.reactions) {
        double rate = values.at(rx.rate_name);
        for (const auto& [s, c] : rx.reactant.coefficients)
            rate *= pow_int(x[n.species_index(s)], c);
        for (std::size_t i = 0; i < n.species.size(); ++i) {
            int net = rx.product.coeff(n.species[i]) - rx.reactant.coeff(n.species[i]);
            if (net) out[i] += net * rate;
        }
    }
    for (const auto& [s, e] : n.inflows) out[n.species_index(s)] += e.bind(values).eval(t);
    for (const auto& [s, r] : n.outflows)
        out[n.species_index(s)] -= r.to_double() * x[n.species_index(s)];
    return out;
}

const char* kTwoToCNet =
    "species A, B, C; A + B -> 2 C @ k1 = 1; 2 C -> 2 A @ k2 = 1;";

const char* kClosedPairNet = "species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 2;";

const char* kEnzymeNet =
    "species X, Y, E, C;"
    "X + E -> C @ k1 = 1; C -> X + E @ k2 = 1; C -> Y + E @ k3 = 1;"
    "Y + C -> X + C @ k4 = 1;";

}  // namespace

TEST_SUITE_BEGIN("massaction");

TEST_CASE("field construction is coefficient-exact") {
    Network n = parse_network(kTwoToCNet);
    PolyField f = build_field(n);
    // da/dt = -k1 a b + 2 k2 c^2 ; db/dt = -k1 a b ; dc/dt = 2 k1 a b - 2 k2 c^2
    SpeciesPoly expectA(3), expectB(3), expectC(3);
    RateCoeff k1 = RateCoeff::constant_name("k1"), k2 = RateCoeff::constant_name("k2");
    SpeciesMono ab{1, 1, 0}, cc{0, 0, 2};
    expectA.add_term(ab, -k1);
    expectA.add_term(cc, k2 * RateCoeff(2));
    expectB.add_term(ab, -k1);
    expectC.add_term(ab, k1 * RateCoeff(2));
    expectC.add_term(cc, -(k2 * RateCoeff(2)));
    CHECK(f.polys[0] == expectA);
    CHECK(f.polys[1] == expectB);
    CHECK(f.polys[2] == expectC);
}

TEST_CASE("closed pair field in raw form") {
    Network n = parse_network(kClosedPairNet);
    PolyField f = build_field(n);
    // da/dt = -k1 a b + k2 b  (the factored engine form k1 b (k2/k1 - a))
    SpeciesPoly expectA(2);
    expectA.add_term({1, 1}, -RateCoeff::constant_name("k1"));
    expectA.add_term({0, 1}, RateCoeff::constant_name("k2"));
    CHECK(f.polys[0] == expectA);
    CHECK(f.polys[1] == -expectA);
}

TEST_CASE("inflow-only species has zero polynomial part") {
    Network n = parse_network("species A; A -> 0 @ d = 1; inflow A @ t^2 + 1;");
    PolyField f = build_field(n);
    SpeciesPoly expect(1);
    expect.add_term({1}, -RateCoeff::constant_name("d"));
    CHECK(f.polys[0] == expect);
    CHECK(f.has_inflow[0]);
    CHECK(f.inflows[0].eval(2.0) == doctest::Approx(5.0));
}

TEST_CASE("eval_field worked values") {
    // engine zero at the robust value: F(a=k2/k1, b) = (0, 0)
    Network pair = parse_network(kClosedPairNet);
    PolyField fpair = build_field(pair);
    Bindings vals{{"k1", 1.0}, {"k2", 2.0}};
    auto v = eval_field(fpair, vals, {2.0, 5.0}, 0.0);
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(0.0));

    Network n2c = parse_network(kTwoToCNet);
    auto v2 = eval_field(build_field(n2c), {{"k1", 1.0}, {"k2", 1.0}}, {1, 1, 1}, 0.0);
    CHECK(v2[0] == doctest::Approx(1.0));   // -1 + 2
    CHECK(v2[1] == doctest::Approx(-1.0));
    CHECK(v2[2] == doctest::Approx(0.0));   // 2 - 2

    Network enz = parse_network(kEnzymeNet);
    Bindings ones{{"k1", 1.0}, {"k2", 1.0}, {"k3", 1.0}, {"k4", 1.0}};
    auto v3 = eval_field(build_field(enz), ones, {1, 1, 1, 1}, 0.0);
    CHECK(v3[0] == doctest::Approx(1.0));
    CHECK(v3[1] == doctest::Approx(0.0));
    CHECK(v3[2] == doctest::Approx(1.0));
    CHECK(v3[3] == doctest::Approx(-1.0));

    CHECK_THROWS_AS(eval_field(fpair, {{"k1", 1.0}}, {1, 1}, 0.0), UnboundParamError);
}

TEST_CASE("field is additive over reaction subsets") {
    testgen::Rng rng(2024);
    // polynomial contributed to species i by a reaction subset
    auto subset_poly = [](const Network& n, const std::vector<Reaction>& subset, std::size_t i) {
        SpeciesPoly p(n.species.size());
        for (const auto& rx : subset) {
            SpeciesMono mono(n.species.size(), 0);
            for (const auto& [s, c] : rx.reactant.coefficients)
                mono[n.species_index(s)] = c;
            int net = rx.product.coeff(n.species[i]) - rx.reactant.coeff(n.species[i]);
            if (net)
                p.add_term(mono, RateCoeff::constant_name(rx.rate_name) * RateCoeff(Rational(net)));
        }
        return p;
    };
    for (int iter = 0; iter < 30; ++iter) {
        Network n = parse_network(testgen::random_network_text(rng));
        if (n.reactions.size() < 2) continue;
        std::vector<Reaction> r1, r2;
        for (const auto& rx : n.reactions)
            (rng.chance(0.5) ? r1 : r2).push_back(rx);
        Network closed = n;
        closed.inflows.clear();
        closed.outflows.clear();
        PolyField whole = build_field(closed);
        for (std::size_t i = 0; i < n.species.size(); ++i)
            CHECK(whole.polys[i] == subset_poly(n, r1, i) + subset_poly(n, r2, i));
    }
}

TEST_CASE("conservation identities hold symbolically") {
    Network pair = parse_network(kClosedPairNet);
    PolyField f = build_field(pair);
    CHECK((f.polys[0] + f.polys[1]).is_zero());  // d(a+b)/dt == 0 exactly

    Network enz = parse_network(kEnzymeNet);
    PolyField fe = build_field(enz);
    int X = 0, Y = 1, E = 2, C = 3;
    CHECK((fe.polys[X] + fe.polys[Y] + fe.polys[C]).is_zero());  // total substrate
    CHECK((fe.polys[E] + fe.polys[C]).is_zero());                // total enzyme
}

TEST_CASE("eval matches naive per-reaction summation") {
    testgen::Rng rng(555);
    for (int iter = 0; iter < 40; ++iter) {
        Network n = parse_network(testgen::random_network_text(rng));
        PolyField f = build_field(n);
        Bindings values = n.rate_values();
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> x;
            for (std::size_t i = 0; i < n.species.size(); ++i)
                x.push_back(rng.uniform(0.0, 4.0));
            double t = rng.uniform(0.0, 3.0);
            auto a = eval_field(f, values, x, t);
            auto b = naive_eval(n, values, x, t);
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13).scale(1 + std::fabs(b[i])));
        }
    }
}

TEST_CASE("compiled field matches symbolic evaluation") {
    Network n = parse_network(
        "species A, B; A + B -> 2 B @ k1 = 1.5; B -> A @ k2 = 2;"
        "inflow A @ exp(0.5*t); outflow B @ 0.25;");
    Bindings values = n.rate_values();
    PolyField f = build_field(n);
    CompiledField cf(f, values);
    double x[2] = {1.3, 0.7}, out[2];
    REQUIRE(cf.eval(x, 1.1, out));
    auto ref = eval_field(f, values, {1.3, 0.7}, 1.1);
    CHECK(out[0] == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(ref[1]).epsilon(1e-14));
}

TEST_CASE("kinetic subspace") {
    Network pair = parse_network(kClosedPairNet);
    KineticSubspace ks = kinetic_subspace(pair);
    REQUIRE(ks.rank() == 1);
    CHECK(ks.basis[0] == std::vector<std::int64_t>{1, -1});

    Network open = parse_network(
        "species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 2; inflow A @ 1;");
    CHECK(kinetic_subspace(open).rank() == 2);
    CHECK(kinetic_subspace(open, /*closed_system=*/true).rank() == 1);

    Network enz = parse_network(kEnzymeNet);
    KineticSubspace ke = kinetic_subspace(enz);
    REQUIRE(ke.rank() == 2);
    for (const auto& v : ke.basis) {
        CHECK(v[0] + v[1] + v[3] == 0);  // orthogonal to (1,1,0,1)
        CHECK(v[2] + v[3] == 0);         // orthogonal to (0,0,1,1)
    }
}

TEST_CASE("compatibility gate") {
    Network pair = parse_network(kClosedPairNet);  // k* = k2/k1 = 2
    CHECK(is_compatible(pair, {1.0, 3.0}, "A", 2.0));
    CHECK(!is_compatible(pair, {0.5, 1.0}, "A", 2.0));
    // boundary a0 + b0 == k*: no strictly positive point on the hyperplane
    CHECK(!is_compatible(pair, {0.5, 1.5}, "A", 2.0));

    // full-rank kinetic subspace: everything is compatible
    Network open = parse_network(
        "species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 2;"
        "inflow A @ 1; inflow B @ 1;");
    CHECK(is_compatible(open, {0.01, 0.01}, "A", 7.3));

    // enzyme network: y = v reachable iff the substrate total leaves room
    Network enz = parse_network(kEnzymeNet);
    CHECK(is_compatible(enz, {1.0, 1.0, 1.0, 1.0}, "Y", 2.0));   // T_x = 3 > 2
    CHECK(!is_compatible(enz, {0.5, 0.5, 1.0, 0.5}, "Y", 2.0));  // T_x = 1.5 < 2
}

TEST_CASE("compatibility admits its own witness") {
    // for strictly positive x0, the point itself witnesses compatibility with
    // the hyperplane through any of its coordinates
    testgen::Rng rng(31337);
    int tried = 0;
    while (tried < 40) {
        Network n = parse_network(testgen::random_network_text(rng));
        std::vector<double> x0;
        for (std::size_t i = 0; i < n.species.size(); ++i)
            x0.push_back(rng.uniform_int(1, 8) / 2.0);
        int sp = rng.uniform_int(0, (int)n.species.size() - 1);
        CHECK(is_compatible(n, x0, n.species[sp], x0[sp]));
        CHECK(is_compatible(n, x0, n.species[sp], x0[sp], /*closed_system=*/true));
        ++tried;
    }
}

TEST_CASE("json export shape") {
    Network n = parse_network(
        "species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 2;"
        "inflow A @ t; outflow A @ 0.3;");
    nlohmann::json j = field_to_json(build_field(n));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["species"] == "A");
    CHECK(j[0]["inflow"] == "t");
    CHECK(j[0]["outflow"] == doctest::Approx(0.3));
    bool found_outflow_term = false;
    for (const auto& m : j[0]["monomials"]) {
        if (m["coeff"] == "-3/10" && m["powers"].contains("A")) found_outflow_term = true;
    }
    CHECK(found_outflow_term);
    CHECK(j[1]["inflow"] == "0");
}

TEST_SUITE_END();
