#include <doctest.h>

#include <sstream>

#include "acrlab/integrate.hpp"
#include "acrlab/oracles.hpp"
#include "acrlab/pel.hpp"
#include "support/fixtures.hpp"

using namespace acrlab;
using namespace fixtures;

TEST_SUITE_BEGIN("odeint");

TEST_CASE("closed pair matches the two-case closed form" * doctest::timeout(60)) {
    // a0=b0=2, k1=k2=1: b(t) = 3/(1 + 0.5 e^{-3t})
    Network n = parse_network("species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 1;");
    PolyField f = build_field(n);
    Bindings values = n.rate_values();
    IntegrateOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    for (double t : {1.0, 5.0, 10.0}) {
        Trajectory traj = integrate(f, values, {2.0, 2.0}, t, opts);
        REQUIRE(traj.reached_end());
        double expect = 3.0 / (1.0 + 0.5 * std::exp(-3.0 * t));
        CHECK(canonical_b(1, 1, 2, 2, t) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(traj.last_state()[1] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("zero field keeps the state constant") {
    Network n = parse_network("species A; inflow A @ 0;");
    Trajectory traj = integrate(build_field(n), {}, {1.25}, 10.0);
    REQUIRE(traj.reached_end());
    for (const auto& s : traj.states) CHECK(s[0] == 1.25);
}

TEST_CASE("decoupled constant stays bitwise constant") {
    // zero-slope pair with no driver inflow: db/dt is identically zero
    Network n = parse_network(motif3_with_inflows("3", ""));
    Trajectory traj = integrate(build_field(n), n.rate_values(), {1.0, 1.0}, 50.0);
    REQUIRE(traj.reached_end());
    for (const auto& s : traj.states) CHECK(s[1] == 1.0);
}

TEST_CASE("fixed-step global error scales like h^5") {
    Network n = parse_network("species A; A -> 0 @ k = 1;");
    PolyField f = build_field(n);
    Bindings values = n.rate_values();
    double errs[3];
    double hs[3] = {0.1, 0.05, 0.025};
    for (int i = 0; i < 3; ++i) {
        IntegrateOptions opts;
        opts.fixed_step = hs[i];
        Trajectory traj = integrate(f, values, {1.0}, 1.0, opts);
        errs[i] = std::fabs(traj.last_state()[0] - std::exp(-1.0));
    }
    double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    CHECK(r1 > 20.0);
    CHECK(r1 < 48.0);
    CHECK(r2 > 20.0);
    CHECK(r2 < 48.0);
}

TEST_CASE("conservation along closed and forced runs" * doctest::timeout(60)) {
    Network closed = parse_network(kCanonicalClosed);
    IntegrateOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    Trajectory t1 = integrate(build_field(closed), closed.rate_values(), {2.0, 2.0}, 100.0, opts);
    for (const auto& s : t1.states)
        CHECK(std::fabs(s[0] + s[1] - 4.0) <= 1e-8 * 4.0);

    Network forced = parse_network(motif2_with_inflows("t", "exp(0.2*t)"));
    TimeExpr ga = parse_expr("t"), gb = parse_expr("exp(0.2*t)");
    Trajectory t2 = integrate(build_field(forced), forced.rate_values(), {1.0, 1.0}, 20.0, opts);
    for (std::size_t j = 0; j < t2.times.size(); ++j) {
        double G = total_G(ga, gb, t2.times[j]);
        CHECK(std::fabs(t2.states[j][0] + t2.states[j][1] - (2.0 + G)) <= 1e-6 * (1 + G));
    }
}

TEST_CASE("zero-load sign preservation and nonnegativity" * doctest::timeout(60)) {
    Network n = parse_network(kCanonicalClosed);  // k* = 2
    PolyField f = build_field(n);
    Bindings values = n.rate_values();
    PelDecomposition dec = decompose(f, "A", RateCoeff::parse("k2/k1"));
    AuxSpec aux = make_aux(dec, values);
    IntegrateOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    opts.aux = &aux;
    for (auto x0 : {std::vector<double>{3.0, 2.0}, {0.5, 1.0}, {1.0, 3.0}}) {
        Trajectory traj = integrate(f, values, x0, 60.0, opts);
        int s0 = (2.0 - x0[0]) > 0 ? 1 : -1;
        for (const auto& s : traj.states) {
            double d = 2.0 - s[0];
            if (std::fabs(d) > 1e-12) CHECK(d * s0 > 0);
            CHECK(s[0] >= 0.0);
            CHECK(s[1] >= 0.0);
        }
        // aux integrals are nondecreasing (their integrands are nonnegative here)
        for (std::size_t j = 1; j < traj.int_f.size(); ++j) {
            CHECK(traj.int_f[j] >= traj.int_f[j - 1]);
            CHECK(traj.int_absg[j] >= traj.int_absg[j - 1]);
        }
    }
}

TEST_CASE("ratio identity at full precision (extended scalar)" * doctest::timeout(60)) {
    // |x*-a(t)| e^{int f} / |x*-a(0)| stays within 1e-5 wherever |x*-a| > 1e-12
    Network n = parse_network("species A, B; A + B -> 2 B @ k1 = 1; B -> A @ k2 = 1;");
    PolyField f = build_field(n);
    Bindings values = n.rate_values();
    PelDecomposition dec = decompose(f, "A", RateCoeff::parse("k2/k1"));
    AuxSpec aux = make_aux(dec, values);
    IntegrateOptions opts;
    opts.fixed_step = 0.05;
    opts.aux = &aux;
    auto traj = integrate_real<long double>(f, values, {2.0, 2.0}, 10.0, opts);
    int scored = 0;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        long double d = std::fabs(1.0L - traj.states[j][0]);
        if (d <= 1e-12L) continue;
        long double ratio = d * std::exp(traj.int_f[j]) / 1.0L;
        CHECK((double)ratio == doctest::Approx(1.0).epsilon(1e-5));
        ++scored;
    }
    CHECK(scored > 150);
}

TEST_CASE("convergence detection" * doctest::timeout(60)) {
    // constant inflows drive A to k* = 2; the 1/(2t) transient needs a long
    // horizon before three dyadic window means agree to 1e-3
    Network n = parse_network(motif2_with_inflows("1", "1"));
    IntegrateOptions opts;
    opts.store_every = 4;
    Trajectory traj = integrate(build_field(n), n.rate_values(), {1.0, 1.0}, 800.0, opts);
    ConvergenceReport rep = detect_convergence(traj, 0);
    CHECK(rep.status == ConvergenceStatus::Converged);
    CHECK(rep.limit == doctest::Approx(2.0).epsilon(1e-2));

    // the total a+b grows without bound
    ConvergenceOptions copts;
    copts.ceiling = 100.0;
    // reuse the trajectory: build a view of a+b by summing components
    Trajectory total = traj;
    for (auto& s : total.states) s[0] = s[0] + s[1];
    ConvergenceReport rep2 = detect_convergence(total, 0, copts);
    CHECK(rep2.status == ConvergenceStatus::Unbounded);

    // constant trajectory converges to its initial value
    Network nz = parse_network("species A; inflow A @ 0;");
    IntegrateOptions dense;
    dense.h_max = 1.0;
    Trajectory tz = integrate(build_field(nz), {}, {0.7}, 50.0, dense);
    ConvergenceReport rep3 = detect_convergence(tz, 0);
    CHECK(rep3.status == ConvergenceStatus::Converged);
    CHECK(rep3.limit == doctest::Approx(0.7));

    // linear drift is not convergence
    Network nd = parse_network("species A; inflow A @ 1;");
    Trajectory td = integrate(build_field(nd), {}, {0.0}, 50.0, dense);
    ConvergenceReport rep4 = detect_convergence(td, 0);
    CHECK(rep4.status == ConvergenceStatus::Drifting);
}

TEST_CASE("x-beta change of coordinates") {
    Trajectory t;
    t.times = {0.0};
    t.states = {{1.0, 3.0}};
    XBetaSeries s = change_coords_xbeta(t, 0, 1);
    CHECK(s.x[0] == doctest::Approx(4.0));
    CHECK(s.beta[0] == doctest::Approx(0.75));
    // inverse transform reproduces (a, b)
    CHECK(s.x[0] * (1 - s.beta[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.x[0] * s.beta[0] == doctest::Approx(3.0).epsilon(1e-12));

    Trajectory tb;
    tb.times = {0.0};
    tb.states = {{5.0, 0.0}};
    XBetaSeries sb = change_coords_xbeta(tb, 0, 1);
    CHECK(sb.x[0] == 5.0);
    CHECK(sb.beta[0] == 0.0);

    Trajectory tz;
    tz.times = {0.0};
    tz.states = {{0.0, 0.0}};
    CHECK_THROWS_AS(change_coords_xbeta(tz, 0, 1), DegenerateSumError);
}

TEST_CASE("beta tends to one under growing inflows" * doctest::timeout(60)) {
    Network n = parse_network(motif2_with_inflows("1", "1"));  // k* = 2
    IntegrateOptions opts;
    opts.store_every = 2;
    Trajectory traj = integrate(build_field(n), n.rate_values(), {1.0, 1.0}, 300.0, opts);
    XBetaSeries s = change_coords_xbeta(traj, 0, 1);
    for (std::size_t j = 0; j < s.times.size(); ++j)
        if (s.x[j] > 50.0 * 2.0) CHECK(s.beta[j] > 0.95);
    CHECK(s.x.back() > 100.0);
}

TEST_CASE("stopping statuses") {
    // blow-up: dx/dt = k x^2 escapes in finite time
    Network n = parse_network("species X; 2 X -> 3 X @ k = 1;");
    Trajectory traj = integrate(build_field(n), n.rate_values(), {1.0}, 5.0);
    CHECK(traj.status == IntegrationStatus::StepSizeUnderflow);
    CHECK(traj.t_end() < 1.1);  // analytic blow-up at t = 1
    CHECK(traj.t_end() > 0.9);

    // max-steps cap reports a partial trajectory
    IntegrateOptions opts;
    opts.max_steps = 50;
    Network nm = parse_network(motif2_with_inflows("1", "1"));
    Trajectory t2 = integrate(build_field(nm), nm.rate_values(), {1.0, 1.0}, 200.0, opts);
    CHECK(t2.status == IntegrationStatus::MaxStepsExceeded);
    CHECK(!t2.times.empty());
    CHECK(t2.t_end() < 200.0);

    // double-exponential forcing beyond the cap trips the overflow guard
    Network ng = parse_network(motif5_with_inflows("exp(exp(t))", "", 1, 1));
    IntegrateOptions og;
    og.h_min = 1e-7;
    og.max_steps = 400000;
    Trajectory t3 = integrate(build_field(ng), ng.rate_values(), {1.0, 1.0}, 8.0, og);
    CHECK((t3.status == IntegrationStatus::StepSizeUnderflow ||
           t3.status == IntegrationStatus::OverflowGuard ||
           t3.status == IntegrationStatus::MaxStepsExceeded));
    CHECK(t3.t_end() < 8.0);

    // precondition violations throw
    Network nc = parse_network(kCanonicalClosed);
    PolyField f = build_field(nc);
    CHECK_THROWS_AS(integrate(f, nc.rate_values(), {1.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, nc.rate_values(), {-1.0, 1.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, nc.rate_values(), {1.0, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("csv schema") {
    Network n = parse_network(motif2_with_inflows("1", "1"));
    PolyField f = build_field(n);
    Bindings values = n.rate_values();
    PelDecomposition dec = decompose(f, "A", RateCoeff::parse("k2/k1"));
    AuxSpec aux = make_aux(dec, values);
    IntegrateOptions opts;
    opts.aux = &aux;
    Trajectory traj = integrate(f, values, {1.0, 1.0}, 5.0, opts);
    std::ostringstream os1, os2;
    write_csv(traj, n.species, os1);
    write_csv(traj, n.species, os2);
    std::string csv = os1.str();
    CHECK(csv.substr(0, csv.find('\n')) == "t,A,B,int_f,int_absg,int_ratio");
    CHECK(csv == os2.str());  // byte-identical across calls
    // 17 significant digits survive a parse round-trip
    std::istringstream is(csv);
    std::string header, line;
    std::getline(is, header);
    std::getline(is, line);
    std::getline(is, line);
    double v;
    std::size_t comma = line.find(',');
    v = std::stod(line.substr(0, comma));
    CHECK(v == traj.times[1]);
}

TEST_SUITE_END();
