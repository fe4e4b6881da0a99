#pragma once

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "acrlab/scenarios.hpp"

namespace acrlab::cli {

// Command-line front end. Data goes to the selected output (file or stdout);
// diagnostics go to the error stream. Exit codes: 0 success, 1 usage error,
// 2 integrator did not reach t_end, 3 no rule / no candidate applies.

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIntegrator = 2;
constexpr int kExitNoRule = 3;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open network file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<double> parse_x0(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw Error("bad --x0 component '" + item + "'");
        }
    }
    return out;
}

inline Bindings parse_sets(const std::vector<std::string>& sets) {
    Bindings b;
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("--set expects name=value, got '" + kv + "'");
        try {
            b[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (...) {
            throw Error("bad --set value in '" + kv + "'");
        }
    }
    return b;
}

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

inline int thread_budget(std::size_t work_items) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("ACRLAB_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) n = (unsigned)v;
        } catch (...) {
        }
    }
    if (n == 0) n = 1;
    return (int)std::min<std::size_t>(n, work_items);
}

}  // namespace detail

struct SimulateArgs {
    std::string network_path, x0_text, output, format = "csv", species, xstar;
    std::vector<std::string> sets;
    double t_end = 100, rtol = 1e-8, atol = 1e-10, h_min = 0, h_max = 0;
    long max_steps = 20'000'000;
    int store_every = 1;
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    Network net = parse_network(detail::read_file(a.network_path));
    Bindings overrides = detail::parse_sets(a.sets);
    std::vector<double> x0 = detail::parse_x0(a.x0_text);
    if (x0.size() != net.species.size())
        throw Error("--x0 has " + std::to_string(x0.size()) + " components, network has " +
                    std::to_string(net.species.size()) + " species");
    PolyField field = build_field(net, overrides);
    Bindings values = net.bindings_with(overrides);

    AuxSpec aux;
    IntegrateOptions opts;
    opts.rtol = a.rtol;
    opts.atol = a.atol;
    opts.h_min = a.h_min;
    if (a.h_max > 0) opts.h_max = a.h_max;
    opts.max_steps = a.max_steps;
    opts.store_every = a.store_every;
    PelDecomposition dec;
    if (!a.species.empty()) {
        RateCoeff xs;
        if (!a.xstar.empty()) {
            xs = RateCoeff::parse(a.xstar);
        } else {
            auto cands = find_acr_candidates(field, a.species);
            if (cands.empty())
                throw Error("no robust-value candidate found for '" + a.species +
                            "'; pass --xstar");
            xs = cands.front();
        }
        dec = decompose(field, a.species, xs);
        aux = make_aux(dec, values);
        opts.aux = &aux;
    }

    Trajectory traj = integrate(field, values, x0, a.t_end, opts);

    detail::OutputTarget target(a.output, out);
    if (a.format == "json") {
        nlohmann::json j;
        j["species"] = net.species;
        j["status"] = to_string(traj.status);
        j["t"] = traj.times;
        nlohmann::json states = nlohmann::json::array();
        for (const auto& s : traj.states) states.push_back(s);
        j["states"] = states;
        if (traj.has_aux()) {
            j["int_f"] = traj.int_f;
            j["int_absg"] = traj.int_absg;
            j["int_ratio"] = traj.int_ratio;
        }
        target.stream() << j.dump(2) << "\n";
    } else {
        write_csv(traj, net.species, target.stream());
    }
    if (!traj.reached_end()) {
        err << "integration stopped early: " << traj.message
            << " (reached t=" << format_double(traj.t_end()) << " of "
            << format_double(a.t_end) << ")\n";
        return kExitIntegrator;
    }
    return kExitOk;
}

struct DecomposeArgs {
    std::string network_path, species, xstar, output;
    std::vector<std::string> sets;
};

inline int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
    Network net = parse_network(detail::read_file(a.network_path));
    Bindings overrides = detail::parse_sets(a.sets);
    PolyField field = build_field(net, overrides);

    std::vector<RateCoeff> cands;
    if (!a.xstar.empty())
        cands.push_back(RateCoeff::parse(a.xstar));
    else
        cands = find_acr_candidates(field, a.species);

    nlohmann::json j;
    j["field"] = field_to_json(field);
    nlohmann::json decs = nlohmann::json::array();
    for (const auto& xs : cands) {
        PelDecomposition dec = decompose(field, a.species, xs);
        nlohmann::json power = nlohmann::json::array();
        for (const auto& [m, c] : dec.power.terms()) {
            nlohmann::json powers = nlohmann::json::object();
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) powers[net.species[i]] = m[i];
            power.push_back({{"coeff", c.to_string()}, {"powers", powers}});
        }
        nlohmann::json load = nlohmann::json::array();
        for (const auto& [m, c] : dec.load_poly.terms()) {
            nlohmann::json powers = nlohmann::json::object();
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) powers[net.species[i]] = m[i];
            load.push_back({{"coeff", c.to_string()}, {"powers", powers}});
        }
        nlohmann::json entry{{"species", a.species},
                             {"x_star", xs.to_string()},
                             {"power", power},
                             {"load", load}};
        entry["forcing"] = dec.has_forcing ? dec.load_forcing.print() : "0";
        decs.push_back(entry);
    }
    j["decompositions"] = decs;

    detail::OutputTarget target(a.output, out);
    target.stream() << j.dump(2) << "\n";
    if (cands.empty()) {
        err << "no robust-value candidate found for '" << a.species << "'\n";
        return kExitNoRule;
    }
    return kExitOk;
}

struct PredictArgs {
    std::string network_path, species, xstar, x0_text, output;
    std::vector<std::string> sets;
    double t_end = 200;
    bool closed_compat = false;
};

inline int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    Network net = parse_network(detail::read_file(a.network_path));
    Bindings overrides = detail::parse_sets(a.sets);
    PolyField field = build_field(net, overrides);
    Bindings values = net.bindings_with(overrides);

    PredictOptions popts;
    if (!a.x0_text.empty()) {
        popts.x0 = detail::parse_x0(a.x0_text);
        if (popts.x0->size() != net.species.size()) throw Error("--x0 dimension mismatch");
    }
    std::optional<RateCoeff> xs;
    if (!a.xstar.empty()) xs = RateCoeff::parse(a.xstar);

    auto preds = predict_limits(net, a.species, overrides, popts, xs);
    Trajectory traj;
    if (preds.empty() && popts.x0) {
        // numeric fallback: integrate once, then re-run the predictor with it
        traj = integrate(field, values, *popts.x0, a.t_end);
        popts.trajectory = &traj;
        preds = predict_limits(net, a.species, overrides, popts, xs);
    }

    nlohmann::json j;
    if (preds.size() == 1) {
        j = prediction_to_json(preds.front());
        if (popts.x0) {
            // compatibility of the initial value with the predicted hyperplane
            j["compatible"] = is_compatible(net, *popts.x0, a.species, preds.front().limit,
                                            a.closed_compat);
        }
    } else {
        j = nlohmann::json::array();
        for (const auto& p : preds) j.push_back(prediction_to_json(p));
    }

    detail::OutputTarget target(a.output, out);
    target.stream() << j.dump(2) << "\n";
    if (preds.empty()) {
        err << "no convergence rule applies to '" << a.species << "'"
            << (popts.x0 ? " (numeric fallback did not converge)"
                         : " (pass --x0 to enable the numeric fallback)")
            << "\n";
        return kExitNoRule;
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string scenario_id, output, format = "table";
    bool all = false;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<const Scenario*> work;
    if (a.all) {
        for (const auto& s : list_scenarios()) work.push_back(&s);
    } else {
        work.push_back(&find_scenario(a.scenario_id));  // throws -> usage error
    }

    std::vector<ScenarioResult> results(work.size());
    std::atomic<std::size_t> next{0};
    int nthreads = detail::thread_budget(work.size());
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            results[i] = run_scenario(*work[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::sort(results.begin(), results.end(),
              [](const ScenarioResult& x, const ScenarioResult& y) { return x.id < y.id; });

    detail::OutputTarget target(a.output, out);
    std::ostream& os = target.stream();
    if (a.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : results) j.push_back(result_to_json(r));
        os << j.dump(2) << "\n";
    } else {
        os << std::left << std::setw(30) << "scenario" << std::setw(10) << "status"
           << std::setw(14) << "observed" << std::setw(14) << "predicted" << std::setw(14)
           << "expected" << std::setw(10) << "tol"
           << "rule\n";
        for (const auto& r : results) {
            std::string status = r.gated_skip      ? "gated"
                                 : r.conjecture    ? (r.pass ? "conj-ok" : "conj-off")
                                 : r.pass          ? "pass"
                                                   : "FAIL";
            auto num = [](double v) {
                return std::isnan(v) ? std::string("-") : format_double6(v);
            };
            os << std::left << std::setw(30) << r.id << std::setw(10) << status << std::setw(14)
               << num(r.observed) << std::setw(14) << num(r.predicted) << std::setw(14)
               << num(r.expected) << std::setw(10) << format_double(r.tolerance)
               << (r.rule.empty() ? "-" : r.rule) << "\n";
            if (!r.error.empty()) os << "    error: " << r.error << "\n";
        }
    }

    bool all_pass = true;
    for (const auto& r : results)
        if (!r.conjecture && !r.pass) all_pass = false;
    if (!all_pass) err << "one or more non-conjecture scenarios failed\n";
    return all_pass ? kExitOk : kExitIntegrator;
}

struct ScenariosArgs {
    std::string output, format = "table";
};

inline int cmd_scenarios(const ScenariosArgs& a, std::ostream& out) {
    detail::OutputTarget target(a.output, out);
    std::ostream& os = target.stream();
    if (a.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& s : list_scenarios()) j.push_back(scenario_to_json(s));
        os << j.dump(2) << "\n";
    } else {
        os << std::left << std::setw(30) << "id" << std::setw(9) << "species" << std::setw(12)
           << "expected" << std::setw(9) << "tol" << std::setw(8) << "t_end"
           << "note\n";
        for (const auto& s : list_scenarios()) {
            os << std::left << std::setw(30) << s.id << std::setw(9) << s.acr_species
               << std::setw(12) << format_double(s.expected_limit) << std::setw(9)
               << format_double(s.tolerance) << std::setw(8) << format_double(s.t_end) << s.note
               << "\n";
        }
    }
    return kExitOk;
}

/// Entry point shared by the binary and the tests. argv-style, without argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mass-action robust-output toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "integrate a network and write a trajectory");
    simulate->add_option("-n,--network", sim.network_path, "network DSL file")->required();
    simulate->add_option("--x0", sim.x0_text, "initial state, comma-separated")->required();
    simulate->add_option("--t-end", sim.t_end, "integration horizon");
    simulate->add_option("--rtol", sim.rtol, "relative tolerance");
    simulate->add_option("--atol", sim.atol, "absolute tolerance");
    simulate->add_option("--h-min", sim.h_min, "stop cleanly when the step falls below");
    simulate->add_option("--h-max", sim.h_max, "step ceiling");
    simulate->add_option("--max-steps", sim.max_steps, "step budget");
    simulate->add_option("--store-every", sim.store_every, "thin stored output");
    simulate->add_option("--species", sim.species, "attach the decomposition of this species");
    simulate->add_option("--xstar", sim.xstar, "robust value for --species (rate expression)");
    simulate->add_option("--set", sim.sets, "override a rate constant, name=value");
    simulate->add_option("-o,--output", sim.output, "output file (default stdout)");
    simulate->add_option("--format", sim.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    DecomposeArgs dc;
    auto* decomposeCmd = app.add_subcommand("decompose", "emit the power-engine-load split");
    decomposeCmd->add_option("-n,--network", dc.network_path, "network DSL file")->required();
    decomposeCmd->add_option("--species", dc.species, "species to decompose")->required();
    decomposeCmd->add_option("--xstar", dc.xstar, "robust value (rate expression)");
    decomposeCmd->add_option("--set", dc.sets, "override a rate constant, name=value");
    decomposeCmd->add_option("-o,--output", dc.output, "output file (default stdout)");

    PredictArgs pr;
    auto* predictCmd = app.add_subcommand("predict", "predict the robust limit");
    predictCmd->add_option("-n,--network", pr.network_path, "network DSL file")->required();
    predictCmd->add_option("--species", pr.species, "species to predict")->required();
    predictCmd->add_option("--x0", pr.x0_text, "initial state (enables feeders and fallback)");
    predictCmd->add_option("--xstar", pr.xstar, "robust value override");
    predictCmd->add_option("--t-end", pr.t_end, "fallback trajectory horizon");
    predictCmd->add_option("--set", pr.sets, "override a rate constant, name=value");
    predictCmd->add_flag("--closed-compat", pr.closed_compat,
                         "compatibility against the closed-system kinetic subspace");
    predictCmd->add_option("-o,--output", pr.output, "output file (default stdout)");

    VerifyArgs vf;
    auto* verifyCmd = app.add_subcommand("verify", "run registered scenarios");
    verifyCmd->add_option("scenario", vf.scenario_id, "scenario id");
    verifyCmd->add_flag("--all", vf.all, "run the whole registry");
    verifyCmd->add_option("--format", vf.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}));
    verifyCmd->add_option("-o,--output", vf.output, "output file (default stdout)");

    ScenariosArgs sc;
    auto* scenariosCmd = app.add_subcommand("scenarios", "list the scenario registry");
    scenariosCmd->add_option("--format", sc.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}));
    scenariosCmd->add_option("-o,--output", sc.output, "output file (default stdout)");

    // CLI11 wants argv in reverse order for its vector-parse entry point
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out, err);
        if (*decomposeCmd) return cmd_decompose(dc, out, err);
        if (*predictCmd) return cmd_predict(pr, out, err);
        if (*verifyCmd) {
            if (!vf.all && vf.scenario_id.empty()) {
                err << "usage error: give a scenario id or --all\n";
                return kExitUsage;
            }
            return cmd_verify(vf, out, err);
        }
        if (*scenariosCmd) return cmd_scenarios(sc, out);
    } catch (const NetParseError& e) {
        err << "network error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace acrlab::cli
