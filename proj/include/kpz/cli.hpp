#pragma once
// Command line front end. One flat grammar over four commands:
//   kpz <eval|table|sample|verify> [flags]
// eval prints a single kernel or constant, table a density table, sample a
// path ensemble, verify a suite report whose pass decides the exit status.
// Every output embeds the resolved configuration; --out writes atomically.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <kpz/common.hpp>
#include <kpz/hartman_watson.hpp>
#include <kpz/io.hpp>
#include <kpz/kernels.hpp>
#include <kpz/limits.hpp>
#include <kpz/processes.hpp>

#include "CLI11.hpp"

namespace kpz {
namespace cli {

struct Options {
    std::string command;
    std::string what;
    std::string process;
    std::string suite;
    double a = 0.0, c = 0.0, tau = 1.0;
    double t = 0.0, x = 0.0, y = 0.0;
    std::vector<double> times;
    int n = 1000;
    int steps = 2000;
    uint64_t seed = 12345;
    bool seed_given = false;
    double quad_tol = 1e-10;
    std::string format = "json";
    std::string out_path;
};

// --seed beats KPZ_SEED beats 12345
inline void resolve_seed(Options& o) {
    if (o.seed_given) return;
    if (const char* env = std::getenv("KPZ_SEED")) {
        char* endp = nullptr;
        const unsigned long long v = std::strtoull(env, &endp, 10);
        if (endp && *endp == '\0') o.seed = v;
    }
}

inline void emit(const std::string& text, const Options& o, std::ostream& out) {
    if (o.out_path.empty())
        out << text;
    else
        atomic_write(o.out_path, text);
}

inline JsonObject base_config(const Options& o) {
    JsonObject cfg;
    cfg.set("command", o.command);
    if (!o.what.empty()) cfg.set("what", o.what);
    if (!o.process.empty()) cfg.set("process", o.process);
    if (!o.suite.empty()) cfg.set("suite", o.suite);
    cfg.set("a", o.a);
    cfg.set("c", o.c);
    cfg.set("tau", o.tau);
    return cfg;
}

inline int run_eval(const Options& o, std::ostream& out) {
    const BoundaryParams par{o.a, o.c, o.tau};
    QuadratureSpec quad;
    quad.rel_tol = o.quad_tol;
    KernelValue kv;
    if (o.what == "kernel-p") {
        kv = yakubovich_p(o.x, o.y, o.t, quad);
    } else if (o.what == "kernel-g") {
        kv = absorbing_g(o.x, o.y, o.t);
    } else if (o.what == "doob-H") {
        kv = doob_H(o.x, o.t, par, quad);
    } else if (o.what == "doob-h-eta") {
        kv = doob_h_eta(o.x, o.t, o.a, quad);
    } else if (o.what == "theta") {
        kv.value = hartman_watson_theta(o.x, o.t);
        kv.method = "double-double cosh integral";
    } else if (o.what == "const-C") {
        kv = const_C(par, quad);
    } else if (o.what == "const-frakC") {
        kv = const_frakC(o.a, o.c);
    } else if (o.what == "const-K") {
        kv = const_K(par, quad);
    } else if (o.what == "laplace-y0") {
        kv.value = laplace_y0(par, o.x);
        kv.method = "normalizing constant ratio";
    } else if (o.what == "x-density") {
        kv.value = x_density_1pt(par, o.x, XRoute::y_based, quad);
        kv.method = "spectral endpoint integral";
    } else if (o.what == "x-density-theta") {
        kv.value = x_density_1pt(par, o.x, XRoute::theta, quad);
        kv.method = "hartman-watson route";
    } else {
        throw DomainError(
            "unknown --what '" + o.what +
            "' (expected kernel-p, kernel-g, doob-H, doob-h-eta, theta, const-C, "
            "const-frakC, const-K, laplace-y0, x-density, x-density-theta)");
    }
    JsonObject cfg = base_config(o);
    cfg.set("t", o.t);
    cfg.set("x", o.x);
    cfg.set("y", o.y);
    cfg.set("quad_rel_tol", o.quad_tol);
    if (o.format == "csv") {
        std::string text = csv_config_line(cfg);
        text += "what,value,est_error,method\n";
        text += csv_field(o.what) + "," + fmt_g17(kv.value) + "," + fmt_g17(kv.est_error) +
                "," + csv_field(kv.method) + "\n";
        emit(text, o, out);
    } else {
        JsonObject root;
        root.set("config", cfg);
        root.set("kind", "kernel_value");
        root.set("value", kv.value);
        root.set("est_error", kv.est_error);
        root.set("method", kv.method);
        emit(root.str() + "\n", o, out);
    }
    return 0;
}

inline int run_table(const Options& o, std::ostream& out) {
    require(!o.process.empty(), "table requires --process");
    const ProcessTag tag = parse_process(o.process);
    const BoundaryParams par{o.a, o.c, o.tau};
    DensityTable table;
    if (tag == ProcessTag::hariya_yor) {
        throw DomainError("hariya_yor is a path representation with no density table");
    } else if (tag == ProcessTag::X) {
        QuadratureSpec quad;
        quad.rel_tol = o.quad_tol;
        auto f = [&](double x) { return x_density_1pt(par, x, XRoute::y_based, quad); };
        auto [lo, hi] = support_bounds(f, 0.0);
        table = x_density_table(par, lo - 0.5, hi + 0.5, 241);
    } else {
        const ProcessKind kind{tag, par};
        const double horizon = process_horizon(kind);
        const double t = o.t > 0.0 ? o.t : horizon;
        MarkovSampler sampler(kind, FddSpec{{t}, false});
        table = sampler.marginal(o.t);
    }
    JsonObject cfg = base_config(o);
    cfg.set("t", o.t);
    emit(o.format == "csv" ? to_csv(table, cfg) : to_json(table, cfg), o, out);
    return 0;
}

inline int run_sample(const Options& o, std::ostream& out) {
    require(!o.process.empty(), "sample requires --process");
    require(o.n >= 1, "sample requires --n >= 1");
    const ProcessTag tag = parse_process(o.process);
    const BoundaryParams par{o.a, o.c, o.tau};
    const ProcessKind kind{tag, par};
    std::vector<double> times = o.times;
    if (times.empty()) times.push_back(process_horizon(kind));
    PathEnsemble ens;
    if (tag == ProcessTag::X) {
        ens = x_weighted_ensemble(par, o.steps, o.n, o.seed, times);
    } else if (tag == ProcessTag::hariya_yor) {
        ens = hariya_yor_sample(par, FddSpec{times, false}, o.steps, o.n, o.seed);
    } else {
        ens = sample_markov(kind, FddSpec{times, true}, o.n, o.seed);
    }
    JsonObject cfg = base_config(o);
    cfg.set("times", times);
    cfg.set("n", o.n);
    if (tag == ProcessTag::X || tag == ProcessTag::hariya_yor) cfg.set("steps", o.steps);
    cfg.set("seed", o.seed);
    emit(o.format == "csv" ? to_csv(ens, cfg) : to_json(ens, cfg), o, out);
    return 0;
}

inline int run_verify(const Options& o, std::ostream& out) {
    require(!o.suite.empty(), "verify requires --suite");
    LimitSuite cfg = default_suite(o.suite);
    if (o.n > 0 && o.n != 1000) cfg.n = o.n;
    if (o.steps != 2000) cfg.steps = o.steps;
    cfg.seed = o.seed;
    const VerificationReport rep = run_suite(cfg);
    JsonObject jcfg = base_config(o);
    jcfg.set("scales", cfg.scales);
    jcfg.set("endpoint_tol", cfg.endpoint_tol);
    if (cfg.n > 0) jcfg.set("n", cfg.n);
    jcfg.set("seed", cfg.seed);
    emit(o.format == "csv" ? to_csv(rep, jcfg) : to_json(rep, jcfg), o, out);
    return rep.overall() ? 0 : 1;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    Options o;
    CLI::App app{"open KPZ stationary-measure toolkit"};
    app.add_option("command", o.command, "eval | table | sample | verify")->required();
    app.add_option("--what", o.what, "eval target name");
    app.add_option("--process", o.process, "process name for table/sample");
    app.add_option("--suite", o.suite, "verification suite name");
    app.add_option("--a", o.a, "left boundary parameter");
    app.add_option("--c", o.c, "right boundary parameter");
    app.add_option("--tau", o.tau, "interval length");
    app.add_option("--t", o.t, "time argument");
    app.add_option("--x", o.x, "first spatial argument (or s for laplace-y0, xi for theta)");
    app.add_option("--y", o.y, "second spatial argument");
    app.add_option("--times", o.times, "comma separated record times")->delimiter(',');
    app.add_option("--n", o.n, "path count (sample) or suite override (verify)");
    app.add_option("--steps", o.steps, "Euler steps for path samplers");
    auto* seed_opt = app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--quad-tol", o.quad_tol, "quadrature relative tolerance");
    app.add_option("--format", o.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out_path, "output path (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n" << "usage: kpz <eval|table|sample|verify> [flags]\n";
        return 2;
    }
    o.seed_given = seed_opt->count() > 0;
    resolve_seed(o);

    try {
        if (o.command == "eval") return run_eval(o, out);
        if (o.command == "table") return run_table(o, out);
        if (o.command == "sample") return run_sample(o, out);
        if (o.command == "verify") return run_verify(o, out);
        throw DomainError("unknown command '" + o.command +
                          "' (expected eval, table, sample, verify)");
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const AccuracyError& e) {
        err << "accuracy: " << e.what() << "\n";
        return 1;
    } catch (const StatQualityError& e) {
        err << "statistics: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cli
}  // namespace kpz
