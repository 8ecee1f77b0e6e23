// Command-line front end for the quasisym library: convexity certificates,
// change-of-variable tables, radial and planar solves, spectral and
// reflection diagnostics. All file output is atomic and byte-deterministic
// for a given invocation.

#include "quasisym/convexity.hpp"
#include "quasisym/errors.hpp"
#include "quasisym/io.hpp"
#include "quasisym/nonlin.hpp"
#include "quasisym/planar.hpp"
#include "quasisym/radial.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using quasisym::io::fmt12;
using json = nlohmann::ordered_json;

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// Flat key=value configuration: '#' comments, blank lines ignored, keys are
/// long option names without the leading dashes. Command-line flags override
/// configured values (options take the last occurrence).
std::vector<std::string> load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw quasisym::usage_error("cannot read config file " + path);
    std::vector<std::string> args;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw quasisym::usage_error("config line " + std::to_string(no) +
                                        ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw quasisym::usage_error("config line " + std::to_string(no) + ": empty key");
        for (char c : key)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
                throw quasisym::usage_error("config line " + std::to_string(no) +
                                            ": bad key '" + key + "'");
        args.push_back("--" + key + "=" + value);
    }
    return args;
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

// ---------------------------------------------------------------- options

struct SpecOpts {
    double k = 2.0, p = 2.0;
    int dim = 3;
    std::string sign = "positive-part";
    bool constant_a = false;
    double a_const = 1.0;
    std::string weight = "constant";
    double weight_value = 1.0, weight_exponent = 0.0, weight_bump = 0.0, weight_halfwidth = 1.0;
    double s_max = 20.0, ode_tol = 1e-12;
};

void add_spec_options(CLI::App *sub, SpecOpts &o, int default_dim) {
    o.dim = default_dim;
    sub->add_option("--k", o.k, "coefficient exponent in a(t) = 1 + |t|^k");
    sub->add_option("--p", o.p, "source exponent");
    sub->add_option("--dim", o.dim, "space dimension");
    sub->add_option("--sign", o.sign, "source sign convention: positive-part | odd");
    auto *ca = sub->add_option("--constant-a", o.a_const,
                               "use the constant coefficient a(t) = value instead of 1 + |t|^k");
    ca->each([&o](const std::string &) { o.constant_a = true; });
    sub->add_option("--weight", o.weight, "weight kind: constant | radial-power | even-bump");
    sub->add_option("--weight-value", o.weight_value, "weight scale factor");
    sub->add_option("--weight-exponent", o.weight_exponent, "radial-power exponent");
    sub->add_option("--weight-bump", o.weight_bump, "even-bump amplitude");
    sub->add_option("--weight-halfwidth", o.weight_halfwidth, "even-bump halfwidth");
    sub->add_option("--s-max", o.s_max, "tabulation range of the change of variable");
    sub->add_option("--ode-tol", o.ode_tol, "integrator tolerance for the change of variable");
}

quasisym::NonlinearitySpec to_spec(const SpecOpts &o) {
    quasisym::NonlinearitySpec spec;
    spec.k = o.k;
    spec.p = o.p;
    spec.dim = o.dim;
    if (o.sign == "positive-part")
        spec.sign = quasisym::SourceSign::PositivePart;
    else if (o.sign == "odd")
        spec.sign = quasisym::SourceSign::OddPower;
    else
        throw quasisym::usage_error("unknown --sign '" + o.sign + "'");
    spec.constant_a = o.constant_a;
    spec.a_const = o.a_const;
    if (o.weight == "constant")
        spec.psi.kind = quasisym::Weight::Kind::Constant;
    else if (o.weight == "radial-power")
        spec.psi.kind = quasisym::Weight::Kind::RadialPower;
    else if (o.weight == "even-bump")
        spec.psi.kind = quasisym::Weight::Kind::EvenBump;
    else
        throw quasisym::usage_error("unknown --weight '" + o.weight + "'");
    spec.psi.value = o.weight_value;
    spec.psi.exponent = o.weight_exponent;
    spec.psi.bump = o.weight_bump;
    spec.psi.halfwidth = o.weight_halfwidth;
    spec.validate();
    return spec;
}

quasisym::DerivativeBundle to_bundle(const SpecOpts &o) {
    return quasisym::make_bundle(to_spec(o), o.s_max, o.ode_tol);
}

struct RunOpts {
    bool serial = false;
    int threads = 0;
};

void add_run_options(CLI::App *sub, RunOpts &o) {
    sub->add_flag("--serial", o.serial, "run the serial reference kernels");
    sub->add_option("--threads", o.threads, "thread budget for the parallel kernels");
}

quasisym::Exec exec_of(const RunOpts &o) {
    if (o.threads > 0) setenv("QUASISYM_THREADS", std::to_string(o.threads).c_str(), 1);
    return o.serial ? quasisym::Exec::Serial : quasisym::Exec::Parallel;
}

void emit_json(const std::string &path, const json &j) {
    if (path.empty()) return;
    quasisym::io::write_text_atomic(path, j.dump(2) + "\n");
}

json certificate_json(const quasisym::ConvexityCertificate &c, bool for_derivative) {
    json j;
    j["certified"] = for_derivative ? c.hprime_convex : c.h_convex;
    j["reason"] = for_derivative ? c.hprime_reason : c.h_reason;
    if (!for_derivative) {
        j["gamma"] = {{"gamma1", c.gamma.gamma1},
                      {"gamma2", c.gamma.gamma2},
                      {"gamma3", c.gamma.gamma3},
                      {"gamma1_factored", c.gamma.gamma1_factored},
                      {"gamma2_factored", c.gamma.gamma2_factored}};
        json ineq = json::array();
        ineq.push_back({{"name", "p > k + 1"}, {"lhs", c.p - c.k - 1.0}, {"satisfied", c.p > c.k + 1.0}});
        ineq.push_back({{"name", "k >= 2"}, {"lhs", c.k - 2.0}, {"satisfied", c.k >= 2.0}});
        ineq.push_back({{"name", "gamma1 > 0"}, {"lhs", c.gamma.gamma1}, {"satisfied", c.gamma.gamma1 > 0.0}});
        ineq.push_back({{"name", "gamma2 > 0"}, {"lhs", c.gamma.gamma2}, {"satisfied", c.gamma.gamma2 > 0.0}});
        ineq.push_back({{"name", "gamma3 >= 0"}, {"lhs", c.gamma.gamma3}, {"satisfied", c.gamma.gamma3 >= 0.0}});
        j["inequalities"] = ineq;
    } else {
        j["mode"] = c.mode == quasisym::CertifyMode::Sharp ? "sharp" : "sufficient";
        j["margin"] = c.margin;
        j["s_sharp"] = c.s_sharp;
        j["pi"] = {{"pi1", c.pi.pi1}, {"pi2", c.pi.pi2}, {"pi3", c.pi.pi3}, {"pi4", c.pi.pi4}};
        j["q"] = {{"c3", c.q.c3}, {"c2", c.q.c2}, {"c1", c.q.c1}, {"c0", c.q.c0}};
        json ineq = json::array();
        if (c.mode == quasisym::CertifyMode::Sufficient) {
            ineq.push_back({{"name", "c3 > 0"}, {"lhs", c.q.c3}, {"satisfied", c.q.c3 > 0.0}});
            ineq.push_back({{"name", "c2 > 0"}, {"lhs", c.q.c2}, {"satisfied", c.q.c2 > 0.0}});
            ineq.push_back({{"name", "c1 > 0"}, {"lhs", c.q.c1}, {"satisfied", c.q.c1 > 0.0}});
        } else {
            ineq.push_back({{"name", "c3 > 0"}, {"lhs", c.q.c3}, {"satisfied", c.q.c3 > 0.0}});
            ineq.push_back({{"name", "c0 >= 0"}, {"lhs", c.q.c0}, {"satisfied", c.q.c0 >= 0.0}});
            if (c.s_sharp > 0.0) {
                const double qs = quasisym::qp_eval(c.q, c.k, c.s_sharp);
                ineq.push_back({{"name", "Q positive at the interior stationary point"},
                                {"lhs", qs},
                                {"satisfied", qs > 0.0}});
            }
        }
        j["inequalities"] = ineq;
    }
    return j;
}

// ---------------------------------------------------------------- commands

int run(int argc, char **argv) {
    CLI::App app{"quasisym: convexity certificates and symmetry diagnostics for\n"
                 "quasi-linear elliptic problems through a change of variable"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", "quasisym 1.0.0");
    app.footer("Every subcommand accepts --config FILE with flat key=value lines\n"
               "('#' starts a comment); command-line flags override the file.");

    // certify ------------------------------------------------------------
    auto *certify = app.add_subcommand("certify", "convexity certificate for h and h' at (k, p)");
    double ck = 2.0, cp = 5.0;
    std::string cmode = "sharp", cjson;
    certify->add_option("--k", ck, "coefficient exponent")->required();
    certify->add_option("--p", cp, "source exponent")->required();
    certify->add_option("--mode", cmode, "sufficient | sharp");
    certify->add_option("--json", cjson, "write the certificate as JSON");

    // find-pk ------------------------------------------------------------
    auto *findpk = app.add_subcommand("find-pk", "smallest certified exponent threshold for a given k");
    double fk = 2.0, ftol = 1e-4;
    std::string fmode = "sharp", fjson;
    findpk->add_option("--k", fk, "coefficient exponent")->required();
    findpk->add_option("--mode", fmode, "sufficient | sharp");
    findpk->add_option("--tol", ftol, "threshold resolution");
    findpk->add_option("--json", fjson, "write the result as JSON");

    // scan ---------------------------------------------------------------
    auto *scan = app.add_subcommand("scan", "sample a derivative profile of h on an s-interval");
    SpecOpts sscan;
    RunOpts rscan;
    int sorder = 2, ssamples = 1000;
    double slo = 1e-3, shi = 2.0;
    std::string sout, sjson;
    add_spec_options(scan, sscan, 3);
    add_run_options(scan, rscan);
    scan->add_option("--order", sorder, "derivative order (0..3)");
    scan->add_option("--s-lo", slo, "lower end of the sample interval (> 0)");
    scan->add_option("--s-hi", shi, "upper end of the sample interval");
    scan->add_option("--samples", ssamples, "number of samples");
    scan->add_option("--out", sout, "write the profile CSV here");
    scan->add_option("--json", sjson, "write the summary as JSON");

    // tabulate-g ----------------------------------------------------------
    auto *tab = app.add_subcommand("tabulate-g", "tabulate the change of variable u = g(v)");
    SpecOpts stab;
    std::string tout, tjson;
    add_spec_options(tab, stab, 3);
    tab->add_option("--out", tout, "write the table CSV here")->required();
    tab->add_option("--json", tjson, "write the summary as JSON");

    // solve-radial ---------------------------------------------------------
    auto *rad = app.add_subcommand("solve-radial", "shooting solve on a ball or annulus");
    SpecOpts srad;
    RunOpts rrad;
    double ball_R = 0.0, ann_in = 0.0, ann_out = 0.0;
    int rnodes = 0, rgrid = 4001;
    double rode_tol = 1e-11, rbc_tol = 1e-9, rplo = 1e-3, rphi = 0.0;
    bool rnopolish = false;
    std::string rout, rjson;
    add_spec_options(rad, srad, 3);
    add_run_options(rad, rrad);
    rad->add_option("--ball", ball_R, "ball radius");
    rad->add_option("--inner", ann_in, "annulus inner radius");
    rad->add_option("--outer", ann_out, "annulus outer radius");
    rad->add_option("--nodes", rnodes, "targeted interior zero count");
    rad->add_option("--grid", rgrid, "output grid points");
    rad->add_option("--shoot-tol", rode_tol, "integrator tolerance for the shooting trajectories");
    rad->add_option("--bc-tol", rbc_tol, "boundary tolerance for pinned parameters");
    rad->add_option("--param-lo", rplo, "initial lower shooting parameter");
    rad->add_option("--param-hi", rphi, "upper shooting parameter (0 = derive; equal to lo = pin)");
    rad->add_flag("--no-polish", rnopolish, "skip the collocation polish");
    rad->add_option("--out", rout, "write the solution CSV here");
    rad->add_option("--json", rjson, "write the summary as JSON");

    // morse ----------------------------------------------------------------
    auto *morse = app.add_subcommand("morse", "decomposed spectrum of the linearization at a radial solution");
    SpecOpts smorse;
    RunOpts rmorse;
    std::string msol, mjson;
    int mlmax = -1, mgrid = 0;
    add_spec_options(morse, smorse, 3);
    add_run_options(morse, rmorse);
    morse->add_option("--solution", msol, "solution CSV from solve-radial")->required();
    morse->add_option("--l-max", mlmax, "largest mode (-1 = scan until empty)");
    morse->add_option("--grid", mgrid, "eigenvalue grid (0 = solution grid)");
    morse->add_option("--json", mjson, "write the report as JSON");

    // nodal-check -----------------------------------------------------------
    auto *nodal = app.add_subcommand("nodal-check", "nodal-zone bound against the Morse index");
    SpecOpts snodal;
    RunOpts rnodal;
    std::string nsol, njson;
    int nlmax = -1, ngrid = 0;
    add_spec_options(nodal, snodal, 3);
    add_run_options(nodal, rnodal);
    nodal->add_option("--solution", nsol, "solution CSV from solve-radial")->required();
    nodal->add_option("--l-max", nlmax, "largest mode (-1 = scan until empty)");
    nodal->add_option("--grid", ngrid, "eigenvalue grid (0 = solution grid)");
    nodal->add_option("--json", njson, "write the report as JSON");

    // solve-planar -----------------------------------------------------------
    auto *plan = app.add_subcommand("solve-planar", "Newton solve on a mirror-symmetric rectangle");
    SpecOpts splan;
    double pL = 1.0, pH = 1.0, ptol = 1e-9;
    int pn1 = 64, pn2 = 32, pmax_newton = 60;
    std::string pout, pjson;
    add_spec_options(plan, splan, 2);
    plan->add_option("--half-width", pL, "half-width of the rectangle in x1");
    plan->add_option("--height", pH, "height of the rectangle in x2");
    plan->add_option("--n1", pn1, "cells across (even)");
    plan->add_option("--n2", pn2, "cells up");
    plan->add_option("--newton-tol", ptol, "nonlinear residual target");
    plan->add_option("--max-newton", pmax_newton, "newton iteration budget");
    plan->add_option("--out", pout, "write the field CSV here");
    plan->add_option("--json", pjson, "write the summary as JSON");

    // diagnose ------------------------------------------------------------
    auto *diag = app.add_subcommand("diagnose", "reflection and symmetry diagnostics of a planar field");
    SpecOpts sdiag;
    RunOpts rdiag;
    std::string dfield, djson, dcurves;
    int dtsamples = 21;
    double dclaim = 1e-6;
    add_spec_options(diag, sdiag, 2);
    add_run_options(diag, rdiag);
    diag->add_option("--field", dfield, "field CSV from solve-planar")->required();
    diag->add_option("--t-samples", dtsamples, "curve sample count");
    diag->add_option("--claim-tol", dclaim, "residual threshold for treating the field as a solution");
    diag->add_option("--curves", dcurves, "write the energy curves CSV here");
    diag->add_option("--json", djson, "write the report as JSON");

    // growth-check -----------------------------------------------------------
    auto *growth = app.add_subcommand("growth-check", "growth and exponent gates for (k, p, dim)");
    SpecOpts sgrow;
    std::string gjson;
    add_spec_options(growth, sgrow, 3);
    growth->add_option("--json", gjson, "write the report as JSON");

    // config preprocessing: strip --config, splice its options before the
    // user's flags so explicit flags win under the take-last policy.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw quasisym::usage_error("--config needs a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (!config_path.empty()) {
        if (args.empty() || args[0].empty() || args[0][0] == '-')
            throw quasisym::usage_error("the subcommand must come from the command line, not the config");
        const std::vector<std::string> extra = load_config(config_path);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
    std::vector<const char *> cargv;
    cargv.push_back(argv[0]);
    for (const auto &a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    std::ostringstream out;

    if (certify->parsed()) {
        quasisym::CertifyMode mode;
        if (cmode == "sufficient")
            mode = quasisym::CertifyMode::Sufficient;
        else if (cmode == "sharp")
            mode = quasisym::CertifyMode::Sharp;
        else
            throw quasisym::usage_error("unknown --mode '" + cmode + "'");
        const auto ch = quasisym::certify_h_convex(cp, ck);
        const auto chp = quasisym::certify_hprime_convex(cp, ck, mode);
        json j;
        j["command"] = "certify";
        j["k"] = ck;
        j["p"] = cp;
        j["mode"] = cmode;
        j["h"] = certificate_json(ch, false);
        j["h_prime"] = certificate_json(chp, true);
        emit_json(cjson, j);
        const auto why = [](const std::string &reason) {
            return reason.empty() ? std::string("all inequalities strict") : reason;
        };
        out << "certify k=" << fmt12(ck) << " p=" << fmt12(cp) << " mode=" << cmode << "\n";
        out << "h      : " << (ch.h_convex ? "convex" : "not certified") << " (" << why(ch.h_reason)
            << ")\n";
        out << "h'     : " << (chp.hprime_convex ? "convex" : "not certified") << " ("
            << why(chp.hprime_reason) << ")\n";
        if (chp.hprime_convex) out << "margin : " << fmt12(chp.margin) << "\n";
        if (chp.s_sharp > 0.0) out << "checked stationary point s = " << fmt12(chp.s_sharp) << "\n";
        std::cout << out.str();
        return 0;
    }

    if (findpk->parsed()) {
        quasisym::CertifyMode mode;
        if (fmode == "sufficient")
            mode = quasisym::CertifyMode::Sufficient;
        else if (fmode == "sharp")
            mode = quasisym::CertifyMode::Sharp;
        else
            throw quasisym::usage_error("unknown --mode '" + fmode + "'");
        const double pk = quasisym::find_pk(fk, mode, ftol);
        json j;
        j["command"] = "find-pk";
        j["k"] = fk;
        j["mode"] = fmode;
        j["tol"] = ftol;
        j["p_threshold"] = pk;
        j["ceiling"] = 4.0 * fk + 8.0;
        emit_json(fjson, j);
        out << "p_k(" << fmt12(fk) << ") = " << fmt12(pk) << " (mode " << fmode << ", tol "
            << fmt12(ftol) << ")\n";
        std::cout << out.str();
        return 0;
    }

    if (scan->parsed()) {
        if (!(slo > 0.0)) throw quasisym::usage_error("--s-lo must be positive");
        const auto bundle = to_bundle(sscan);
        const auto table = quasisym::scan_profile(bundle, sorder, slo, shi, ssamples, exec_of(rscan));
        if (!sout.empty()) quasisym::io::write_profile_csv(sout, table);
        json j;
        j["command"] = "scan";
        j["k"] = sscan.k;
        j["p"] = sscan.p;
        j["order"] = sorder;
        j["s_lo"] = slo;
        j["s_hi"] = shi;
        j["samples"] = ssamples;
        j["min_value"] = table.min_value;
        j["arg_min"] = table.arg_min;
        j["negative_somewhere"] = table.min_value < 0.0;
        emit_json(sjson, j);
        out << "scan order " << sorder << " on [" << fmt12(slo) << ", " << fmt12(shi) << "], "
            << ssamples << " samples\n";
        out << "min value = " << fmt12(table.min_value) << " at s = " << fmt12(table.arg_min) << "\n";
        out << (table.min_value < 0.0 ? "the profile takes negative values on this range\n"
                                      : "the profile stays positive on this range\n");
        if (!sout.empty()) out << "profile written to " << sout << "\n";
        std::cout << out.str();
        return 0;
    }

    if (tab->parsed()) {
        const auto spec = to_spec(stab);
        const auto g = quasisym::solve_g(spec, stab.s_max, stab.ode_tol);
        quasisym::io::write_g_table_csv(tout, g);
        json j;
        j["command"] = "tabulate-g";
        j["k"] = stab.k;
        j["constant_a"] = stab.constant_a;
        j["s_max"] = g.s_max();
        j["u_max"] = g.u_max();
        j["exact"] = g.exact();
        j["nodes"] = g.nodes().size();
        emit_json(tjson, j);
        out << "g tabulated on [" << fmt12(-g.s_max()) << ", " << fmt12(g.s_max()) << "] with "
            << g.nodes().size() << " nodes" << (g.exact() ? " (exact linear form)" : "") << "\n";
        out << "g(s_max) = " << fmt12(g.u_max()) << "\n";
        out << "table written to " << tout << "\n";
        std::cout << out.str();
        return 0;
    }

    if (rad->parsed()) {
        quasisym::RadialProblemSpec problem;
        const bool have_ball = rad->count("--ball") > 0;
        const bool have_ann = rad->count("--inner") > 0 || rad->count("--outer") > 0;
        if (have_ball == have_ann)
            throw quasisym::usage_error("give either --ball R or both --inner and --outer");
        problem.domain = have_ball ? quasisym::RadialDomain::ball(ball_R)
                                   : quasisym::RadialDomain::annulus(ann_in, ann_out);
        problem.spec = to_spec(srad);
        problem.target_nodes = rnodes;
        quasisym::RadialControls controls;
        controls.ode_tol = rode_tol;
        controls.bc_tol = rbc_tol;
        controls.grid_points = rgrid;
        controls.polish = !rnopolish;
        controls.param_lo = rplo;
        controls.param_hi = rphi;
        const auto bundle = quasisym::make_bundle(problem.spec, srad.s_max, srad.ode_tol);
        const auto sol = quasisym::solve_radial(problem, bundle, controls);
        const auto res = quasisym::residuals(sol, bundle, exec_of(rrad));
        if (!rout.empty()) quasisym::io::write_solution_csv(rout, sol);
        json j;
        j["command"] = "solve-radial";
        j["domain"] = sol.domain.is_ball ? "ball" : "annulus";
        j["inner"] = sol.domain.inner;
        j["outer"] = sol.domain.outer;
        j["dim"] = sol.dim;
        j["target_nodes"] = sol.target_nodes;
        j["node_count"] = sol.node_count;
        j["shoot_param"] = sol.shoot_param;
        j["bisections"] = sol.bisections;
        j["polished"] = sol.polished;
        j["newton_iters"] = sol.newton_iters;
        j["grid"] = sol.r.size();
        j["residual_transformed"] = res.semilinear;
        j["residual_divergence"] = res.quasilinear;
        j["residual_transformed_abs"] = res.semilinear_abs;
        j["residual_divergence_abs"] = res.quasilinear_abs;
        j["forcing_scale_transformed"] = res.semilinear_scale;
        j["forcing_scale_divergence"] = res.quasilinear_scale;
        j["boundary_value"] = sol.v.back();
        j["max_v"] = *std::max_element(sol.v.begin(), sol.v.end());
        emit_json(rjson, j);
        out << "solve-radial " << (sol.domain.is_ball ? "ball" : "annulus") << " outer="
            << fmt12(sol.domain.outer) << " dim=" << sol.dim << " nodes=" << sol.target_nodes
            << "\n";
        out << "shooting parameter = " << fmt12(sol.shoot_param) << " (" << sol.bisections
            << " bisections), interior zeros = " << sol.node_count << "\n";
        out << "grid " << sol.r.size() << (sol.polished ? ", polished" : ", shooting profile")
            << ", newton iters " << sol.newton_iters << "\n";
        out << "residual (transformed form) = " << fmt12(res.semilinear) << " (abs "
            << fmt12(res.semilinear_abs) << ", scale " << fmt12(res.semilinear_scale) << ")\n";
        out << "residual (divergence form)  = " << fmt12(res.quasilinear) << " (abs "
            << fmt12(res.quasilinear_abs) << ", scale " << fmt12(res.quasilinear_scale) << ")\n";
        if (!rout.empty()) out << "solution written to " << rout << "\n";
        std::cout << out.str();
        return 0;
    }

    if (morse->parsed() || nodal->parsed()) {
        const bool is_nodal = nodal->parsed();
        const SpecOpts &so = is_nodal ? snodal : smorse;
        const auto sol = quasisym::io::read_solution_csv(is_nodal ? nsol : msol);
        const auto bundle = to_bundle(so);
        const int lmax = is_nodal ? nlmax : mlmax;
        const int grid = is_nodal ? ngrid : mgrid;
        const auto rep = quasisym::morse_index(sol, bundle, lmax, grid,
                                               exec_of(is_nodal ? rnodal : rmorse));
        json j;
        j["command"] = is_nodal ? "nodal-check" : "morse";
        j["solution"] = is_nodal ? nsol : msol;
        j["dim"] = sol.dim;
        j["index"] = rep.index;
        j["l_max_used"] = rep.l_max_used;
        j["truncated"] = rep.truncated;
        j["any_borderline"] = rep.any_borderline;
        j["grid"] = rep.grid;
        j["eig_margin"] = rep.eig_margin;
        json modes = json::array();
        for (const auto &m : rep.modes)
            modes.push_back({{"l", m.l},
                             {"multiplicity", m.multiplicity},
                             {"negatives", m.negatives},
                             {"lambda_min", m.lambda_min},
                             {"borderline", m.borderline}});
        j["modes"] = modes;
        out << (is_nodal ? "nodal-check" : "morse") << " on " << (is_nodal ? nsol : msol) << "\n";
        out << "  l  mult  neg  lambda_min\n";
        for (const auto &m : rep.modes)
            out << "  " << m.l << "  " << m.multiplicity << "  " << m.negatives << "  "
                << fmt12(m.lambda_min) << (m.borderline ? "  (borderline)" : "") << "\n";
        out << "morse index = " << rep.index << (rep.truncated ? " (mode scan truncated)" : "")
            << "\n";
        if (is_nodal) {
            const auto nb = quasisym::nodal_report(sol, rep, sol.dim);
            j["nodal_zones"] = nb.nod;
            j["bound"] = nb.bound;
            j["satisfied"] = nb.satisfied;
            out << "nodal zones = " << nb.nod << ", bound 1 + m/(N+1) = " << fmt12(nb.bound)
                << ", satisfied: " << yesno(nb.satisfied) << "\n";
        }
        emit_json(is_nodal ? njson : mjson, j);
        std::cout << out.str();
        return 0;
    }

    if (plan->parsed()) {
        quasisym::PlanarProblemSpec problem;
        problem.L = pL;
        problem.H = pH;
        problem.n1 = pn1;
        problem.n2 = pn2;
        problem.spec = to_spec(splan);
        quasisym::PlanarControls controls;
        controls.tol = ptol;
        controls.max_newton = pmax_newton;
        const auto bundle = quasisym::make_bundle(problem.spec, splan.s_max, splan.ode_tol);
        const auto field = quasisym::solve_planar(problem, bundle, controls);
        if (!pout.empty()) quasisym::io::write_field_csv(pout, field);
        json j;
        j["command"] = "solve-planar";
        j["L"] = field.L;
        j["H"] = field.H;
        j["n1"] = field.n1;
        j["n2"] = field.n2;
        j["residual"] = field.residual;
        j["newton_iters"] = field.newton_iters;
        j["converged"] = field.converged;
        j["trivial"] = field.trivial;
        j["max_v"] = field.max_abs_v();
        j["max_u"] = field.max_abs_u();
        if (!field.warning.empty()) j["warning"] = field.warning;
        emit_json(pjson, j);
        out << "solve-planar " << pn1 << "x" << pn2 << " on [" << fmt12(-pL) << ", " << fmt12(pL)
            << "] x [0, " << fmt12(pH) << "]\n";
        out << "residual = " << fmt12(field.residual) << " after " << field.newton_iters
            << " newton iterations\n";
        out << "max v = " << fmt12(field.max_abs_v()) << ", max u = " << fmt12(field.max_abs_u())
            << (field.trivial ? " (trivial solution)" : "") << "\n";
        if (!field.warning.empty()) out << "warning: " << field.warning << "\n";
        if (!pout.empty()) out << "field written to " << pout << "\n";
        std::cout << out.str();
        return 0;
    }

    if (diag->parsed()) {
        const auto field = quasisym::io::read_field_csv(dfield);
        const auto bundle = to_bundle(sdiag);
        const auto rep = quasisym::reflection_diagnostics(field, bundle, dtsamples, dclaim);
        const auto sym = quasisym::symmetry_metrics(field, exec_of(rdiag));
        if (!dcurves.empty()) {
            std::ostringstream csv;
            csv << "# halves: plus = right of the interface, minus = left\n";
            csv << "t,psi_plus_minus,psi_plus_plus,psi_minus_minus,psi_minus_plus,"
                   "deriv_formula_plus,deriv_fd_plus,deriv_formula_minus,deriv_fd_minus\n";
            for (std::size_t m = 0; m < rep.t_grid.size(); ++m)
                csv << fmt12(rep.t_grid[m]) << ',' << fmt12(rep.psi_plus_minus[m]) << ','
                    << fmt12(rep.psi_plus_plus[m]) << ',' << fmt12(rep.psi_minus_minus[m]) << ','
                    << fmt12(rep.psi_minus_plus[m]) << ',' << fmt12(rep.deriv_formula_plus[m])
                    << ',' << fmt12(rep.deriv_fd_plus[m]) << ','
                    << fmt12(rep.deriv_formula_minus[m]) << ',' << fmt12(rep.deriv_fd_minus[m])
                    << "\n";
            quasisym::io::write_text_atomic(dcurves, csv.str());
        }
        json j;
        j["command"] = "diagnose";
        j["field"] = dfield;
        j["field_residual"] = rep.field_residual;
        j["solves_pde"] = rep.solves_pde;
        j["claims_enabled"] = rep.claims_enabled;
        j["deriv_max_discrepancy"] = rep.deriv_max_discrepancy;
        j["deriv_max_value"] = rep.deriv_max_value;
        j["curve_order_max_violation"] = rep.curve_order_max_violation;
        j["grid13_max"] = rep.grid13_max;
        j["decomposition_max_error"] = rep.decomposition_max_error;
        j["antisym_identity_error"] = rep.antisym_identity_error;
        j["c1_fraction"] = rep.c1_fraction;
        j["c2_fraction"] = rep.c2_fraction;
        j["growth_constant"] = finite_or_null(rep.growth_constant);
        j["lipschitz_constant"] = finite_or_null(rep.lipschitz_constant);
        j["dx1_axis"] = {{"min", rep.dx1_axis_min},
                         {"max", rep.dx1_axis_max},
                         {"frac_nonneg", rep.dx1_axis_frac_nonneg}};
        j["symmetry"] = {{"even_deviation", sym.even_deviation},
                         {"foliated_deviation", sym.foliated_deviation},
                         {"best_xi_angle", sym.best_xi_angle},
                         {"critical_count", sym.critical_count},
                         {"eps_grad", sym.eps_grad}};
        emit_json(djson, j);
        out << "diagnose " << dfield << "\n";
        out << "residual = " << fmt12(rep.field_residual) << ", treated as a solution: "
            << yesno(rep.solves_pde) << "\n";
        out << "energy derivative: formula vs difference quotient max gap = "
            << fmt12(rep.deriv_max_discrepancy) << "\n";
        out << "max positive derivative value = " << fmt12(rep.deriv_max_value)
            << " (nonpositive is the symmetric signature)\n";
        out << "curve ordering max violation = " << fmt12(rep.curve_order_max_violation) << "\n";
        out << "split energy grid max = " << fmt12(rep.grid13_max) << ", decomposition error = "
            << fmt12(rep.decomposition_max_error) << "\n";
        out << "convexity sampling: c1 fraction = " << fmt12(rep.c1_fraction)
            << ", c2 fraction = " << fmt12(rep.c2_fraction) << "\n";
        out << "even deviation = " << fmt12(sym.even_deviation) << ", foliated deviation = "
            << fmt12(sym.foliated_deviation) << "\n";
        out << "near-critical mesh points = " << sym.critical_count << " (eps = "
            << fmt12(sym.eps_grad) << ")\n";
        if (!dcurves.empty()) out << "curves written to " << dcurves << "\n";
        std::cout << out.str();
        return 0;
    }

    if (growth->parsed()) {
        const auto spec = to_spec(sgrow);
        const auto rep = quasisym::validate_growth(spec);
        json j;
        j["command"] = "growth-check";
        j["k"] = sgrow.k;
        j["p"] = sgrow.p;
        j["dim"] = sgrow.dim;
        j["constant_a"] = sgrow.constant_a;
        j["critical_exponent"] = finite_or_null(rep.critical_exponent);
        j["critical_exponent_finite"] = std::isfinite(rep.critical_exponent);
        j["subcritical"] = rep.subcritical;
        j["superlinear"] = rep.superlinear;
        j["half_k"] = rep.half_k;
        j["k_at_least_two"] = rep.k_at_least_two;
        emit_json(gjson, j);
        out << "growth-check k=" << fmt12(sgrow.k) << " p=" << fmt12(sgrow.p) << " dim="
            << sgrow.dim << "\n";
        if (std::isfinite(rep.critical_exponent))
            out << "critical exponent = " << fmt12(rep.critical_exponent) << "\n";
        else
            out << "critical exponent = infinite (dimension <= 2)\n";
        out << "subcritical: " << yesno(rep.subcritical) << ", superlinear (p > k+1): "
            << yesno(rep.superlinear) << ", p > k/2: " << yesno(rep.half_k)
            << ", k >= 2: " << yesno(rep.k_at_least_two) << "\n";
        std::cout << out.str();
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const quasisym::usage_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const quasisym::eval_domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const quasisym::tabulation_range_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const quasisym::convergence_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const quasisym::io_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
