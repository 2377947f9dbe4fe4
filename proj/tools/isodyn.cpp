// isodyn -- command-line front end: model validation, isochrony reports,
// period scans, stability classification, monodromy ladders, simulations,
// bracket sweeps, superintegrable-family audits, and model design.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isodyn/dynamics.hpp"
#include "isodyn/force_model.hpp"
#include "isodyn/hill.hpp"
#include "isodyn/io.hpp"
#include "isodyn/isochrony.hpp"
#include "isodyn/period.hpp"
#include "isodyn/superint.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isodyn;

namespace {

struct CommonOpts {
    std::string model_arg;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::string tol_arg;

    double quad_abs = 1e-10;
    double ode_tol = 1e-11;
    double ref_tol = 1e-12;
};

void parse_tolerances(CommonOpts& opts) {
    if (opts.tol_arg.empty()) return;
    std::stringstream ss(opts.tol_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError("--tol expects name=value pairs, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (name == "quad_abs")
            opts.quad_abs = value;
        else if (name == "ode_tol")
            opts.ode_tol = value;
        else if (name == "ref_tol")
            opts.ref_tol = value;
        else
            throw ValidationError("unknown tolerance '" + name +
                                  "' (expected quad_abs, ode_tol, ref_tol)");
    }
}

io::ModelSpec load_spec(const CommonOpts& opts) {
    if (opts.model_arg.empty())
        throw ValidationError("--model <path or inline JSON> is required");
    const auto first = opts.model_arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && opts.model_arg[first] == '{')
        return io::model_spec_from_json(opts.model_arg);
    return io::model_spec_from_file(opts.model_arg);
}

json config_json(const CommonOpts& opts, const std::string& command,
                 const json& command_params, const io::ModelSpec* spec) {
    json cfg;
    cfg["command"] = command;
    cfg["seed"] = opts.seed;
    cfg["tolerances"] = {{"quad_abs", opts.quad_abs},
                         {"ode_tol", opts.ode_tol},
                         {"ref_tol", opts.ref_tol}};
    cfg["params"] = command_params;
    if (spec) cfg["model"] = json::parse(io::model_spec_to_json(*spec));
    return cfg;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_json(const CommonOpts& opts, const std::string& filename, json payload,
                const json& cfg) {
    payload["config"] = cfg;
    payload["generated_at"] = timestamp();
    fs::create_directories(opts.out_dir);
    const fs::path path = fs::path(opts.out_dir) / filename;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path.string());
    out << payload.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
}

io::CsvWriter open_csv(const CommonOpts& opts, const std::string& filename,
                       const json& cfg) {
    fs::create_directories(opts.out_dir);
    const fs::path path = fs::path(opts.out_dir) / filename;
    io::CsvWriter csv(path.string());
    csv.comment("config: " + cfg.dump());
    std::cout << "wrote " << path.string() << "\n";
    return csv;
}

std::vector<double> parse_csv_doubles(const std::string& arg) {
    std::vector<double> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// ---------------------------------------------------------------------------

int cmd_catalog(const CommonOpts& opts, bool emit_json) {
    json list = json::array();
    for (const ForceModel& m : builtin_catalog()) {
        std::cout << m.name() << "  J=(" << io::format_double(m.domain().lo) << ", "
                  << io::format_double(m.domain().hi)
                  << ")  e_max=" << io::format_double(m.center().e_max) << "\n";
        list.push_back({{"name", m.name()},
                        {"domain", {m.domain().lo, m.domain().hi}},
                        {"e_max", m.center().e_max},
                        {"x_max_pos", m.center().x_max_pos},
                        {"x_max_neg", m.center().x_max_neg}});
    }
    if (emit_json) {
        const json cfg = config_json(opts, "catalog", json::object(), nullptr);
        write_json(opts, "catalog.json", json{{"models", list}}, cfg);
    }
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);
    json payload{{"name", m.name()},
                 {"domain", {m.domain().lo, m.domain().hi}},
                 {"derivative_mode",
                  m.derivative_mode() == DerivativeMode::Analytic ? "analytic"
                                                                  : "finite-difference"},
                 {"g0", m.g(0.0)},
                 {"dg0", m.dg(0.0)},
                 {"e_max", m.center().e_max},
                 {"x_max_pos", m.center().x_max_pos},
                 {"x_max_neg", m.center().x_max_neg},
                 {"valid", true}};
    write_json(opts, "validate.json", payload,
               config_json(opts, "validate", json::object(), &spec));
    std::cout << m.name() << ": valid\n";
    return 0;
}

int cmd_isochrony(const CommonOpts& opts, int grid_n) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);
    const IsochronyReport rep = isochrony_report(m, grid_n);
    json payload{{"model", m.name()},
                 {"residual_sup", rep.residual_sup},
                 {"residual_tol", rep.residual_tol},
                 {"verdict", to_string(rep.verdict)}};
    if (rep.nc4_residual) {
        payload["nc4_residual"] = *rep.nc4_residual;
        payload["nc4_tol"] = rep.nc4_tol;
    }
    if (rep.nc6_residual) {
        payload["nc6_residual"] = *rep.nc6_residual;
        payload["nc6_tol"] = rep.nc6_tol;
    }
    write_json(opts, "isochrony.json", payload,
               config_json(opts, "isochrony", {{"grid_n", grid_n}}, &spec));
    std::cout << m.name() << ": " << to_string(rep.verdict) << "\n";
    return 0;
}

int cmd_period_scan(const CommonOpts& opts, double x_lo, double x_hi, int n) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);
    if (x_hi <= 0.0) x_hi = 0.8 * m.center().x_max_pos;
    if (x_lo <= 0.0) x_lo = x_hi / 64.0;

    const PeriodScan scan = period_scan(m, x_lo, x_hi, n, opts.quad_abs);
    const json cfg = config_json(opts, "period-scan",
                                 {{"x_lo", x_lo}, {"x_hi", x_hi}, {"n", n}}, &spec);

    io::CsvWriter csv = open_csv(opts, "period_scan.csv", cfg);
    const std::vector<std::string> cols{"x0", "y0", "T", "T_prime", "err_estimate"};
    csv.header(cols);
    double t_min = 1e300, t_max = -1e300;
    for (const PeriodSample& s : scan.samples) {
        csv.row(std::vector<double>{s.x0, s.y0, s.T, s.T_prime.value_or(0.0),
                                    s.quadrature_error_estimate});
        t_min = std::min(t_min, s.T);
        t_max = std::max(t_max, s.T);
    }

    json payload{{"model", scan.model_ref},
                 {"n", n},
                 {"T_min", t_min},
                 {"T_max", t_max},
                 {"spread_rel", (t_max - t_min) / t_min},
                 {"critical_amplitudes", scan.critical_amplitudes}};
    write_json(opts, "period_scan.json", payload, cfg);
    std::cout << scan.model_ref << ": T in [" << io::format_double(t_min) << ", "
              << io::format_double(t_max) << "], " << scan.critical_amplitudes.size()
              << " critical amplitude(s)\n";
    return 0;
}

int cmd_classify(const CommonOpts& opts, int n, double x_hi) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);
    const StabilityVerdict v = classify_equilibrium(m, n, x_hi, opts.ode_tol);
    json payload{{"model", m.name()},
                 {"classification", to_string(v.classification)},
                 {"witnesses", v.witness_amplitudes},
                 {"eigen_imag", v.eigen_imag},
                 {"multiplicity", v.multiplicity},
                 {"conflict", v.conflict}};
    write_json(opts, "classify.json", payload,
               config_json(opts, "classify", {{"n", n}, {"x_hi", x_hi}}, &spec));
    std::cout << m.name() << ": " << to_string(v.classification) << " ("
              << v.witness_amplitudes.size() << " witness amplitudes)\n";
    return 0;
}

int cmd_monodromy(const CommonOpts& opts, double x0, double x_hi, int n) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);

    std::vector<MonodromyResult> rows;
    if (x0 > 0.0) {
        rows.push_back(monodromy(m, x0, opts.ode_tol));
    } else {
        if (x_hi <= 0.0) x_hi = 0.5 * m.center().x_max_pos;
        for (int k = 0; k < n; ++k)
            rows.push_back(monodromy(m, x_hi * std::pow(2.0, -k), opts.ode_tol));
    }
    const json cfg = config_json(opts, "monodromy",
                                 {{"x0", x0}, {"x_hi", x_hi}, {"n", n}}, &spec);
    io::CsvWriter csv = open_csv(opts, "monodromy.csv", cfg);
    const std::vector<std::string> cols{"x0", "tau", "phidot_tau", "verdict"};
    csv.header(cols);
    for (const MonodromyResult& r : rows)
        csv.row_with_tag(std::vector<double>{r.x0, r.tau, r.phidot_tau},
                         to_string(r.verdict));
    std::cout << m.name() << ": " << rows.size() << " monodromy row(s)\n";
    return 0;
}

int cmd_simulate(const CommonOpts& opts, double x0, std::vector<double> init,
                 double periods, double dt, std::size_t stride, bool annotate,
                 const std::string& integrator) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);

    PhasePoint4 pt;
    if (init.size() == 4) {
        pt = {init[0], init[1], init[2], init[3]};
    } else if (x0 > 0.0) {
        pt = {x0, 1.0, 0.0, 0.0};
    } else {
        throw ValidationError("simulate: give --x0 or --state q1,q2,p1,p2");
    }

    const double K0 = evaluate_integrals(m, pt).second;
    const double tau = K0 > 0 ? period(m, u_inverse(m, std::sqrt(2.0 * K0)), opts.quad_abs).T
                              : 2 * std::numbers::pi / std::sqrt(m.ddV0());
    const double t_end = periods * tau;
    if (dt <= 0.0) dt = tau / 1000.0;

    TrajectoryRecord rec;
    if (integrator == "strang")
        rec = integrate_H(m, pt, t_end, dt, stride);
    else if (integrator == "reference")
        rec = integrate_reference(m, pt, t_end, opts.ref_tol, stride);
    else
        throw ValidationError("simulate: integrator must be strang or reference");

    const json cfg = config_json(
        opts, "simulate",
        {{"state", {pt.q1, pt.q2, pt.p1, pt.p2}},
         {"periods", periods},
         {"dt", dt},
         {"stride", stride},
         {"integrator", integrator}},
        &spec);
    io::CsvWriter csv = open_csv(opts, "trajectory.csv", cfg);
    if (annotate && pt.q2 == 1.0 && pt.p1 == 0.0 && pt.p2 == 0.0) {
        const double hx = involution(m, pt.q1).h_x;
        csv.comment("annotation: initial point (x0, 1) = (" + io::format_double(pt.q1) +
                    ", 1)");
        csv.comment("annotation: conjugate point (h(x0), g(x0)/g(h(x0))) = (" +
                    io::format_double(hx) + ", " +
                    io::format_double(m.g(pt.q1) / m.g(hx)) + ")");
    }
    const std::vector<std::string> cols{"t", "q1", "q2", "p1", "p2", "H", "K"};
    csv.header(cols);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const PhasePoint4& s = rec.states[i];
        const auto [H, K] = evaluate_integrals(m, s);
        csv.row(std::vector<double>{rec.times[i], s.q1, s.q2, s.p1, s.p2, H, K});
    }
    std::cout << m.name() << ": " << rec.times.size()
              << " samples, H_drift=" << io::format_double(rec.H_drift)
              << " K_drift=" << io::format_double(rec.K_drift) << "\n";
    return 0;
}

int cmd_bracket(const CommonOpts& opts, int n) {
    const io::ModelSpec spec = load_spec(opts);
    const ForceModel m = io::build_model(spec);
    const auto pts = sample_points_in_N(m, n, opts.seed);

    const json cfg = config_json(opts, "bracket", {{"n", n}}, &spec);
    io::CsvWriter csv = open_csv(opts, "bracket.csv", cfg);
    const std::vector<std::string> cols{"q1", "q2", "p1", "p2", "bracket_HK"};
    csv.header(cols);
    const Observable H = observable_H(m), K = observable_K(m);
    double max_abs = 0.0;
    for (const PhasePoint4& pt : pts) {
        const double b = poisson_bracket(H, K, pt);
        max_abs = std::max(max_abs, std::abs(b));
        csv.row(std::vector<double>{pt.q1, pt.q2, pt.p1, pt.p2, b});
    }
    write_json(opts, "bracket.json",
               json{{"model", m.name()},
                    {"n", n},
                    {"max_abs_bracket", max_abs},
                    {"seed", opts.seed}},
               cfg);
    std::cout << m.name() << ": max |{H,K}| = " << io::format_double(max_abs) << "\n";
    return 0;
}

int cmd_superint(const CommonOpts& opts, const std::string& family_name, double omega,
                 double lambda, double b1, double c1, int periods) {
    SuperFamily family;
    SuperParams params;
    params.omega = omega;
    if (family_name == "sqrt") {
        family = SuperFamily::Sqrt;
        params.lambda = lambda;
    } else if (family_name == "quartic") {
        family = SuperFamily::Quartic;
        params.lambda = lambda;
    } else if (family_name == "generic") {
        family = SuperFamily::Generic;
        params.b1 = b1;
        params.c1 = c1;
    } else {
        throw ValidationError("superint: family must be sqrt, quartic or generic");
    }

    const FamilyForce ff = family_force(family, params);
    const ForceModel& m = ff.model;

    json payload{{"family", family_name},
                 {"omega", omega},
                 {"model", m.name()},
                 {"trivial_harmonic", ff.trivial_harmonic}};

    const json cfg = config_json(opts, "superint",
                                 {{"family", family_name},
                                  {"omega", omega},
                                  {"lambda", lambda},
                                  {"b1", b1},
                                  {"c1", c1},
                                  {"periods", periods}},
                                 nullptr);
    if (ff.trivial_harmonic) {
        write_json(opts, "superint.json", payload, cfg);
        std::cout << "generic family with b1=0 is the trivial harmonic force\n";
        return 0;
    }

    const ThirdIntegral w = family == SuperFamily::Sqrt
                                ? make_sqrt_integral_normalized(omega, params.lambda)
                            : family == SuperFamily::Quartic
                                ? make_quartic_integral(omega, params.lambda)
                                : make_generic_integral(omega, params.b1, params.c1);
    payload["integral"] = w.label;

    const auto hess = hessian_at_origin(w);
    payload["hessian_diag"] = {hess[0][0], hess[1][1], hess[2][2], hess[3][3]};
    const auto grad = gradient_at_origin(w);
    payload["gradient_origin"] = {grad[0], grad[1], grad[2], grad[3]};

    const PhasePoint4 pt{0.25 * m.center().x_max_pos, 0.5, 0.2, 0.0};
    const AuditResult audit = conservation_audit(m, w, pt, periods, true);
    payload["audit_point"] = {pt.q1, pt.q2, pt.p1, pt.p2};
    payload["audit_periods"] = periods;
    payload["W0"] = audit.w0;
    payload["max_drift"] = audit.max_drift;

    io::CsvWriter csv = open_csv(opts, "audit.csv", cfg);
    const std::vector<std::string> cols{"t", "W", "drift"};
    csv.header(cols);
    for (const auto& row : audit.trace) csv.row(row);

    write_json(opts, "superint.json", payload, cfg);
    std::cout << w.label << ": max drift " << io::format_double(audit.max_drift)
              << " over " << periods << " periods\n";
    return 0;
}

int cmd_design(const CommonOpts& opts, const std::string& spec_arg,
               const std::string& kind, const std::string& coeffs_arg, double omega,
               double y_range, const std::string& h_src, const std::string& f_src,
               const std::string& domain_arg, const std::string& t_range_arg) {
    io::DesignRequest req;
    if (!spec_arg.empty()) {
        const auto first = spec_arg.find_first_not_of(" \t\n");
        std::string text = spec_arg;
        if (first == std::string::npos || spec_arg[first] != '{') {
            std::ifstream in(spec_arg);
            if (!in) throw ValidationError("cannot open design spec: " + spec_arg);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        req = io::design_request_from_json(text);
    } else {
        req.kind = kind;
        req.omega = omega;
        req.y_range = y_range;
        if (!coeffs_arg.empty()) req.coeffs = parse_csv_doubles(coeffs_arg);
        req.h_source = h_src;
        req.f_source = f_src;
        if (!domain_arg.empty()) {
            const auto v = parse_csv_doubles(domain_arg);
            if (v.size() != 2) throw ValidationError("--domain expects lo,hi");
            req.domain = Interval{v[0], v[1]};
        }
        if (!t_range_arg.empty()) {
            const auto v = parse_csv_doubles(t_range_arg);
            if (v.size() != 2) throw ValidationError("--t-range expects lo,hi");
            req.t_range = Interval{v[0], v[1]};
        }
    }

    const io::DesignOutcome outcome = io::run_design(req);

    const json cfg =
        config_json(opts, "design", {{"kind", req.kind}, {"omega", req.omega}}, nullptr);
    json payload{{"model_spec", json::parse(io::model_spec_to_json(outcome.spec))}};
    if (!outcome.u_inverse_coeffs.empty())
        payload["u_inverse_coeffs"] = outcome.u_inverse_coeffs;
    write_json(opts, "design.json", payload, cfg);

    // bare model spec usable with --model by every other command
    fs::create_directories(opts.out_dir);
    const fs::path model_path = fs::path(opts.out_dir) / "model.json";
    std::ofstream out(model_path);
    out << io::model_spec_to_json(outcome.spec) << "\n";
    std::cout << "wrote " << model_path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"isodyn -- integrable 4D Hamiltonian systems around planar centers"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&opts](CLI::App* cmd, bool needs_model) {
        if (needs_model)
            cmd->add_option("--model", opts.model_arg, "model spec (path or inline JSON)");
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "64-bit seed for randomized sweeps");
        cmd->add_option("--tol", opts.tol_arg, "tolerance overrides name=value,...");
    };

    bool catalog_json = false;
    CLI::App* c_catalog = app.add_subcommand("catalog", "list built-in models");
    add_common(c_catalog, false);
    c_catalog->add_flag("--json", catalog_json, "also write catalog.json");

    CLI::App* c_validate = app.add_subcommand("validate", "check model invariants");
    add_common(c_validate, true);

    int grid_n = 64;
    CLI::App* c_iso = app.add_subcommand("isochrony", "isochronicity report");
    add_common(c_iso, true);
    c_iso->add_option("--grid-n", grid_n, "residual grid size");

    double x_lo = 0.0, x_hi = 0.0;
    int scan_n = 20;
    CLI::App* c_scan = app.add_subcommand("period-scan", "amplitude scan of T(x0)");
    add_common(c_scan, true);
    c_scan->add_option("--x-lo", x_lo, "lowest amplitude");
    c_scan->add_option("--x-hi", x_hi, "highest amplitude");
    c_scan->add_option("--n", scan_n, "number of samples");

    int ladder_n = 8;
    double ladder_hi = 0.0;
    CLI::App* c_classify = app.add_subcommand("classify", "stability classification");
    add_common(c_classify, true);
    c_classify->add_option("--n", ladder_n, "ladder rungs");
    c_classify->add_option("--x-hi", ladder_hi, "top rung amplitude");

    double mono_x0 = 0.0, mono_hi = 0.0;
    int mono_n = 8;
    CLI::App* c_mono = app.add_subcommand("monodromy", "monodromy ladder CSV");
    add_common(c_mono, true);
    c_mono->add_option("--x0", mono_x0, "single amplitude");
    c_mono->add_option("--x-hi", mono_hi, "top rung amplitude");
    c_mono->add_option("--n", mono_n, "ladder rungs");

    double sim_x0 = 0.0, sim_periods = 10.0, sim_dt = 0.0;
    std::size_t sim_stride = 10;
    bool sim_annotate = false;
    std::string sim_integrator = "strang";
    std::string sim_state;
    CLI::App* c_sim = app.add_subcommand("simulate", "trajectory CSV with H/K columns");
    add_common(c_sim, true);
    c_sim->add_option("--x0", sim_x0, "start from (x0, 1, 0, 0)");
    c_sim->add_option("--state", sim_state, "full initial state q1,q2,p1,p2");
    c_sim->add_option("--periods", sim_periods, "duration in planar periods");
    c_sim->add_option("--dt", sim_dt, "splitting step (default tau/1000)");
    c_sim->add_option("--stride", sim_stride, "record every k-th step");
    c_sim->add_option("--integrator", sim_integrator, "strang | reference");
    c_sim->add_flag("--annotate", sim_annotate, "emit the crossing-point annotations");

    int bracket_n = 100;
    CLI::App* c_bracket = app.add_subcommand("bracket", "{H,K} random-point sweep");
    add_common(c_bracket, true);
    c_bracket->add_option("--n", bracket_n, "number of points");

    std::string family = "sqrt";
    double s_omega = 1.0, s_lambda = 2.0, s_b1 = 1.0, s_c1 = 1.0;
    int s_periods = 10;
    CLI::App* c_super = app.add_subcommand("superint", "family audits and Hessians");
    add_common(c_super, false);
    c_super->add_option("--family", family, "sqrt | quartic | generic");
    c_super->add_option("--omega", s_omega, "angular frequency");
    c_super->add_option("--lambda", s_lambda, "family parameter (sqrt, quartic)");
    c_super->add_option("--b1", s_b1, "generic family b1");
    c_super->add_option("--c1", s_c1, "generic family c1");
    c_super->add_option("--periods", s_periods, "audit duration in periods");

    std::string design_spec, design_coeffs, design_h, design_f, design_domain,
        design_trange;
    double design_omega = 1.0, design_yrange = 0.9;
    CLI::App* c_design = app.add_subcommand("design", "construct a model spec");
    add_common(c_design, false);
    c_design->add_option("--spec", design_spec, "design request (path or inline JSON)");
    CLI::App* d_period =
        c_design->add_subcommand("from-period", "prescribed even-polynomial period");
    d_period->fallthrough();
    d_period->add_option("--coeffs", design_coeffs, "period coefficients t0,t1,...")
        ->required();
    d_period->add_option("--omega", design_omega, "angular frequency");
    d_period->add_option("--y-range", design_yrange, "u-amplitude range");
    CLI::App* d_h = c_design->add_subcommand("from-h", "from an involution expression");
    d_h->fallthrough();
    d_h->add_option("--h-expr", design_h, "h(x) expression")->required();
    d_h->add_option("--omega", design_omega, "angular frequency");
    d_h->add_option("--domain", design_domain, "domain lo,hi")->required();
    CLI::App* d_even = c_design->add_subcommand("from-even", "from an even function");
    d_even->fallthrough();
    d_even->add_option("--f-expr", design_f, "even f(t) expression")->required();
    d_even->add_option("--omega", design_omega, "angular frequency");
    d_even->add_option("--t-range", design_trange, "parameter range lo,hi")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        parse_tolerances(opts);
        if (c_catalog->parsed()) return cmd_catalog(opts, catalog_json);
        if (c_validate->parsed()) return cmd_validate(opts);
        if (c_iso->parsed()) return cmd_isochrony(opts, grid_n);
        if (c_scan->parsed()) return cmd_period_scan(opts, x_lo, x_hi, scan_n);
        if (c_classify->parsed()) return cmd_classify(opts, ladder_n, ladder_hi);
        if (c_mono->parsed()) return cmd_monodromy(opts, mono_x0, mono_hi, mono_n);
        if (c_sim->parsed()) {
            std::vector<double> init;
            if (!sim_state.empty()) init = parse_csv_doubles(sim_state);
            return cmd_simulate(opts, sim_x0, init, sim_periods, sim_dt, sim_stride,
                                sim_annotate, sim_integrator);
        }
        if (c_bracket->parsed()) return cmd_bracket(opts, bracket_n);
        if (c_super->parsed())
            return cmd_superint(opts, family, s_omega, s_lambda, s_b1, s_c1, s_periods);
        if (c_design->parsed()) {
            std::string kind;
            if (d_period->parsed()) kind = "from_period_polynomial";
            if (d_h->parsed()) kind = "from_involution";
            if (d_even->parsed()) kind = "from_even_function";
            if (kind.empty() && design_spec.empty())
                throw ValidationError(
                    "design: use from-period / from-h / from-even or --spec");
            return cmd_design(opts, design_spec, kind, design_coeffs, design_omega,
                              design_yrange, design_h, design_f, design_domain,
                              design_trange);
        }
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
