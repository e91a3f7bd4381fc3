// wavecov command-line front end: kernel checks, exact moments, variogram
// curves, Monte Carlo simulation, and the physical/spectral cross-check.
//
// Every command assembles a flat key=value RunConfig (config file first,
// flags override), embeds it with its hash in every report, and writes
// deterministic CSV/JSON, so a run can be reproduced byte for byte from its
// own output.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavecov/wavecov.hpp"

namespace wc = wavecov;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_usage = 2;

struct FlagSink {
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd, const std::string& flag, const std::string& key,
                const std::string& desc) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values[key] = v; }, desc);
    }
};

wc::RunConfig assemble_config(const std::string& config_path, const FlagSink& sink,
                              const std::map<std::string, std::string>& defaults) {
    wc::RunConfig cfg;
    for (const auto& [k, v] : defaults) cfg.set(k, v);
    if (!config_path.empty()) {
        const wc::RunConfig file = wc::RunConfig::parse_file(config_path);
        for (const auto& [k, v] : file.entries()) cfg.set(k, v);
    }
    for (const auto& [k, v] : sink.values) cfg.set(k, v);
    return cfg;
}

void add_kernel_flags(CLI::App* cmd, FlagSink& sink) {
    sink.attach(cmd, "--kernel", "kernel", "kernel family: riesz|bessel|fractional|smoothed_riesz");
    sink.attach(cmd, "--beta", "beta", "Riesz/smoothed-Riesz exponent, 0<beta<2");
    sink.attach(cmd, "--alpha", "alpha", "Bessel order, alpha>1");
    sink.attach(cmd, "--h1", "h1", "Hurst index, first coordinate");
    sink.attach(cmd, "--h2", "h2", "Hurst index, second coordinate");
    sink.attach(cmd, "--h3", "h3", "Hurst index, third coordinate");
    sink.attach(cmd, "--constants", "constants", "carry normalization constants (on/off)");
}

void add_quadrature_flags(CLI::App* cmd, FlagSink& sink) {
    sink.attach(cmd, "--radial-nodes", "radial_nodes", "radial node budget (default 256)");
    sink.attach(cmd, "--sphere-order", "sphere_order", "sphere rule order (default 16 -> 512 nodes)");
    sink.attach(cmd, "--cutoff", "cutoff", "spectral cutoff / mode-set cutoff");
    sink.attach(cmd, "--quad-tolerance", "quad_tolerance", "self-convergence tolerance (default 1e-4)");
}

wc::QuadratureSpec quadrature_from(const wc::RunConfig& cfg) {
    wc::QuadratureSpec q;
    q.radial_nodes = static_cast<int>(cfg.get_int("radial_nodes", q.radial_nodes));
    q.sphere_order = static_cast<int>(cfg.get_int("sphere_order", q.sphere_order));
    q.radial_cutoff = cfg.get_double("cutoff", q.radial_cutoff);
    q.split_radius = cfg.get_double("split_radius", q.split_radius);
    q.tolerance = cfg.get_double("quad_tolerance", q.tolerance);
    return q;
}

void emit_json(const wc::RunConfig& cfg, const wc::json& j) {
    const std::string out = cfg.get("out");
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        wc::write_json(out + ".json", j);
}

// ---------------------------------------------------------------------------

int cmd_kernels_list() {
    wc::json j;
    j["families"] = wc::json::array(
        {wc::json{{"family", "riesz"},
                  {"parameters", "beta in (0,2)"},
                  {"f", "|x|^-beta"},
                  {"spectral_density", "(2pi)^-3 c3(beta) |xi|^(beta-3)"}},
         wc::json{{"family", "bessel"},
                  {"parameters", "alpha > 1"},
                  {"f", "int_0^inf w^((alpha-5)/2) e^-w e^(-|x|^2/4w) dw"},
                  {"spectral_density", "Gamma(alpha/2) pi^-3/2 (1+|xi|^2)^(-alpha/2)"}},
         wc::json{{"family", "fractional"},
                  {"parameters", "h1,h2,h3 in (1/2,1); scaling results need h1+h2+h3 > 2"},
                  {"f", "c_H prod |x_i|^(2H_i-2)"},
                  {"spectral_density", "prod c1(H_i)/(2pi) |xi_i|^(1-2H_i)"}},
         wc::json{{"family", "smoothed_riesz"},
                  {"parameters", "beta in (0,2)"},
                  {"f", "(e^-|.|^2 * |.|^-beta)(x)"},
                  {"spectral_density", "(2pi)^-3 c3(beta) pi^3/2 e^(-|xi|^2/4) |xi|^(beta-3)"}}});
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

int cmd_check(const wc::RunConfig& cfg) {
    const wc::KernelSpec kernel = cfg.make_kernel();
    const wc::QuadratureSpec quad = quadrature_from(cfg);
    const double T = cfg.get_double("T", 1.0);
    const std::string cond = cfg.get("condition");
    const double slack = cfg.get_double("slack", 0.15);
    const wc::Point3 dir = cfg.get_point("direction", {1, 0, 0});

    wc::ConditionReport report;
    if (cond == "h1") {
        report = wc::check_H1(kernel, cfg.get_double("radius", 1.0), quad);
    } else if (cond == "h2") {
        report = wc::check_H2(kernel);
    } else {
        std::vector<double> probes;
        if (cond == "nu")
            probes = cfg.get_lags("lags", "2^-8..2^-3");
        else if (cond == "sp1" || cond == "sp2")
            probes = cfg.get_lags("lags", "2^-8..2^-3");
        else if (cond == "tc1" || cond == "tc2")
            probes = cfg.get_lags("lags", "2^-7..2^-2");
        else
            throw std::invalid_argument("check: unknown condition '" + cond +
                                        "' (h1|h2|nu|sp1|sp2|tc1|tc2)");
        if (probes.empty()) throw std::invalid_argument("check: empty probe grid");
        if (cond == "nu")
            report = wc::small_ball_growth(kernel, T, probes, quad);
        else if (cond == "sp1")
            report = wc::sweep_sp1(kernel, T, dir, probes, quad, slack);
        else if (cond == "sp2")
            report = wc::sweep_sp2(kernel, T, dir, probes, quad, slack);
        else if (cond == "tc1")
            report = wc::sweep_tc1(kernel, T, probes, quad, slack);
        else
            report = wc::sweep_tc2(kernel, T, probes, quad, slack);
    }

    wc::json j = wc::report_envelope("check", cfg);
    j["kernel"] = wc::kernel_json(kernel);
    j["report"] = wc::to_json(report);
    emit_json(cfg, j);

    const std::string out = cfg.get("out");
    if (!out.empty()) {
        wc::CsvWriter csv(out + ".csv");
        csv.header({"probe", "value", "certificate_delta", "converged"});
        for (std::size_t i = 0; i < report.probe_grid.size(); ++i) {
            const double delta = i < report.certificates.size() ? report.certificates[i].delta : 0.0;
            const double conv =
                i < report.certificates.size() ? (report.certificates[i].converged ? 1.0 : 0.0) : 1.0;
            csv.row({report.probe_grid[i],
                     i < report.integral_values.size() ? report.integral_values[i] : 0.0, delta, conv});
        }
    }
    return report.verdict == wc::Verdict::Pass ? exit_ok : exit_numerical;
}

int cmd_moments(const wc::RunConfig& cfg) {
    const wc::KernelSpec kernel = cfg.make_kernel();
    const wc::QuadratureSpec quad = quadrature_from(cfg);
    const std::string op = cfg.get("op");
    const double t = cfg.get_double("t", 1.0);

    wc::MomentResult r;
    if (op == "variance") {
        r = wc::variance(kernel, t, quad);
    } else if (op == "variogram") {
        r = wc::spatial_variogram_exact(kernel, t, cfg.get_point("x", {0.1, 0, 0}), quad);
    } else if (op == "z1") {
        r = wc::temporal_Z1(kernel, t, cfg.get_double("tbar", t + 0.1), quad);
    } else if (op == "z2") {
        r = wc::temporal_Z2(kernel, t, cfg.get_double("tbar", t + 0.1), quad);
    } else if (op == "increment") {
        r = wc::temporal_increment_variance(kernel, t, cfg.get_double("tbar", t + 0.1), quad);
    } else if (op == "shell") {
        r = wc::shell_correlation_spectral(kernel, cfg.get_double("s", 1.0), t, quad);
    } else if (op == "shell_shifted") {
        r = wc::shifted_shell_correlation(kernel, cfg.get_double("s", 1.0), t,
                                          cfg.get_point("w", {0.1, 0, 0}), quad);
    } else {
        throw std::invalid_argument(
            "moments: unknown op '" + op +
            "' (variance|variogram|z1|z2|increment|shell|shell_shifted)");
    }

    wc::json j = wc::report_envelope("moments", cfg);
    j["kernel"] = wc::kernel_json(kernel);
    j["op"] = op;
    j["value"] = r.value;
    j["certificate"] = wc::to_json(r.certificate);
    emit_json(cfg, j);
    return r.certificate.converged ? exit_ok : exit_numerical;
}

int cmd_variogram(const wc::RunConfig& cfg) {
    const wc::KernelSpec kernel = cfg.make_kernel();
    const wc::QuadratureSpec quad = quadrature_from(cfg);
    const double t = cfg.get_double("t", 1.0);
    const wc::Point3 dir = wc::normalized(cfg.get_point("direction", {1, 1, 1}));
    std::vector<double> lags = cfg.get_lags("lags", "2^-9..2^-3");
    if (lags.empty()) throw std::invalid_argument("variogram: empty lag grid");
    std::sort(lags.begin(), lags.end());
    const bool mc = cfg.get_flag("mc", false);

    wc::json j = wc::report_envelope("variogram", cfg);
    j["kernel"] = wc::kernel_json(kernel);
    j["t"] = t;
    if (kernel.family() == wc::KernelFamily::FractionalProduct) j["kappa_bar"] = kernel.kappa_bar();

    std::vector<double> exact(lags.size(), 0.0);
    bool all_converged = true;
    if (t > 0.0)
        for (std::size_t i = 0; i < lags.size(); ++i) {
            wc::MomentResult m = wc::spatial_variogram_exact(kernel, t, lags[i] * dir, quad);
            exact[i] = m.value;
            all_converged = all_converged && m.certificate.converged;
        }

    std::optional<wc::VariogramCurve> curve;
    std::optional<std::vector<double>> truncated;
    if (mc) {
        const long n_modes = cfg.get_int("modes", 4096);
        const double cutoff = cfg.get_double("cutoff", 64.0);
        int resolution;
        wc::ModeScheme scheme;
        if (kernel.isotropic()) {
            scheme = wc::ModeScheme::RadialAngular;
            resolution = std::max(8, static_cast<int>(n_modes / 288));
        } else {
            scheme = wc::ModeScheme::OffsetLattice;
            resolution = std::max(8, 2 * static_cast<int>(std::lround(std::cbrt(double(n_modes)) / 2.0)));
        }
        const wc::ModeSet modes = wc::build_mode_set(kernel, cutoff, resolution, scheme);
        std::vector<wc::Point3> points{{0, 0, 0}};
        for (double l : lags) points.push_back(l * dir);
        const std::size_t n_real = static_cast<std::size_t>(cfg.get_int("realizations", 2000));
        const wc::FieldSample sample =
            wc::simulate_field(modes, {t}, points, n_real, cfg.get_u64("seed", 1));
        curve = wc::empirical_variogram(sample, 0, dir, lags);
        truncated = std::vector<double>();
        for (double l : lags) truncated->push_back(wc::truncated_variogram(modes, t, l * dir));
        j["mode_count"] = modes.size();
        j["captured_mass"] = modes.captured_mass;
        if (modes.low_mass_warning) j["low_mass_warning"] = true;
    }

    const std::vector<double>& fitted_vals = curve ? curve->values : exact;
    bool fit_ok = t > 0.0;
    for (double v : fitted_vals) fit_ok = fit_ok && v > 0.0;
    if (fit_ok) {
        const wc::ExponentFit fit = wc::fit_exponent(lags, fitted_vals);
        j["fit"] = wc::to_json(fit);
        j["holder_estimate"] = 0.5 * fit.slope;
    }

    const std::string out = cfg.get("out");
    if (!out.empty()) {
        wc::CsvWriter csv(out + ".csv");
        std::vector<std::string> cols{"lag", "exact"};
        if (curve) {
            cols.push_back("mc");
            cols.push_back("stderr");
            cols.push_back("truncated");
        }
        csv.header(cols);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            std::vector<double> row{lags[i], exact[i]};
            if (curve) {
                row.push_back(curve->values[i]);
                row.push_back(curve->stderrs[i]);
                row.push_back((*truncated)[i]);
            }
            csv.row(row);
        }
    }
    emit_json(cfg, j);
    return all_converged ? exit_ok : exit_numerical;
}

int cmd_crosscheck(const wc::RunConfig& cfg) {
    const wc::KernelSpec kernel = cfg.make_kernel();
    const wc::QuadratureSpec quad = quadrature_from(cfg);
    const double default_tol =
        kernel.family() == wc::KernelFamily::SmoothedRiesz ? 5e-3 : 1e-3;
    const double tol = cfg.get_double("tolerance", default_tol);

    std::vector<std::pair<double, double>> pairs;
    {
        const std::string spec = cfg.get("pairs", "1,1;1.5,1;2,0.5");
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ';')) {
            double s = 0, t = 0;
            if (std::sscanf(tok.c_str(), "%lf,%lf", &s, &t) != 2)
                throw std::invalid_argument("crosscheck: bad pair '" + tok + "'");
            pairs.emplace_back(s, t);
        }
        if (pairs.empty()) throw std::invalid_argument("crosscheck: empty pair list");
    }

    wc::json j = wc::report_envelope("crosscheck", cfg);
    j["kernel"] = wc::kernel_json(kernel);
    j["tolerance"] = tol;
    wc::json rows = wc::json::array();
    double max_dev = 0.0;
    for (auto [s, t] : pairs) {
        const wc::Certificate phys = wc::shell_correlation_physical(kernel, s, t, quad);
        const wc::MomentResult spec_side = wc::shell_correlation_spectral(kernel, s, t, quad);
        const double dev = std::abs(spec_side.value - phys.value) / std::abs(phys.value);
        max_dev = std::max(max_dev, dev);
        rows.push_back(wc::json{{"s", s},
                                {"t", t},
                                {"physical", phys.value},
                                {"spectral", spec_side.value},
                                {"relative_deviation", dev}});
    }
    j["pairs"] = rows;
    j["max_relative_deviation"] = max_dev;
    j["pass"] = max_dev <= tol;
    emit_json(cfg, j);

    const std::string out = cfg.get("out");
    if (!out.empty()) {
        wc::CsvWriter csv(out + ".csv");
        csv.header({"s", "t", "physical", "spectral", "relative_deviation"});
        for (const auto& r : rows)
            csv.row({r["s"], r["t"], r["physical"], r["spectral"], r["relative_deviation"]});
    }
    return max_dev <= tol ? exit_ok : exit_numerical;
}

int cmd_simulate(const wc::RunConfig& cfg) {
    const wc::KernelSpec kernel = cfg.make_kernel();
    const long n_modes = cfg.get_int("modes", 4096);
    const double cutoff = cfg.get_double("cutoff", 64.0);
    int resolution;
    wc::ModeScheme scheme;
    if (kernel.isotropic()) {
        scheme = wc::ModeScheme::RadialAngular;
        resolution = std::max(8, static_cast<int>(n_modes / 288));
    } else {
        scheme = wc::ModeScheme::OffsetLattice;
        resolution = std::max(8, 2 * static_cast<int>(std::lround(std::cbrt(double(n_modes)) / 2.0)));
    }
    const wc::ModeSet modes = wc::build_mode_set(kernel, cutoff, resolution, scheme);

    std::vector<double> times = cfg.get_lags("times", "1");
    std::sort(times.begin(), times.end());
    std::vector<wc::Point3> points;
    if (cfg.has("points")) {
        std::stringstream ss(cfg.get("points"));
        std::string tok;
        while (std::getline(ss, tok, ';'))
            if (!tok.empty()) points.push_back(wc::RunConfig::parse_point(tok));
    } else {
        const wc::Point3 dir = wc::normalized(cfg.get_point("direction", {1, 1, 1}));
        points.push_back({0, 0, 0});
        for (double l : cfg.get_lags("lags", "2^-6..2^-3")) points.push_back(l * dir);
    }
    if (points.empty()) throw std::invalid_argument("simulate: empty point set");

    const std::size_t n_real = static_cast<std::size_t>(cfg.get_int("realizations", 256));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const wc::FieldSample sample = wc::simulate_field(modes, times, points, n_real, seed);

    wc::json j = wc::report_envelope("simulate", cfg);
    j["kernel"] = wc::kernel_json(kernel);
    j["mode_count"] = modes.size();
    j["captured_mass"] = modes.captured_mass;
    if (modes.low_mass_warning) j["low_mass_warning"] = true;
    j["realizations"] = n_real;
    j["times"] = times;

    const std::string out = cfg.get("out");
    if (!out.empty()) {
        wc::write_field_sample(out + ".bin", sample);
        j["binary"] = out + ".bin";
        if (times.size() * points.size() <= 64) {
            wc::CsvWriter csv(out + ".csv");
            std::vector<std::string> cols{"realization", "time"};
            for (std::size_t p = 0; p < points.size(); ++p) cols.push_back("p" + std::to_string(p));
            csv.header(cols);
            for (std::size_t i = 0; i < sample.n_real; ++i)
                for (std::size_t tj = 0; tj < times.size(); ++tj) {
                    std::vector<double> row{static_cast<double>(i), times[tj]};
                    for (std::size_t p = 0; p < points.size(); ++p) row.push_back(sample.at(i, tj, p));
                    csv.row(row);
                }
            j["csv"] = out + ".csv";
        }
    }
    emit_json(cfg, j);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavecov: covariance kernels, exact moments, and Monte Carlo for the 3-D "
                 "linear stochastic wave equation"};
    app.require_subcommand(1);

    std::string config_path;

    auto* kernels = app.add_subcommand("kernels", "kernel family information");
    auto* kernels_list = kernels->add_subcommand("list", "list the built-in kernel families");
    kernels->require_subcommand(1);

    struct Cmd {
        CLI::App* app = nullptr;
        FlagSink sink;
        std::string config;
    };
    std::map<std::string, Cmd> cmds;

    auto make_cmd = [&](const std::string& name, const std::string& desc) -> Cmd& {
        Cmd& c = cmds[name];
        c.app = app.add_subcommand(name, desc);
        c.app->add_option("--config", c.config, "flat key=value config file (flags override)");
        add_kernel_flags(c.app, c.sink);
        add_quadrature_flags(c.app, c.sink);
        c.sink.attach(c.app, "--out", "out", "output path prefix (.json/.csv)");
        c.sink.attach(c.app, "--T", "T", "time horizon (default 1)");
        c.sink.attach(c.app, "--seed", "seed", "random seed");
        c.sink.attach(c.app, "--tolerance", "tolerance", "acceptance tolerance for the command");
        return c;
    };

    {
        Cmd& c = make_cmd("check", "probe a regularity condition and fit its exponent");
        c.sink.attach(c.app, "--condition", "condition", "h1|h2|nu|sp1|sp2|tc1|tc2");
        c.sink.attach(c.app, "--lags", "lags", "probe grid: comma list or 2^a..2^b");
        c.sink.attach(c.app, "--direction", "direction", "shift direction x,y,z");
        c.sink.attach(c.app, "--slack", "slack", "verdict slack below the predicted supremum");
        c.sink.attach(c.app, "--radius", "radius", "ball radius for h1");
    }
    {
        Cmd& c = make_cmd("moments", "exact second-moment functionals of the linear solution");
        c.sink.attach(c.app, "--op", "op", "variance|variogram|z1|z2|increment|shell|shell_shifted");
        c.sink.attach(c.app, "--t", "t", "time");
        c.sink.attach(c.app, "--tbar", "tbar", "second time (z1/z2/increment)");
        c.sink.attach(c.app, "--s", "s", "first shell time (shell ops)");
        c.sink.attach(c.app, "--x", "x", "spatial lag x,y,z (variogram)");
        c.sink.attach(c.app, "--w", "w", "shift vector x,y,z (shell_shifted)");
    }
    {
        Cmd& c = make_cmd("variogram", "exact and/or Monte Carlo spatial variogram with exponent fit");
        c.sink.attach(c.app, "--t", "t", "time (default 1)");
        c.sink.attach(c.app, "--lags", "lags", "lag grid: comma list or 2^a..2^b");
        c.sink.attach(c.app, "--direction", "direction", "lag direction x,y,z");
        c.app->add_flag_callback("--mc", [&c]() { c.sink.values["mc"] = "1"; },
                                 "add a Monte Carlo curve");
        c.sink.attach(c.app, "--realizations", "realizations", "Monte Carlo realizations");
        c.sink.attach(c.app, "--modes", "modes", "mode budget for the spectral sampler");
    }
    {
        Cmd& c = make_cmd("crosscheck", "dual physical/spectral computation of the shell correlation");
        c.sink.attach(c.app, "--pairs", "pairs", "s,t pairs: \"1,1;1.5,1;2,0.5\"");
    }
    {
        Cmd& c = make_cmd("simulate", "sample the linear solution field and export it");
        c.sink.attach(c.app, "--times", "times", "comma list of observation times");
        c.sink.attach(c.app, "--points", "points", "semicolon list of x,y,z points");
        c.sink.attach(c.app, "--lags", "lags", "lag grid along --direction (with base point 0)");
        c.sink.attach(c.app, "--direction", "direction", "lag direction x,y,z");
        c.sink.attach(c.app, "--realizations", "realizations", "number of realizations");
        c.sink.attach(c.app, "--modes", "modes", "mode budget");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (kernels->parsed() && kernels_list->parsed()) return cmd_kernels_list();
        for (auto& [name, c] : cmds) {
            if (!c.app->parsed()) continue;
            const wc::RunConfig cfg = assemble_config(c.config, c.sink, {});
            if (name == "check") return cmd_check(cfg);
            if (name == "moments") return cmd_moments(cfg);
            if (name == "variogram") return cmd_variogram(cfg);
            if (name == "crosscheck") return cmd_crosscheck(cfg);
            if (name == "simulate") return cmd_simulate(cfg);
        }
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
