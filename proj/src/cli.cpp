#include "chemsens/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "chemsens/adiabatic.hpp"
#include "chemsens/errors.hpp"
#include "chemsens/oracles.hpp"
#include "chemsens/parallel.hpp"

namespace chemsens::cli {

using nlohmann::json;

namespace {

std::string num(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// JSON has no infinity; non-finite values become null.
json jnum(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

[[noreturn]] void usage(const std::string& what)
{
    throw Error(ErrorKind::UsageError, what);
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message)
{
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct Row {
    std::string line;
    bool ok = true;
};

Row sweep_row(const json& config, bool with_deviation, RouteChoice route)
{
    double det = NAN, ra = NAN, rb = NAN, dens = NAN;
    try {
        const auto p = params::from_json(config);
        det = params::angular_to_mhz(p.molecule.A.detuning);
        ra = params::angular_to_mhz(p.molecule.rate_A);
        rb = params::angular_to_mhz(p.molecule.rate_B);
        dens = p.sample.density;
        const auto primary = pipeline::evaluate_point(
            p, route == RouteChoice::Adiabatic ? pipeline::Route::Adiabatic : pipeline::Route::Full);
        double deviation = NAN;
        if (with_deviation) {
            deviation = pipeline::route_deviation(primary, pipeline::evaluate_point(p, pipeline::Route::Adiabatic));
        }
        const auto& r = primary.report;
        std::ostringstream s;
        s << num(det) << ',' << num(ra) << ',' << num(rb) << ',' << num(dens) << ',' << num(primary.S_plus) << ','
          << num(primary.S_minus) << ',' << num(r.diagnostics.sigma_plus_ratio) << ','
          << num(r.diagnostics.sigma_minus_ratio) << ',' << num(r.rel_full) << ',' << num(r.rel_intensity) << ','
          << num(r.rel_phase) << ',' << num(r.rel_psn) << ',' << estimation::to_string(r.regime) << ",ok";
        if (with_deviation) {
            s << ',' << num(deviation);
        }
        return {s.str(), true};
    } catch (const Error& e) {
        std::ostringstream s;
        s << num(det) << ',' << num(ra) << ',' << num(rb) << ',' << num(dens);
        for (int i = 0; i < 8; ++i) {
            s << ",nan";
        }
        s << ",Unclassified," << to_string(e.kind());
        if (with_deviation) {
            s << ",nan";
        }
        return {s.str(), false};
    }
}

json load_config(const std::string& path)
{
    if (path.empty()) {
        return params::default_config();
    }
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot read config " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

RouteChoice parse_route(const std::string& s)
{
    if (s == "full") {
        return RouteChoice::Full;
    }
    if (s == "adiabatic") {
        return RouteChoice::Adiabatic;
    }
    if (s == "both") {
        return RouteChoice::Both;
    }
    usage("--route must be full, adiabatic or both");
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    }
}

const char* axis_column(const std::string& param)
{
    if (param == "detuning") {
        return "1";
    }
    if (param == "rate" || param == "rate_A") {
        return "2";
    }
    if (param == "rate_B") {
        return "3";
    }
    return "4";
}

const char* axis_label(const std::string& param)
{
    if (param == "detuning") {
        return "detuning (MHz)";
    }
    if (param == "density") {
        return "density (m^-3)";
    }
    return "reaction rate (MHz)";
}

std::string plot_header(const Axis& axis)
{
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set xlabel '" << axis_label(axis.param) << "'\n";
    if (axis.log) {
        s << "set logscale x\n";
    }
    return s.str();
}

} // namespace

Axis parse_axis(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        usage("axis must look like param=log|linear:min:max:count");
    }
    Axis a;
    a.param = text.substr(0, eq);
    if (a.param != "detuning" && a.param != "rate" && a.param != "rate_A" && a.param != "rate_B" &&
        a.param != "density") {
        usage("unknown axis parameter " + a.param);
    }
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ':');) {
        parts.push_back(item);
    }
    if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "linear")) {
        usage("axis grid must be log|linear:min:max:count");
    }
    a.log = parts[0] == "log";
    try {
        std::size_t used = 0;
        a.min = std::stod(parts[1], &used);
        a.max = std::stod(parts[2]);
        const long count = std::stol(parts[3]);
        if (count < 2) {
            usage("axis count must be >= 2");
        }
        a.count = static_cast<std::size_t>(count);
    } catch (const std::logic_error&) {
        usage("axis grid values must be numbers");
    }
    if (!(a.min < a.max)) {
        usage("axis min must be < max");
    }
    if (a.log && !(a.min > 0.0)) {
        usage("log axis requires min > 0");
    }
    return a;
}

std::vector<double> grid_values(const Axis& a)
{
    std::vector<double> v(a.count);
    for (std::size_t i = 0; i < a.count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(a.count - 1);
        v[i] = a.log ? std::exp(std::log(a.min) + t * (std::log(a.max) - std::log(a.min))) : a.min + t * (a.max - a.min);
    }
    v.back() = a.max;
    return v;
}

void apply_override(json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        usage("--set expects key=value, got " + assignment);
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &config;
    std::stringstream ss(key);
    std::vector<std::string> path;
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) {
            usage("empty path component in " + key);
        }
        path.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->is_object()) {
            usage("cannot descend into " + key);
        }
        node = &(*node)[path[i]];
        if (node->is_null()) {
            *node = json::object();
        }
    }
    if (!node->is_object()) {
        usage("cannot set " + key);
    }
    (*node)[path.back()] = value;
}

void apply_axis_value(json& config, const std::string& param, double value)
{
    if (param == "detuning") {
        config["molecule"]["detuning_a_mhz"] = value;
    } else if (param == "rate") {
        config["molecule"]["rate_a_mhz"] = value;
        config["molecule"]["rate_b_mhz"] = value;
    } else if (param == "rate_A") {
        config["molecule"]["rate_a_mhz"] = value;
    } else if (param == "rate_B") {
        config["molecule"]["rate_b_mhz"] = value;
    } else if (param == "density") {
        config["sample"]["density_per_m3"] = value;
    } else {
        usage("unknown axis parameter " + param);
    }
}

std::string csv_header(bool with_deviation)
{
    std::string h = "detuning_mhz,rate_a_mhz,rate_b_mhz,density_per_m3,s_plus_m2,s_minus_m2,sigma_plus_ratio,"
                    "sigma_minus_ratio,sens_full,sens_intensity,sens_phase,sens_psn,regime,status";
    if (with_deviation) {
        h += ",route_deviation";
    }
    return h;
}

bool run_sweep(const json& base, const SweepSpec& spec, unsigned workers, std::ostream& csv)
{
    const auto g1 = grid_values(spec.axis1);
    const std::vector<double> g2 = spec.axis2 ? grid_values(*spec.axis2) : std::vector<double>{NAN};
    std::vector<json> configs;
    configs.reserve(g1.size() * g2.size());
    for (double a : g1) {
        for (double b : g2) {
            json c = base;
            apply_axis_value(c, spec.axis1.param, a);
            if (spec.axis2) {
                apply_axis_value(c, spec.axis2->param, b);
            }
            configs.push_back(std::move(c));
        }
    }
    const bool with_dev = spec.route == RouteChoice::Both;
    std::vector<Row> rows(configs.size());
    parallel_for(configs.size(), workers, [&](std::size_t i) { rows[i] = sweep_row(configs[i], with_dev, spec.route); });

    bool ok = true;
    csv << csv_header(with_dev) << '\n';
    for (const auto& r : rows) {
        csv << r.line << '\n';
        ok = ok && r.ok;
    }
    return ok;
}

std::string sweep_plot_script(const SweepSpec& spec, const std::string& csv_name)
{
    std::ostringstream s;
    const char* x = axis_column(spec.axis1.param);
    if (spec.axis2) {
        const char* y = axis_column(spec.axis2->param);
        s << plot_header(spec.axis1) << "set ylabel '" << axis_label(spec.axis2->param) << "'\n";
        if (spec.axis2->log) {
            s << "set logscale y\n";
        }
        s << "set logscale z\nset zlabel 'relative sensitivity'\n"
          << "splot '" << csv_name << "' skip 1 using " << x << ':' << y << ":9 with points title 'full'\n";
        return s.str();
    }
    s << plot_header(spec.axis1) << "set logscale y\nset ylabel 'relative sensitivity'\n"
      << "plot '" << csv_name << "' skip 1 using " << x << ":9 with lines title 'full', \\\n"
      << "     '' skip 1 using " << x << ":10 with points pt 5 title 'intensity', \\\n"
      << "     '' skip 1 using " << x << ":11 with points pt 9 title 'phase', \\\n"
      << "     '' skip 1 using " << x << ":12 with points pt 6 title 'shot-noise estimate'\n";
    return s.str();
}

json point_record(const params::ModelParams& p, const pipeline::PointResult& r)
{
    const auto& rep = r.report;
    return json{
        {"route", pipeline::to_string(r.route)},
        {"detuning_mhz", params::angular_to_mhz(p.molecule.A.detuning)},
        {"rate_a_mhz", params::angular_to_mhz(p.molecule.rate_A)},
        {"rate_b_mhz", params::angular_to_mhz(p.molecule.rate_B)},
        {"density_per_m3", p.sample.density},
        {"s_plus_m2", jnum(r.S_plus)},
        {"s_minus_m2", jnum(r.S_minus)},
        {"depth_m", jnum(r.depth)},
        {"sigma_plus_ratio", jnum(rep.diagnostics.sigma_plus_ratio)},
        {"sigma_minus_ratio", jnum(rep.diagnostics.sigma_minus_ratio)},
        {"sens_full", jnum(rep.rel_full)},
        {"sens_intensity", jnum(rep.rel_intensity)},
        {"sens_phase", jnum(rep.rel_phase)},
        {"sens_psn", jnum(rep.rel_psn)},
        {"regime", estimation::to_string(rep.regime)},
        {"spectral_gap_rad_s", jnum(r.spectral_gap)},
        {"fit_residual", jnum(r.expansion.fit_residual)},
        {"adiabatic_gate_ok", r.adiabatic_gate_ok},
    };
}

std::vector<std::string> emit_figure_pack(const std::string& id, const json& base, const std::filesystem::path& dir,
                                          unsigned workers)
{
    if (id != "fig1c" && id != "fig2" && id != "fig3") {
        usage("unknown figure id " + id + " (expected fig1c, fig2 or fig3)");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot create " + dir.string());
    }
    std::vector<std::string> written;
    auto sweep_to = [&](const json& config, const SweepSpec& spec, const std::string& name) {
        std::ostringstream csv;
        run_sweep(config, spec, workers, csv);
        write_text(dir / name, csv.str());
        written.push_back(name);
    };

    if (id == "fig1c") {
        json c = base;
        c["molecule"]["detuning_a_mhz"] = 40.0;
        SweepSpec spec{parse_axis("rate=log:1e-6:1e2:41"), std::nullopt, RouteChoice::Full};
        sweep_to(c, spec, "fig1c.csv");
        write_text(dir / "fig1c.gp", "set title 'relative sensitivity vs reaction rate'\n" +
                                         sweep_plot_script(spec, "fig1c.csv"));
        written.push_back("fig1c.gp");
    } else if (id == "fig2") {
        json c = base;
        c["molecule"]["rate_a_mhz"] = 1e-4;
        c["molecule"]["rate_b_mhz"] = 1e-4;
        SweepSpec spec{parse_axis("detuning=linear:-100:100:201"), std::nullopt, RouteChoice::Full};
        std::ostringstream csv;
        run_sweep(c, spec, workers, csv);
        const std::array<std::pair<const char*, const char*>, 5> panels{{
            {"fig2a_absorption_cross_section.csv", "5"},
            {"fig2b_phase_cross_section.csv", "6"},
            {"fig2c_variance_plus.csv", "7"},
            {"fig2d_variance_minus.csv", "8"},
            {"fig2e_sensitivity.csv", "9"},
        }};
        std::ostringstream gp;
        gp << "set datafile separator ','\nset xlabel 'detuning (MHz)'\nset multiplot layout 2,3\n";
        for (const auto& [name, col] : panels) {
            write_text(dir / name, csv.str());
            written.push_back(name);
            const bool sens = std::string(col) == "9";
            gp << (sens || col[0] == '7' || col[0] == '8' ? "set logscale y\n" : "unset logscale y\n");
            if (sens) {
                gp << "plot '" << name << "' skip 1 using 1:9 with lines title 'full', "
                   << "'' skip 1 using 1:10 with points pt 5 title 'intensity', "
                   << "'' skip 1 using 1:11 with points pt 9 title 'phase', "
                   << "'' skip 1 using 1:12 with points pt 6 title 'shot-noise estimate'\n";
            } else {
                gp << "plot '" << name << "' skip 1 using 1:" << col << " with lines title columnhead(" << col
                   << ")\n";
            }
        }
        gp << "unset multiplot\n";
        write_text(dir / "fig2.gp", gp.str());
        written.push_back("fig2.gp");
    } else {
        const std::array<double, 3> detunings{20.0, 40.0, 100.0};
        SweepSpec spec{parse_axis("rate=log:1e-6:1e2:41"), std::nullopt, RouteChoice::Full};
        std::ostringstream gp;
        gp << plot_header(spec.axis1) << "set logscale y\nset multiplot layout 1,3\n";
        const std::array<std::pair<const char*, const char*>, 3> panels{{{"9", "full"}, {"10", "intensity"}, {"11", "phase"}}};
        std::vector<std::string> names;
        for (double eps : detunings) {
            json c = base;
            c["molecule"]["detuning_a_mhz"] = eps;
            const std::string name = "fig3_detuning_" + num(eps) + "mhz.csv";
            sweep_to(c, spec, name);
            names.push_back(name);
        }
        for (const auto& [col, title] : panels) {
            gp << "set title '" << title << "'\nplot ";
            for (std::size_t i = 0; i < names.size(); ++i) {
                gp << (i ? ", " : "") << "'" << names[i] << "' skip 1 using 2:" << col << " with lines title '"
                   << num(detunings[i]) << " MHz', '' skip 1 using 2:12 with points pt 6 notitle";
            }
            gp << '\n';
        }
        gp << "unset multiplot\n";
        write_text(dir / "fig3.gp", gp.str());
        written.push_back("fig3.gp");
    }
    return written;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Precision limits of spectroscopic concentration measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string route = "full";
    std::string out_path;
    unsigned workers = 0;
    std::uint64_t seed = 1;
    std::size_t mc_trajectories = 0;
    std::vector<std::string> axes;
    bool plot = false;
    std::string figure_id;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--set", overrides, "dotted override key=value")->allow_extra_args(false);
        sub->add_option("--route", route, "full | adiabatic | both");
        sub->add_option("--out", out_path, "output file (point, sweep) or directory (figures)");
        sub->add_option("--workers", workers, "worker threads, 0 = available parallelism");
        sub->add_option("--seed", seed, "seed for the telegraph Monte-Carlo oracle");
    };
    auto* point = app.add_subcommand("point", "evaluate one parameter point");
    common(point);
    point->add_option("--mc-trajectories", mc_trajectories, "also run the telegraph oracle with N trajectories");
    auto* sweep = app.add_subcommand("sweep", "1D or 2D parameter sweep to CSV");
    common(sweep);
    sweep->add_option("--axis", axes, "param=log|linear:min:max:count (up to two)")->allow_extra_args(false);
    sweep->add_flag("--plot", plot, "write a companion gnuplot script next to --out");
    auto* figures = app.add_subcommand("figures", "emit figure CSVs and gnuplot scripts");
    common(figures);
    figures->add_option("figure", figure_id, "fig1c | fig2 | fig3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        error_json(err, "UsageError", e.what());
        return 2;
    }

    try {
        const RouteChoice rc = parse_route(route);
        json config = load_config(config_path);
        for (const auto& o : overrides) {
            apply_override(config, o);
        }

        if (point->parsed()) {
            const auto p = params::from_json(config);
            if (!adiabatic::within_adiabatic_gate(p) && rc != RouteChoice::Full) {
                err << "warning: r_A + r_B exceeds gamma/10, adiabatic route outside its validity range\n";
            }
            json record;
            if (rc == RouteChoice::Both) {
                const auto full = pipeline::evaluate_point(p, pipeline::Route::Full);
                const auto adi = pipeline::evaluate_point(p, pipeline::Route::Adiabatic);
                record = {{"full", point_record(p, full)},
                          {"adiabatic", point_record(p, adi)},
                          {"route_deviation", jnum(pipeline::route_deviation(full, adi))}};
            } else {
                const auto r = pipeline::evaluate_point(
                    p, rc == RouteChoice::Full ? pipeline::Route::Full : pipeline::Route::Adiabatic);
                record = point_record(p, r);
            }
            if (mc_trajectories > 0) {
                oracles::McConfig mc;
                mc.n_trajectories = mc_trajectories;
                mc.seed = seed;
                mc.workers = workers;
                const auto res = oracles::telegraph_mc_diffusion(p, mc);
                const auto analytic = adiabatic::chemical_diffusion(p, p.derived.photon_flux_J0);
                auto m = [](const Eigen::Matrix2d& a) {
                    return json::array({json::array({a(0, 0), a(0, 1)}), json::array({a(1, 0), a(1, 1)})});
                };
                record["telegraph_mc"] = {{"chemical_diffusion_per_m", m(res.value)},
                                          {"standard_error_per_m", m(res.standard_error)},
                                          {"analytic_per_m", m(analytic)},
                                          {"seed", seed}};
            }
            const std::string text = record.dump(2) + "\n";
            if (out_path.empty()) {
                out << text;
            } else {
                write_text(out_path, text);
            }
            return 0;
        }

        if (sweep->parsed()) {
            if (axes.empty() || axes.size() > 2) {
                usage("sweep needs one or two --axis options");
            }
            SweepSpec spec;
            spec.axis1 = parse_axis(axes[0]);
            if (axes.size() == 2) {
                spec.axis2 = parse_axis(axes[1]);
            }
            spec.route = rc;
            std::ostringstream csv;
            const bool ok = run_sweep(config, spec, workers, csv);
            if (out_path.empty()) {
                out << csv.str();
                if (plot) {
                    usage("--plot requires --out");
                }
            } else {
                write_text(out_path, csv.str());
                if (plot) {
                    const std::filesystem::path csv_path(out_path);
                    write_text(csv_path.string() + ".gp", sweep_plot_script(spec, csv_path.filename().string()));
                }
            }
            if (!ok) {
                error_json(err, "ComputeFailure", "one or more sweep points failed; see the status column");
                return 1;
            }
            return 0;
        }

        const auto files = emit_figure_pack(figure_id, config, out_path.empty() ? "." : out_path, workers);
        for (const auto& f : files) {
            out << f << '\n';
        }
        return 0;
    } catch (const Error& e) {
        error_json(err, to_string(e.kind()), e.detail());
        return e.kind() == ErrorKind::UsageError ? 2 : 1;
    } catch (const std::exception& e) {
        error_json(err, "InternalError", e.what());
        return 1;
    }
}

} // namespace chemsens::cli
