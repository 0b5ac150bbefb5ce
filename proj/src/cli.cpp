#include "bubblelator/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include "bubblelator/becker_doring.hpp"
#include "bubblelator/errors.hpp"
#include "bubblelator/io/csv.hpp"
#include "bubblelator/io/manifest.hpp"
#include "bubblelator/limit_model.hpp"
#include "bubblelator/model_params.hpp"
#include "bubblelator/reduced_models.hpp"
#include "bubblelator/spectral.hpp"

namespace bubblelator::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kSubcommands = {"simulate-limit", "simulate-bd", "simulate-moments", "simulate-peak",
                                               "crossings",      "sweep",       "odd-beta",         "scales"};

struct Common {
    std::string out_dir = ".";
    std::string config;
    bool seedless = false;
    std::map<std::string, std::string> overrides;  // parameter key -> raw text
};

void add_common(CLI::App& app, Common& c) {
    app.add_option("--out-dir", c.out_dir, "directory for data files and manifest");
    app.add_option("--config", c.config, "parameter file of key = value lines");
    app.add_flag("--seedless", c.seedless, "assert a randomness-free run (always true)");
    for (const char* key : {"alpha", "gamma", "r", "q", "epsilon", "eta", "S", "R"}) {
        app.add_option_function<std::string>(
            std::string("--") + key, [&c, key](const std::string& v) { c.overrides[key] = v; },
            std::string("override parameter ") + key);
    }
}

ParameterSet resolve(const Common& c) {
    ParameterSet p;
    if (!c.config.empty()) p = load_parameter_file(c.config, p);
    for (const auto& [k, v] : c.overrides) p.set(k, v);
    return p;
}

std::map<std::string, std::string> describe(const ParameterSet& p) {
    return {{"alpha", p.alpha.str()},
            {"gamma", p.gamma.str()},
            {"r", p.r.str()},
            {"q", io::format_number(p.q)},
            {"epsilon", io::format_number(p.epsilon)},
            {"eta", io::format_number(p.eta)},
            {"S", io::format_number(p.source)},
            {"R", io::format_number(p.removal)}};
}

struct Output {
    fs::path dir;
    std::vector<std::string> files;

    void write(const std::string& name, const io::CsvTable& t) {
        t.write(dir / name);
        files.push_back(name);
    }
};

std::string column_tag(double v) {
    std::string s = io::format_number(v);
    return s;
}

// ---- subcommand bodies ---------------------------------------------------

struct LimitArgs {
    double horizon = 600.0;
    double dtau = 0.01;
    int stride = 1;
    std::string snapshots;
    double kick = 1.0;
};

void simulate_limit_cmd(const ModelParams& mp, const LimitArgs& a, Output& o) {
    const auto setup = LimitSetup::from(mp);
    const auto steady = steady_state_u0(setup);

    LimitRunOptions opt;
    opt.horizon = a.horizon;
    opt.dtau = a.dtau;
    opt.stride = a.stride;
    if (a.snapshots.empty()) {
        for (double t : {523.0, 533.0, 543.0, 553.0, 563.0}) if (t <= a.horizon) opt.snapshot_times.push_back(t);
    } else {
        opt.snapshot_times = parse_values(a.snapshots);
    }
    const auto trace = simulate_limit(setup, steady.u0 + a.kick, [&](double z) { return steady.h0(z); }, opt);

    io::CsvTable u({"t", "u"});
    for (const auto& row : trace.rows) u.add_row({row.tau, row.u + setup.u_shift()});
    o.write("simu-u.csv", u);

    std::vector<std::string> header{"x"};
    for (const auto& s : trace.snapshots) header.push_back("t" + column_tag(s.tau));
    io::CsvTable f(header);
    const int nodes = trace.history.z_nodes();
    for (int j = 1; j < nodes; ++j) {
        std::vector<double> row{setup.x_of_z(trace.history.z_node(j))};
        for (const auto& s : trace.snapshots) row.push_back(setup.flux_factor() * s.h[j]);
        f.add_row(row);
    }
    o.write("simu-f.csv", f);
}

struct BdArgs {
    int k_max = 200;
    double horizon = 10.0;
    double dt = 1e-3;
    int stride = 10;
    std::optional<double> n1;
    std::string closure = "absorbing";
};

void simulate_bd_cmd(const ModelParams& mp, const BdArgs& a, Output& o) {
    BdSimulationOptions opt;
    opt.horizon = a.horizon;
    opt.dt = a.dt;
    opt.stride = a.stride;
    if (a.closure == "absorbing") opt.closure = Closure::absorbing;
    else if (a.closure == "reflecting") opt.closure = Closure::reflecting;
    else throw ParameterError("closure must be 'absorbing' or 'reflecting'");

    const auto c = coefficients(mp, a.k_max);
    ClusterState init{Eigen::VectorXd::Zero(a.k_max), 0.0};
    init.n[0] = a.n1.value_or(1.0 + mp.epsilon());
    const auto trace = simulate(mp, c, init, opt);

    io::CsvTable t({"t", "n1", "mass", "J_kcrit"});
    for (const auto& r : trace.rows) t.add_row({r.t, r.n1, r.mass, r.J_kcrit});
    o.write("bd-trace.csv", t);
}

struct MomentArgs {
    double horizon = 100.0;
    double dtau = 0.01;
    int stride = 10;
    double N0 = 0.0, A0 = 0.0, R0 = 0.0, u0 = 0.0;
};

void simulate_moments_cmd(const ModelParams& mp, const MomentArgs& a, Output& o) {
    const auto rows = simulate_moments(mp.eta(), {a.N0, a.A0, a.R0, a.u0}, a.horizon, a.dtau, a.stride);
    io::CsvTable t({"t", "N", "A", "R", "u"});
    for (const auto& r : rows) t.add_row({r.t, r.state.N, r.state.A, r.state.R, r.state.u});
    o.write("moments.csv", t);
}

struct PeakArgs {
    SharpPeakParams p;
    double horizon = 10.0;
};

void simulate_peak_cmd(const PeakArgs& a, Output& o) {
    const auto trace = simulate_sharp_peak(a.p, a.horizon);
    io::CsvTable t({"t", "u"});
    for (std::size_t i = 0; i < trace.t.size(); ++i) t.add_row({trace.t[i], trace.u[i]});
    o.write("peak-u.csv", t);
    io::CsvTable e({"t", "nucleation"});
    for (const auto& ev : trace.events) e.add_row({ev.t, ev.kind == PeakEvent::Kind::nucleation ? 1.0 : 0.0});
    o.write("peak-events.csv", e);
}

struct SpectralArgs {
    std::string beta;
    std::string nu;
    double t_max = 60.0;
    int count = 11;
    unsigned threads = 0;
};

double single_value(const std::string& text, double fallback) {
    if (text.empty()) return fallback;
    const auto v = parse_values(text);
    if (v.size() != 1) throw ParameterError("expected a single value, got '" + text + "'");
    return v[0];
}

std::vector<double> eta_row(const std::optional<BifurcationPoint>& p) {
    const double nan = std::nan("");
    if (!p) return {nan, nan, nan, nan};
    if (!p->coefficients) return {p->eta0, p->kappa0, nan, nan};
    return {p->eta0, p->kappa0, p->coefficients->eta2, p->coefficients->kappa2};
}

double re_ghat1(const BifurcationPoint& p) { return p.re_ghat1_scaled * std::exp(p.re_ghat1_log_scale); }

void crossings_cmd(const ModelParams& mp, const SpectralArgs& a, Output& o) {
    const double beta = single_value(a.beta, mp.beta());
    const double nu = single_value(a.nu, mp.nu());
    CrossingScanOptions opt;
    opt.t_max = a.t_max;
    const auto scan = find_crossings(beta, nu, opt);
    io::CsvTable t({"t0", "vartheta0", "eta0", "kappa0", "primary", "direction", "eta2", "kappa2", "rehatg11",
                    "abshatL2"});
    const double nan = std::nan("");
    for (const auto& c : scan.points) {
        const auto p = hopf_coefficients(c, beta, nu);
        const auto& h = p.coefficients;
        t.add_row({p.t0, p.vartheta0, p.eta0, p.kappa0, p.primary ? 1.0 : 0.0, double(p.direction),
                   h ? h->eta2 : nan, h ? h->kappa2 : nan, re_ghat1(p), h ? h->abs_L2 : nan});
    }
    o.write("crossings.csv", t);
}

void sweep_cmd(const SpectralArgs& a, Output& o) {
    const auto betas = parse_values(a.beta.empty() ? "0:0.1:10" : a.beta);
    const auto nus = parse_values(a.nu.empty() ? "1/9,3/7,1,7/3,9" : a.nu);
    CrossingScanOptions opt;
    opt.t_max = a.t_max;
    const auto table = sweep(betas, nus, opt, a.threads);

    std::vector<std::string> h1{"beta"}, h2{"beta"};
    for (std::size_t j = 1; j <= nus.size(); ++j) {
        const auto i = std::to_string(j);
        for (const char* c : {"theta0_", "kappa0_", "theta2_", "kappa2_"}) h1.push_back(c + i);
        h2.push_back("abshatL2" + i);
    }
    for (std::size_t j = 1; j <= nus.size(); ++j) h2.push_back("rehatg11" + std::to_string(j));

    io::CsvTable tk(h1), rt(h2);
    for (std::size_t ib = 0; ib < betas.size(); ++ib) {
        std::vector<double> r1{betas[ib]}, r2{betas[ib]}, re;
        for (std::size_t jn = 0; jn < nus.size(); ++jn) {
            const auto& cell = table.at(ib, jn);
            const auto v = eta_row(cell.point);
            r1.insert(r1.end(), v.begin(), v.end());
            const bool full = cell.point && cell.point->coefficients;
            r2.push_back(full ? cell.point->coefficients->abs_L2 : std::nan(""));
            re.push_back(cell.point ? re_ghat1(*cell.point) : std::nan(""));
        }
        r2.insert(r2.end(), re.begin(), re.end());
        tk.add_row(r1);
        rt.add_row(r2);
    }
    o.write("theta-kappa.csv", tk);
    o.write("resonance-transversality.csv", rt);

    std::ofstream log(o.dir / "sweep-log.txt", std::ios::binary);
    for (const auto& line : table.log) log << line << '\n';
    log.close();
    o.files.push_back("sweep-log.txt");
}

void odd_beta_cmd(const SpectralArgs& a, Output& o) {
    const double beta = single_value(a.beta, 3.0);
    const double nu = single_value(a.nu, 0.0);
    if (beta != std::round(beta) || static_cast<long>(beta) % 2 != 1 || beta < 3.0) {
        throw ParameterError("odd-beta: beta must be an odd integer >= 3");
    }
    if (a.count < 1) throw ParameterError("odd-beta: count must be positive");
    CrossingScanOptions opt;
    opt.t_max = a.t_max;
    auto scan = find_crossings(beta, nu, opt);
    auto& pts = scan.points;
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.t0 < y.t0; });
    if (static_cast<int>(pts.size()) < a.count) {
        throw NumericalError("odd-beta: only " + std::to_string(pts.size()) + " crossings resolved below t = " +
                             io::format_number(scan.resolved_to));
    }
    const auto asym = nu == 0.0 ? oddbeta_zero_asymptotics(static_cast<int>(beta), a.count) : OddBetaAsymptotics{};

    io::CsvTable t({"vartheta0", "theta0", "kappa0", "theta2", "kappa2", "rehatg11", "abshatL2", "relerr"});
    for (int n = 0; n < a.count; ++n) {
        const auto p = hopf_coefficients(pts[n], beta, nu);
        const double nan = std::nan("");
        const auto& h = p.coefficients;
        const double relerr = asym.t.empty() ? nan : std::abs(asym.t[n] - p.t0) / p.t0;
        t.add_row({p.vartheta0, p.eta0, p.kappa0, h ? h->eta2 : nan, h ? h->kappa2 : nan, re_ghat1(p),
                   h ? h->abs_L2 : nan, relerr});
    }
    o.write("odd_beta" + column_tag(beta) + ".csv", t);
}

void scales_cmd(const ModelParams& mp, Output& o) {
    const auto s = compute_scales(mp);
    io::CsvTable t({"k_crit", "log10_J_inf", "log10_X", "log10_T", "log10_F", "log10_S", "log10_R"});
    t.add_row({s.k_crit, s.J_inf.log10(), s.X.log10(), s.T.log10(), s.F.log10(), s.S.log10(), s.R.log10()});
    o.write("scales.csv", t);
}

}  // namespace

std::vector<double> parse_values(std::string_view text) {
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t pos = 0;
        while (true) {
            const auto next = text.find(':', pos);
            parts.push_back(text.substr(pos, next - pos));
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
        if (parts.size() != 3) throw ParameterError("range must be start:step:stop");
        const auto a = Fraction::parse(parts[0]);
        const auto h = Fraction::parse(parts[1]);
        const auto b = Fraction::parse(parts[2]);
        if (!(h.value() > 0.0) || b.value() < a.value()) throw ParameterError("range needs step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((b.value() - a.value()) / h.value() + 1e-9));
        if (n > 1000000) throw ParameterError("range too long");
        for (long i = 0; i <= n; ++i) out.push_back((a + Fraction(i) * h).value());
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = text.find(',', pos);
        const auto item = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        out.push_back(Fraction::parse(item).value());
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.size() < 2 || std::find(kSubcommands.begin(), kSubcommands.end(), args[1]) == kSubcommands.end()) {
        if (args.size() >= 2 && (args[1] == "--help" || args[1] == "-h")) {
            out << "usage: bubblelator <subcommand> [options]\nsubcommands:";
            for (const auto& s : kSubcommands) out << ' ' << s;
            out << '\n';
            return ok;
        }
        err << "unknown subcommand" << (args.size() >= 2 ? " '" + args[1] + "'" : std::string()) << "; expected one of:";
        for (const auto& s : kSubcommands) err << ' ' << s;
        err << '\n';
        return unknown_subcommand;
    }
    const std::string sub = args[1];

    CLI::App app{"bubblelator " + sub};
    app.name(sub);
    Common common;
    add_common(app, common);

    LimitArgs limit;
    BdArgs bd;
    MomentArgs mom;
    PeakArgs peak;
    SpectralArgs spectral;
    std::optional<double> bd_n1;

    if (sub == "simulate-limit") {
        app.add_option("--horizon", limit.horizon);
        app.add_option("--dtau", limit.dtau);
        app.add_option("--stride", limit.stride);
        app.add_option("--snapshots", limit.snapshots, "snapshot times, list or range");
        app.add_option("--kick", limit.kick, "initial u above the steady state");
    } else if (sub == "simulate-bd") {
        app.add_option("--kmax", bd.k_max);
        app.add_option("--horizon", bd.horizon);
        app.add_option("--dt", bd.dt);
        app.add_option("--stride", bd.stride);
        app.add_option("--n1", bd_n1, "initial monomer density (default 1 + epsilon)");
        app.add_option("--closure", bd.closure);
    } else if (sub == "simulate-moments") {
        app.add_option("--horizon", mom.horizon);
        app.add_option("--dtau", mom.dtau);
        app.add_option("--stride", mom.stride);
        app.add_option("--N0", mom.N0);
        app.add_option("--A0", mom.A0);
        app.add_option("--R0", mom.R0);
        app.add_option("--u0", mom.u0);
    } else if (sub == "simulate-peak") {
        app.add_option("--f0", peak.p.f0);
        app.add_option("--L", peak.p.L);
        app.add_option("--u-nucl", peak.p.u_nucl);
        app.add_option("--u-init", peak.p.u_init);
        app.add_option("--horizon", peak.horizon);
    } else if (sub != "scales") {
        app.add_option("--beta", spectral.beta, "value, list or start:step:stop");
        app.add_option("--nu", spectral.nu, "value or list");
        app.add_option("--t-max", spectral.t_max);
        if (sub == "odd-beta") app.add_option("--count", spectral.count);
        if (sub == "sweep") app.add_option("--threads", spectral.threads, "worker threads (0: hardware)");
    }

    std::vector<std::string> rest(args.begin() + 2, args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << sub << ": " << e.what() << '\n';
        return parameter_error;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        ParameterSet ps;
        try {
            ps = resolve(common);
        } catch (const std::ios_base::failure& e) {
            err << sub << ": " << e.what() << '\n';
            return unreadable_config;
        }
        const ModelParams mp(ps);

        Output o{common.out_dir, {}};
        fs::create_directories(o.dir);

        if (sub == "simulate-limit") simulate_limit_cmd(mp, limit, o);
        else if (sub == "simulate-bd") {
            bd.n1 = bd_n1;
            simulate_bd_cmd(mp, bd, o);
        } else if (sub == "simulate-moments") simulate_moments_cmd(mp, mom, o);
        else if (sub == "simulate-peak") simulate_peak_cmd(peak, o);
        else if (sub == "crossings") crossings_cmd(mp, spectral, o);
        else if (sub == "sweep") sweep_cmd(spectral, o);
        else if (sub == "odd-beta") odd_beta_cmd(spectral, o);
        else scales_cmd(mp, o);

        io::RunManifest m;
        m.subcommand = sub;
        m.parameters = describe(ps);
        m.config_path = common.config;
        m.out_dir = o.dir;
        m.version = kVersion;
        m.files = o.files;
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m.write(o.dir / "manifest.json");
        for (const auto& f : o.files) out << (o.dir / f).string() << '\n';
        return ok;
    } catch (const ParameterError& e) {
        err << sub << ": " << e.what() << '\n';
        return parameter_error;
    } catch (const NumericalError& e) {
        err << sub << ": " << e.what() << '\n';
        return numerical_error;
    } catch (const std::ios_base::failure& e) {
        err << sub << ": " << e.what() << '\n';
        return io_failure;
    }
}

}  // namespace bubblelator::cli
