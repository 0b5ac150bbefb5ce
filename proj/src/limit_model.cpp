#include "bubblelator/limit_model.hpp"

#include <algorithm>
#include <cmath>

#include "bubblelator/errors.hpp"
#include "bubblelator/numerics/quadrature.hpp"
#include "bubblelator/spectral.hpp"

namespace bubblelator {

double LimitSetup::eta_x() const { return eta / std::pow(speed(), beta); }
double LimitSetup::u_shift() const { return -nu * std::log(speed()); }
double LimitSetup::x_of_z(double z) const { return std::pow(speed() * z, 1.0 + nu); }
double LimitSetup::z_of_x(double x) const { return std::pow(x, speed()) / speed(); }
double LimitSetup::flux_factor() const { return std::pow(speed(), -nu); }
double LimitSetup::decay(double z) const { return std::exp(-eta * std::pow(z, beta + 1.0) / (beta + 1.0)); }

double SteadyState::h0(double z) const { return std::exp(u0) * setup.decay(z); }

SteadyState steady_state_u0(double beta, double nu, double eta) {
    if (!(eta > 0.0)) throw ParameterError("steady_state_u0: eta must be positive");
    if (!(beta >= 0.0) || !(nu >= 0.0)) throw ParameterError("steady_state_u0: beta and nu must be nonnegative");
    const double u0 = (nu + 1.0) / (beta + 1.0) * std::log(eta) - std::log(G_at_zero(beta, nu));
    LimitSetup setup;
    setup.beta = beta;
    setup.nu = nu;
    setup.eta = eta;
    const auto alpha_r = exponents_from_beta_nu(beta, nu);
    setup.alpha = alpha_r.alpha;
    setup.r = alpha_r.r;
    return {u0, setup};
}

SteadyState steady_state_u0(const LimitSetup& setup) {
    auto s = steady_state_u0(setup.beta, setup.nu, setup.eta);
    s.setup = setup;
    return s;
}

double tail_cutoff(double beta, double nu, double eta, double ratio) {
    auto envelope = [=](double z) { return std::exp(-eta * std::pow(z, beta + 1.0) / (beta + 1.0)) * std::pow(z, nu); };
    return numerics::truncation_point(envelope, ratio);
}

std::vector<double> power_weights(double h, int nodes, double nu) {
    std::vector<double> w(nodes);
    // Trapezoid for g z^nu with the leading endpoint error h^(1+nu) zeta(-nu) g(0) removed.
    w[0] = -std::riemann_zeta(-nu) * std::pow(h, 1.0 + nu);
    for (int j = 1; j < nodes; ++j) w[j] = h * std::pow(h * j, nu);
    if (nu == 0.0) w[0] = 0.5 * h;
    return w;
}

FluxHistory::FluxHistory(const LimitSetup& setup, double dtau, std::vector<double> h0_nodes)
    : setup_(setup), dtau_(dtau), h0_(std::move(h0_nodes)) {
    if (h0_.size() < 2) throw ParameterError("FluxHistory: need at least two z nodes");
}

double FluxHistory::u_at(double tau) const {
    if (u_.empty()) throw ParameterError("FluxHistory: empty history");
    const double s = tau / dtau_;
    if (s < -1e-9 || s > static_cast<double>(u_.size() - 1) + 1e-9) {
        throw ParameterError("FluxHistory: tau outside the simulated range");
    }
    const auto last = static_cast<long>(u_.size()) - 1;
    const long i = std::clamp(static_cast<long>(std::floor(s)), 0L, std::max(0L, last - 1));
    if (last == 0) return u_[0];
    const double frac = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
    return (1.0 - frac) * u_[i] + frac * u_[i + 1];
}

double FluxHistory::h(double z, double tau) const {
    if (tau < -1e-12 || tau > tau_end() + 1e-9) throw ParameterError("reconstruct_flux: tau outside the simulated range");
    auto h0_at = [this](double s) {
        const double p = s / dtau_;
        const auto last = static_cast<double>(h0_.size() - 1);
        if (p >= last) return p > last + 1e-9 ? 0.0 : h0_.back();
        const auto i = static_cast<std::size_t>(std::floor(p));
        const double frac = p - static_cast<double>(i);
        return (1.0 - frac) * h0_[i] + frac * h0_[i + 1];
    };
    if (tau <= 0.0) return h0_at(z);
    const double boundary = z <= tau ? std::exp(u_at(tau - z)) * setup_.decay(z) : 0.0;
    const double transported = z >= tau ? h0_at(z - tau) * setup_.decay(z) / setup_.decay(z - tau) : 0.0;
    if (z < tau) return boundary;
    if (z > tau) return transported;
    return 0.5 * (boundary + transported);
}

std::vector<double> FluxHistory::profile_nodes(int n) const {
    std::vector<double> out(h0_.size());
    for (int j = 0; j < z_nodes(); ++j) out[j] = h(z_node(j), dtau_ * n);
    return out;
}

std::vector<double> reconstruct_flux(const FluxHistory& history, double tau, Coordinates coords,
                                     const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    const auto& s = history.setup();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (coords == Coordinates::z) {
            out[i] = history.h(grid[i], tau);
        } else {
            out[i] = s.flux_factor() * history.h(s.z_of_x(grid[i]), tau);
        }
    }
    return out;
}

LimitTrace simulate_limit(const LimitSetup& setup, double u0, const std::function<double(double)>& h0,
                          const LimitRunOptions& options) {
    const double dt = options.dtau;
    if (!(dt > 0.0) || !(options.horizon > 0.0)) throw ParameterError("simulate_limit: invalid horizon or step");
    if (options.stride < 1) throw ParameterError("simulate_limit: stride must be positive");
    if (!(setup.eta > 0.0) || setup.beta < 0.0 || setup.nu < 0.0) throw ParameterError("simulate_limit: invalid exponents");

    const double z_cut = options.z_max > 0.0 ? options.z_max : tail_cutoff(setup.beta, setup.nu, setup.eta);
    const int J = static_cast<int>(std::ceil(z_cut / dt - 1e-9));
    const auto steps = static_cast<long>(std::llround(options.horizon / dt));
    if (std::abs(steps * dt - options.horizon) > 1e-9 * std::max(1.0, options.horizon)) {
        throw ParameterError("simulate_limit: dtau must divide the horizon");
    }

    std::vector<long> snapshot_steps;
    for (double ts : options.snapshot_times) {
        const long n = std::llround(ts / dt);
        if (std::abs(n * dt - ts) > 1e-9 * std::max(1.0, ts) || n < 0 || n > steps) {
            throw ParameterError("simulate_limit: snapshot time not on the grid or outside the horizon");
        }
        snapshot_steps.push_back(n);
    }

    std::vector<double> w(J + 1), h0n(J + 1), P(J + 1);
    for (int j = 0; j <= J; ++j) {
        const double z = dt * j;
        w[j] = setup.decay(z);
        h0n[j] = h0(z);
        if (!(h0n[j] >= 0.0) || !std::isfinite(h0n[j])) throw ParameterError("simulate_limit: initial profile must be finite and nonnegative");
        P[j] = h0n[j] / w[j];
    }

    // Weighted nodes: growth, number, mass and removal moments of h = g w.
    // With dx = x^alpha dz and x = (c z)^(1/c), the size-frame moments
    // int x^p f dx are z-moments of h with exponent p/c.
    const double c = setup.speed();
    const auto pw = power_weights(dt, J + 1, setup.nu);
    const auto tw = power_weights(dt, J + 1, 0.0);
    const auto mpw = power_weights(dt, J + 1, 1.0 / c);
    const auto rpw = power_weights(dt, J + 1, (setup.r + 1.0) / c);
    const double ff = setup.flux_factor();
    const double mass_scale = ff * std::pow(c, 1.0 / c);
    const double removal_scale = ff * std::pow(c, (setup.r + 1.0) / c);
    std::vector<double> cw(J + 1), nw(J + 1), mw(J + 1), rw(J + 1);
    for (int j = 0; j <= J; ++j) {
        cw[j] = pw[j] * w[j];
        nw[j] = tw[j] * w[j];
        mw[j] = mass_scale * mpw[j] * w[j];
        rw[j] = removal_scale * rpw[j] * w[j];
    }

    std::vector<double> E;
    E.reserve(steps + 1);
    FluxHistory history(setup, dt, h0n);
    std::vector<double> u_hist;
    u_hist.reserve(steps + 1);

    // g_j(n) = h(z_j, tau_n) / w_j
    auto g = [&](int j, long n) -> double {
        if (j < n) return E[n - j];
        if (j == n) return 0.5 * (E[0] + P[0] * w[0]);
        return P[j - n];
    };
    // sum over j >= 1 of cw_j g_j(n)
    auto interior = [&](long n) {
        double s = 0.0;
        const long split = std::min<long>(n, J + 1);
        for (long j = 1; j < split; ++j) s += cw[j] * E[n - j];
        if (n >= 1 && n <= J) s += cw[n] * 0.5 * (E[0] + P[0] * w[0]);
        for (long j = std::max<long>(n + 1, 1); j <= J; ++j) s += cw[j] * P[j - n];
        return s;
    };

    LimitTrace trace{{}, {}, history, setup.eta_x()};
    auto record = [&](long n, double u, double growth) {
        LimitTraceRow row{};
        row.tau = dt * n;
        row.u = u;
        row.growth = growth;
        row.du_dtau = 1.0 - growth;
        double num = 0.0, mass = 0.0, rem = 0.0;
        for (int j = 0; j <= J; ++j) {
            const double gj = g(j, n);
            num += nw[j] * gj;
            mass += mw[j] * gj;
            rem += rw[j] * gj;
        }
        row.number = num;
        row.mass = mass;
        row.removal = rem;
        const double tail = cw[J] * g(J, n);
        if (tail > 1e-8 * std::max(growth, 1.0)) throw NumericalError("simulate_limit: flux tail not negligible at z_max");
        trace.rows.push_back(row);
    };
    auto snapshot = [&](long n) {
        FluxSnapshot s{dt * n, std::vector<double>(J + 1)};
        for (int j = 0; j <= J; ++j) s.h[j] = g(j, n) * w[j];
        trace.snapshots.push_back(std::move(s));
    };
    auto take_snapshots = [&](long n) {
        for (long ns : snapshot_steps) if (ns == n) snapshot(n);
    };

    double u = u0;
    if (!(u <= 50.0)) throw NumericalError("simulate_limit: u exceeded +50 (blow-up)");
    E.push_back(std::exp(u));
    u_hist.push_back(u);
    double growth = cw[0] * g(0, 0) + interior(0);
    record(0, u, growth);
    take_snapshots(0);

    for (long n = 0; n < steps; ++n) {
        const double F_n = 1.0 - growth;
        const double s_next = interior(n + 1);
        const double u_pred = u + dt * F_n;
        const double F_pred = 1.0 - s_next - cw[0] * std::exp(u_pred);
        u += 0.5 * dt * (F_n + F_pred);
        if (!(u <= 50.0)) throw NumericalError("simulate_limit: u exceeded +50 (blow-up)");
        E.push_back(std::exp(u));
        u_hist.push_back(u);
        growth = s_next + cw[0] * E.back();
        if ((n + 1) % options.stride == 0 || n + 1 == steps) record(n + 1, u, growth);
        take_snapshots(n + 1);
    }

    for (double v : u_hist) trace.history.append(v);
    for (std::size_t i = 1; i + 1 < trace.rows.size(); ++i) trace.rows[i].residual = mass_balance_residual(trace, i);
    std::sort(trace.snapshots.begin(), trace.snapshots.end(),
              [](const FluxSnapshot& a, const FluxSnapshot& b) { return a.tau < b.tau; });
    return trace;
}

double mass_balance_residual(const LimitTrace& trace, std::size_t i) {
    const auto& rows = trace.rows;
    if (rows.size() < 3) throw ParameterError("mass_balance_residual: needs at least three rows");
    if (i == 0 || i + 1 >= rows.size()) throw ParameterError("mass_balance_residual: central difference needs neighbours");
    const auto& a = rows[i - 1];
    const auto& b = rows[i + 1];
    const double d_total = ((b.u + b.mass) - (a.u + a.mass)) / (b.tau - a.tau);
    return d_total - 1.0 + trace.eta_x * rows[i].removal;
}

}  // namespace bubblelator
