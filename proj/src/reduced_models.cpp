#include "bubblelator/reduced_models.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "bubblelator/errors.hpp"
#include "bubblelator/numerics/runge_kutta.hpp"

namespace bubblelator {

Eigen::Vector4d moment_rhs(double eta, const MomentState& s) {
    return {std::exp(s.u) - eta * s.N, 2.0 / 3.0 * s.R - eta * s.A, s.N / 3.0 - eta * s.R, 1.0 - s.A};
}

std::vector<MomentRow> simulate_moments(double eta, const MomentState& initial, double horizon, double dtau,
                                        int stride) {
    if (!(eta >= 0.0)) throw ParameterError("simulate_moments: eta must be nonnegative");
    if (!(horizon > 0.0) || !(dtau > 0.0) || stride < 1) throw ParameterError("simulate_moments: invalid horizon or step");

    if (!(initial.u <= 50.0)) throw NumericalError("simulate_moments: initial u above +50");

    auto rhs = [eta](double, const Eigen::Vector4d& y) { return moment_rhs(eta, MomentState::from(y)); };
    const auto steps = static_cast<long>(std::ceil(horizon / dtau - 1e-9));
    std::vector<MomentRow> rows{{0.0, initial}};
    Eigen::Vector4d y = initial.vec();
    double t = 0.0;
    for (long i = 0; i < steps; ++i) {
        const double dt = std::min(dtau, horizon - t);
        y = numerics::rk_step(rhs, t, y, dt, numerics::RkMethod::rk4);
        t = i + 1 == steps ? horizon : t + dt;
        if (!(y[3] <= 50.0) || !y.allFinite()) throw NumericalError("simulate_moments: u exceeded +50 (blow-up)");
        if ((i + 1) % stride == 0 || i + 1 == steps) rows.push_back({t, MomentState::from(y)});
    }
    return rows;
}

MomentState moment_steady_state(double eta) {
    if (!(eta > 0.0)) throw ParameterError("moment_steady_state: eta must be positive");
    return {4.5 * eta * eta, 1.0, 1.5 * eta, std::log(4.5 * eta * eta * eta)};
}

SharpPeakTrace simulate_sharp_peak(const SharpPeakParams& p, double horizon) {
    if (!(p.f0 > 1.0)) throw ParameterError("simulate_sharp_peak: f0 must exceed 1");
    if (!(p.L > 0.0)) throw ParameterError("simulate_sharp_peak: L must be positive");
    if (!(horizon > 0.0)) throw ParameterError("simulate_sharp_peak: horizon must be positive");
    if (!(p.u_init < p.u_nucl)) throw ParameterError("simulate_sharp_peak: u(0) must lie below the threshold");

    SharpPeakTrace out;
    std::deque<double> removals;  // pending removal times, ascending
    double t = 0.0;
    double u = p.u_init;
    out.t.push_back(t);
    out.u.push_back(u);

    while (t < horizon) {
        const double slope = 1.0 - p.f0 * static_cast<double>(removals.size());
        // u can only reach the threshold from below while rising
        const double t_nucl = slope > 0.0 && u < p.u_nucl ? t + (p.u_nucl - u) / slope
                                                          : std::numeric_limits<double>::infinity();
        const double t_rm = removals.empty() ? std::numeric_limits<double>::infinity() : removals.front();
        const double t_next = std::min({t_nucl, t_rm, horizon});
        u = t_next == t_nucl ? p.u_nucl : u + slope * (t_next - t);
        t = t_next;
        out.t.push_back(t);
        out.u.push_back(u);
        if (t >= horizon && t != t_nucl && t != t_rm) break;
        if (t == t_nucl) {
            out.events.push_back({t, PeakEvent::Kind::nucleation});
            removals.push_back(t + p.L);
        } else if (t == t_rm) {
            out.events.push_back({t, PeakEvent::Kind::removal});
            removals.pop_front();
        }
        if (t >= horizon) break;
    }
    return out;
}

}  // namespace bubblelator
