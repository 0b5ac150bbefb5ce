#include "bubblelator/becker_doring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bubblelator/errors.hpp"
#include "bubblelator/numerics/log_sum_exp.hpp"
#include "bubblelator/numerics/quadrature.hpp"
#include "bubblelator/numerics/runge_kutta.hpp"

namespace bubblelator {

RateCoefficients coefficients(const ModelParams& params, int k_max) {
    if (k_max < 2) throw ParameterError("coefficients: K_max must be at least 2");
    const double alpha = params.alpha();
    const double gamma = params.gamma();
    const double q = params.q();

    RateCoefficients c;
    c.k_max = k_max;
    c.a.resize(k_max + 1);
    c.b.resize(k_max + 1);
    for (int k = 1; k <= k_max + 1; ++k) {
        const double ka = std::pow(static_cast<double>(k), alpha);
        c.a[k - 1] = ka;
        c.b[k - 1] = ka * (1.0 + q * std::pow(static_cast<double>(k), -gamma));
    }
    c.log_Q.resize(k_max);
    c.log_Q[0] = 0.0;
    for (int k = 2; k <= k_max; ++k) {
        c.log_Q[k - 1] = c.log_Q[k - 2] + std::log(c.a[k - 2]) - std::log(c.b[k - 1]);
    }
    return c;
}

double ClusterState::mass() const {
    double m = 0.0;
    for (int k = 1; k <= size(); ++k) m += k * n[k - 1];
    return m;
}

Eigen::VectorXd ClusterState::fluxes(const RateCoefficients& c, Closure closure) const {
    const int K = size();
    Eigen::VectorXd J(K);
    const double n1 = n[0];
    for (int k = 1; k < K; ++k) J[k - 1] = c.a[k - 1] * n1 * n[k - 1] - c.b[k] * n[k];
    J[K - 1] = closure == Closure::absorbing ? c.a[K - 1] * n1 * n[K - 1] : 0.0;
    return J;
}

namespace {

// Upper bound for sum_{k > k0} k Q_k n1^k given log(Q_{k0} n1^{k0}).
// On each block (k0, 2k0] the term ratio is below
// rho = n1 / (1 + q (2 k0)^-gamma), so the block sum is at most
// 2 k0 A rho/(1-rho) with A the block's first term, and the next block
// starts below A rho^k0.
double equilibrium_tail_bound(double log_first, int k0, double n1, double q, double gamma) {
    double bound = 0.0;
    double log_a = log_first;
    double k = k0;
    for (int block = 0; block < 200; ++block) {
        const double rho = n1 / (1.0 + q * std::pow(2.0 * k, -gamma));
        const double block_bound = 2.0 * k * std::exp(log_a) * rho / (1.0 - rho);
        bound += block_bound;
        log_a += k * std::log(rho);
        k *= 2.0;
        if (block_bound < 1e-30 * bound || !std::isfinite(log_a) || log_a < -745.0) break;
    }
    return bound;
}

}  // namespace

EquilibriumResult equilibrium(const ModelParams& params, int k_max, double n1_bar) {
    if (!(n1_bar > 0.0)) throw ParameterError("equilibrium: n1 must be positive");
    if (n1_bar > 1.0) throw ParameterError("equilibrium: n1 > 1 has no finite-mass equilibrium; use constant_flux_state");

    const auto c = coefficients(params, k_max);
    EquilibriumResult out;
    out.log_n.resize(k_max);
    out.state.n.resize(k_max);
    const double log_n1 = std::log(n1_bar);
    for (int k = 1; k <= k_max; ++k) {
        out.log_n[k - 1] = c.log_Q[k - 1] + k * log_n1;
        out.state.n[k - 1] = std::exp(out.log_n[k - 1]);
    }

    if (n1_bar == 1.0) {
        // Sum k Q_k until the terms drop below 1e-16 of the partial sum.
        const double alpha = params.alpha();
        const double gamma = params.gamma();
        const double q = params.q();
        double log_Q = 0.0;
        double sum = 0.0;
        long k = 1;
        constexpr long kLimit = 100000000;
        for (; k < kLimit; ++k) {
            const double term = static_cast<double>(k) * std::exp(log_Q);
            sum += term;
            if (term < 1e-16 * sum) break;
            const double kp = static_cast<double>(k + 1);
            log_Q += alpha * std::log(static_cast<double>(k)) - alpha * std::log(kp) -
                     std::log1p(q * std::pow(kp, -gamma));
        }
        if (k >= kLimit) throw NumericalError("equilibrium: critical-mass series did not converge");
        out.has_critical_mass = true;
        out.rho_s = sum;
        out.rho_s_terms = static_cast<int>(k);
        out.rho_s_tail_bound = equilibrium_tail_bound(log_Q, static_cast<int>(k), 1.0, q, gamma);
    }
    return out;
}

ConstantFluxState constant_flux_state(const ModelParams& params, double n1_bar, int k_max) {
    if (!(n1_bar > 1.0)) throw ParameterError("constant_flux_state: requires n1 > 1");
    const auto c = coefficients(params, k_max);
    const double log_n1 = std::log(n1_bar);
    const int K = k_max;

    ConstantFluxState s;
    s.n1_bar = n1_bar;
    s.log_aQ.resize(K);
    // term_l = 1 / (a_l Q_l n1^(l+1))
    Eigen::VectorXd log_term(K);
    double log_max = -std::numeric_limits<double>::infinity();
    for (int l = 1; l <= K; ++l) {
        s.log_aQ[l - 1] = std::log(c.a[l - 1]) + c.log_Q[l - 1];
        log_term[l - 1] = -s.log_aQ[l - 1] - (l + 1) * log_n1;
        log_max = std::max(log_max, log_term[l - 1]);
    }
    if (log_term[K - 1] > log_max + std::log(1e-16)) {
        throw NumericalError("constant_flux_state: series has not decayed within K_max; increase K_max");
    }

    // Geometric bound on the neglected tail: term ratios decrease toward 1/n1.
    const double q = params.q();
    const double gamma = params.gamma();
    const double rho = (1.0 + q * std::pow(static_cast<double>(K + 1), -gamma)) / n1_bar;
    const double log_tail = log_term[K - 1] + std::log(rho / (1.0 - rho));

    // Suffix sums S_k = sum_{l>=k} term_l, right to left.
    Eigen::VectorXd log_suffix(K);
    double acc = log_tail;
    for (int l = K; l >= 1; --l) {
        acc = numerics::log_add_exp(acc, log_term[l - 1]);
        log_suffix[l - 1] = acc;
    }
    s.log_J = -log_suffix[0];
    s.J = std::exp(s.log_J);

    s.retained = 0;
    for (int k = 1; k <= K; ++k) {
        if (log_tail - log_suffix[k - 1] < std::log(1e-14)) s.retained = k;
        else break;
    }

    s.log_N.resize(K);
    s.N.resize(K);
    for (int k = 1; k <= K; ++k) {
        s.log_N[k - 1] = s.log_J + c.log_Q[k - 1] + k * log_n1 + log_suffix[k - 1];
        s.N[k - 1] = std::exp(s.log_N[k - 1]);
    }

    s.max_residual = 0.0;
    for (int k = 2; k <= s.retained; ++k) {
        const double res = c.a[k - 2] * n1_bar * s.N[k - 2] - c.b[k - 1] * s.N[k - 1] - s.J;
        s.max_residual = std::max(s.max_residual, std::abs(res) / s.J);
    }

    // G(k) = -k log n1 + int_1^k log(1 + q l^-gamma) dl, so G(1) = -log n1.
    s.G.resize(K);
    double integral = 0.0;
    s.G[0] = -log_n1;
    auto integrand = [q, gamma](double l) { return std::log1p(q * std::pow(l, -gamma)); };
    for (int k = 2; k <= K; ++k) {
        integral += numerics::integrate_adaptive(integrand, {double(k - 1), double(k)}, 1e-13).value;
        s.G[k - 1] = -k * log_n1 + integral;
    }

    const double u = monomer_rescale(n1_bar, params);
    s.log_J_laplace = log_arrhenius_flux(params.epsilon(), gamma, q) + u;
    return s;
}

SimulationTrace simulate(const ModelParams& params, const RateCoefficients& coeffs,
                         const ClusterState& initial, const BdSimulationOptions& options) {
    const int K = initial.size();
    if (K < 2) throw ParameterError("simulate: need at least two cluster sizes");
    if (coeffs.k_max < K) throw ParameterError("simulate: coefficients shorter than the state");
    if (!(options.dt > 0.0) || !(options.horizon >= 0.0)) throw ParameterError("simulate: invalid dt or horizon");
    if (options.stride < 1) throw ParameterError("simulate: stride must be positive");
    if ((initial.n.array() < 0.0).any()) throw ParameterError("simulate: negative initial density");

    const double S = params.source();
    const double R = params.removal();
    const double r = params.r();
    const bool absorbing = options.closure == Closure::absorbing;

    Eigen::ArrayXd kk = Eigen::ArrayXd::LinSpaced(K, 1.0, K);
    Eigen::ArrayXd sink = R * kk.pow(r);
    sink[0] = 0.0;  // monomers are not removed
    const Eigen::ArrayXd a = coeffs.a.head(K).array();
    const Eigen::ArrayXd b = coeffs.b.head(K).array();
    const Eigen::ArrayXd b_next = coeffs.b.segment(1, K - 1).array();

    // y = (n_1..n_K, leaked, removed)
    auto rhs = [&](double, const Eigen::VectorXd& y) {
        Eigen::VectorXd dy(K + 2);
        const auto n = y.head(K).array();
        const double n1 = n[0];
        Eigen::ArrayXd J(K);
        J.head(K - 1) = a.head(K - 1) * n1 * n.head(K - 1) - b_next * n.tail(K - 1);
        J[K - 1] = absorbing ? a[K - 1] * n1 * n[K - 1] : 0.0;
        dy[0] = -J[0] - J.sum() + S;
        dy.segment(1, K - 1) = (J.head(K - 1) - J.tail(K - 1) - sink.tail(K - 1) * n.tail(K - 1)).matrix();
        dy[K] = (K + 1) * J[K - 1];
        dy[K + 1] = (sink * kk * n).sum();
        return dy;
    };

    auto check_stability = [&](double n1) {
        const double rate = (a * n1 + b + sink).maxCoeff();
        if (options.dt * rate >= 1.0) {
            throw NumericalError("simulate: dt violates the explicit stability bound dt*max(a_k n1 + b_k + R k^r) < 1");
        }
    };

    const int k_crit = std::clamp(static_cast<int>(std::lround(params.k_crit())), 1, K - 1);
    const auto steps = static_cast<long>(std::ceil(options.horizon / options.dt - 1e-9));

    Eigen::VectorXd y(K + 2);
    y.head(K) = initial.n;
    y[K] = 0.0;
    y[K + 1] = 0.0;
    double t = initial.t;
    double n1_checked = y[0];
    check_stability(n1_checked);

    SimulationTrace trace;
    auto record = [&]() {
        ClusterState st{y.head(K), t};
        const auto J = st.fluxes(coeffs, options.closure);
        trace.rows.push_back({t, y[0], st.mass(), J[k_crit - 1], y[K], y[K + 1]});
    };
    record();

    for (long i = 0; i < steps; ++i) {
        const double dt = std::min(options.dt, initial.t + options.horizon - t);
        y = numerics::rk_step(rhs, t, y, dt, numerics::RkMethod::rk4);
        t = (i + 1 == steps) ? initial.t + options.horizon : t + dt;
        if (!y.allFinite()) throw NumericalError("simulate: overflow");
        if (y.head(K).minCoeff() < -1e-13) throw NumericalError("simulate: negative density; dt too large");
        if (y[0] > 2.0 * n1_checked) {
            n1_checked = y[0];
            check_stability(n1_checked);
        }
        if ((i + 1) % options.stride == 0 || i + 1 == steps) record();
    }

    trace.final_state = ClusterState{y.head(K), t};
    trace.leaked_mass = y[K];
    trace.removed_mass = y[K + 1];
    trace.injected_mass = S * (t - initial.t);
    return trace;
}

}  // namespace bubblelator
