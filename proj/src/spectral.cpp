#include "bubblelator/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "bubblelator/errors.hpp"
#include "bubblelator/limit_model.hpp"
#include "bubblelator/numerics/quadrature.hpp"
#include "bubblelator/numerics/roots.hpp"

namespace bubblelator {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double v) { return v == std::floor(v) && std::abs(v) < 1e15; }
bool is_odd_integer(double v) { return is_integer(v) && std::fmod(v, 2.0) == 1.0; }

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Re G(it) (nu even) or Im G(it) (nu odd) for odd integer beta, t > 0,
// integrated along Im y = -sigma through the saddles
// y = t^(1/beta) exp(-i pi/(2 beta)) and its mirror image.  Returns the
// value divided by exp(log_scale).
struct ScaledComponent {
    double value;
    double error;
    double log_scale;
};

ScaledComponent shifted_contour_component(double beta, double nu, double t, double rel_tol) {
    const double sigma = std::pow(t, 1.0 / beta) * std::sin(kPi / (2.0 * beta));
    const int power = static_cast<int>(beta) + 1;
    const int nu_int = static_cast<int>(nu);
    const bool take_imag = nu_int % 2 == 1;

    auto exponent = [=](cplx y) {
        cplx e = -std::pow(y, power) / static_cast<double>(power) - cplx(0.0, t) * y;
        if (nu_int > 0) e += static_cast<double>(nu_int) * std::log(y);
        return e;
    };
    const cplx saddle = std::polar(std::pow(t, 1.0 / beta), -kPi / (2.0 * beta));
    const double log_scale = exponent(saddle).real();

    auto integrand = [&](double s) {
        const cplx v = std::exp(exponent(cplx(s, -sigma)) - log_scale);
        return take_imag ? v.imag() : v.real();
    };
    auto envelope = [&](double s) { return std::exp(exponent(cplx(s, -sigma)).real() - log_scale); };

    const double s_cut = numerics::truncation_point(envelope, 1e-3 * rel_tol);
    const double freq = t + std::pow(s_cut * s_cut + sigma * sigma, 0.5 * beta) + nu / sigma;
    const double width = std::min(s_cut / 8.0, 2.0 * kPi / freq / 10.0);
    const auto n = static_cast<std::size_t>(std::ceil(s_cut / width));
    std::vector<double> breaks(n + 1);
    for (std::size_t i = 0; i <= n; ++i) breaks[i] = s_cut * static_cast<double>(i) / static_cast<double>(n);
    const auto r = numerics::integrate_adaptive(integrand, breaks, rel_tol);
    return {r.value, r.error, log_scale};
}

}  // namespace

int CharacteristicEvaluation::real_sign() const {
    return small == Small::real ? sign_of(small_scaled) : sign_of(value.real());
}

int CharacteristicEvaluation::imag_sign() const {
    return small == Small::imag ? sign_of(small_scaled) : sign_of(value.imag());
}

double CharacteristicEvaluation::real_over_abs() const {
    const double a = std::abs(value);
    if (small != Small::real) return value.real() / a;
    if (small_scaled == 0.0) return 0.0;
    return sign_of(small_scaled) * std::exp(std::log(std::abs(small_scaled)) + small_log_scale - std::log(a));
}

double G_at_zero(double beta, double nu) {
    return std::pow(beta + 1.0, (nu - beta) / (beta + 1.0)) * std::tgamma((nu + 1.0) / (beta + 1.0));
}

CharacteristicEvaluation evaluate_G(double beta, double nu, cplx lambda, double rel_tol) {
    if (!(beta >= 0.0) || !(nu >= 0.0)) throw ParameterError("evaluate_G: beta and nu must be nonnegative");
    if (!(lambda.real() > -1.0)) throw ParameterError("evaluate_G: requires Re(lambda) > -1");

    CharacteristicEvaluation out;
    out.lambda = lambda;
    if (lambda == cplx(0.0, 0.0)) {
        out.value = G_at_zero(beta, nu);
        out.l1 = out.value.real();
        return out;
    }

    // Integrate along z = s e^(-i theta sign(Im lambda)).  The rotation removes
    // most of the oscillation of exp(-i Im(lambda) z) and keeps
    // Re z^(beta+1) > 0, so the integral is unchanged.
    const double b1 = beta + 1.0;
    const double re = lambda.real();
    const double im = lambda.imag();
    const double theta_max = 0.9 * kPi / (2.0 * b1);
    const double theta = std::copysign(std::min(std::atan2(std::abs(im), 1.0 + std::max(re, 0.0)), theta_max), im);
    const cplx rot = std::polar(1.0, -theta);
    const cplx rot_b1 = std::polar(1.0, -b1 * theta);
    const cplx lam_rot = lambda * rot;
    const cplx jac = std::polar(1.0, -(nu + 1.0) * theta);  // dz z^nu = s^nu ds e^(-i (nu+1) theta)
    auto integrand = [=](double s) -> cplx {
        if (s == 0.0) return nu == 0.0 ? jac : cplx(0.0, 0.0);
        const cplx e = -std::pow(s, b1) / b1 * rot_b1 - lam_rot * s + nu * std::log(s);
        return std::exp(e) * jac;
    };
    auto envelope = [=](double s) {
        return std::exp(-std::pow(s, b1) / b1 * rot_b1.real() - lam_rot.real() * s + nu * std::log(s));
    };
    const double freq = std::abs(lam_rot.imag());
    const double wavelength = freq > 0.0 ? 2.0 * kPi / freq : 0.0;

    const auto r = numerics::integrate_semiinfinite(integrand, envelope, wavelength, rel_tol);
    if (r.error > 1e-10 * r.l1) throw NumericalError("evaluate_G: quadrature did not reach 1e-10 relative accuracy");
    out.value = r.value;
    out.error = r.error;
    out.l1 = r.l1;

    if (re == 0.0 && im != 0.0 && is_odd_integer(beta) && is_integer(nu)) {
        const auto c = shifted_contour_component(beta, nu, std::abs(im), rel_tol);
        double scaled = c.value;
        const bool imag_part = static_cast<long>(nu) % 2 == 1;
        if (imag_part && im < 0.0) scaled = -scaled;  // G(conj lambda) = conj G(lambda)
        out.small = imag_part ? CharacteristicEvaluation::Small::imag : CharacteristicEvaluation::Small::real;
        out.small_scaled = scaled;
        out.small_error_scaled = c.error;
        out.small_log_scale = c.log_scale;
        const double v = scaled * std::exp(c.log_scale);
        out.value = imag_part ? cplx(out.value.real(), v) : cplx(v, out.value.imag());
    }
    return out;
}

namespace {

BifurcationPoint coarse_point(double beta, double nu, double t0, const CharacteristicEvaluation& g) {
    BifurcationPoint p;
    p.t0 = t0;
    p.vartheta0 = g.abs() / t0;
    p.eta0 = std::pow(p.vartheta0 / G_at_zero(beta, nu), beta + 1.0);
    p.kappa0 = t0 * std::pow(p.eta0, 1.0 / (beta + 1.0));
    p.phase_error = std::abs(g.real_over_abs());
    return p;
}

double wrap_pi(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

CrossingScan find_crossings(double beta, double nu, const CrossingScanOptions& options) {
    if (!(options.t_min > 0.0) || !(options.t_max > options.t_min) || options.grid_points < 2) {
        throw ParameterError("find_crossings: invalid t range");
    }
    auto G = [&](double t) { return evaluate_G(beta, nu, cplx(0.0, t)); };

    struct Sample {
        double t;
        CharacteristicEvaluation g;
    };
    std::vector<Sample> samples;
    CrossingScan scan;
    scan.resolved_to = options.t_min;

    auto resolved = [&](const CharacteristicEvaluation& g) { return g.error <= options.resolution_limit * g.abs(); };

    // Appends samples on (a.t, t_b], bisecting while the phase jumps by more than pi/2.
    auto advance = [&](double t_b) -> bool {
        std::vector<std::pair<double, int>> pending{{t_b, 0}};
        while (!pending.empty()) {
            const auto [t, depth] = pending.back();
            auto g = G(t);
            if (!resolved(g)) return false;
            const auto& last = samples.back();
            if (std::abs(wrap_pi(g.phase() - last.g.phase())) > 0.5 * kPi) {
                if (depth >= options.max_refinements) {
                    throw NumericalError("find_crossings: phase could not be unwrapped after maximal refinement");
                }
                pending.push_back({0.5 * (last.t + t), depth + 1});
                continue;
            }
            samples.push_back({t, std::move(g)});
            pending.pop_back();
        }
        return true;
    };

    const double log_a = std::log(options.t_min);
    const double log_b = std::log(options.t_max);
    {
        auto g0 = G(options.t_min);
        if (!resolved(g0)) throw NumericalError("find_crossings: G(it) unresolved at the start of the scan");
        samples.push_back({options.t_min, std::move(g0)});
    }
    for (int i = 1; i < options.grid_points; ++i) {
        const double t = i + 1 == options.grid_points
                             ? options.t_max
                             : std::exp(log_a + (log_b - log_a) * i / (options.grid_points - 1));
        if (!advance(t)) {
            scan.truncated = true;
            break;
        }
    }
    scan.resolved_to = samples.back().t;

    auto phase_offset = [&](double t) { return G(t).real_over_abs(); };
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        if (a.g.imag_sign() >= 0 || b.g.imag_sign() >= 0) continue;
        const int sa = a.g.real_sign();
        const int sb = b.g.real_sign();
        if (sa == sb || sb == 0) continue;
        double t0 = a.t;
        if (sa != 0) {
            const double tol = 4.0 * std::numeric_limits<double>::epsilon() * b.t;
            t0 = numerics::find_bracketed_root(phase_offset, a.t, b.t, tol).root;
        }
        scan.points.push_back(coarse_point(beta, nu, t0, G(t0)));
    }

    std::sort(scan.points.begin(), scan.points.end(),
              [](const BifurcationPoint& x, const BifurcationPoint& y) { return x.eta0 > y.eta0; });
    if (!scan.points.empty()) scan.points.front().primary = true;
    return scan;
}

BifurcationPoint hopf_coefficients(const BifurcationPoint& point, double beta, double nu) {
    if (!(point.t0 > 0.0) || !(point.eta0 > 0.0)) throw ParameterError("hopf_coefficients: invalid crossing");
    BifurcationPoint p = point;
    const double t0 = p.t0;
    const double b1 = beta + 1.0;

    HopfCoefficients h{};
    h.u0 = steady_state_u0(beta, nu, p.eta0).u0;
    h.delta0 = std::pow(p.kappa0, nu + 2.0) / std::exp(h.u0);
    h.mu0 = p.eta0 / (b1 * std::pow(p.kappa0, b1));

    // With y = t0 z: ghat0(k) = t0^(nu+1) G_{beta,nu}(i k t0),
    // ghat1(k) = -t0^(nu+beta+2) G_{beta,nu+beta+1}(i k t0).
    const auto g01 = evaluate_G(beta, nu, cplx(0.0, t0));
    const auto g02 = evaluate_G(beta, nu, cplx(0.0, 2.0 * t0));
    const auto g11 = evaluate_G(beta, nu + b1, cplx(0.0, t0));
    const double s0 = std::pow(t0, nu + 1.0);
    const double s1 = std::pow(t0, nu + b1 + 1.0);
    h.ghat0_1 = s0 * g01.value;
    h.ghat0_2 = s0 * g02.value;
    h.ghat1_1 = -s1 * g11.value;

    bool transversal = true;
    if (g11.small == CharacteristicEvaluation::Small::real) {
        p.re_ghat1_scaled = -g11.small_scaled;
        p.re_ghat1_log_scale = g11.small_log_scale + std::log(s1);
        transversal = std::abs(g11.small_scaled) > g11.small_error_scaled;
    } else {
        p.re_ghat1_scaled = h.ghat1_1.real();
        p.re_ghat1_log_scale = 0.0;
        transversal = std::abs(h.ghat1_1.real()) >= 1e-10 * std::abs(h.ghat1_1);
    }
    p.direction = -sign_of(p.re_ghat1_scaled);

    const cplx L2 = cplx(0.0, 2.0 * h.delta0) + h.ghat0_2;
    h.abs_L2 = std::abs(L2);
    if (!transversal) {
        p.status = BifurcationPoint::Status::non_transversal;
        p.coefficients.reset();
        return p;
    }
    if (h.abs_L2 <= 1e-10 * (2.0 * h.delta0 + std::abs(h.ghat0_2))) {
        p.status = BifurcationPoint::Status::resonant;
        p.coefficients.reset();
        return p;
    }

    const double re_g11 = p.re_ghat1_scaled * std::exp(p.re_ghat1_log_scale);
    const double L2sq = h.abs_L2 * h.abs_L2;
    const double d0 = h.delta0;
    h.mu2 = -d0 * d0 * h.ghat0_2.real() / (4.0 * L2sq * re_g11);
    h.delta2 = -h.mu2 * h.ghat1_1.imag() - 0.25 * d0 + d0 * d0 * (2.0 * d0 + h.ghat0_2.imag()) / (4.0 * L2sq);
    h.eta2 = (nu + 2.0) * h.mu2 / h.mu0 + b1 * h.delta2 / d0;
    h.kappa2 = (nu + 1.0) / b1 * h.mu2 / h.mu0 + h.delta2 / d0;

    p.coefficients = h;
    p.status = BifurcationPoint::Status::complete;
    return p;
}

std::vector<Beta0Crossing> beta0_exact(double nu) {
    std::vector<Beta0Crossing> out;
    if (!(nu >= 0.0)) return out;
    for (int k = 0; 4.0 * k < nu; ++k) {
        const double omega = 0.5 * kPi * (1.0 + 4.0 * k) / (1.0 + nu);
        const double c = std::cos(omega);
        out.push_back({omega, std::tan(omega), std::pow(c, nu + 2.0) / std::sin(omega), std::pow(c, nu + 1.0)});
    }
    return out;
}

OddBetaAsymptotics oddbeta_zero_asymptotics(int beta, int n_zeros) {
    if (beta < 3 || beta % 2 == 0) throw ParameterError("oddbeta_zero_asymptotics: beta must be an odd integer >= 3");
    if (n_zeros < 0) throw ParameterError("oddbeta_zero_asymptotics: negative count");
    const double b = beta;
    OddBetaAsymptotics out;
    out.s_beta = b / (b + 1.0) * std::sin(0.5 * kPi * (b + 1.0) / b);
    out.c_beta = b / (b + 1.0) * std::cos(0.5 * kPi * (b + 1.0) / b);
    for (int n = 0; n < n_zeros; ++n) {
        const double rhs = 0.5 * kPi + n * kPi + 0.25 * kPi * (b - 1.0) / b;
        out.t.push_back(std::pow(rhs / out.s_beta, b / (b + 1.0)));
    }
    return out;
}

SmallThetaAsymptotics smalltheta_root_asymptotics(double beta, double nu, double vartheta) {
    if (!(vartheta > 0.0) || !(beta >= 0.0) || !(nu >= 0.0)) {
        throw ParameterError("smalltheta_root_asymptotics: requires vartheta > 0, beta, nu >= 0");
    }
    SmallThetaAsymptotics out;
    const double gb = std::tgamma(beta + 1.0);
    const double sn = std::sin(0.5 * kPi * (beta + 1.0));
    out.re_lambda2 = 0.25 * kPi * nu - 0.5 * gb * std::pow(vartheta, (beta + 1.0) / (nu + 2.0)) * sn;
    if (nu == 0.0) {
        const cplx i(0.0, 1.0);
        const cplx corr = 0.5 * gb * std::pow(vartheta, 0.5 * (beta + 1.0)) * std::exp(-i * (0.5 * kPi * (beta + 1.0)));
        out.lambda = i / std::sqrt(vartheta) * (1.0 - corr);
        out.stability_sign = sign_of(-sn);
    } else {
        const double scale = std::pow(std::tgamma(nu + 1.0) / vartheta, 1.0 / (nu + 2.0));
        out.lambda = scale * cplx(out.re_lambda2, 1.0);
        out.stability_sign = sign_of(out.re_lambda2);
    }
    // Boundary pi nu/4 = (Gamma(beta+1)/2) vartheta^((beta+1)/2) sin(pi(beta+1)/2),
    // using the nu -> 0 form of the exponent.
    if (sn > 0.0) out.nu_star = 2.0 / kPi * gb * std::pow(vartheta, 0.5 * (beta + 1.0)) * sn;
    return out;
}

SweepTable sweep(const std::vector<double>& betas, const std::vector<double>& nus, const CrossingScanOptions& options,
                 unsigned threads) {
    SweepTable table;
    table.betas = betas;
    table.nus = nus;
    const std::size_t n = betas.size() * nus.size();
    table.cells.resize(n);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        for (std::size_t j = 0; j < nus.size(); ++j) table.cells[i * nus.size() + j] = {betas[i], nus[j], std::nullopt, {}};
    }

    auto work = [&](std::size_t idx) {
        auto& cell = table.cells[idx];
        try {
            const auto scan = find_crossings(cell.beta, cell.nu, options);
            if (scan.points.empty()) {
                cell.note = "no crossing";
                return;
            }
            auto p = hopf_coefficients(scan.points.front(), cell.beta, cell.nu);
            if (p.status == BifurcationPoint::Status::non_transversal) cell.note = "non-transversal crossing";
            if (p.status == BifurcationPoint::Status::resonant) cell.note = "resonant crossing";
            cell.point = p;
        } catch (const std::exception& e) {
            cell.note = e.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += threads) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (const auto& cell : table.cells) {
        if (!cell.note.empty()) {
            table.log.push_back("beta=" + std::to_string(cell.beta) + " nu=" + std::to_string(cell.nu) + ": " + cell.note);
        }
    }
    return table;
}

std::vector<ContourSample> contour_samples(double beta, double nu, double re_min, double re_max, int nre,
                                           double im_min, double im_max, int nim) {
    if (nre < 1 || nim < 1) throw ParameterError("contour_samples: empty grid");
    std::vector<ContourSample> out;
    for (int i = 0; i < nre; ++i) {
        const double x = nre == 1 ? re_min : re_min + (re_max - re_min) * i / (nre - 1);
        for (int j = 0; j < nim; ++j) {
            const double y = nim == 1 ? im_min : im_min + (im_max - im_min) * j / (nim - 1);
            const cplx lam(x, y);
            cplx v(std::nan(""), std::nan(""));
            if (lam != cplx(0.0, 0.0)) v = evaluate_G(beta, nu, lam).value / lam;
            out.push_back({x, y, v});
        }
    }
    return out;
}

}  // namespace bubblelator
