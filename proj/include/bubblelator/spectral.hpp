#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace bubblelator {

using cplx = std::complex<double>;

/// Value of G_{beta,nu}(lambda) = int_0^inf exp(-z^(beta+1)/(beta+1) - lambda z) z^nu dz.
///
/// For odd integer beta, integer nu and imaginary lambda one component
/// decays super-exponentially in |lambda|; it is then evaluated on a shifted
/// contour and kept as scaled * exp(log_scale), so its sign survives when
/// the product underflows.
struct CharacteristicEvaluation {
    enum class Small { none, real, imag };

    cplx lambda;
    cplx value;
    double error = 0.0;   // absolute error estimate of value
    double l1 = 0.0;      // int |integrand|, the scale of the error
    Small small = Small::none;
    double small_scaled = 0.0;
    double small_error_scaled = 0.0;
    double small_log_scale = 0.0;

    double abs() const { return std::abs(value); }
    double phase() const { return std::arg(value); }
    int real_sign() const;
    int imag_sign() const;
    // Re G / |G| without underflow in the scaled component
    double real_over_abs() const;
};

// Closed form (beta+1)^((nu-beta)/(beta+1)) Gamma((nu+1)/(beta+1)).
double G_at_zero(double beta, double nu);

CharacteristicEvaluation evaluate_G(double beta, double nu, cplx lambda, double rel_tol = 1e-12);

struct HopfCoefficients {
    double delta0;
    double mu0;
    double u0;
    cplx ghat0_1;
    cplx ghat0_2;
    cplx ghat1_1;
    double abs_L2;
    double mu2;
    double delta2;
    double eta2;
    double kappa2;
};

struct BifurcationPoint {
    enum class Status { coarse, complete, non_transversal, resonant };

    double t0 = 0.0;
    double vartheta0 = 0.0;
    double eta0 = 0.0;
    double kappa0 = 0.0;
    double phase_error = 0.0;  // |Re G(i t0)| / |G(i t0)|
    bool primary = false;

    Status status = Status::coarse;
    int direction = 0;  // sign of Re d(lambda)/d(vartheta) = -sign Re ghat1(1)
    double re_ghat1_scaled = 0.0;  // Re ghat1(1) may be kept scaled, see CharacteristicEvaluation
    double re_ghat1_log_scale = 0.0;
    std::optional<HopfCoefficients> coefficients;
};

struct CrossingScanOptions {
    double t_min = 1e-3;
    double t_max = 60.0;
    int grid_points = 4000;
    int max_refinements = 20;
    // Stop once the quadrature error exceeds this fraction of |G(it)|.
    double resolution_limit = 1e-6;
};

struct CrossingScan {
    std::vector<BifurcationPoint> points;  // sorted by descending eta0
    double resolved_to = 0.0;              // t up to which the phase was resolved
    bool truncated = false;
};

CrossingScan find_crossings(double beta, double nu, const CrossingScanOptions& options = {});

// Completes a coarse point with the second-order expansion data.
BifurcationPoint hopf_coefficients(const BifurcationPoint& point, double beta, double nu);

struct Beta0Crossing {
    double omega;
    double t0;
    double eta0;
    double kappa0;
};

// All crossings for beta = 0: omega_k = (pi/2)(1+4k)/(1+nu), 0 <= 4k < nu.
std::vector<Beta0Crossing> beta0_exact(double nu);

struct OddBetaAsymptotics {
    std::vector<double> t;
    double s_beta;
    double c_beta;
};

// Zeros of the saddle-point approximation of Re G_{beta,0}(it), odd beta >= 3.
OddBetaAsymptotics oddbeta_zero_asymptotics(int beta, int n_zeros);

struct SmallThetaAsymptotics {
    cplx lambda;
    int stability_sign;  // sign of Re lambda: +1 unstable
    double re_lambda2;
    std::optional<double> nu_star;  // stability boundary when sin(pi(beta+1)/2) > 0
};

SmallThetaAsymptotics smalltheta_root_asymptotics(double beta, double nu, double vartheta);

/// Parameter sweep over a (beta, nu) grid using the primary crossing of
/// each cell.
struct SweepCell {
    double beta;
    double nu;
    std::optional<BifurcationPoint> point;
    std::string note;  // empty on success
};

struct SweepTable {
    std::vector<double> betas;
    std::vector<double> nus;
    std::vector<SweepCell> cells;  // row-major: cells[i * nus.size() + j]
    std::vector<std::string> log;

    const SweepCell& at(std::size_t ib, std::size_t jn) const { return cells[ib * nus.size() + jn]; }
};

SweepTable sweep(const std::vector<double>& betas, const std::vector<double>& nus,
                 const CrossingScanOptions& options = {}, unsigned threads = 0);

// Samples of G(lambda)/lambda on a rectangular grid for external contour plots.
struct ContourSample {
    double re;
    double im;
    cplx value;
};
std::vector<ContourSample> contour_samples(double beta, double nu, double re_min, double re_max, int nre,
                                           double im_min, double im_max, int nim);

}  // namespace bubblelator
