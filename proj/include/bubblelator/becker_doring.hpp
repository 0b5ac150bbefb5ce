#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bubblelator/model_params.hpp"

namespace bubblelator {

/// Attachment/detachment rates a_k = k^alpha, b_k = k^alpha (1 + q k^-gamma).
///
/// Vectors are indexed by k-1.  `a` and `b` hold k = 1..K_max+1 so that
/// b_{K_max+1} is available to the closure; `log_Q` holds k = 1..K_max.
struct RateCoefficients {
    int k_max = 0;
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd log_Q;  // log prod_{l<k} a_l/b_{l+1}

    double a_k(int k) const { return a[k - 1]; }
    double b_k(int k) const { return b[k - 1]; }
    double Q_k(int k) const { return std::exp(log_Q[k - 1]); }
};

RateCoefficients coefficients(const ModelParams& params, int k_max);

enum class Closure {
    absorbing,   // n_{K+1} = 0; J_K leaves the system and is booked as leaked mass
    reflecting,  // J_K = 0; the truncated system is closed
};

struct ClusterState {
    Eigen::VectorXd n;  // n[k-1] = n_k
    double t = 0.0;

    int size() const { return static_cast<int>(n.size()); }
    double n1() const { return n[0]; }
    double mass() const;
    // J_k for k = 1..K under the given closure
    Eigen::VectorXd fluxes(const RateCoefficients& c, Closure closure = Closure::absorbing) const;
};

struct EquilibriumResult {
    ClusterState state;     // Q_k n1^k, k = 1..K_max
    Eigen::VectorXd log_n;  // log of the same densities
    bool has_critical_mass = false;
    double rho_s = 0.0;     // sum k Q_k (only when n1 == 1)
    double rho_s_tail_bound = 0.0;
    int rho_s_terms = 0;
};

EquilibriumResult equilibrium(const ModelParams& params, int k_max, double n1_bar);

/// Constant-flux steady state for n1_bar > 1, evaluated in log space.
struct ConstantFluxState {
    double n1_bar = 0.0;
    double J = 0.0;
    double log_J = 0.0;
    Eigen::VectorXd N;      // N_k, k = 1..K_max
    Eigen::VectorXd log_N;
    Eigen::VectorXd log_aQ; // log(a_k Q_k)
    Eigen::VectorXd G;      // exponent function, normalized G(1) = -log(a_1 n1_bar)
    int retained = 0;       // N_k with k <= retained are unaffected by truncation
    double max_residual = 0.0;  // max |a_{k-1} n1 N_{k-1} - b_k N_k - J| / J over retained k
    double log_J_laplace = 0.0; // log(J_inf e^u) with u from the monomer rescaling
};

ConstantFluxState constant_flux_state(const ModelParams& params, double n1_bar, int k_max);

struct BdSimulationOptions {
    double horizon = 1.0;
    double dt = 1e-3;
    int stride = 1;
    Closure closure = Closure::absorbing;
};

struct BdTraceRow {
    double t;
    double n1;
    double mass;
    double J_kcrit;
    double leaked;
    double removed;
};

struct SimulationTrace {
    std::vector<BdTraceRow> rows;
    ClusterState final_state;
    double leaked_mass = 0.0;   // mass carried past K_max by the absorbing closure
    double removed_mass = 0.0;  // mass taken out by the R k^r n_k sink
    double injected_mass = 0.0; // S t
};

SimulationTrace simulate(const ModelParams& params, const RateCoefficients& coeffs,
                         const ClusterState& initial, const BdSimulationOptions& options);

}  // namespace bubblelator
