#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "bubblelator/model_params.hpp"

namespace bubblelator {

/// Exponents and removal rate of the limit model.
///
/// The simulation runs in the characteristic coordinate z, where clusters
/// move at unit speed:
///     u' = 1 - int h z^nu dz,   h_t + h_z = -eta z^beta h,   h(0,t) = e^u.
/// With c = 1 - alpha, the size variable is x = (c z)^(1/c), the flux is
/// x^alpha f = h / c^nu, the size-frame removal rate is eta / c^beta and the
/// size-frame monomer variable is u - nu ln c.
struct LimitSetup {
    double beta = 1.0;
    double nu = 0.5;
    double eta = 0.1;
    double alpha = 1.0 / 3.0;
    double r = 2.0 / 3.0;

    static LimitSetup from(const ModelParams& p) { return {p.beta(), p.nu(), p.eta(), p.alpha(), p.r()}; }

    double speed() const { return 1.0 - alpha; }
    double eta_x() const;                         // removal rate in the size frame
    double u_shift() const;                       // u_x = u + u_shift()
    double x_of_z(double z) const;
    double z_of_x(double x) const;
    double flux_factor() const;                   // x^alpha f = flux_factor() * h
    double decay(double z) const;                 // exp(-eta z^(beta+1)/(beta+1))
};

struct SteadyState {
    double u0;
    LimitSetup setup;
    double h0(double z) const;
};

// u0 = ((nu+1)/(beta+1)) ln eta - ln G(0); h0(z) = e^u0 exp(-eta z^(beta+1)/(beta+1)).
SteadyState steady_state_u0(double beta, double nu, double eta);
SteadyState steady_state_u0(const LimitSetup& setup);

// Smallest Z with exp(-eta Z^(beta+1)/(beta+1)) Z^nu < 1e-12 * max of the same.
double tail_cutoff(double beta, double nu, double eta, double ratio = 1e-12);

enum class Coordinates { z, x };

/// Sampled u history on a uniform grid plus the initial profile on z_j = j dtau.
class FluxHistory {
public:
    FluxHistory(const LimitSetup& setup, double dtau, std::vector<double> h0_nodes);

    const LimitSetup& setup() const { return setup_; }
    double dtau() const { return dtau_; }
    double z_max() const { return dtau_ * static_cast<double>(h0_.size() - 1); }
    int z_nodes() const { return static_cast<int>(h0_.size()); }
    double z_node(int j) const { return dtau_ * j; }
    const std::vector<double>& h0() const { return h0_; }
    const std::vector<double>& u() const { return u_; }
    double tau_end() const { return dtau_ * static_cast<double>(u_.size() - 1); }

    void append(double u) { u_.push_back(u); }
    double u_at(double tau) const;  // linear interpolation

    // h(z, tau) along characteristics; on the line z = tau > 0 the two
    // one-sided limits are averaged.
    double h(double z, double tau) const;
    // h at every z node at grid time index n
    std::vector<double> profile_nodes(int n) const;

private:
    LimitSetup setup_;
    double dtau_;
    std::vector<double> h0_;
    std::vector<double> u_;
};

/// Profile at time tau: h on `grid` (z coordinates) or x^alpha f on `grid`
/// (x coordinates).
std::vector<double> reconstruct_flux(const FluxHistory& history, double tau, Coordinates coords,
                                     const std::vector<double>& grid);

struct LimitTraceRow {
    double tau;
    double u;
    double du_dtau;
    double number;         // int h dz
    double growth;         // int h z^nu dz
    double mass;           // int x f dx
    double removal;        // int x^(r+1) f dx
    double residual = std::numeric_limits<double>::quiet_NaN();
};

struct FluxSnapshot {
    double tau;
    std::vector<double> h;  // on the z nodes
};

struct LimitTrace {
    std::vector<LimitTraceRow> rows;
    std::vector<FluxSnapshot> snapshots;
    FluxHistory history;
    double eta_x;          // size-frame removal rate used by the residual
};

struct LimitRunOptions {
    double horizon = 600.0;
    double dtau = 0.01;
    int stride = 1;                      // record every stride-th step
    std::vector<double> snapshot_times;  // multiples of dtau
    double z_max = 0.0;                  // 0: from tail_cutoff
};

/// Heun integration of the monomer equation with the flux reconstructed
/// along characteristics.  The z-grid step equals dtau.
LimitTrace simulate_limit(const LimitSetup& setup, double u0, const std::function<double(double)>& h0,
                          const LimitRunOptions& options);

// Central-difference mass-balance residual at row i (needs 0 < i < rows-1).
double mass_balance_residual(const LimitTrace& trace, std::size_t i);

// Quadrature weights on z_j = j h for int g(z) z^nu dz, second order for
// smooth g (trapezoid with the zeta-function correction at z = 0).
std::vector<double> power_weights(double h, int nodes, double nu);

}  // namespace bubblelator
