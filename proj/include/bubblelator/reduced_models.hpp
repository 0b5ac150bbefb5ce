#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bubblelator {

/// Closed moment system of the limit model for alpha = 2/3, r = 0:
///     N' = e^u - eta N,  A' = (2/3) R - eta A,  R' = N/3 - eta R,  u' = 1 - A.
struct MomentState {
    double N = 0.0;
    double A = 0.0;
    double R = 0.0;
    double u = 0.0;

    Eigen::Vector4d vec() const { return {N, A, R, u}; }
    static MomentState from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

struct MomentRow {
    double t;
    MomentState state;
};

Eigen::Vector4d moment_rhs(double eta, const MomentState& s);

// RK4 with a fixed step; rows every `stride` steps plus the final one.
std::vector<MomentRow> simulate_moments(double eta, const MomentState& initial, double horizon, double dtau,
                                        int stride = 1);

MomentState moment_steady_state(double eta);

struct SharpPeakParams {
    double f0 = 2.0;      // mass carried by one peak, in units of the nucleation threshold drop rate
    double u_nucl = 0.0;
    double L = 1.0;       // transit length from nucleation to removal
    double u_init = -0.5;
};

struct PeakEvent {
    enum class Kind { nucleation, removal };
    double t;
    Kind kind;
};

struct SharpPeakTrace {
    std::vector<double> t;  // knots of the piecewise-linear u
    std::vector<double> u;
    std::vector<PeakEvent> events;
};

/// Exact event-driven solution: u' = 1 - f0 (number of peaks in flight).
SharpPeakTrace simulate_sharp_peak(const SharpPeakParams& params, double horizon);

}  // namespace bubblelator
