#pragma once

namespace bubblelator::numerics {

enum class RkMethod { heun = 2, rk4 = 4 };

// One explicit step of y' = rhs(t, y).  State may be a scalar or an Eigen
// vector; anything closed under + and scalar *.
template <class State, class Rhs>
State rk_step(Rhs&& rhs, double t, const State& y, double dt, RkMethod method) {
    if (method == RkMethod::heun) {
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + dt, State(y + dt * k1));
        return y + (0.5 * dt) * (k1 + k2);
    }
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
    const State k3 = rhs(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
    const State k4 = rhs(t + dt, State(y + dt * k3));
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace bubblelator::numerics
