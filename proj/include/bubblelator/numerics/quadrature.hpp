#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "bubblelator/errors.hpp"

namespace bubblelator::numerics {

// Works for double and std::complex<double>.
template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    double l1 = 0.0;   // integral of |f|, the scale the tolerance is measured against
    int panels = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    double l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// 15-point Kronrod with the embedded 7-point Gauss rule as error estimate.
template <class T, class F>
Panel<T> gauss_kronrod_15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    double l1 = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kronrod += (f1 + f2) * kWgk[j];
        l1 += (std::abs(f1) + std::abs(f2)) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    kronrod *= h;
    gauss *= h;
    l1 *= std::abs(h);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * l1;
    return {a, b, kronrod, std::max(std::abs(kronrod - gauss), roundoff), l1};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod over an initial partition.
///
/// The panel with the largest error estimate is bisected until the summed
/// error drops below rel_tol times the running L1 norm.  Throws
/// NumericalError when the panel budget runs out first.
template <class F>
auto integrate_adaptive(F&& f, const std::vector<double>& breakpoints, double rel_tol,
                        int max_panels = 200000) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    if (breakpoints.size() < 2) throw NumericalError("integrate_adaptive: need at least one panel");

    std::priority_queue<detail::Panel<T>> queue;
    T value{};
    double error = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto p = detail::gauss_kronrod_15<T>(f, breakpoints[i], breakpoints[i + 1]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        queue.push(p);
    }

    auto panels = static_cast<int>(queue.size());
    while (error > rel_tol * l1) {
        if (panels >= max_panels) {
            throw NumericalError("integrate_adaptive: tolerance not met within panel budget");
        }
        auto worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        queue.push(left);
        queue.push(right);
        ++panels;
    }

    // Resum to avoid drift from the incremental updates.
    value = T{};
    error = 0.0;
    l1 = 0.0;
    while (!queue.empty()) {
        value += queue.top().value;
        error += queue.top().error;
        l1 += queue.top().l1;
        queue.pop();
    }
    return QuadratureResult<T>{value, error, l1, panels};
}

/// Point beyond which `envelope` stays below cut_ratio times its running peak.
///
/// Steps outward geometrically; the envelope is assumed unimodal or
/// monotonically decaying after its maximum.
template <class E>
double truncation_point(E&& envelope, double cut_ratio, double z_limit = 1e6) {
    double peak = 0.0;
    double z = 0.0;
    while (z < z_limit) {
        const double step = std::max(1.0 / 64.0, z / 64.0);
        z += step;
        const double e = envelope(z);
        if (e > peak) {
            peak = e;
        } else if (e < cut_ratio * peak) {
            return z;
        }
    }
    throw NumericalError("truncation_point: envelope does not decay");
}

/// Integral over [0, inf) of a decaying, possibly oscillatory integrand.
///
/// Truncates where the envelope falls below a small fraction of its peak,
/// then splits [0, Z_cut] into panels no wider than wavelength/10 before
/// adaptive refinement.  Pass wavelength <= 0 for non-oscillatory integrands.
template <class F, class E>
auto integrate_semiinfinite(F&& f, E&& envelope, double wavelength, double rel_tol,
                            int max_panels = 200000) {
    const double z_cut = truncation_point(envelope, 1e-3 * rel_tol);
    double width = z_cut / 8.0;
    if (wavelength > 0.0) width = std::min(width, wavelength / 10.0);
    const auto n = static_cast<std::size_t>(std::ceil(z_cut / width));
    std::vector<double> breaks(n + 1);
    for (std::size_t i = 0; i <= n; ++i) breaks[i] = z_cut * static_cast<double>(i) / static_cast<double>(n);
    return integrate_adaptive(std::forward<F>(f), breaks, rel_tol, max_panels);
}

}  // namespace bubblelator::numerics
