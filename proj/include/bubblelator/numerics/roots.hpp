#pragma once

#include <cmath>
#include <utility>

#include "bubblelator/errors.hpp"

namespace bubblelator::numerics {

struct RootResult {
    double root;
    double lower;
    double upper;
    int iterations;
};

struct NoBracketObserver {
    void operator()(double, double) const {}
};

/// Bracketed root refinement: secant steps kept inside the bracket, with a
/// bisection fallback whenever the bracket fails to halve.
///
/// The bracket shrinks strictly on every iteration.  `observe(lo, hi)` is
/// called after each update.
template <class F, class Observer = NoBracketObserver>
RootResult find_bracketed_root(F&& f, double a, double b, double tol, int max_iter = 400,
                               Observer observe = {}) {
    if (!(a < b)) std::swap(a, b);
    double fa = f(a);
    double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) throw ParameterError("find_bracketed_root: nonfinite endpoint value");
    if (fa == 0.0) return {a, a, a, 0};
    if (fb == 0.0) return {b, b, b, 0};
    if ((fa > 0.0) == (fb > 0.0)) throw ParameterError("find_bracketed_root: f(a) and f(b) have the same sign");

    double previous_width = b - a;
    int iter = 0;
    while (b - a >= tol && iter < max_iter) {
        ++iter;
        const double width = b - a;
        double x = 0.5 * (a + b);
        // Try a secant point only while the last step shrank the bracket well.
        if (width <= 0.5 * previous_width || iter == 1) {
            const double s = b - fb * (b - a) / (fb - fa);
            const double guard = 1e-3 * width;
            if (s > a + guard && s < b - guard) x = s;
        }
        if (x <= a || x >= b) x = 0.5 * (a + b);
        if (x <= a || x >= b) break;  // bracket at floating-point resolution

        previous_width = width;
        const double fx = f(x);
        if (fx == 0.0) {
            a = b = x;
            observe(a, b);
            break;
        }
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        observe(a, b);
    }
    if (b - a >= tol && iter >= max_iter) throw NumericalError("find_bracketed_root: iteration limit reached");
    const double root = (std::abs(fa) < std::abs(fb)) ? a : b;
    return {root, a, b, iter};
}

}  // namespace bubblelator::numerics
