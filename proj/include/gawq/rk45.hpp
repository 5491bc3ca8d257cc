// rk45.hpp — Adaptive embedded Dormand–Prince 5(4) integrator over Eigen
// states (complex vectors or matrices).

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gawq {

struct RK45Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = 1e30;
    double safety = 0.9;
};

class StepSizeUnderflow : public std::runtime_error {
public:
    explicit StepSizeUnderflow(double t)
        : std::runtime_error("rk45: step size underflow at t = " + std::to_string(t)) {}
};

// Advances y in place from t to t_target. RHS signature: State f(double t, const State& y).
// The step is always clamped to land exactly on t_target, so callers can split
// integration segments at generator discontinuities.
template <class State, class RHS>
void rk45_integrate(State& y, double t, double t_target, RHS&& f, const RK45Options& opts = {},
                    double* h_carry = nullptr) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order weights
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    if (t_target <= t) return;
    double h = h_carry && *h_carry > 0.0 ? *h_carry : opts.h_init;
    h = std::min({h, opts.h_max, t_target - t});

    while (t < t_target) {
        h = std::min(h, t_target - t);
        if (h < 1e-13 * std::max(1.0, std::abs(t))) throw StepSizeUnderflow(t);

        State k1 = f(t, y);
        State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
        State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
        State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        State k7 = f(t + h, y5);
        State y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const auto scale = (opts.atol + opts.rtol * y.cwiseAbs().cwiseMax(y5.cwiseAbs()).array());
        const double err = ((y5 - y4).cwiseAbs().array() / scale).maxCoeff();

        if (err <= 1.0 || h <= 1e-12 * std::max(1.0, std::abs(t))) {
            t += h;
            y = std::move(y5);
            const double factor = err > 0.0 ? opts.safety * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
            h = std::min(h, opts.h_max);
        } else {
            h *= std::max(0.2, opts.safety * std::pow(err, -0.2));
        }
    }
    if (h_carry) *h_carry = h;
}

}  // namespace gawq
