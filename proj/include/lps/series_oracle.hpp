#pragma once

#include <functional>

#include "lps/series.hpp"

// Independent numeric oracle for the series coefficients: evaluates the
// composed functions directly and differentiates in delta with central
// differences plus one Richardson step. Diagnostic/test path only; it never
// feeds the production expansion.

namespace lps::series::oracle {

/// Documented oracle constants: two step levels (fine = coarse/2), one
/// Richardson extrapolation of the O(h^2) central stencils (making them
/// O(h^4)). The rate function R has much larger high-order derivatives
/// than the bare exponentials (reciprocal composition), so it gets a
/// smaller step.
inline constexpr double kStepCoarse = 1e-2;
inline constexpr double kStepFine = 5e-3;
inline constexpr double kStepCoarseRate = 4e-3;

/// k-th central difference (k <= 4), error O(h^2).
inline double central_derivative(const std::function<double(double)>& g, int k, double h) {
    switch (k) {
        case 0: return g(0.0);
        case 1: return (g(h) - g(-h)) / (2 * h);
        case 2: return (g(h) - 2 * g(0.0) + g(-h)) / (h * h);
        case 3: return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h);
        case 4:
            return (g(2 * h) - 4 * g(h) + 6 * g(0.0) - 4 * g(-h) + g(-2 * h)) /
                   (h * h * h * h);
        default: throw InvalidInput("central_derivative: k must be <= 4");
    }
}

inline double richardson_derivative(const std::function<double(double)>& g, int k,
                                    double h_coarse = kStepCoarse) {
    const double coarse = central_derivative(g, k, h_coarse);
    const double fine = central_derivative(g, k, 0.5 * h_coarse);
    return (4.0 * fine - coarse) / 3.0;
}

/// k-th Taylor coefficient of g at 0.
inline double taylor_coefficient(const std::function<double(double)>& g, int k,
                                 double h_coarse = kStepCoarse) {
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    return richardson_derivative(g, k, h_coarse) / kfact;
}

inline double poly_eval(const std::vector<double>& c, double d) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * d + c[i];
    return v;
}

/// n(delta) = exp(psi(delta) - phi_n(delta)) from the truncated inputs.
inline double eval_n(const SeriesInput& in, double d) {
    return std::exp(poly_eval(in.psi, d) - poly_eval(in.phi_n, d));
}

/// delta^2-stripped hole density exp(phi_p(delta) - psi(delta)).
inline double eval_p_tilde(const SeriesInput& in, double d) {
    return std::exp(poly_eval(in.phi_p, d) - poly_eval(in.psi, d));
}

/// R(delta)/delta^2 = r_delta(n, delta^2 p~) (n p~ - 1), evaluated from the
/// defining formulas rather than the expansion.
inline double eval_R_over_d2(const SeriesInput& in, const physics::RecombinationParams& rec,
                             double d) {
    const double n = eval_n(in, d);
    const double pt = eval_p_tilde(in, d);
    const double p_full = d * d * pt;
    const double den =
        rec.tau_p * (n + d * rec.nT) + rec.tau_n * (p_full + d * rec.pT);
    const double r = rec.Cd + rec.Cn * n + rec.Cp * p_full + 1.0 / den;
    return r * (n * pt - 1.0);
}

}  // namespace lps::series::oracle
