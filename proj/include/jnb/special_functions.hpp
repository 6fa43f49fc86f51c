#pragma once

#include <functional>
#include <span>

namespace jnb {

// Tolerances shared by every quadrature in the library.
struct QuadratureConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_depth = 60;  // bisection levels allowed below the initial pieces

    // Throws DomainError unless abs_tol > 0, rel_tol > 0, max_depth >= 10.
    void validate() const;

    // Defaults, with abs_tol replaced by $JNB_QUAD_TOL when it is set.
    static QuadratureConfig from_env();
};

// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
// Interior breakpoints (kinks, sign changes) become initial subdivision
// points; values outside (a, b) are ignored.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {}, std::span<const double> breakpoints = {});

// Gamma(p), p > 0.
double gamma_fn(double p);

// ∫_w^∞ s^{p-2} e^{-s/xi} ds for p > 2, xi in (0,1], w >= 0.
double tail_integral(double p, double xi, double w, const QuadratureConfig& cfg = {});

// e^{w/xi} ∫_w^∞ s^a e^{-s/xi} ds for a >= 0, w >= 0. The exponential
// weight is factored out so the result stays O(1) for any w.
double scaled_power_tail(double a, double xi, double w, const QuadratureConfig& cfg = {});

// ∫_z^∞ s|s|^{p-2} e^{-s/xi} ds, split at 0 when z < 0.
double signed_tail(double p, double xi, double z, const QuadratureConfig& cfg = {});

// e^{z/xi} * signed_tail(p, xi, z).
double scaled_signed_tail(double p, double xi, double z, const QuadratureConfig& cfg = {});

// ∫_0^L |c + s|^a e^{-s/xi} ds; L = +inf is allowed. Splits at the kink s = -c.
double abs_power_laplace(double c, double a, double xi, double length,
                         const QuadratureConfig& cfg = {});

// [ (p/e)(Gamma(p) - ∫_0^1 t^{p-1} e^t dt) + 1 ]^{1/p}, p >= 1.
double omega(double p, const QuadratureConfig& cfg = {});

// e^x - 1 - x without cancellation for small |x|.
double expm1_minus_x(double x);

}  // namespace jnb
