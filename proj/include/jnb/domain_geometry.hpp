#pragma once

#include <cmath>
#include <string_view>

namespace jnb {

struct TransitionConstants;

// The pair (p, C) together with the tangency gap xi solving
// e^{-xi} = C (1 - xi). The complement 1 - xi is stored separately, computed
// as e^{-xi}/C, because for large C it is far below the spacing of doubles
// near 1 and every formula that divides by it needs full relative precision.
struct Parameters {
    double p = 3.0;
    double C = 1.0;
    double xi = 0.0;
    double one_minus_xi = 1.0;

    // Throws DomainError for p <= 2 or C < 1.
    static Parameters make(double p, double C);

    // Slope of the tangent to Gamma_C whose foot on Gamma_1 is (z, e^z).
    double k(double z) const { return std::exp(z) / one_minus_xi; }

    // |e^{-xi} - C(1 - xi)| with the stored complement.
    double xi_residual() const { return std::abs(std::exp(-xi) - C * one_minus_xi); }
};

struct Point {
    double x1 = 0.0;
    double x2 = 1.0;
};

enum class SubdomainLabel { R1, R2, R3, R4 };

std::string_view to_string(SubdomainLabel label);

// Root of e^{-xi} = C(1 - xi) in [0, 1). Bisection followed by two Newton
// steps, carried out in the complement y = 1 - xi.
double solve_xi(double C);

// 1 - solve_xi(C), accurate to full relative precision.
double solve_one_minus_xi(double C);

// e^{x1} <= x2 <= C e^{x1}, with 1e-12 relative slack at both curves.
bool in_domain(const Parameters& params, const Point& x);

// Foot u of the right-hand tangent from x to Gamma_C:
// x2 = k(u)(x1 - u) + e^u with u in [x1 - xi, x1].
double tangent_u(const Parameters& params, const Point& x);

// Same as tangent_u without the membership check; x2/e^{x1} is clamped to
// [1, C].
double tangent_u_unchecked(const Parameters& params, const Point& x);

// Height of the chord through (v, e^v) and (w, e^w) above Gamma_1 at x1,
// i.e. r(v,w)(x1 - w) + e^w - e^{x1}, evaluated without cancellation. Valid
// for any x1 (negative outside [v, w]).
double chord_gap(double v, double w, double x1);

// Subdomain of x. Points within 1e-12 of a separating curve go to the first
// matching label in the order R4, R1/R3, R2.
SubdomainLabel classify(const Parameters& params, const TransitionConstants& tc, const Point& x);

}  // namespace jnb
