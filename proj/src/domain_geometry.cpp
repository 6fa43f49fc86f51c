#include "jnb/domain_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jnb/errors.hpp"
#include "jnb/root_finding.hpp"
#include "jnb/special_functions.hpp"
#include "jnb/transition.hpp"

namespace jnb {

namespace {

constexpr double kBoundarySlack = 1e-12;

// Solves (1 + t/(1-xi)) e^{-t} = ratio for t in [0, xi]; u = x1 - t. The left
// side climbs monotonically from 1 at t=0 to C at t=xi.
double tangent_offset(const Parameters& params, double ratio) {
    if (ratio <= 1.0) return 0.0;
    // g has a double root at t = xi, so ratios within rounding of C only
    // determine t to about sqrt(eps); such points are taken to lie on Gamma_C.
    if (ratio >= params.C * (1.0 - 16.0 * std::numeric_limits<double>::epsilon())) return params.xi;
    auto g = [&](double t) { return (1.0 + t / params.one_minus_xi) * std::exp(-t) - ratio; };
    return bisect(g, 0.0, params.xi, 0.0, "tangent_u");
}

}  // namespace

std::string_view to_string(SubdomainLabel label) {
    switch (label) {
        case SubdomainLabel::R1: return "R1";
        case SubdomainLabel::R2: return "R2";
        case SubdomainLabel::R3: return "R3";
        case SubdomainLabel::R4: return "R4";
    }
    return "?";
}

double solve_one_minus_xi(double C) {
    if (!(C >= 1.0) || !std::isfinite(C)) throw DomainError("solve_xi: C must be at least 1");
    if (C == 1.0) return 1.0;
    // h(y) = e^{y-1} - C y on (0, 1]; h(0) = 1/e > 0, h(1) = 1 - C < 0.
    auto h = [C](double y) { return std::exp(y - 1.0) - C * y; };
    double y = bisect(h, 0.0, 1.0, 1e-15, "solve_xi");
    for (int i = 0; i < 2; ++i) {
        const double slope = std::exp(y - 1.0) - C;
        const double next = y - h(y) / slope;
        if (next > 0.0 && next <= 1.0) y = next;
    }
    return y;
}

double solve_xi(double C) { return 1.0 - solve_one_minus_xi(C); }

Parameters Parameters::make(double p, double C) {
    if (!(p > 2.0) || !std::isfinite(p)) throw DomainError("p must exceed 2");
    if (!(C >= 1.0) || !std::isfinite(C)) throw DomainError("C must be at least 1");
    Parameters params;
    params.p = p;
    params.C = C;
    const double y = solve_one_minus_xi(C);
    params.xi = 1.0 - y;
    params.one_minus_xi = std::exp(-params.xi) / C;
    return params;
}

bool in_domain(const Parameters& params, const Point& x) {
    if (!std::isfinite(x.x1) || !(x.x2 > 0.0) || !std::isfinite(x.x2)) return false;
    const double ratio = x.x2 * std::exp(-x.x1);
    return ratio >= 1.0 - kBoundarySlack && ratio <= params.C * (1.0 + kBoundarySlack);
}

double tangent_u_unchecked(const Parameters& params, const Point& x) {
    const double ratio = x.x2 * std::exp(-x.x1);
    return x.x1 - tangent_offset(params, ratio);
}

double tangent_u(const Parameters& params, const Point& x) {
    if (!in_domain(params, x)) throw DomainError("tangent_u: point lies outside Omega_C");
    return tangent_u_unchecked(params, x);
}

double chord_gap(double v, double w, double x1) {
    const double a = w - x1;
    const double b = x1 - v;
    const double len = w - v;
    if (len == 0.0) return 0.0;
    return std::exp(x1) * (b * expm1_minus_x(a) + a * expm1_minus_x(-b)) / len;
}

SubdomainLabel classify(const Parameters& params, const TransitionConstants& tc, const Point& x) {
    if (!in_domain(params, x)) throw DomainError("classify: point lies outside Omega_C");
    const double above = x.x2 - std::exp(x.x1);
    const double gap = chord_gap(tc.v_bar, tc.w_bar, x.x1);
    if (x.x1 >= tc.v_bar && x.x1 <= tc.w_bar && above <= gap + kBoundarySlack * x.x2) {
        return SubdomainLabel::R4;
    }
    const double u = tangent_u_unchecked(params, x);
    if (u >= tc.w_bar - kBoundarySlack) return SubdomainLabel::R1;
    if (u <= tc.v_bar + kBoundarySlack) return SubdomainLabel::R3;
    return SubdomainLabel::R2;
}

}  // namespace jnb
