#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "jnb/domain_geometry.hpp"
#include "jnb/special_functions.hpp"

namespace jnb {

// Precomputed companion roots v(w) on a fixed grid of w in (0, w_bar]. Used
// by chord_coords to bracket the chord through a point without re-solving
// for v at every scan node.
struct CupTable {
    std::vector<double> w;
    std::vector<double> v;
};

std::shared_ptr<const CupTable> make_cup_table(double p, double w_bar, int nodes = 1024);

// Frozen geometry of the transition between the two tangential regimes.
struct TransitionConstants {
    double xi0 = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double w_star = 0.0;  // root of the tail-balance equation on (0, c1)
    double w_bar = 0.0;   // root of the slope-matching equation on (w_star, c2)
    double v_bar = 0.0;   // companion of w_bar in the cup family
    double d_bar = 0.0;   // D(w_bar)
    std::shared_ptr<const CupTable> cup_table;
};

struct Thresholds {
    double xi0 = 0.0;
    double one_minus_xi0 = 0.0;
    double c0 = 0.0;
};

// xi0(p) = 1 - 1/(3^{p+2} Gamma(p)), C0(p) = e^{-xi0}/(1 - xi0).
Thresholds thresholds(double p);

// c1 = xi [e(1-xi) Gamma(p-1)]^{1/(p-2)}, c2 = xi [2e(1-xi) Gamma(p)]^{1/(p-2)}.
// Requires xi > xi0(p).
std::pair<double, double> bracket_c(const Parameters& params);

// (1/xi - 1) ∫_w^∞ s^{p-2} e^{-s/xi} ds - w^{p-2} e^{-w/xi}, multiplied by
// e^{w/xi} (same sign, no underflow).
double tail_balance(const Parameters& params, double w, const QuadratureConfig& cfg = {});

// Left side of the slope-matching equation:
// (1/xi - 1) p (p-1) e^{w(1/xi - 1)} ∫_w^∞ s^{p-2} e^{-s/xi} ds.
double slope_matching_lhs(const Parameters& params, double w, const QuadratureConfig& cfg = {});

// Solves both transition equations and the companion root. Throws
// DomainError when C <= C0(p) and InternalError when a guaranteed bracket
// shows no sign change.
TransitionConstants solve_transition(const Parameters& params, const QuadratureConfig& cfg = {});

}  // namespace jnb
