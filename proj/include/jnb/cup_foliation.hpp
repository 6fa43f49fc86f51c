#pragma once

#include "jnb/domain_geometry.hpp"

namespace jnb {

// Ratio bracketing the companion root: v lies in (-w, -cup_lambda(p) * w).
inline double cup_lambda(double p) { return (p - 1.0) / p; }

// Upper end (p-2)/(3p) of the interval of admissible right endpoints w.
inline double cup_w_limit(double p) { return (p - 2.0) / (3.0 * p); }

// A chord endpoint pair {v, w} with F(v, w) = 0, plus the slopes
// q = (w^p - (-v)^p)/(w - v), r = (e^w - e^v)/(w - v) and the common value
// d = D(w).
struct CupPair {
    double w = 0.0;
    double v = 0.0;
    double q = 0.0;
    double r = 0.0;
    double d = 0.0;
};

struct ChordCoords {
    CupPair pair;
    double beta = 0.5;      // x1 = beta*w + (1-beta)*v
    int sign_changes = 0;   // sign changes seen by the bracketing scan (1 expected)
    // Height of x above the outermost chord when it lies there within the
    // classification slack; 0 for points on or below it.
    double excess = 0.0;
};

// F(v, w) = (e^w - e^v)(w^p - (-v)^p - p w^{p-1} - p(-v)^{p-1})
//         + p (w - v)(w^{p-1} e^v + (-v)^{p-1} e^w),   v < 0 < w.
// Evaluated in factored form: the two products cancel to relative order w^2
// near v = -w, so the literal expression is not used.
double big_f(double p, double v, double w);

// The unique root v in (-w, -w(p-1)/p) of F(., w), with q, r and D filled in.
CupPair solve_v(double p, double w);

// D(w) = p (w^{p-1} + (-v)^{p-1}) / (e^w - e^v) with v = v(w).
double d_of_w(double p, double w);

// q(v, w) and r(v, w); both accept the degenerate v = w (returning 0 and 1).
double slope_q(double p, double v, double w);
double slope_r(double v, double w);

// The three equal expressions for D at a solved pair:
// (q + p(-v)^{p-1})/(r - e^v), (p w^{p-1} - q)/(e^w - r), and the direct one.
struct DExpressions {
    double left = 0.0;
    double right = 0.0;
    double direct = 0.0;
};
DExpressions d_expressions(double p, double v, double w);

// Chord of the cup foliation through a point of R4. The corner (0, 1) maps
// to v = w = 0 with beta = 1/2.
ChordCoords chord_coords(const Parameters& params, const TransitionConstants& tc, const Point& x);

// chord_coords without the R4 membership check; used when probing a boundary
// from the R4 side.
ChordCoords chord_coords_unchecked(const Parameters& params, const TransitionConstants& tc,
                                   const Point& x);

}  // namespace jnb
