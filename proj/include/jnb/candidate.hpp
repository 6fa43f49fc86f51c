#pragma once

#include <variant>

#include "jnb/cup_foliation.hpp"
#include "jnb/domain_geometry.hpp"
#include "jnb/special_functions.hpp"
#include "jnb/transition.hpp"

namespace jnb {

struct TangentFoot {
    double u = 0.0;
};

// Barycentric weights of a point of R2 with respect to the corners
// X = (w_bar + xi, C e^{w_bar + xi}), Y = (w_bar, e^{w_bar}), Z = (v_bar, e^{v_bar}).
struct Alphas {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

using Foliation = std::variant<TangentFoot, Alphas, ChordCoords>;

struct BellmanValue {
    double value = 0.0;
    SubdomainLabel label = SubdomainLabel::R4;
    Foliation foliation;
};

// Coefficient of the right tangential regime:
// m1(z) = (p/xi) e^{z/xi} ∫_z^∞ s|s|^{p-2} e^{-s/xi} ds.
double m1(const Parameters& params, double z, const QuadratureConfig& cfg = {});

// Coefficient of the left tangential regime, z <= v_bar.
double m3(const Parameters& params, const TransitionConstants& tc, double z,
          const QuadratureConfig& cfg = {});

// The candidate b_{p,C} with the constants that every evaluation shares
// (m1(w_bar), the trolleybus slope, the m3 boundary term) computed once.
class BellmanCandidate {
  public:
    BellmanCandidate(const Parameters& params, const TransitionConstants& tc,
                     const QuadratureConfig& cfg = {});

    const Parameters& params() const { return params_; }
    const TransitionConstants& transition() const { return tc_; }
    const QuadratureConfig& quadrature() const { return cfg_; }

    double m1(double z) const;
    double m3(double z) const;

    // (m1(w_bar) - q(v_bar, w_bar)) / (k(w_bar) - r(v_bar, w_bar)): the
    // constant x2-slope of the affine piece on R2.
    double trolleybus_slope() const { return trolleybus_slope_; }
    double m1_at_w_bar() const { return m1_w_bar_; }

    // Corners of R2; X and W lie on Gamma_C.
    Point corner_x() const;
    Point corner_y() const;
    Point corner_z() const;
    Point corner_w() const;

    BellmanValue evaluate(const Point& x) const;
    double derivative_x2(const Point& x) const;

    // The formula attached to `label`, applied at x without classifying it.
    // Used to compare adjacent branches on a shared boundary.
    double evaluate_branch(const Point& x, SubdomainLabel label) const;
    double derivative_x2_branch(const Point& x, SubdomainLabel label) const;

    Alphas alphas(const Point& x) const;

    // Sign carriers for the second x2-derivative in the tangential regimes,
    // multiplied by e^{u/xi}:
    //   h1(u) = xi u^{p-2} - (1-xi) e^{u/xi} ∫_u^∞ e^{-s/xi} s^{p-2} ds, u >= w_bar,
    //   h3(u) = xi (-u)^{p-2} - (1-xi) e^{u/xi} (∫_u^{v_bar} e^{-s/xi}(-s)^{p-2} ds
    //           + e^{(w_bar - v_bar)(1/xi - 1)} ∫_{w_bar}^∞ e^{-s/xi} s^{p-2} ds), u <= v_bar.
    double h1(double u) const;
    double h3(double u) const;

  private:
    double tangential_value(double m, double u, double x1) const;
    double tangential_x2(double m, double u) const;
    double cup_value(const ChordCoords& cc) const;

    Parameters params_;
    TransitionConstants tc_;
    QuadratureConfig cfg_;
    double q_bar_ = 0.0;
    double r_bar_ = 0.0;
    double m1_w_bar_ = 0.0;
    double m3_boundary_ = 0.0;
    double trolleybus_slope_ = 0.0;
    double tail_w_bar_ = 0.0;  // e^{w_bar/xi} ∫_{w_bar}^∞ s^{p-2} e^{-s/xi} ds
};

// Free-function forms; each builds a BellmanCandidate internally.
BellmanValue bellman(const Parameters& params, const TransitionConstants& tc, const Point& x,
                     const QuadratureConfig& cfg = {});
double bellman_x2(const Parameters& params, const TransitionConstants& tc, const Point& x,
                  const QuadratureConfig& cfg = {});

}  // namespace jnb
