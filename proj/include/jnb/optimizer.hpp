#pragma once

#include <variant>
#include <vector>

#include "jnb/candidate.hpp"

namespace jnb {

struct ConstPiece {
    double value = 0.0;
};

// offset + xi * log(pivot / t)
struct LogDecayPiece {
    double offset = 0.0;
    double pivot = 1.0;
};

struct Piece {
    double a = 0.0;
    double b = 1.0;
    std::variant<ConstPiece, LogDecayPiece> kind;
};

// A test function on (0,1) made of constant and logarithmic pieces. The
// pieces are ordered and partition (0,1).
class PiecewiseTestFunction {
  public:
    PiecewiseTestFunction(std::vector<Piece> pieces, double xi, double one_minus_xi);

    const std::vector<Piece>& pieces() const { return pieces_; }
    double xi() const { return xi_; }
    double one_minus_xi() const { return one_minus_xi_; }

    double operator()(double t) const;

    // Values at the left and right ends of piece i (the left end of a
    // LogDecay piece starting at 0 is +inf).
    double left_value(std::size_t i) const;
    double right_value(std::size_t i) const;

    // ∫_a^b phi and ∫_a^b e^phi in closed form, 0 <= a <= b <= 1.
    struct IntervalIntegrals {
        double phi = 0.0;
        double exp_phi = 0.0;
    };
    IntervalIntegrals integrals(double a, double b) const;

    std::vector<double> breakpoints() const;

  private:
    std::vector<Piece> pieces_;
    double xi_;
    double one_minus_xi_;
};

struct Moments {
    double mean = 0.0;
    double exp_mean = 0.0;
    double p_mean = 0.0;
};

// The optimizer attached to x: the piecewise function whose averages are x
// and whose p-th absolute moment equals b_{p,C}(x).
PiecewiseTestFunction build_optimizer(const BellmanCandidate& candidate, const Point& x);
PiecewiseTestFunction build_optimizer(const Parameters& params, const TransitionConstants& tc,
                                      const Point& x);

// The construction formula of `label` applied at x without classifying it.
// On a boundary shared by two subdomains both formulas must agree.
PiecewiseTestFunction build_optimizer_branch(const BellmanCandidate& candidate, const Point& x,
                                             SubdomainLabel label);

Moments moments(const PiecewiseTestFunction& phi, double p, const QuadratureConfig& cfg = {});

// sup over J ⊂ (0,1) of <e^phi>_J e^{-<phi>_J}, by a grid search over
// interval endpoints followed by coordinate-wise golden-section refinement.
// Always a lower bound of the true supremum.
double a_infty_characteristic(const PiecewiseTestFunction& phi);

// |<|phi_x|^p> - b(x)| / max(1, b(x)).
double optimality_check(const BellmanCandidate& candidate, const Point& x);
double optimality_check(const Parameters& params, const TransitionConstants& tc, const Point& x);

}  // namespace jnb
