#include "jnb/transition.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "jnb/cup_foliation.hpp"
#include "jnb/errors.hpp"
#include "jnb/root_finding.hpp"

namespace jnb {

Thresholds thresholds(double p) {
    if (!(p > 2.0)) throw DomainError("thresholds: p must exceed 2");
    Thresholds t;
    t.one_minus_xi0 = 1.0 / (std::pow(3.0, p + 2.0) * gamma_fn(p));
    t.xi0 = 1.0 - t.one_minus_xi0;
    t.c0 = std::exp(-t.xi0) / t.one_minus_xi0;
    return t;
}

std::pair<double, double> bracket_c(const Parameters& params) {
    const double p = params.p;
    const Thresholds t = thresholds(p);
    if (!(params.one_minus_xi < t.one_minus_xi0)) {
        throw DomainError("bracket_c: xi must exceed xi0(p), i.e. C > C0(p)");
    }
    const double e = std::numbers::e;
    const double c1 = params.xi * std::pow(e * params.one_minus_xi * gamma_fn(p - 1.0), 1.0 / (p - 2.0));
    const double c2 = params.xi * std::pow(2.0 * e * params.one_minus_xi * gamma_fn(p), 1.0 / (p - 2.0));
    return {c1, c2};
}

double tail_balance(const Parameters& params, double w, const QuadratureConfig& cfg) {
    const double p = params.p;
    const double xi = params.xi;
    return (params.one_minus_xi / xi) * scaled_power_tail(p - 2.0, xi, w, cfg) - std::pow(w, p - 2.0);
}

double slope_matching_lhs(const Parameters& params, double w, const QuadratureConfig& cfg) {
    const double p = params.p;
    const double xi = params.xi;
    // e^{w(1/xi - 1)} ∫_w^∞ = e^{-w} * (e^{w/xi} ∫_w^∞).
    return (params.one_minus_xi / xi) * p * (p - 1.0) * std::exp(-w) *
           scaled_power_tail(p - 2.0, xi, w, cfg);
}

TransitionConstants solve_transition(const Parameters& params, const QuadratureConfig& cfg) {
    const double p = params.p;
    const Thresholds t = thresholds(p);
    if (!(params.C > t.c0) || !(params.one_minus_xi < t.one_minus_xi0)) {
        throw DomainError("the construction requires C > C0(p) = " + std::to_string(t.c0));
    }
    TransitionConstants tc;
    tc.xi0 = t.xi0;
    tc.c0 = t.c0;
    std::tie(tc.c1, tc.c2) = bracket_c(params);

    const double lo = std::min(1e-12, 1e-6 * tc.c1);
    auto balance = [&](double w) { return tail_balance(params, w, cfg); };
    if (!(balance(lo) > 0.0) || !(balance(tc.c1) < 0.0)) {
        throw InternalError("tail-balance equation has no sign change on (0, c1)");
    }
    tc.w_star = bisect(balance, lo, tc.c1, 0.0, "w_star");

    auto matching = [&](double w) { return slope_matching_lhs(params, w, cfg) - d_of_w(p, w); };
    if (!(matching(tc.w_star) > 0.0)) {
        throw InternalError("slope-matching left side does not exceed D at w_star");
    }
    if (!(matching(tc.c2) < 0.0)) {
        throw InternalError("slope-matching left side is not below D at c2");
    }
    tc.w_bar = bisect(matching, tc.w_star, tc.c2, 0.0, "w_bar");

    const CupPair pair = solve_v(p, tc.w_bar);
    tc.v_bar = pair.v;
    tc.d_bar = pair.d;
    tc.cup_table = make_cup_table(p, tc.w_bar);
    return tc;
}

}  // namespace jnb
