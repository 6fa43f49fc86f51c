#include "jnb/candidate.hpp"

#include <algorithm>
#include <cmath>

#include "jnb/errors.hpp"

namespace jnb {

namespace {

double abs_pow(double s, double a) { return std::pow(std::abs(s), a); }

}  // namespace

double m1(const Parameters& params, double z, const QuadratureConfig& cfg) {
    return (params.p / params.xi) * scaled_signed_tail(params.p, params.xi, z, cfg);
}

double m3(const Parameters& params, const TransitionConstants& tc, double z,
          const QuadratureConfig& cfg) {
    if (!(z <= tc.v_bar)) throw DomainError("m3 is defined for z <= v_bar only");
    return BellmanCandidate(params, tc, cfg).m3(z);
}

double BellmanCandidate::cup_value(const ChordCoords& cc) const {
    if (cc.pair.w == 0.0) return 0.0;
    const double p = params_.p;
    // q(v,w)(x1 - w) + w^p rewritten through beta, continued with slope D
    // above the outermost chord.
    return cc.beta * std::pow(cc.pair.w, p) + (1.0 - cc.beta) * std::pow(-cc.pair.v, p) +
           cc.pair.d * cc.excess;
}

BellmanCandidate::BellmanCandidate(const Parameters& params, const TransitionConstants& tc,
                                   const QuadratureConfig& cfg)
    : params_(params), tc_(tc), cfg_(cfg) {
    const double p = params_.p;
    q_bar_ = slope_q(p, tc_.v_bar, tc_.w_bar);
    r_bar_ = slope_r(tc_.v_bar, tc_.w_bar);
    m1_w_bar_ = jnb::m1(params_, tc_.w_bar, cfg_);
    trolleybus_slope_ = (m1_w_bar_ - q_bar_) / (params_.k(tc_.w_bar) - r_bar_);
    m3_boundary_ = std::exp(tc_.v_bar - tc_.w_bar) * (m1_w_bar_ - p * std::pow(tc_.w_bar, p - 1.0)) -
                   p * std::pow(-tc_.v_bar, p - 1.0);
    tail_w_bar_ = scaled_power_tail(p - 2.0, params_.xi, tc_.w_bar, cfg_);
}

double BellmanCandidate::m1(double z) const { return jnb::m1(params_, z, cfg_); }

double BellmanCandidate::m3(double z) const {
    const double p = params_.p;
    const double xi = params_.xi;
    // e^{z/xi} ∫_z^{v_bar} (-s)^{p-1} e^{-s/xi} ds = ∫_0^{v_bar - z} |z + r|^{p-1} e^{-r/xi} dr
    const double length = std::max(0.0, tc_.v_bar - z);
    const double integral = abs_power_laplace(z, p - 1.0, xi, length, cfg_);
    return -(p / xi) * integral + std::exp((z - tc_.v_bar) / xi) * m3_boundary_;
}

Point BellmanCandidate::corner_x() const { return {tc_.w_bar + params_.xi, params_.k(tc_.w_bar)}; }
Point BellmanCandidate::corner_y() const { return {tc_.w_bar, std::exp(tc_.w_bar)}; }
Point BellmanCandidate::corner_z() const { return {tc_.v_bar, std::exp(tc_.v_bar)}; }
Point BellmanCandidate::corner_w() const { return {tc_.v_bar + params_.xi, params_.k(tc_.v_bar)}; }

Alphas BellmanCandidate::alphas(const Point& x) const {
    const Point cx = corner_x();
    const double ez = std::exp(tc_.v_bar);
    // Columns X - Z and Y - Z; Y - Z in cancellation-free form.
    const double a11 = cx.x1 - tc_.v_bar;
    const double a21 = cx.x2 - ez;
    const double a12 = tc_.w_bar - tc_.v_bar;
    const double a22 = ez * std::expm1(tc_.w_bar - tc_.v_bar);
    const double b1 = x.x1 - tc_.v_bar;
    const double b2 = x.x2 - ez;
    const double det = a11 * a22 - a12 * a21;
    Alphas out;
    out.a1 = (b1 * a22 - a12 * b2) / det;
    out.a2 = (a11 * b2 - a21 * b1) / det;
    out.a3 = 1.0 - out.a1 - out.a2;
    return out;
}

double BellmanCandidate::tangential_value(double m, double u, double x1) const {
    return m * (x1 - u) + abs_pow(u, params_.p);
}

double BellmanCandidate::tangential_x2(double m, double u) const {
    const double p = params_.p;
    const double signed_power = u < 0 ? -std::pow(-u, p - 1.0) : std::pow(u, p - 1.0);
    const double m_prime = (m - p * signed_power) / params_.xi;
    return m_prime * std::exp(-u) * params_.one_minus_xi;
}

double BellmanCandidate::evaluate_branch(const Point& x, SubdomainLabel label) const {
    const double p = params_.p;
    switch (label) {
        case SubdomainLabel::R1: {
            const double u = tangent_u_unchecked(params_, x);
            return tangential_value(m1(u), u, x.x1);
        }
        case SubdomainLabel::R3: {
            const double u = tangent_u_unchecked(params_, x);
            return tangential_value(m3(u), u, x.x1);
        }
        case SubdomainLabel::R2: {
            const double above_chord =
                (x.x2 - std::exp(x.x1)) - chord_gap(tc_.v_bar, tc_.w_bar, x.x1);
            return q_bar_ * (x.x1 - tc_.w_bar) + std::pow(tc_.w_bar, p) +
                   trolleybus_slope_ * above_chord;
        }
        case SubdomainLabel::R4: {
            const ChordCoords cc = chord_coords_unchecked(params_, tc_, x);
            return cup_value(cc);
        }
    }
    return 0.0;
}

double BellmanCandidate::derivative_x2_branch(const Point& x, SubdomainLabel label) const {
    switch (label) {
        case SubdomainLabel::R1: {
            const double u = tangent_u_unchecked(params_, x);
            return tangential_x2(m1(u), u);
        }
        case SubdomainLabel::R3: {
            const double u = tangent_u_unchecked(params_, x);
            return tangential_x2(m3(u), u);
        }
        case SubdomainLabel::R2:
            return trolleybus_slope_;
        case SubdomainLabel::R4: {
            const ChordCoords cc = chord_coords_unchecked(params_, tc_, x);
            return cc.pair.w == 0.0 ? 0.0 : cc.pair.d;
        }
    }
    return 0.0;
}

BellmanValue BellmanCandidate::evaluate(const Point& x) const {
    if (!in_domain(params_, x)) throw DomainError("bellman: point lies outside Omega_C");
    BellmanValue out;
    out.label = classify(params_, tc_, x);
    switch (out.label) {
        case SubdomainLabel::R1: {
            const double u = tangent_u_unchecked(params_, x);
            out.value = tangential_value(m1(u), u, x.x1);
            out.foliation = TangentFoot{u};
            break;
        }
        case SubdomainLabel::R3: {
            const double u = std::min(tangent_u_unchecked(params_, x), tc_.v_bar);
            out.value = tangential_value(m3(u), u, x.x1);
            out.foliation = TangentFoot{u};
            break;
        }
        case SubdomainLabel::R2: {
            out.value = evaluate_branch(x, SubdomainLabel::R2);
            out.foliation = alphas(x);
            break;
        }
        case SubdomainLabel::R4: {
            ChordCoords cc;
            if (!(x.x1 == 0.0 && x.x2 == 1.0)) cc = chord_coords_unchecked(params_, tc_, x);
            out.value = cup_value(cc);
            out.foliation = cc;
            break;
        }
    }
    return out;
}

double BellmanCandidate::derivative_x2(const Point& x) const {
    if (!in_domain(params_, x)) throw DomainError("bellman_x2: point lies outside Omega_C");
    return derivative_x2_branch(x, classify(params_, tc_, x));
}

double BellmanCandidate::h1(double u) const {
    const double p = params_.p;
    const double xi = params_.xi;
    return xi * std::pow(u, p - 2.0) -
           params_.one_minus_xi * scaled_power_tail(p - 2.0, xi, u, cfg_);
}

double BellmanCandidate::h3(double u) const {
    const double p = params_.p;
    const double xi = params_.xi;
    const double length = std::max(0.0, tc_.v_bar - u);
    const double near = abs_power_laplace(u, p - 2.0, xi, length, cfg_);
    const double far = std::exp((u - tc_.v_bar) / xi - (tc_.w_bar - tc_.v_bar)) * tail_w_bar_;
    return xi * std::pow(-u, p - 2.0) - params_.one_minus_xi * (near + far);
}

BellmanValue bellman(const Parameters& params, const TransitionConstants& tc, const Point& x,
                     const QuadratureConfig& cfg) {
    return BellmanCandidate(params, tc, cfg).evaluate(x);
}

double bellman_x2(const Parameters& params, const TransitionConstants& tc, const Point& x,
                  const QuadratureConfig& cfg) {
    return BellmanCandidate(params, tc, cfg).derivative_x2(x);
}

}  // namespace jnb
