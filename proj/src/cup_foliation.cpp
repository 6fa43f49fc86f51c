#include "jnb/cup_foliation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jnb/errors.hpp"
#include "jnb/root_finding.hpp"
#include "jnb/special_functions.hpp"
#include "jnb/transition.hpp"

namespace jnb {

namespace {

// 1 - theta^k for theta = 1 - delta.
double one_minus_pow(double delta, double k) { return -std::expm1(k * std::log1p(-delta)); }

// F(v, w) / (w^{p-1} e^v) written in delta = (w + v)/w. With h = w - v and
// theta = 1 - delta,
//   G = expm1(h) w (1 - theta^p) - p sum_{n>=2} h^n (1 + theta^{p-1}(1-n)) / n!
// where the n = 2 coefficient is 1 - theta^{p-1}. Every term is evaluated
// without cancellation.
double scaled_f(double p, double delta, double w) {
    const double h = w * (2.0 - delta);
    const double a_p = one_minus_pow(delta, p);
    const double a_pm1 = one_minus_pow(delta, p - 1.0);
    const double theta_pm1 = 1.0 - a_pm1;
    double term = 0.5 * h * h;  // h^n / n!
    double series = term * a_pm1;
    for (int n = 3; n < 60; ++n) {
        term *= h / n;
        const double contrib = term * (1.0 + theta_pm1 * (1.0 - n));
        series += contrib;
        if (std::abs(contrib) <= 1e-19 * std::abs(series)) break;
    }
    return std::expm1(h) * w * a_p - p * series;
}

void check_w(double p, double w) {
    if (!(p > 2.0)) throw DomainError("cup foliation requires p > 2");
    if (!(w > 0.0 && w < cup_w_limit(p))) {
        throw DomainError("w must lie in (0, (p-2)/(3p))");
    }
}

CupPair fill_pair(double p, double delta, double w) {
    CupPair pair;
    pair.w = w;
    pair.v = -w + delta * w;
    pair.q = slope_q(p, pair.v, w);
    pair.r = slope_r(pair.v, w);
    pair.d = d_expressions(p, pair.v, w).direct;
    return pair;
}

// v(w) by root finding in delta on (0, 1/p), where G(0) > 0 > G(1/p).
double solve_delta(double p, double w) {
    auto g = [&](double delta) { return scaled_f(p, delta, w); };
    return bracketed_root(g, 0.0, 1.0 / p, "solve_v (cup root)");
}

// w with v(w) = x1 for a point (x1, e^{x1}) of Gamma_1, x1 < 0.
double w_for_left_endpoint(double p, double x1, double w_bar) {
    const double lo = -x1;
    const double hi = std::min(-x1 / cup_lambda(p), w_bar);
    if (hi <= lo) return lo;
    auto g = [&](double w) { return (-w + solve_delta(p, w) * w) - x1; };
    return bracketed_root(g, lo, hi, "chord_coords (left endpoint)");
}

}  // namespace

double big_f(double p, double v, double w) {
    if (!(w > 0.0 && v < 0.0)) throw DomainError("big_f requires v < 0 < w");
    const double delta = (w + v) / w;
    return std::pow(w, p - 1.0) * std::exp(v) * scaled_f(p, delta, w);
}

double slope_q(double p, double v, double w) {
    if (w == v) return 0.0;
    if (v < 0.0 && w > 0.0) {
        const double delta = (w + v) / w;
        return std::pow(w, p - 1.0) * one_minus_pow(delta, p) / (2.0 - delta);
    }
    const auto pw = [p](double s) { return s < 0 ? -std::pow(-s, p) : std::pow(s, p); };
    return (pw(w) + pw(v)) / (w - v);
}

double slope_r(double v, double w) {
    if (w == v) return std::exp(v);
    const double h = w - v;
    return std::exp(v) * std::expm1(h) / h;
}

DExpressions d_expressions(double p, double v, double w) {
    const double h = w - v;
    const double theta_pm1 = std::pow(-v / w, p - 1.0);
    const double wpm1 = std::pow(w, p - 1.0);
    const double q = slope_q(p, v, w);
    const double ev = std::exp(v);
    const double e1 = expm1_minus_x(h);
    DExpressions out;
    out.direct = p * wpm1 * (1.0 + theta_pm1) / (ev * std::expm1(h));
    out.left = (q + p * theta_pm1 * wpm1) / (ev * e1 / h);
    out.right = (p * wpm1 - q) / (ev * (h * std::expm1(h) - e1) / h);
    return out;
}

CupPair solve_v(double p, double w) {
    check_w(p, w);
    return fill_pair(p, solve_delta(p, w), w);
}

double d_of_w(double p, double w) { return solve_v(p, w).d; }

std::shared_ptr<const CupTable> make_cup_table(double p, double w_bar, int nodes) {
    check_w(p, w_bar);
    auto table = std::make_shared<CupTable>();
    // Half the nodes geometric down to 1e-10 w_bar, half uniform.
    std::vector<double> ws;
    const int half = nodes / 2;
    const double lo = 1e-10 * w_bar;
    for (int i = 0; i < half; ++i) {
        ws.push_back(lo * std::pow(w_bar / lo, static_cast<double>(i) / (half - 1)));
    }
    for (int i = 1; i <= nodes - half; ++i) {
        ws.push_back(w_bar * static_cast<double>(i) / (nodes - half));
    }
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    table->w = ws;
    table->v.reserve(ws.size());
    for (double w : ws) table->v.push_back(-w + solve_delta(p, w) * w);
    return table;
}

ChordCoords chord_coords_unchecked(const Parameters& params, const TransitionConstants& tc,
                                   const Point& x) {
    const double p = params.p;
    const double above = x.x2 - std::exp(x.x1);
    ChordCoords out;

    if (above <= 0.0) {
        // On Gamma_1 the chord degenerates to one of its endpoints.
        if (x.x1 == 0.0) return out;
        if (x.x1 > 0.0) {
            out.pair = solve_v(p, std::min(x.x1, tc.w_bar));
            out.beta = 1.0;
        } else {
            out.pair = solve_v(p, w_for_left_endpoint(p, x.x1, tc.w_bar));
            out.beta = 0.0;
        }
        out.sign_changes = 1;
        return out;
    }

    // h(w) = gap of the chord (v(w), w) at x1 minus the height of x over
    // Gamma_1; increasing in w for a nested family.
    auto h_at = [&](double w, double v) { return chord_gap(v, w, x.x1) - above; };
    auto h = [&](double w) { return h_at(w, -w + solve_delta(p, w) * w); };

    const double lo = std::abs(x.x1);
    const CupTable& table = *tc.cup_table;
    std::vector<std::pair<double, double>> nodes;  // (w, h)
    if (lo > 0.0) nodes.emplace_back(lo, lo < tc.w_bar ? h(lo) : h_at(tc.w_bar, tc.v_bar));
    for (std::size_t i = 0; i < table.w.size(); ++i) {
        if (table.w[i] > lo) nodes.emplace_back(table.w[i], h_at(table.w[i], table.v[i]));
    }
    if (nodes.empty()) {
        out.pair = solve_v(p, tc.w_bar);
        out.beta = (x.x1 - out.pair.v) / (out.pair.w - out.pair.v);
        return out;
    }

    int changes = 0;
    std::size_t first = nodes.size();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const bool neg = nodes[i].second < 0.0;
        const bool next_neg = nodes[i + 1].second < 0.0;
        if (neg != next_neg) {
            ++changes;
            if (first == nodes.size()) first = i;
        }
    }
    out.sign_changes = changes;

    double w_root;
    if (first < nodes.size()) {
        w_root = bracketed_root(h, nodes[first].first, nodes[first + 1].first, "chord_coords");
    } else if (nodes.back().second <= 0.0) {
        // x sits on (or rounds just above) the outermost chord.
        w_root = tc.w_bar;
        out.excess = -nodes.back().second;
    } else {
        // Positive already at the first node: the chord is shorter than the
        // grid resolves.
        w_root = nodes.front().first;
    }
    out.pair = (w_root >= tc.w_bar) ? solve_v(p, tc.w_bar) : solve_v(p, w_root);
    if (w_root >= tc.w_bar) out.pair.v = tc.v_bar;
    out.beta = std::clamp((x.x1 - out.pair.v) / (out.pair.w - out.pair.v), 0.0, 1.0);
    return out;
}

ChordCoords chord_coords(const Parameters& params, const TransitionConstants& tc, const Point& x) {
    if (!in_domain(params, x)) throw DomainError("chord_coords: point lies outside Omega_C");
    if (classify(params, tc, x) != SubdomainLabel::R4) {
        throw DomainError("chord_coords: point is not in the cup subdomain R4");
    }
    if (x.x1 == 0.0 && x.x2 == 1.0) return ChordCoords{};
    return chord_coords_unchecked(params, tc, x);
}

}  // namespace jnb
