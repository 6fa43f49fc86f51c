#include "jnb/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "json.hpp"

#include "jnb/errors.hpp"
#include "jnb/optimizer.hpp"

namespace jnb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic uniform draws; each check salts the seed so its samples do
// not depend on which other checks ran.
class Sampler {
  public:
    Sampler(std::uint64_t seed, std::uint64_t salt) : gen_(seed * 0x9E3779B97F4A7C15ULL ^ salt) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

  private:
    std::mt19937_64 gen_;
};

// Residual must stay <= tol (or < tol when strict). NaN fails.
VerificationEntry make_entry(std::string name, double worst, double tol, long samples,
                             bool strict = false) {
    VerificationEntry e;
    e.name = std::move(name);
    e.worst_residual = worst;
    e.samples = samples;
    e.passed = !std::isnan(worst) && (strict ? worst < tol : worst <= tol);
    return e;
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Point on_tangent(const Parameters& params, double u, double s) {
    return {u + s * params.xi, std::exp(u) + s * params.xi * params.k(u)};
}

Point on_outer_chord(const TransitionConstants& tc, double s) {
    const double x1 = tc.v_bar + s * (tc.w_bar - tc.v_bar);
    return {x1, std::exp(x1) + chord_gap(tc.v_bar, tc.w_bar, x1)};
}

// A point of Omega_C with x1 in [lo, hi]; R drawn uniformly or
// log-uniformly in [1, C] on alternate calls.
Point sample_domain(Sampler& rng, const Parameters& params, double lo, double hi, bool log_r) {
    const double x1 = rng.uniform(lo, hi);
    const double R = log_r ? std::exp(rng.uniform() * std::log(params.C))
                           : rng.uniform(1.0, params.C);
    return {x1, R * std::exp(x1)};
}

// A point between Gamma_1 and three cup heights above it, near the cup.
Point sample_cup_box(Sampler& rng, const TransitionConstants& tc) {
    const double width = tc.w_bar - tc.v_bar;
    const double x1 = rng.uniform(tc.v_bar - 0.5 * width, tc.w_bar + 0.5 * width);
    const double top = 3.0 * chord_gap(tc.v_bar, tc.w_bar, 0.5 * (tc.v_bar + tc.w_bar));
    return {x1, std::exp(x1) + rng.uniform() * top};
}

// Set definitions of the four subdomains written directly in terms of the
// separating lines. Returns the label or -1 when the point is not in exactly
// one set.
int direct_label(const Parameters& params, const TransitionConstants& tc, const Point& x,
                 double& distance) {
    const double vb = tc.v_bar;
    const double wb = tc.w_bar;
    const double xi = params.xi;
    const double line_y = params.k(wb) * (x.x1 - wb) + std::exp(wb);
    const double line_w = params.k(vb) * (x.x1 - vb) + std::exp(vb);
    const double chord = slope_r(vb, wb) * (x.x1 - wb) + std::exp(wb);
    distance = std::min({std::abs(x.x2 - line_y) / x.x2, std::abs(x.x2 - line_w) / x.x2,
                         std::abs(x.x2 - chord) / x.x2, std::abs(x.x1 - (vb + xi)),
                         std::abs(x.x1 - (wb + xi))});
    const bool r4 = x.x2 <= chord;
    const bool r1 = x.x2 <= line_y || x.x1 >= wb + xi;
    const bool r2 = (x.x2 <= line_w && x.x2 >= chord && x.x2 >= line_y) ||
                    (x.x1 >= vb + xi && x.x1 <= wb + xi && x.x2 >= line_w && x.x2 >= line_y);
    const bool r3 = x.x1 <= vb + xi && x.x2 >= line_w;
    if (r1 + r2 + r3 + r4 != 1) return -1;
    if (r1) return static_cast<int>(SubdomainLabel::R1);
    if (r2) return static_cast<int>(SubdomainLabel::R2);
    if (r3) return static_cast<int>(SubdomainLabel::R3);
    return static_cast<int>(SubdomainLabel::R4);
}

// Minimum over the segment of C e^{x1} - x2, which is convex along it.
bool segment_in_domain(const Parameters& params, const Point& a, const Point& b) {
    if (!in_domain(params, a) || !in_domain(params, b)) return false;
    auto g = [&](double t) {
        const double x1 = a.x1 + t * (b.x1 - a.x1);
        const double x2 = a.x2 + t * (b.x2 - a.x2);
        return params.C * std::exp(x1) - x2;
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (g(m1) < g(m2)) hi = m2; else lo = m1;
    }
    return g(0.5 * (lo + hi)) >= 0.0;
}

}  // namespace

bool VerificationReport::all_passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

const VerificationEntry* VerificationReport::find(std::string_view name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::string to_json(const VerificationReport& report) {
    nlohmann::json j;
    j["p"] = report.p;
    j["C"] = report.C;
    j["seed"] = report.seed;
    j["version"] = "0.1.0";
    j["passed"] = report.all_passed();
    j["entries"] = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json je;
        je["name"] = e.name;
        je["passed"] = e.passed;
        // JSON has no infinities; those become null.
        if (std::isfinite(e.worst_residual)) je["worst_residual"] = e.worst_residual;
        else je["worst_residual"] = nullptr;
        je["samples"] = e.samples;
        j["entries"].push_back(je);
    }
    return j.dump(2);
}

SuiteContext::SuiteContext(double p, double C, std::uint64_t seed, const QuadratureConfig& cfg)
    : params_(Parameters::make(p, C)),
      cfg_(cfg),
      tc_(solve_transition(params_, cfg_)),
      candidate_(params_, tc_, cfg_),
      seed_(seed) {}

namespace checks {

std::vector<VerificationEntry> special_functions(const SuiteContext& ctx) {
    const double p = ctx.params().p;
    const double xi = ctx.params().xi;
    const auto& cfg = ctx.quadrature();
    std::vector<VerificationEntry> out;

    double worst = 0.0;
    for (double s : {0.5, 1.5, 3.2}) worst = std::max(worst, rel_diff(gamma_fn(s + 1.0), s * gamma_fn(s)));
    out.push_back(make_entry("special_functions.gamma_recurrence", worst, 1e-12, 3));

    worst = -kInf;
    double prev = tail_integral(p, xi, 0.0, cfg);
    const int n = 200;
    for (int i = 1; i <= n; ++i) {
        const double t = tail_integral(p, xi, 20.0 * i / n, cfg);
        worst = std::max(worst, t - prev);
        prev = t;
    }
    out.push_back(make_entry("special_functions.tail_decreasing", worst, 0.0, n, true));

    worst = 0.0;
    const double ws[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    for (double w : ws) {
        const double h = 1e-4 * (1.0 + w);
        const double fd = (tail_integral(p, xi, w + h, cfg) - tail_integral(p, xi, w - h, cfg)) / (2 * h);
        const double exact = -std::pow(w, p - 2.0) * std::exp(-w / xi);
        worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
    }
    out.push_back(make_entry("special_functions.tail_derivative", worst, 1e-6, 5));

    worst = std::max(std::abs(omega(2.0 - 1e-6, cfg) - 1.0), std::abs(omega(2.0 + 1e-6, cfg) - 1.0));
    out.push_back(make_entry("special_functions.omega_continuity_at_2", worst, 1e-5, 2));
    return out;
}

std::vector<VerificationEntry> geometry(const SuiteContext& ctx, int classify_samples) {
    const Parameters& params = ctx.params();
    const TransitionConstants& tc = ctx.transition();
    std::vector<VerificationEntry> out;

    out.push_back(make_entry("geometry.xi_residual", params.xi_residual(), 1e-12, 1));

    std::vector<double> feet;
    for (int i = 0; i <= 40; ++i) feet.push_back(-3.0 + 6.0 * i / 40);
    for (double u : {tc.v_bar, tc.w_bar, 0.5 * tc.v_bar, 0.5 * tc.w_bar}) feet.push_back(u);
    double worst = 0.0;
    long count = 0;
    for (double u0 : feet) {
        for (int j = 1; j < 10; ++j) {
            const Point x = on_tangent(params, u0, j / 10.0);
            worst = std::max(worst, std::abs(tangent_u(params, x) - u0));
            ++count;
        }
    }
    out.push_back(make_entry("geometry.tangent_round_trip", worst, 1e-10, count));

    Sampler rng(ctx.seed(), 0x636c6173);
    const double span = tc.w_bar + params.xi + 3.0;
    long mismatches = 0;
    long tested = 0;
    for (int i = 0; tested < classify_samples && i < 20 * classify_samples; ++i) {
        Point x;
        switch (i % 4) {
            case 0: x = sample_domain(rng, params, -span, span, false); break;
            case 1: x = sample_domain(rng, params, -span, span, true); break;
            case 2: x = sample_domain(rng, params, tc.v_bar - params.xi, tc.w_bar + 2 * params.xi, true); break;
            default: x = sample_cup_box(rng, tc); break;
        }
        if (!in_domain(params, x)) continue;
        if (x.x2 - std::exp(x.x1) < 1e-8 * x.x2 || params.C * std::exp(x.x1) - x.x2 < 1e-8 * x.x2) continue;
        double distance = 0.0;
        const int expected = direct_label(params, tc, x, distance);
        if (distance <= 1e-8) continue;
        ++tested;
        if (expected != static_cast<int>(classify(params, tc, x))) ++mismatches;
    }
    out.push_back(make_entry("geometry.classify_matches_set_definitions",
                             static_cast<double>(mismatches), 0.0, tested));
    return out;
}

std::vector<VerificationEntry> cup_lemmas(const SuiteContext& ctx) {
    const double p = ctx.params().p;
    const double lim = cup_w_limit(p);
    const double lambda = cup_lambda(p);
    std::vector<VerificationEntry> out;

    std::vector<double> grid;
    const int n = 100;
    for (int i = 0; i < n; ++i) grid.push_back(lim * std::pow(1e-8, 1.0 - (i + 0.5) / n));

    // F(-w, w) > 0 > F(-lambda w, w).
    double worst = -kInf;
    for (double w : grid) {
        worst = std::max(worst, -big_f(p, -w, w));
        worst = std::max(worst, big_f(p, -lambda * w, w));
    }
    out.push_back(make_entry("cup.root_bracket_signs", worst, 0.0, 2 * n, true));

    auto lhs = [&](double v, double w) {
        return (std::pow(w, p - 1.0) + std::pow(-v, p - 1.0)) / (std::exp(v) * std::expm1(w - v));
    };
    worst = -kInf;
    long count = 0;
    for (int i = 0; i < 40; ++i) {
        const double w = std::pow(10.0, -4.0 + 4.6 * i / 39);
        for (int j = 0; j < 20; ++j) {
            const double v = -w * (1.0 - (j + 0.5) / 20 / p);
            const double rhs = (p - 1.0) * std::pow(-v, p - 2.0) * std::exp(-v);
            worst = std::max(worst, lhs(v, w) / rhs - 1.0);
            ++count;
        }
    }
    out.push_back(make_entry("cup.chord_slope_bound_left", worst, 0.0, count, true));

    worst = -kInf;
    count = 0;
    const double wmax = (p - 2.0) / (p - 1.0);
    for (int i = 0; i < 40; ++i) {
        const double w = wmax * std::pow(1e-4, 1.0 - i / 39.0);
        for (int j = 0; j < 20; ++j) {
            const double v = -w * (j + 0.5) / 20;
            const double rhs = (p - 1.0) * std::pow(w, p - 2.0) * std::exp(-w);
            worst = std::max(worst, lhs(v, w) / rhs - 1.0);
            ++count;
        }
    }
    out.push_back(make_entry("cup.chord_slope_bound_right", worst, 0.0, count, true));

    double bound_worst = -kInf;
    double mono_worst = -kInf;
    double agree_worst = 0.0;
    double prev_d = -kInf;
    for (double w : grid) {
        const CupPair pair = solve_v(p, w);
        const double v = pair.v;
        const double b1 = p * (p - 1.0) * std::pow(-v, p - 2.0) * std::exp(-v);
        const double b2 = p * (p - 1.0) * std::pow(w, p - 2.0) * std::exp(-w);
        bound_worst = std::max({bound_worst, pair.d / b1 - 1.0, pair.d / b2 - 1.0});
        mono_worst = std::max(mono_worst, (prev_d - pair.d) / pair.d);
        prev_d = pair.d;
        const DExpressions de = d_expressions(p, v, w);
        agree_worst = std::max({agree_worst, rel_diff(de.left, de.direct), rel_diff(de.right, de.direct),
                                rel_diff(de.left, de.right)});
    }
    out.push_back(make_entry("cup.d_upper_bounds", bound_worst, 0.0, n, true));
    out.push_back(make_entry("cup.d_increasing", mono_worst, 0.0, n, true));
    out.push_back(make_entry("cup.d_expressions_agree", agree_worst, 1e-9, n));

    // Chord scan sees exactly one sign change at interior cup points.
    const TransitionConstants& tc = ctx.transition();
    Sampler rng(ctx.seed(), 0x63686f72);
    int max_changes = 0;
    for (int i = 0; i < 200; ++i) {
        const double x1 = tc.v_bar + rng.uniform(0.01, 0.99) * (tc.w_bar - tc.v_bar);
        const Point x{x1, std::exp(x1) + rng.uniform(0.01, 0.99) * chord_gap(tc.v_bar, tc.w_bar, x1)};
        max_changes = std::max(max_changes, chord_coords(ctx.params(), tc, x).sign_changes);
    }
    out.push_back(make_entry("cup.chord_scan_sign_changes", max_changes, 1.0, 200));
    return out;
}

std::vector<VerificationEntry> transition(const SuiteContext& ctx) {
    const Parameters& params = ctx.params();
    const TransitionConstants& tc = ctx.transition();
    const auto& cfg = ctx.quadrature();
    const double p = params.p;
    std::vector<VerificationEntry> out;

    // Each a < b contributes (a - b)/max(|a|,|b|).
    auto margin = [](double a, double b) { return (a - b) / std::max(std::abs(a), std::abs(b)); };
    const double order = std::max({margin(0.0, tc.w_star), margin(tc.w_star, tc.c1), margin(tc.c1, tc.c2),
                                   margin(tc.c2, params.xi), margin(tc.c2, cup_w_limit(p)),
                                   margin(tc.w_star, tc.w_bar), margin(tc.w_bar, tc.c2),
                                   margin(-tc.w_bar, tc.v_bar),
                                   margin(tc.v_bar, -tc.w_bar * cup_lambda(p))});
    out.push_back(make_entry("transition.ordering", order, 0.0, 9, true));

    auto matching = [&](double w) { return slope_matching_lhs(params, w, cfg) - d_of_w(p, w); };
    const double lo = std::min(1e-12, 1e-6 * tc.c1);
    const double brackets = std::max({-tail_balance(params, lo, cfg), tail_balance(params, tc.c1, cfg),
                                      -matching(tc.w_star), matching(tc.c2)});
    out.push_back(make_entry("transition.bracket_signs", brackets, 0.0, 4, true));

    const double residual = std::max(std::abs(tail_balance(params, tc.w_star, cfg)),
                                     std::abs(matching(tc.w_bar)));
    out.push_back(make_entry("transition.root_residuals", residual, 1e-10, 2));

    double worst = -kInf;
    double prev = slope_matching_lhs(params, tc.w_star, cfg);
    const int n = 100;
    for (int i = 1; i <= n; ++i) {
        const double w = tc.w_star + (tc.c2 - tc.w_star) * i / n;
        const double cur = slope_matching_lhs(params, w, cfg);
        worst = std::max(worst, (cur - prev) / prev);
        prev = cur;
    }
    out.push_back(make_entry("transition.matching_lhs_decreasing", worst, 0.0, n, true));
    return out;
}

VerificationEntry boundary_condition(const SuiteContext& ctx, int points) {
    const BellmanCandidate& cand = ctx.candidate();
    const double p = ctx.params().p;
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double s = -3.0 + 6.0 * i / (points - 1);
        const double b = cand.evaluate({s, std::exp(s)}).value;
        worst = std::max(worst, std::abs(b - std::pow(std::abs(s), p)));
    }
    return make_entry("candidate.boundary_condition", worst, 1e-9, points);
}

std::vector<VerificationEntry> boundary_matching(const SuiteContext& ctx, int points) {
    const BellmanCandidate& cand = ctx.candidate();
    const Parameters& params = ctx.params();
    const TransitionConstants& tc = ctx.transition();
    struct Boundary {
        const char* name;
        SubdomainLabel a;
        SubdomainLabel b;
    };
    const Boundary boundaries[] = {{"R1_R2", SubdomainLabel::R1, SubdomainLabel::R2},
                                   {"R2_R3", SubdomainLabel::R2, SubdomainLabel::R3},
                                   {"R2_R4", SubdomainLabel::R2, SubdomainLabel::R4}};
    std::vector<VerificationEntry> out;
    for (const Boundary& bd : boundaries) {
        double value_worst = 0.0;
        double slope_worst = 0.0;
        for (int i = 0; i < points; ++i) {
            const double s = (i + 0.5) / points;
            Point x;
            if (bd.a == SubdomainLabel::R1) x = on_tangent(params, tc.w_bar, s);
            else if (bd.b == SubdomainLabel::R3) x = on_tangent(params, tc.v_bar, s);
            else x = on_outer_chord(tc, s);
            value_worst = std::max(value_worst, rel_diff(cand.evaluate_branch(x, bd.a),
                                                         cand.evaluate_branch(x, bd.b)));
            slope_worst = std::max({slope_worst, std::abs(cand.derivative_x2_branch(x, bd.a) - tc.d_bar),
                                    std::abs(cand.derivative_x2_branch(x, bd.b) - tc.d_bar)});
        }
        out.push_back(make_entry(std::string("candidate.continuity.") + bd.name, value_worst, 1e-8, points));
        out.push_back(make_entry(std::string("candidate.c1_matching.") + bd.name, slope_worst, 1e-7, points));
    }
    return out;
}

VerificationEntry convexity(const SuiteContext& ctx, int segments) {
    const BellmanCandidate& cand = ctx.candidate();
    const Parameters& params = ctx.params();
    const TransitionConstants& tc = ctx.transition();
    Sampler rng(ctx.seed(), 0x636f6e76);
    const double span = tc.w_bar + params.xi + 3.0;
    const double width = tc.w_bar - tc.v_bar;

    double worst = -kInf;
    long tested = 0;
    for (long i = 0; tested < segments && i < 50L * segments; ++i) {
        Point a, b;
        const int kind = static_cast<int>(i % 4);
        if (kind < 2) {
            a = sample_domain(rng, params, -span, span, kind == 1);
            b = sample_domain(rng, params, -span, span, kind == 1);
        } else {
            // Short segments around the transition zone or the cup.
            const Point c = kind == 2 ? sample_domain(rng, params, tc.v_bar - params.xi,
                                                      tc.w_bar + 2 * params.xi, true)
                                      : sample_cup_box(rng, tc);
            const double len = (kind == 2 ? params.xi : width) * std::pow(10.0, rng.uniform(-4.0, 0.0));
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double d1 = 0.5 * len * std::cos(angle);
            const double d2 = 0.5 * len * std::sin(angle) * c.x2;
            a = {c.x1 - d1, c.x2 - d2};
            b = {c.x1 + d1, c.x2 + d2};
        }
        if (!segment_in_domain(params, a, b)) continue;
        const Point m{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
        const double gap = cand.evaluate(m).value -
                           0.5 * (cand.evaluate(a).value + cand.evaluate(b).value);
        worst = std::max(worst, gap);
        ++tested;
    }
    return make_entry("candidate.midpoint_convexity", worst, 1e-8, tested);
}

std::vector<VerificationEntry> h_positivity(const SuiteContext& ctx) {
    const BellmanCandidate& cand = ctx.candidate();
    const TransitionConstants& tc = ctx.transition();
    const int n = 100;
    double worst1 = -kInf;
    double worst3 = -kInf;
    for (int i = 0; i < n; ++i) {
        const double step = 20.0 * std::pow(static_cast<double>(i) / (n - 1), 2.0);
        worst1 = std::max(worst1, -cand.h1(tc.w_bar + step));
        worst3 = std::max(worst3, -cand.h3(tc.v_bar - step));
    }
    return {make_entry("candidate.h1_positive", worst1, 0.0, n, true),
            make_entry("candidate.h3_positive", worst3, 0.0, n, true)};
}

std::vector<VerificationEntry> monge_ampere(const SuiteContext& ctx, int points) {
    const TransitionConstants& tc = ctx.transition();
    Sampler rng(ctx.seed(), 0x6d6f6e67);
    double det_worst = 0.0;
    double b22_worst = -kInf;
    for (int i = 0; i < points; ++i) {
        const double x1 = tc.v_bar + rng.uniform(0.2, 0.8) * (tc.w_bar - tc.v_bar);
        const double gap = chord_gap(tc.v_bar, tc.w_bar, x1);
        const double x2 = std::exp(x1) + rng.uniform(0.2, 0.8) * gap;
        // The cup is far flatter than it is wide, so both steps are tied to
        // its height. Differences are taken of the exact gradient
        // (q - D r, D) along the chord through each stencil point, because b
        // itself is too small inside the cup for second differences.
        const double h2 = 1e-2 * gap;
        const double h1 = h2 * std::exp(-x1);
        auto grad = [&](double d1, double d2) {
            const CupPair c = chord_coords_unchecked(ctx.params(), tc, {x1 + d1 * h1, x2 + d2 * h2}).pair;
            return std::pair{c.q - c.d * c.r, c.d};
        };
        const auto e1p = grad(1, 0), e1m = grad(-1, 0), e2p = grad(0, 1), e2m = grad(0, -1);
        const double b11 = (e1p.first - e1m.first) / (2 * h1);
        const double b22 = (e2p.second - e2m.second) / (2 * h2);
        const double b12 = 0.5 * ((e1p.second - e1m.second) / (2 * h1) + (e2p.first - e2m.first) / (2 * h2));
        det_worst = std::max(det_worst, std::abs(b11 * b22 - b12 * b12) / (1.0 + std::abs(b11 * b22)));
        b22_worst = std::max(b22_worst, -b22);
    }
    return {make_entry("candidate.r4_degenerate_hessian", det_worst, 1e-4, points),
            make_entry("candidate.r4_b22_nonnegative", b22_worst, 1e-8, points)};
}

VerificationEntry axis_top(const SuiteContext& ctx) {
    const BellmanCandidate& cand = ctx.candidate();
    const Parameters& params = ctx.params();
    const BellmanValue v = cand.evaluate({0.0, params.C});
    const double expected = cand.m3(-params.xi) * params.xi + std::pow(params.xi, params.p);
    double residual = std::abs(v.value - expected) / std::max(1.0, std::abs(expected));
    if (v.label != SubdomainLabel::R3) residual = kInf;
    return make_entry("candidate.value_at_0_C", residual, 1e-12, 1);
}

std::vector<VerificationEntry> optimizers(const SuiteContext& ctx, int points) {
    const BellmanCandidate& cand = ctx.candidate();
    const Parameters& params = ctx.params();
    const TransitionConstants& tc = ctx.transition();
    const double p = params.p;
    Sampler rng(ctx.seed(), 0x6f707469);

    std::vector<Point> xs = {{0.0, 1.0},         {0.0, params.C},     cand.corner_x(),
                             cand.corner_y(),    cand.corner_z(),     cand.corner_w(),
                             {1.0, std::exp(1.0)}, {-1.0, params.C * std::exp(-1.0)}};
    const int per_region = std::max(1, (points - static_cast<int>(xs.size())) / 4);
    for (int i = 0; i < per_region; ++i) {
        xs.push_back(on_tangent(params, tc.w_bar + rng.uniform(0.0, 3.0), rng.uniform(0.01, 0.99)));
        xs.push_back(on_tangent(params, tc.v_bar - rng.uniform(0.0, 3.0), rng.uniform(0.01, 0.99)));
        const double x1 = tc.v_bar + rng.uniform(0.01, 0.99) * (tc.w_bar - tc.v_bar);
        xs.push_back({x1, std::exp(x1) + rng.uniform(0.01, 0.99) * chord_gap(tc.v_bar, tc.w_bar, x1)});
    }
    const Point X = cand.corner_x(), Y = cand.corner_y(), Z = cand.corner_z();
    for (int found = 0, tries = 0; found < per_region && tries < 1000 * per_region; ++tries) {
        double a1 = rng.uniform(), a2 = rng.uniform(), a3 = rng.uniform();
        const double s = a1 + a2 + a3;
        a1 /= s; a2 /= s; a3 /= s;
        const Point x{a1 * X.x1 + a2 * Y.x1 + a3 * Z.x1, a1 * X.x2 + a2 * Y.x2 + a3 * Z.x2};
        if (!in_domain(params, x) || classify(params, tc, x) != SubdomainLabel::R2) continue;
        xs.push_back(x);
        ++found;
    }

    double mean_w = 0.0, exp_w = 0.0, opt_w = 0.0, ainf_w = -kInf, junction_w = 0.0;
    for (const Point& x : xs) {
        const PiecewiseTestFunction phi = build_optimizer(cand, x);
        const Moments m = moments(phi, p, ctx.quadrature());
        mean_w = std::max(mean_w, std::abs(m.mean - x.x1));
        exp_w = std::max(exp_w, std::abs(m.exp_mean - x.x2) / x.x2);
        const double b = cand.evaluate(x).value;
        opt_w = std::max(opt_w, std::abs(m.p_mean - b) / std::max(1.0, b));
        ainf_w = std::max(ainf_w, a_infty_characteristic(phi) / params.C - 1.0);
        // Junctions next to a logarithmic piece are continuous; steps between
        // constants are genuine jumps.
        const auto& pcs = phi.pieces();
        for (std::size_t i = 0; i + 1 < pcs.size(); ++i) {
            const bool log_side = std::holds_alternative<LogDecayPiece>(pcs[i].kind) ||
                                  std::holds_alternative<LogDecayPiece>(pcs[i + 1].kind);
            if (log_side) junction_w = std::max(junction_w, std::abs(phi.right_value(i) - phi.left_value(i + 1)));
        }
    }
    const long n = static_cast<long>(xs.size());
    std::vector<VerificationEntry> out = {
        make_entry("optimizer.mean", mean_w, 1e-8, n),
        make_entry("optimizer.exp_mean", exp_w, 1e-8, n),
        make_entry("optimizer.optimality", opt_w, 1e-6, n),
        make_entry("optimizer.a_infty_within_C", ainf_w, 1e-6, n),
        make_entry("optimizer.junction_continuity", junction_w, 1e-9, n),
    };

    // Both formulas on a shared boundary give the same function.
    double consistency = 0.0;
    long checked = 0;
    for (int i = 0; i < 20; ++i) {
        const double s = (i + 0.5) / 20;
        const std::pair<Point, std::pair<SubdomainLabel, SubdomainLabel>> cases[] = {
            {on_tangent(params, tc.w_bar, s), {SubdomainLabel::R1, SubdomainLabel::R2}},
            {on_tangent(params, tc.v_bar, s), {SubdomainLabel::R2, SubdomainLabel::R3}},
            {on_outer_chord(tc, s), {SubdomainLabel::R2, SubdomainLabel::R4}}};
        for (const auto& [x, labels] : cases) {
            const auto fa = build_optimizer_branch(cand, x, labels.first);
            const auto fb = build_optimizer_branch(cand, x, labels.second);
            std::vector<double> cuts = fa.breakpoints();
            const auto cb = fb.breakpoints();
            cuts.insert(cuts.end(), cb.begin(), cb.end());
            for (int k = 1; k < 400; ++k) {
                const double t = k / 400.0;
                const bool near_cut = std::any_of(cuts.begin(), cuts.end(),
                                                  [t](double c) { return std::abs(t - c) < 1e-9; });
                if (near_cut) continue;
                consistency = std::max(consistency, std::abs(fa(t) - fb(t)));
            }
            ++checked;
        }
    }
    out.push_back(make_entry("optimizer.boundary_consistency", consistency, 1e-8, checked));
    return out;
}

std::vector<VerificationEntry> log_function(const SuiteContext& ctx) {
    std::vector<VerificationEntry> out;
    auto characteristic = [](double eps) {
        const PiecewiseTestFunction phi({Piece{0.0, 1.0, LogDecayPiece{0.0, 1.0}}}, eps, 1.0 - eps);
        return a_infty_characteristic(phi);
    };
    double worst = -kInf;
    double prev = characteristic(0.1);
    for (int i = 2; i <= 9; ++i) {
        const double cur = characteristic(0.1 * i);
        worst = std::max(worst, prev - cur);
        prev = cur;
    }
    out.push_back(make_entry("log_function.a_infty_increasing", worst, 0.0, 9, true));
    const double ratio = characteristic(0.99) / characteristic(0.9);
    out.push_back(make_entry("log_function.a_infty_blowup", 2.0 - ratio, 0.0, 2, true));

    const double p = ctx.params().p;
    const double gap = std::abs(bmo_norm_log(p, ctx.quadrature()) - omega(p, ctx.quadrature()));
    out.push_back(make_entry("log_function.bmo_norm_equals_omega", gap, 1e-6, 1));
    return out;
}

}  // namespace checks

VerificationReport run_suite(double p, double C, std::uint64_t seed, const QuadratureConfig& cfg) {
    const Thresholds t = thresholds(p);
    if (!(C > t.c0)) throw DomainError("run_suite requires C > C0(p)");
    const SuiteContext ctx(p, C, seed, cfg);
    VerificationReport report;
    report.p = p;
    report.C = C;
    report.seed = seed;
    auto add = [&](std::vector<VerificationEntry> es) {
        for (auto& e : es) report.entries.push_back(std::move(e));
    };
    add(checks::special_functions(ctx));
    add(checks::geometry(ctx));
    add(checks::cup_lemmas(ctx));
    add(checks::transition(ctx));
    add({checks::boundary_condition(ctx)});
    add(checks::boundary_matching(ctx));
    add({checks::convexity(ctx)});
    add(checks::h_positivity(ctx));
    add(checks::monge_ampere(ctx));
    add({checks::axis_top(ctx)});
    add(checks::optimizers(ctx));
    add(checks::log_function(ctx));
    return report;
}

std::vector<LimitScanRow> limit_scan(double p, const std::vector<double>& Cs,
                                     const QuadratureConfig& cfg) {
    const double target = std::pow(omega(p, cfg), p);
    std::vector<LimitScanRow> rows;
    for (double C : Cs) {
        const Parameters params = Parameters::make(p, C);
        const TransitionConstants tc = solve_transition(params, cfg);
        const BellmanCandidate cand(params, tc, cfg);
        LimitScanRow row;
        row.C = C;
        row.b0 = cand.evaluate({0.0, C}).value;
        row.target = target;
        row.gap = target - row.b0;
        row.rel_gap = row.gap / target;
        rows.push_back(row);
    }
    return rows;
}

double bmo_norm_log(double p, const QuadratureConfig& cfg) {
    if (!(p >= 1.0)) throw DomainError("bmo_norm_log: p must be at least 1");
    // On J = (c, 1), s = log(1/t) maps J onto (0, L) with dt = e^{-s} ds.
    auto oscillation = [&](double c) {
        const double len = 1.0 - c;
        const double mean = c == 0.0 ? 1.0 : (len + c * std::log(c)) / len;
        const double top = c == 0.0 ? kInf : -std::log(c);
        // e^{-s} |s - mean|^p is below 1e-30 past s = mean + 120.
        const double upper = std::min(top, mean + 120.0);
        const double kinks[] = {mean};
        const double integral = integrate(
            [&](double s) { return std::pow(std::abs(s - mean), p) * std::exp(-s); }, 0.0, upper, cfg,
            kinks);
        return std::pow(integral / len, 1.0 / p);
    };
    std::vector<double> cs = {0.0};
    for (int i = 0; i < 60; ++i) cs.push_back(std::pow(10.0, -15.0 + 15.0 * i / 60));
    for (int i = 1; i < 40; ++i) cs.push_back(0.9 + 0.1 * (1.0 - std::pow(0.5, i)));
    double best = 0.0;
    for (double c : cs) best = std::max(best, oscillation(c));
    return best;
}

double dist_lower_bound(double p, EpsBound eps_plus, EpsBound eps_minus) {
    if (!(p > 2.0)) throw DomainError("dist_lower_bound: p must exceed 2");
    if ((!eps_plus.unbounded && !(eps_plus.value > 0.0)) ||
        (!eps_minus.unbounded && !(eps_minus.value > 0.0))) {
        throw DomainError("dist_lower_bound: thresholds must be positive");
    }
    if (eps_plus.unbounded && eps_minus.unbounded) return 0.0;
    double m = kInf;
    if (!eps_plus.unbounded) m = std::min(m, eps_plus.value);
    if (!eps_minus.unbounded) m = std::min(m, eps_minus.value);
    return omega(p) / m;
}

}  // namespace jnb
