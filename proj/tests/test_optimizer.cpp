#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "jnb/errors.hpp"
#include "jnb/optimizer.hpp"

using namespace jnb;
using doctest::Approx;

namespace {

struct Fixture {
    Parameters pr;
    TransitionConstants tc;
    BellmanCandidate cand;
    Fixture(double p, double mult)
        : pr(Parameters::make(p, mult * thresholds(p).c0)), tc(solve_transition(pr)), cand(pr, tc) {}
};

// Moments of phi by quadrature piece by piece. A LogDecay piece starting at
// 0 is mapped to the half line by t = pivot e^{-y/xi}, where phi = offset + y.
Moments oracle_moments(const PiecewiseTestFunction& phi, double p) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double xi = phi.xi();
    Moments m;
    for (const Piece& pc : phi.pieces()) {
        const auto* ld = std::get_if<LogDecayPiece>(&pc.kind);
        // g_log(v) = log g(v); the weight is folded into the exponent so that
        // e^phi t-integrands with xi near 1 do not overflow.
        auto add = [&](auto g_log) {
            if (ld && pc.a == 0.0) {
                const double y0 = xi * std::log(ld->pivot / pc.b);
                return es.integrate(
                    [&](double r) {
                        const double y = y0 + r;
                        const double e = g_log(ld->offset + y) - y / xi;
                        return std::isfinite(e) ? std::exp(e) * ld->pivot / xi : 0.0;
                    },
                    0.0, std::numeric_limits<double>::infinity());
            }
            return ts.integrate([&](double t) { return std::exp(g_log(phi(t))); }, pc.a, pc.b);
        };
        auto signed_part = [&](auto g_log, double sign) {
            return add([&](double v) { return v * sign > 0.0 ? g_log(std::abs(v)) : -INFINITY; });
        };
        const auto log_id = [](double a) { return std::log(a); };
        m.mean += signed_part(log_id, 1.0) - signed_part(log_id, -1.0);
        m.exp_mean += add([](double v) { return v; });
        m.p_mean += add([&](double v) { return p * std::log(std::abs(v)); });
    }
    return m;
}

// A-infinity characteristic of e^{xi log(1/t)} over J = (0, b): scale invariant,
// so equal to (1/(1-xi)) e^{-xi} for every b.
double log_characteristic(double xi) { return std::exp(-xi) / (1.0 - xi); }

}  // namespace

TEST_CASE("PiecewiseTestFunction validation") {
    CHECK_NOTHROW(PiecewiseTestFunction({{0.0, 1.0, ConstPiece{1.0}}}, 0.5, 0.5));
    CHECK_THROWS_AS(PiecewiseTestFunction({{0.0, 0.5, ConstPiece{1.0}}}, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(PiecewiseTestFunction({{0.0, 0.5, ConstPiece{1.0}}, {0.4, 1.0, ConstPiece{0.0}}}, 0.5, 0.5),
                    DomainError);
    CHECK_THROWS_AS(PiecewiseTestFunction({}, 0.5, 0.5), DomainError);
}

TEST_CASE("moments of elementary functions") {
    const PiecewiseTestFunction c({{0.0, 1.0, ConstPiece{-0.7}}}, 0.5, 0.5);
    const Moments mc = moments(c, 3.0);
    CHECK(mc.mean == Approx(-0.7));
    CHECK(mc.exp_mean == Approx(std::exp(-0.7)));
    CHECK(mc.p_mean == Approx(std::pow(0.7, 3.0)));
    CHECK(a_infty_characteristic(c) == Approx(1.0).epsilon(1e-14));

    for (double xi : {0.3, 0.9, 0.999}) {
        const PiecewiseTestFunction l({{0.0, 1.0, LogDecayPiece{0.0, 1.0}}}, xi, 1.0 - xi);
        const Moments ml = moments(l, 3.0);
        CHECK(ml.mean == Approx(xi).epsilon(1e-14));
        CHECK(ml.exp_mean == Approx(1.0 / (1.0 - xi)).epsilon(1e-12));
        // ∫_0^1 (xi log(1/t))^3 dt = 6 xi^3
        CHECK(ml.p_mean == Approx(6.0 * xi * xi * xi).epsilon(1e-11));
        const double a = a_infty_characteristic(l);
        CHECK(a <= log_characteristic(xi) * (1.0 + 1e-12));
        CHECK(a == Approx(log_characteristic(xi)).epsilon(1e-9));
        CHECK(l.left_value(0) == INFINITY);
    }
}

TEST_CASE("interval integrals match quadrature") {
    const double xi = 0.8;
    const PiecewiseTestFunction phi({{0.0, 0.2, LogDecayPiece{0.5, 0.2}},
                                     {0.2, 0.6, ConstPiece{0.5}},
                                     {0.6, 1.0, ConstPiece{-0.3}}},
                                    xi, 1.0 - xi);
    boost::math::quadrature::tanh_sinh<double> ts;
    // Quadrature split at the jumps 0.2 and 0.6.
    auto split = [&](auto g, double a, double b) {
        double total = 0.0, lo = a;
        for (double cut : {0.2, 0.6, 1.0}) {
            const double hi = std::min(b, cut);
            if (hi > lo) total += ts.integrate(g, lo, hi);
            lo = std::max(lo, cut);
        }
        return total;
    };
    for (auto [a, b] : {std::pair{0.0, 1.0}, {0.05, 0.15}, {1e-9, 0.7}, {0.1, 0.2}, {0.3, 0.9}}) {
        const auto I = phi.integrals(a, b);
        CHECK(I.phi == Approx(split([&](double t) { return phi(t); }, a, b)).epsilon(1e-12));
        CHECK(I.exp_phi == Approx(split([&](double t) { return std::exp(phi(t)); }, a, b)).epsilon(1e-12));
    }
    // Short interval far from 0: closed forms stay accurate without cancellation.
    const double lo = 0.1, hi = 0.1 + 1e-12;
    const auto tiny = phi.integrals(lo, hi);
    CHECK(tiny.phi / (hi - lo) == Approx(phi(lo)).epsilon(1e-11));
    CHECK(phi.breakpoints().size() >= 2);
    CHECK(phi.right_value(0) == Approx(0.5));
    CHECK(phi.left_value(1) == Approx(0.5));
}

TEST_CASE("optimizer shapes") {
    const Fixture f(3.0, 2.0);
    // Gamma_1: a single constant.
    const auto g = build_optimizer(f.cand, {1.2, std::exp(1.2)});
    REQUIRE(g.pieces().size() == 1);
    CHECK(std::get<ConstPiece>(g.pieces()[0].kind).value == Approx(1.2));
    // Corner X: a single LogDecay with offset w_bar and pivot 1.
    const auto x = build_optimizer(f.cand, f.cand.corner_x());
    REQUIRE(x.pieces().size() == 1);
    const auto& ld = std::get<LogDecayPiece>(x.pieces()[0].kind);
    CHECK(ld.offset == Approx(f.tc.w_bar).epsilon(1e-9));
    CHECK(ld.pivot == Approx(1.0).epsilon(1e-9));
    CHECK(moments(x, 3.0).exp_mean == Approx(std::exp(f.tc.w_bar) / f.pr.one_minus_xi).epsilon(1e-10));
    // Cup interior: two constants w, v split at beta.
    const CupPair pair = solve_v(3.0, 0.5 * f.tc.w_bar);
    const Point mid{0.5 * (pair.v + pair.w), 0.5 * (std::exp(pair.v) + std::exp(pair.w))};
    const auto c = build_optimizer(f.cand, mid);
    REQUIRE(c.pieces().size() == 2);
    CHECK(std::get<ConstPiece>(c.pieces()[0].kind).value == Approx(pair.w).epsilon(1e-8));
    CHECK(std::get<ConstPiece>(c.pieces()[1].kind).value == Approx(pair.v).epsilon(1e-8));
    CHECK(c.pieces()[0].b == Approx(0.5).epsilon(1e-6));
    // Corner (0,1).
    const auto o = build_optimizer(f.cand, {0.0, 1.0});
    CHECK(moments(o, 3.0).p_mean == 0.0);
    CHECK_THROWS_AS(build_optimizer(f.cand, {0.0, 0.5}), DomainError);
}

TEST_CASE("optimizer averages, optimality and A-infinity bound") {
    for (double mult : {2.0, 100.0}) {
        const Fixture f(3.0, mult);
        const double wb = f.tc.w_bar, vb = f.tc.v_bar, xi = f.pr.xi;
        std::vector<Point> pts = {{0.0, f.pr.C}, {1.0, 2.0 * std::exp(1.0)}, {-2.0, 1.5 * std::exp(-2.0)},
                                  {2.5, f.pr.C * std::exp(2.5)}, f.cand.corner_x(), f.cand.corner_w()};
        // Tangent points of R1 and R3.
        for (double u : {wb + 0.1, wb + 1.0, vb - 0.2, vb - 1.5}) {
            const double x1 = u + 0.6 * xi;
            pts.push_back({x1, f.pr.k(u) * (x1 - u) + std::exp(u)});
        }
        // R2 interior.
        const Point X = f.cand.corner_x(), Y = f.cand.corner_y(), Z = f.cand.corner_z();
        pts.push_back({0.3 * X.x1 + 0.3 * Y.x1 + 0.4 * Z.x1, 0.3 * X.x2 + 0.3 * Y.x2 + 0.4 * Z.x2});
        // Cup interior.
        const CupPair pair = solve_v(3.0, 0.6 * wb);
        pts.push_back({0.3 * pair.w + 0.7 * pair.v, 0.3 * std::exp(pair.w) + 0.7 * std::exp(pair.v)});

        for (const Point& x : pts) {
            CAPTURE(x.x1);
            CAPTURE(x.x2);
            const auto phi = build_optimizer(f.cand, x);
            const Moments m = moments(phi, 3.0);
            CHECK(std::abs(m.mean - x.x1) < 1e-8);
            CHECK(std::abs(m.exp_mean - x.x2) / x.x2 < 1e-8);
            CHECK(m.exp_mean >= std::exp(m.mean) * (1.0 - 1e-12));
            CHECK(optimality_check(f.cand, x) < 1e-6);
            CHECK(a_infty_characteristic(phi) <= f.pr.C * (1.0 + 1e-6));
            // Closed forms against an independent quadrature.
            const Moments q = oracle_moments(phi, 3.0);
            CHECK(m.mean == Approx(q.mean).epsilon(1e-9).scale(1.0));
            CHECK(m.exp_mean == Approx(q.exp_mean).epsilon(1e-9));
            CHECK(m.p_mean == Approx(q.p_mean).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("R3 junction continuity at t = tau alpha") {
    const Fixture f(3.0, 2.0);
    const auto phi = build_optimizer(f.cand, {0.0, f.pr.C});
    const auto& pcs = phi.pieces();
    bool found = false;
    for (std::size_t i = 0; i + 1 < pcs.size(); ++i) {
        if (std::holds_alternative<LogDecayPiece>(pcs[i + 1].kind) &&
            std::holds_alternative<LogDecayPiece>(pcs[i].kind) == false) {
            // Const v_bar then the u-branch log piece.
            CHECK(phi.right_value(i) == Approx(f.tc.v_bar).epsilon(1e-9));
            CHECK(phi.left_value(i + 1) == Approx(f.tc.v_bar).epsilon(1e-9));
            found = true;
        }
        if (std::holds_alternative<LogDecayPiece>(pcs[i].kind) || std::holds_alternative<LogDecayPiece>(pcs[i + 1].kind))
            CHECK(std::abs(phi.right_value(i) - phi.left_value(i + 1)) < 1e-9);
    }
    CHECK(found);
}

TEST_CASE("boundary consistency of construction formulas") {
    const Fixture f(3.0, 2.0);
    const double wb = f.tc.w_bar, xi = f.pr.xi;
    for (double s : {0.2, 0.5, 0.8}) {
        const double x1 = wb + s * xi;
        const Point x{x1, f.pr.k(wb) * (x1 - wb) + std::exp(wb)};
        const auto a = build_optimizer_branch(f.cand, x, SubdomainLabel::R1);
        const auto b = build_optimizer_branch(f.cand, x, SubdomainLabel::R2);
        for (int i = 1; i < 200; ++i) {
            const double t = i / 200.0 + 1.234e-4;
            CHECK(a(t) == Approx(b(t)).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("optimality_check edge cases") {
    const Fixture f(3.0, 2.0);
    CHECK(optimality_check(f.cand, {0.7, std::exp(0.7)}) < 1e-12);
    CHECK(optimality_check(f.cand, {0.0, 1.0}) == 0.0);
    CHECK(optimality_check(f.pr, f.tc, {0.0, f.pr.C}) < 1e-6);
}
