#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "jnb/candidate.hpp"
#include "jnb/errors.hpp"

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

// m1 from its defining integral with Boost quadrature.
double oracle_m1(const Parameters& pr, double z) {
    const double p = pr.p, xi = pr.xi;
    auto f = [&](double s) { return s * std::pow(std::abs(s), p - 2.0) * std::exp(-(s - z) / xi); };
    boost::math::quadrature::exp_sinh<double> es;
    double total = es.integrate([&](double r) { return f(std::max(z, 0.0) + r); }, 0.0,
                                std::numeric_limits<double>::infinity());
    if (z < 0.0) {
        boost::math::quadrature::tanh_sinh<double> ts;
        total += ts.integrate(f, z, 0.0);
    }
    return p / xi * total;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("m1") {
    const Fixture f(3.0, 2.0);
    const double p = 3.0, xi = f.pr.xi;
    CHECK(m1(f.pr, 0.0) == Approx(p * std::pow(xi, p - 1.0) * boost::math::tgamma(p)).epsilon(1e-12));
    for (double z : {-1.0, -0.2, 0.0, 0.3, 2.0, 5.0}) CHECK(rel(f.cand.m1(z), oracle_m1(f.pr, z)) < 1e-11);
    for (double z : {0.5, 1.0, 2.0}) {
        const double h = 1e-5;
        const double deriv = (f.cand.m1(z + h) - f.cand.m1(z - h)) / (2 * h);
        CHECK(std::abs(xi * deriv - (f.cand.m1(z) - p * z * std::abs(z))) < 1e-6);
        CHECK(f.cand.m1(z) > 0.0);
    }
}

TEST_CASE("m3") {
    const Fixture f(3.0, 2.0);
    const double p = 3.0, wb = f.tc.w_bar, vb = f.tc.v_bar;
    const double at_vb = std::exp(vb - wb) * (f.cand.m1(wb) - p * std::pow(wb, p - 1.0)) - p * std::pow(-vb, p - 1.0);
    CHECK(f.cand.m3(vb) == Approx(at_vb).epsilon(1e-12));
    CHECK(m3(f.pr, f.tc, vb) == Approx(at_vb).epsilon(1e-12));
    const double z = vb - 0.3, h = 1e-5;
    const double deriv = (f.cand.m3(z + h) - f.cand.m3(z - h)) / (2 * h);
    CHECK(std::abs(f.pr.xi * deriv - (f.cand.m3(z) - p * z * std::abs(z))) < 1e-6);
    CHECK_THROWS_AS(m3(f.pr, f.tc, 0.0), DomainError);
}

TEST_CASE("boundary values") {
    for (double p : {2.5, 3.0, 4.0}) {
        const Fixture f(p, 2.0);
        double worst = 0.0;
        for (int i = 0; i <= 600; ++i) {
            const double s = -3.0 + 6.0 * i / 600.0;
            const BellmanValue b = f.cand.evaluate({s, std::exp(s)});
            worst = std::max(worst, std::abs(b.value - std::pow(std::abs(s), p)));
            CHECK(b.value >= 0.0);
        }
        CHECK(worst < 1e-9);
    }
    const Fixture f(3.0, 2.0);
    CHECK(f.cand.evaluate({0.0, 1.0}).value == 0.0);
    CHECK(f.cand.evaluate({0.0, 1.0}).label == SubdomainLabel::R4);
}

TEST_CASE("b(0,C)") {
    const Fixture f(3.0, 2.0);
    const BellmanValue b = f.cand.evaluate({0.0, f.pr.C});
    CHECK(b.label == SubdomainLabel::R3);
    const double expected = f.cand.m3(-f.pr.xi) * f.pr.xi + std::pow(f.pr.xi, 3.0);
    CHECK(b.value == Approx(expected).epsilon(1e-13));
    CHECK(b.value == Approx(2.40711628862).epsilon(1e-10));
    CHECK(std::get<TangentFoot>(b.foliation).u == Approx(-f.pr.xi).epsilon(1e-12));

    CHECK(Fixture(3.0, 100.0).cand.evaluate({0.0, 100.0 * thresholds(3.0).c0}).value ==
          Approx(2.41440455392).epsilon(1e-10));
    CHECK(Fixture(2.5, 2.0).cand.evaluate({0.0, 2.0 * thresholds(2.5).c0}).value ==
          Approx(1.44508944959).epsilon(1e-10));
    CHECK(Fixture(4.0, 2.0).cand.evaluate({0.0, 2.0 * thresholds(4.0).c0}).value ==
          Approx(8.99588594469).epsilon(1e-10));
}

TEST_CASE("corners") {
    const Fixture f(3.0, 2.0);
    const Point X = f.cand.corner_x(), W = f.cand.corner_w();
    CHECK(X.x2 == Approx(f.pr.C * std::exp(X.x1)).epsilon(1e-14));
    CHECK(W.x2 == Approx(f.pr.C * std::exp(W.x1)).epsilon(1e-14));
    CHECK(X.x1 == Approx(f.tc.w_bar + f.pr.xi));
    // Tangency identity C e^{u + xi} = e^u / (1 - xi).
    CHECK(X.x2 == Approx(std::exp(f.tc.w_bar) / f.pr.one_minus_xi).epsilon(1e-12));
    CHECK(f.cand.corner_y().x2 == Approx(std::exp(f.tc.w_bar)));
    CHECK(f.cand.corner_z().x2 == Approx(std::exp(f.tc.v_bar)));
}

TEST_CASE("barycentric coordinates in R2") {
    const Fixture f(3.0, 2.0);
    const Point X = f.cand.corner_x(), Y = f.cand.corner_y(), Z = f.cand.corner_z();
    for (auto [a1, a2] : {std::pair{0.2, 0.3}, {0.6, 0.1}, {0.05, 0.9}, {0.33, 0.33}}) {
        const double a3 = 1.0 - a1 - a2;
        const Point x{a1 * X.x1 + a2 * Y.x1 + a3 * Z.x1, a1 * X.x2 + a2 * Y.x2 + a3 * Z.x2};
        const BellmanValue b = f.cand.evaluate(x);
        REQUIRE(b.label == SubdomainLabel::R2);
        const Alphas al = std::get<Alphas>(b.foliation);
        CHECK(al.a1 == Approx(a1).epsilon(1e-8));
        CHECK(al.a2 == Approx(a2).epsilon(1e-8));
        CHECK(al.a1 + al.a2 + al.a3 == Approx(1.0).epsilon(1e-10));
        CHECK(al.a3 >= 0.0);
        // Affine on R2: the values at the corners interpolate.
        const double bx = f.cand.evaluate_branch(X, SubdomainLabel::R2);
        const double by = std::pow(f.tc.w_bar, 3.0), bz = std::pow(-f.tc.v_bar, 3.0);
        CHECK(rel(b.value, a1 * bx + a2 * by + a3 * bz) < 1e-10);
    }
}

TEST_CASE("x2-derivatives") {
    const Fixture f(3.0, 2.0);
    const double d = f.tc.d_bar;
    CHECK(f.cand.trolleybus_slope() == Approx(d).epsilon(1e-7));
    // R4: b_x2 = D(w(x)).
    const CupPair pair = solve_v(3.0, 0.4 * f.tc.w_bar);
    const Point in_cup{0.5 * (pair.v + pair.w), 0.5 * (std::exp(pair.v) + std::exp(pair.w))};
    REQUIRE(f.cand.evaluate(in_cup).label == SubdomainLabel::R4);
    CHECK(f.cand.derivative_x2(in_cup) == Approx(pair.d).epsilon(1e-8));
    // R1 side of u = w_bar.
    const double u = f.tc.w_bar, x1 = u + 0.5 * f.pr.xi;
    const Point on_w{x1, f.pr.k(u) * (x1 - u) + std::exp(u)};
    CHECK(f.cand.derivative_x2_branch(on_w, SubdomainLabel::R1) == Approx(d).epsilon(1e-7));
    CHECK(bellman_x2(f.pr, f.tc, on_w) == Approx(d).epsilon(1e-7));
    // Finite difference in x2 agrees with the analytic R1 formula.
    const Point deep{2.0, 1.5 * std::exp(2.0)};
    const double h = 1e-4 * deep.x2;
    const double fd = (f.cand.evaluate({deep.x1, deep.x2 + h}).value - f.cand.evaluate({deep.x1, deep.x2 - h}).value) /
                      (2 * h);
    CHECK(f.cand.derivative_x2(deep) == Approx(fd).epsilon(1e-6));
}

TEST_CASE("continuity across internal boundaries") {
    for (double mult : {2.0, 100.0}) {
        const Fixture f(3.0, mult);
        const double wb = f.tc.w_bar, vb = f.tc.v_bar, xi = f.pr.xi;
        for (int i = 1; i < 100; ++i) {
            const double s = i / 100.0;
            const double xw = wb + s * xi, xv = vb + s * xi;
            const Point pw{xw, f.pr.k(wb) * (xw - wb) + std::exp(wb)};
            const Point pv{xv, f.pr.k(vb) * (xv - vb) + std::exp(vb)};
            CHECK(rel(f.cand.evaluate_branch(pw, SubdomainLabel::R1), f.cand.evaluate_branch(pw, SubdomainLabel::R2)) <
                  1e-8);
            CHECK(rel(f.cand.evaluate_branch(pv, SubdomainLabel::R3), f.cand.evaluate_branch(pv, SubdomainLabel::R2)) <
                  1e-8);
            const double xc = vb + s * (wb - vb);
            const Point pc{xc, slope_r(vb, wb) * (xc - wb) + std::exp(wb)};
            const double b4 = f.cand.evaluate_branch(pc, SubdomainLabel::R4);
            const double b2 = f.cand.evaluate_branch(pc, SubdomainLabel::R2);
            CHECK(std::abs(b4 - b2) <= 1e-8 * std::max(std::abs(b2), 1e-300) + 1e-20);
        }
    }
}

TEST_CASE("h1 and h3 are positive") {
    for (double p : {2.5, 3.0, 4.0}) {
        const Fixture f(p, 2.0);
        for (int i = 0; i <= 50; ++i) {
            CHECK(f.cand.h1(f.tc.w_bar + 0.1 * i) > 0.0);
            CHECK(f.cand.h3(f.tc.v_bar - 0.1 * i) > 0.0);
        }
    }
}

TEST_CASE("midpoint convexity on random short segments") {
    const Fixture f(3.0, 2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(0.0, 1.0), dir(-1.0, 1.0);
    int tested = 0;
    for (int i = 0; i < 2000; ++i) {
        const double x1 = ux(rng);
        const Point a{x1, std::exp(x1) * std::pow(f.pr.C, ut(rng))};
        const double len = std::pow(10.0, -4.0 * ut(rng));
        const Point b{a.x1 + len * dir(rng), a.x2 * (1.0 + len * dir(rng))};
        const Point m{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
        if (!in_domain(f.pr, b) || !in_domain(f.pr, m)) continue;
        // Only Gamma_C can be crossed between inside endpoints; probe along the segment.
        bool inside = true;
        for (int k = 1; k < 16 && inside; ++k) {
            const double t = k / 16.0;
            inside = in_domain(f.pr, {a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2)});
        }
        if (!inside) continue;
        const double bm = f.cand.evaluate(m).value;
        const double avg = 0.5 * (f.cand.evaluate(a).value + f.cand.evaluate(b).value);
        CHECK(bm <= avg + 1e-8);
        ++tested;
    }
    CHECK(tested > 1000);
}

TEST_CASE("domain errors") {
    const Fixture f(3.0, 2.0);
    CHECK_THROWS_AS(f.cand.evaluate({0.0, 0.5}), DomainError);
    CHECK_THROWS_AS(f.cand.derivative_x2({0.0, 1e6}), DomainError);
    CHECK_THROWS_AS(bellman(f.pr, f.tc, {0.0, 0.5}), DomainError);
}
