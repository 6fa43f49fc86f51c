#include "jnb/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "jnb/errors.hpp"

namespace jnb {

namespace {

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights. Values from QUADPACK qk15.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    int depth;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b, int depth) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double fc = f(centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = hlgth * kXgk[j];
        const double f1 = f(centr - dx);
        const double f2 = f(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
    return {a, b, result, err, depth};
}

// ∫_0^∞ g(r) e^{-r} dr, truncated where |g(R)| e^{-R} drops below
// 1e-3 * abs_tol. `start` must lie past every kink and past the peak of the
// integrand; `kinks` are forwarded as breakpoints.
double laplace_truncated(const std::function<double(double)>& g, double start,
                         const QuadratureConfig& cfg, std::span<const double> kinks) {
    const double threshold = 1e-3 * cfg.abs_tol;
    double upper = std::max(start, 0.0) + 10.0;
    for (int i = 0; i < 200; ++i) {
        if (std::abs(g(upper)) * std::exp(-upper) < threshold) break;
        upper *= 1.25;
    }
    return integrate([&](double r) { return g(r) * std::exp(-r); }, 0.0, upper, cfg, kinks);
}

void check_xi(double xi) {
    // xi = 1 is the C -> infinity limit; the integrals still converge there.
    if (!(xi > 0.0 && xi <= 1.0)) throw DomainError("xi must lie in (0,1]");
}

double signed_pow(double s, double a) { return s < 0 ? -std::pow(-s, a) : std::pow(s, a); }

}  // namespace

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be positive");
    if (!(rel_tol > 0.0)) throw DomainError("quadrature rel_tol must be positive");
    if (max_depth < 10) throw DomainError("quadrature max_depth must be at least 10");
}

QuadratureConfig QuadratureConfig::from_env() {
    QuadratureConfig cfg;
    if (const char* env = std::getenv("JNB_QUAD_TOL"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const double tol = std::strtod(env, &end);
        if (end == env || *end != '\0') {
            throw DomainError(std::string("JNB_QUAD_TOL is not a number: ") + env);
        }
        cfg.abs_tol = tol;
    }
    cfg.validate();
    return cfg;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg, std::span<const double> breakpoints) {
    if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate: limits must be finite");
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, cfg, breakpoints);

    std::vector<double> cuts{a};
    for (double c : breakpoints) {
        if (c > a && c < b) cuts.push_back(c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment> active;
    double total = 0.0;
    double total_err = 0.0;
    double frozen_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment s = gk15(f, cuts[i], cuts[i + 1], 0);
        total += s.value;
        total_err += s.error;
        active.push(s);
    }

    constexpr int kMaxSegments = 20000;
    int evaluated = static_cast<int>(active.size());
    while (!active.empty() && evaluated < kMaxSegments) {
        if (total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) break;
        Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.depth >= cfg.max_depth || mid <= worst.a || mid >= worst.b) {
            // Cannot refine further; keep its contribution, stop tracking it.
            frozen_sum += worst.value;
            continue;
        }
        Segment left = gk15(f, worst.a, mid, worst.depth + 1);
        Segment right = gk15(f, mid, worst.b, worst.depth + 1);
        evaluated += 2;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }
    // Re-sum to drop accumulated update round-off.
    double sum = 0.0;
    while (!active.empty()) {
        sum += active.top().value;
        active.pop();
    }
    return sum + frozen_sum;
}

double gamma_fn(double p) {
    if (!(p > 0.0)) throw DomainError("gamma_fn: p must be positive");
    return std::tgamma(p);
}

double scaled_power_tail(double a, double xi, double w, const QuadratureConfig& cfg) {
    check_xi(xi);
    if (!(a >= 0.0)) throw DomainError("scaled_power_tail: exponent must be non-negative");
    if (!(w >= 0.0)) throw DomainError("scaled_power_tail: w must be non-negative");
    // s = w + xi*r
    auto g = [=](double r) { return std::pow(w + xi * r, a); };
    return xi * laplace_truncated(g, a, cfg, {});
}

double tail_integral(double p, double xi, double w, const QuadratureConfig& cfg) {
    if (!(p > 2.0)) throw DomainError("tail_integral: p must exceed 2");
    return std::exp(-w / xi) * scaled_power_tail(p - 2.0, xi, w, cfg);
}

double scaled_signed_tail(double p, double xi, double z, const QuadratureConfig& cfg) {
    if (!(p > 2.0)) throw DomainError("signed_tail: p must exceed 2");
    check_xi(xi);
    if (z >= 0.0) return scaled_power_tail(p - 1.0, xi, z, cfg);
    const double kink = -z / xi;
    auto g = [=](double r) { return signed_pow(z + xi * r, p - 1.0); };
    const double kinks[] = {kink};
    return xi * laplace_truncated(g, kink + (p - 1.0), cfg, kinks);
}

double signed_tail(double p, double xi, double z, const QuadratureConfig& cfg) {
    return std::exp(-z / xi) * scaled_signed_tail(p, xi, z, cfg);
}

double abs_power_laplace(double c, double a, double xi, double length,
                         const QuadratureConfig& cfg) {
    check_xi(xi);
    if (!(length >= 0.0)) throw DomainError("abs_power_laplace: negative length");
    if (length == 0.0) return 0.0;
    const double kink = c < 0.0 ? -c / xi : 0.0;
    auto g = [=](double r) { return std::pow(std::abs(c + xi * r), a); };
    const double kinks[] = {kink};
    if (std::isinf(length)) return xi * laplace_truncated(g, kink + a, cfg, kinks);
    return xi * integrate([&](double r) { return g(r) * std::exp(-r); }, 0.0, length / xi, cfg,
                          kinks);
}

double omega(double p, const QuadratureConfig& cfg) {
    if (!(p >= 1.0)) throw DomainError("omega: p must be at least 1");
    const double inner =
        integrate([p](double t) { return std::pow(t, p - 1.0) * std::exp(t); }, 0.0, 1.0, cfg);
    const double bracket = (p / std::exp(1.0)) * (gamma_fn(p) - inner) + 1.0;
    return std::pow(bracket, 1.0 / p);
}

double expm1_minus_x(double x) {
    if (std::abs(x) >= 0.5) return std::expm1(x) - x;
    double term = 0.5 * x * x;
    double sum = term;
    for (int n = 3; n < 40; ++n) {
        term *= x / n;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace jnb
