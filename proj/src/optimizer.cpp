#include "jnb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/log1p.hpp>

#include "jnb/errors.hpp"

namespace jnb {

namespace {

double log_decay_value(const LogDecayPiece& d, double xi, double t) {
    return d.offset + xi * std::log(d.pivot / t);
}

}  // namespace

PiecewiseTestFunction::PiecewiseTestFunction(std::vector<Piece> pieces, double xi,
                                             double one_minus_xi)
    : pieces_(std::move(pieces)), xi_(xi), one_minus_xi_(one_minus_xi) {
    if (pieces_.empty()) throw DomainError("PiecewiseTestFunction: no pieces");
    constexpr double kJoin = 1e-12;
    if (std::abs(pieces_.front().a) > kJoin || std::abs(pieces_.back().b - 1.0) > kJoin) {
        throw DomainError("PiecewiseTestFunction: pieces must cover (0,1)");
    }
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        if (std::abs(pieces_[i].a - pieces_[i - 1].b) > kJoin) {
            throw DomainError("PiecewiseTestFunction: pieces must be contiguous");
        }
    }
    for (const Piece& pc : pieces_) {
        if (!(pc.a >= 0.0 && pc.b <= 1.0 && pc.a < pc.b)) {
            throw DomainError("PiecewiseTestFunction: bad piece interval");
        }
        if (const auto* d = std::get_if<LogDecayPiece>(&pc.kind); d && !(d->pivot > 0.0)) {
            throw DomainError("PiecewiseTestFunction: LogDecay pivot must be positive");
        }
    }
}

double PiecewiseTestFunction::operator()(double t) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double s, const Piece& pc) { return s < pc.b; });
    if (it == pieces_.end()) it = std::prev(pieces_.end());
    if (const auto* c = std::get_if<ConstPiece>(&it->kind)) return c->value;
    return log_decay_value(std::get<LogDecayPiece>(it->kind), xi_, t);
}

double PiecewiseTestFunction::left_value(std::size_t i) const {
    const Piece& pc = pieces_.at(i);
    if (const auto* c = std::get_if<ConstPiece>(&pc.kind)) return c->value;
    if (pc.a == 0.0) return std::numeric_limits<double>::infinity();
    return log_decay_value(std::get<LogDecayPiece>(pc.kind), xi_, pc.a);
}

double PiecewiseTestFunction::right_value(std::size_t i) const {
    const Piece& pc = pieces_.at(i);
    if (const auto* c = std::get_if<ConstPiece>(&pc.kind)) return c->value;
    return log_decay_value(std::get<LogDecayPiece>(pc.kind), xi_, pc.b);
}

PiecewiseTestFunction::IntervalIntegrals PiecewiseTestFunction::integrals(double a,
                                                                          double b) const {
    IntervalIntegrals out;
    for (const Piece& pc : pieces_) {
        const double lo = std::max(a, pc.a);
        const double hi = std::min(b, pc.b);
        if (!(hi > lo)) continue;
        const double len = hi - lo;
        if (const auto* c = std::get_if<ConstPiece>(&pc.kind)) {
            out.phi += c->value * len;
            out.exp_phi += std::exp(c->value) * len;
            continue;
        }
        const auto& d = std::get<LogDecayPiece>(pc.kind);
        const double top = log_decay_value(d, xi_, hi);
        // ∫ xi log(hi/t) dt over (lo, hi) = xi lo (r - log1p r), r = len/lo.
        double excess;
        double shrink;  // 1 - (lo/hi)^{1-xi}
        if (lo == 0.0) {
            excess = xi_ * hi;
            shrink = 1.0;
        } else {
            const double r = len / lo;
            excess = xi_ * lo * -boost::math::log1pmx(r);
            shrink = -std::expm1(-one_minus_xi_ * boost::math::log1p(r));
        }
        out.phi += top * len + excess;
        out.exp_phi += std::exp(top) * hi * shrink / one_minus_xi_;
    }
    return out;
}

std::vector<double> PiecewiseTestFunction::breakpoints() const {
    std::vector<double> out;
    out.push_back(pieces_.front().a);
    for (const Piece& pc : pieces_) out.push_back(pc.b);
    return out;
}

namespace {

void push_piece(std::vector<Piece>& out, double a, double b, std::variant<ConstPiece, LogDecayPiece> kind) {
    if (b > a) out.push_back(Piece{a, b, kind});
}

// Pieces of the R2 optimizer at x, compressed onto (0, scale).
void r2_pieces(std::vector<Piece>& out, const BellmanCandidate& cand, const Point& x,
               double scale) {
    const TransitionConstants& tc = cand.transition();
    Alphas al = cand.alphas(x);
    const double a1 = std::clamp(al.a1, 0.0, 1.0);
    const double a12 = std::clamp(al.a1 + al.a2, a1, 1.0);
    push_piece(out, 0.0, scale * a1, LogDecayPiece{tc.w_bar, scale * a1});
    push_piece(out, scale * a1, scale * a12, ConstPiece{tc.w_bar});
    push_piece(out, scale * a12, scale, ConstPiece{tc.v_bar});
}

}  // namespace

PiecewiseTestFunction build_optimizer(const BellmanCandidate& candidate, const Point& x) {
    const Parameters& params = candidate.params();
    if (!in_domain(params, x)) throw DomainError("build_optimizer: point lies outside Omega_C");
    if (x.x2 <= std::exp(x.x1)) {
        return PiecewiseTestFunction({Piece{0.0, 1.0, ConstPiece{x.x1}}}, params.xi,
                                     params.one_minus_xi);
    }
    return build_optimizer_branch(candidate, x, classify(params, candidate.transition(), x));
}

PiecewiseTestFunction build_optimizer_branch(const BellmanCandidate& candidate, const Point& x,
                                             SubdomainLabel label) {
    const Parameters& params = candidate.params();
    const TransitionConstants& tc = candidate.transition();
    std::vector<Piece> pieces;
    const double xi = params.xi;

    switch (label) {
        case SubdomainLabel::R1: {
            const double u = tangent_u_unchecked(params, x);
            const double alpha = std::clamp((x.x1 - u) / xi, 0.0, 1.0);
            push_piece(pieces, 0.0, alpha, LogDecayPiece{u, alpha});
            push_piece(pieces, alpha, 1.0, ConstPiece{u});
            break;
        }
        case SubdomainLabel::R2:
            r2_pieces(pieces, candidate, x, 1.0);
            break;
        case SubdomainLabel::R3: {
            const double u = std::min(tangent_u_unchecked(params, x), tc.v_bar);
            const double alpha = std::clamp((x.x1 - u) / xi, 0.0, 1.0);
            const double tau = std::exp((u - tc.v_bar) / xi);
            const double s = tau * alpha;
            r2_pieces(pieces, candidate, candidate.corner_w(), s);
            push_piece(pieces, s, alpha, LogDecayPiece{u, alpha});
            push_piece(pieces, alpha, 1.0, ConstPiece{u});
            break;
        }
        case SubdomainLabel::R4: {
            if (x.x1 == 0.0 && x.x2 == 1.0) {
                pieces.push_back(Piece{0.0, 1.0, ConstPiece{0.0}});
                break;
            }
            const ChordCoords cc = chord_coords_unchecked(params, tc, x);
            push_piece(pieces, 0.0, cc.beta, ConstPiece{cc.pair.w});
            push_piece(pieces, cc.beta, 1.0, ConstPiece{cc.pair.v});
            break;
        }
    }
    if (pieces.empty()) pieces.push_back(Piece{0.0, 1.0, ConstPiece{x.x1}});
    return PiecewiseTestFunction(std::move(pieces), xi, params.one_minus_xi);
}

PiecewiseTestFunction build_optimizer(const Parameters& params, const TransitionConstants& tc,
                                      const Point& x) {
    return build_optimizer(BellmanCandidate(params, tc), x);
}

Moments moments(const PiecewiseTestFunction& phi, double p, const QuadratureConfig& cfg) {
    Moments out;
    const auto whole = phi.integrals(0.0, 1.0);
    out.mean = whole.phi;
    out.exp_mean = whole.exp_phi;
    const double xi = phi.xi();
    for (std::size_t i = 0; i < phi.pieces().size(); ++i) {
        const Piece& pc = phi.pieces()[i];
        if (const auto* c = std::get_if<ConstPiece>(&pc.kind)) {
            out.p_mean += std::pow(std::abs(c->value), p) * (pc.b - pc.a);
            continue;
        }
        // t = b e^{-s/xi}: phi(t) = phi(b) + s.
        const double length = pc.a == 0.0 ? std::numeric_limits<double>::infinity()
                                          : xi * std::log(pc.b / pc.a);
        out.p_mean += (pc.b / xi) * abs_power_laplace(phi.right_value(i), p, xi, length, cfg);
    }
    return out;
}

namespace {

// log of <e^phi>_J e^{-<phi>_J}.
double log_characteristic(const PiecewiseTestFunction& phi, double a, double b) {
    if (!(b > a)) return -std::numeric_limits<double>::infinity();
    const auto I = phi.integrals(a, b);
    const double len = b - a;
    return std::log(I.exp_phi / len) - I.phi / len;
}

// Maximize g on [lo, hi] by golden-section search; returns (argmax, max),
// never worse than the endpoints.
template <class G>
std::pair<double, double> golden_max(G g, double lo, double hi, int iterations = 60) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    std::pair<double, double> best{lo, g(lo)};
    if (double gh = g(hi); gh > best.second) best = {hi, gh};
    double x1 = hi - r * (hi - lo);
    double x2 = lo + r * (hi - lo);
    double f1 = g(x1);
    double f2 = g(x2);
    for (int i = 0; i < iterations && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++i) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        }
    }
    if (f1 > best.second) best = {x1, f1};
    if (f2 > best.second) best = {x2, f2};
    return best;
}

}  // namespace

double a_infty_characteristic(const PiecewiseTestFunction& phi) {
    std::vector<double> nodes = phi.breakpoints();
    const int per_family = 128;
    for (int i = 0; i < per_family; ++i) {
        nodes.push_back(std::pow(10.0, -12.0 + 12.0 * i / (per_family - 1)));
        nodes.push_back(static_cast<double>(i) / (per_family - 1));
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const std::size_t n = nodes.size();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = log_characteristic(phi, nodes[i], nodes[j]);
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }

    double a = nodes[bi];
    double b = nodes[bj];
    const double a_lo = bi > 0 ? nodes[bi - 1] : nodes[0];
    const double a_hi = nodes[std::min(bi + 1, n - 1)];
    const double b_lo = nodes[bj - 1];
    const double b_hi = nodes[std::min(bj + 1, n - 1)];
    for (int round = 0; round < 40; ++round) {
        const double hi_a = std::min(a_hi, b);
        if (hi_a > a_lo) {
            auto [arg, val] = golden_max([&](double s) { return log_characteristic(phi, s, b); },
                                         a_lo, hi_a);
            if (val > best) {
                best = val;
                a = arg;
            }
        }
        const double lo_b = std::max(b_lo, a);
        if (b_hi > lo_b) {
            auto [arg, val] = golden_max([&](double s) { return log_characteristic(phi, a, s); },
                                         lo_b, b_hi);
            if (val > best) {
                best = val;
                b = arg;
            }
        }
    }
    return std::exp(best);
}

double optimality_check(const BellmanCandidate& candidate, const Point& x) {
    const double b = candidate.evaluate(x).value;
    const Moments m = moments(build_optimizer(candidate, x), candidate.params().p,
                              candidate.quadrature());
    return std::abs(m.p_mean - b) / std::max(1.0, b);
}

double optimality_check(const Parameters& params, const TransitionConstants& tc, const Point& x) {
    return optimality_check(BellmanCandidate(params, tc), x);
}

}  // namespace jnb
