#include "jnb/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "jnb/errors.hpp"
#include "jnb/optimizer.hpp"
#include "jnb/verification.hpp"

namespace jnb {

using nlohmann::json;

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
    }
}

namespace {

// Thrown for failures of output files; mapped to exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    double p = 3.0;
    std::optional<double> C;
    std::optional<double> C_mult;
    std::optional<double> x1;
    std::optional<double> x2;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;

    // grid
    double x1_min = -3.0;
    double x1_max = 3.0;
    int n1 = 61;
    double r_min = 1.0;
    std::optional<double> r_max;
    int n2 = 21;

    // optimizer
    int samples = 200;

    // limit-scan
    std::vector<double> mults{2.0, 10.0, 100.0, 1000.0};
    std::vector<double> Cs;
};

double resolve_c(const Options& o) {
    if (o.C) return *o.C;
    if (o.C_mult) return *o.C_mult * thresholds(o.p).c0;
    throw DomainError("one of --C or --C-mult is required");
}

Point resolve_point(const Options& o, const Parameters& params) {
    if (!o.x1 || !o.x2) throw DomainError("--x1 and --x2 are required");
    const Point x{*o.x1, *o.x2};
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2)) throw DomainError("x must be finite");
    if (!in_domain(params, x)) {
        if (x.x2 < std::exp(x.x1)) throw DomainError("x2 lies below e^{x1}: outside the domain");
        throw DomainError("x2 exceeds C e^{x1}: outside the domain");
    }
    return x;
}

std::string dump(const json& j) {
    return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string line;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) line += ',';
        line += c;
        first = false;
    }
    return line + "\n";
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    try {
        write_atomically(o.out, text);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
}

bool want_csv(const Options& o, bool csv_default) {
    if (o.format.empty()) return csv_default;
    return o.format == "csv";
}

json foliation_json(const Foliation& f) {
    json j;
    if (const auto* t = std::get_if<TangentFoot>(&f)) {
        j["kind"] = "tangent";
        j["u"] = t->u;
    } else if (const auto* a = std::get_if<Alphas>(&f)) {
        j["kind"] = "barycentric";
        j["alpha1"] = a->a1;
        j["alpha2"] = a->a2;
        j["alpha3"] = a->a3;
    } else {
        const auto& c = std::get<ChordCoords>(f);
        j["kind"] = "chord";
        j["v"] = c.pair.v;
        j["w"] = c.pair.w;
        j["beta"] = c.beta;
        j["sign_changes"] = c.sign_changes;
    }
    return j;
}

int cmd_eps0(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const double eps0 = omega(o.p, cfg);
    if (want_csv(o, false)) {
        emit(o, csv_row({"p", "eps0"}) + csv_row({format_number(o.p), format_number(eps0)}), out);
    } else {
        emit(o, dump({{"p", o.p}, {"eps0", eps0}}), out);
    }
    return kExitOk;
}

int cmd_constants(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const Parameters params = Parameters::make(o.p, resolve_c(o));
    const TransitionConstants tc = solve_transition(params, cfg);
    const std::vector<std::pair<std::string, double>> fields = {
        {"p", params.p},       {"C", params.C},   {"xi", params.xi},
        {"one_minus_xi", params.one_minus_xi},    {"xi0", tc.xi0},
        {"C0", tc.c0},         {"c1", tc.c1},     {"c2", tc.c2},
        {"w_star", tc.w_star}, {"w_bar", tc.w_bar}, {"v_bar", tc.v_bar},
        {"D_w_bar", tc.d_bar}};
    if (want_csv(o, false)) {
        std::string text = "name,value\n";
        for (const auto& [k, v] : fields) text += k + "," + format_number(v) + "\n";
        emit(o, text, out);
    } else {
        json j = json::object();
        for (const auto& [k, v] : fields) j[k] = v;
        emit(o, dump(j), out);
    }
    return kExitOk;
}

int cmd_eval(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const Parameters params = Parameters::make(o.p, resolve_c(o));
    const TransitionConstants tc = solve_transition(params, cfg);
    const Point x = resolve_point(o, params);
    const BellmanCandidate cand(params, tc, cfg);
    const BellmanValue v = cand.evaluate(x);
    const double bx2 = cand.derivative_x2(x);
    const std::string label(to_string(v.label));
    if (want_csv(o, false)) {
        emit(o,
             csv_row({"x1", "x2", "label", "b", "b_x2"}) +
                 csv_row({format_number(x.x1), format_number(x.x2), label, format_number(v.value),
                          format_number(bx2)}),
             out);
    } else {
        emit(o,
             dump({{"p", params.p}, {"C", params.C}, {"x1", x.x1}, {"x2", x.x2}, {"label", label},
                   {"b", v.value}, {"b_x2", bx2}, {"foliation", foliation_json(v.foliation)}}),
             out);
    }
    return kExitOk;
}

int cmd_grid(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const Parameters params = Parameters::make(o.p, resolve_c(o));
    const TransitionConstants tc = solve_transition(params, cfg);
    const BellmanCandidate cand(params, tc, cfg);
    const double r_max = o.r_max.value_or(params.C);
    if (o.n1 < 1 || o.n2 < 1) throw DomainError("--n1 and --n2 must be positive");
    if (!(o.r_min >= 1.0 && r_max <= params.C && o.r_min <= r_max)) {
        throw DomainError("R range must satisfy 1 <= r-min <= r-max <= C");
    }
    if (!(o.x1_min <= o.x1_max)) throw DomainError("x1 range is empty");
    auto node = [](double lo, double hi, int n, int i) {
        return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    };
    const bool csv = want_csv(o, true);
    std::string text = csv ? csv_row({"x1", "x2", "label", "b"}) : std::string();
    for (int i = 0; i < o.n1; ++i) {
        const double x1 = node(o.x1_min, o.x1_max, o.n1, i);
        for (int j = 0; j < o.n2; ++j) {
            // The top row is placed on Gamma_C exactly.
            const double R = j == o.n2 - 1 ? r_max : node(o.r_min, r_max, o.n2, j);
            const Point x{x1, R * std::exp(x1)};
            const BellmanValue v = cand.evaluate(x);
            const std::string label(to_string(v.label));
            if (csv) {
                text += csv_row({format_number(x.x1), format_number(x.x2), label, format_number(v.value)});
            } else {
                text += json({{"x1", x.x1}, {"x2", x.x2}, {"label", label}, {"b", v.value}}).dump() + "\n";
            }
        }
    }
    emit(o, text, out);
    return kExitOk;
}

int cmd_optimizer(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const Parameters params = Parameters::make(o.p, resolve_c(o));
    const TransitionConstants tc = solve_transition(params, cfg);
    const Point x = resolve_point(o, params);
    if (o.samples < 1) throw DomainError("--samples must be positive");
    const BellmanCandidate cand(params, tc, cfg);
    const PiecewiseTestFunction phi = build_optimizer(cand, x);
    const Moments m = moments(phi, params.p, cfg);
    const double a_inf = a_infty_characteristic(phi);
    const json footer = {{"mean", m.mean}, {"exp_mean", m.exp_mean}, {"p_mean", m.p_mean},
                         {"a_infty", a_inf}};
    if (want_csv(o, true)) {
        std::string text = csv_row({"t", "phi"});
        for (int k = 0; k < o.samples; ++k) {
            const double t = (k + 0.5) / o.samples;
            text += csv_row({format_number(t), format_number(phi(t))});
        }
        text += "# " + footer.dump() + "\n";
        emit(o, text, out);
    } else {
        json profile = json::array();
        for (int k = 0; k < o.samples; ++k) {
            const double t = (k + 0.5) / o.samples;
            profile.push_back({t, phi(t)});
        }
        emit(o, dump({{"x1", x.x1}, {"x2", x.x2}, {"profile", profile}, {"moments", footer}}), out);
    }
    return kExitOk;
}

int cmd_verify(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    const VerificationReport report = run_suite(o.p, resolve_c(o), o.seed, cfg);
    if (want_csv(o, false)) {
        std::string text = csv_row({"name", "passed", "worst_residual", "samples"});
        for (const auto& e : report.entries) {
            text += csv_row({e.name, e.passed ? "true" : "false", format_number(e.worst_residual),
                             std::to_string(e.samples)});
        }
        emit(o, text, out);
    } else {
        emit(o, to_json(report) + "\n", out);
    }
    return report.all_passed() ? kExitOk : kExitVerificationFailed;
}

int cmd_limit_scan(const Options& o, const QuadratureConfig& cfg, std::ostream& out) {
    std::vector<double> Cs = o.Cs;
    if (Cs.empty()) {
        const double c0 = thresholds(o.p).c0;
        for (double m : o.mults) Cs.push_back(m * c0);
    }
    const auto rows = limit_scan(o.p, Cs, cfg);
    if (want_csv(o, true)) {
        std::string text = csv_row({"C", "b0", "target", "gap", "rel_gap"});
        for (const auto& r : rows) {
            text += csv_row({format_number(r.C), format_number(r.b0), format_number(r.target),
                             format_number(r.gap), format_number(r.rel_gap)});
        }
        emit(o, text, out);
    } else {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"C", r.C}, {"b0", r.b0}, {"target", r.target}, {"gap", r.gap},
                           {"rel_gap", r.rel_gap}});
        }
        emit(o, dump({{"p", o.p}, {"rows", arr}}), out);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bellman-function computations for the John-Nirenberg constant of BMO^p"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool needs_c, bool needs_x) {
        sub->add_option("--p", o.p, "Exponent p")->capture_default_str();
        if (needs_c) {
            auto* c = sub->add_option("--C", o.C, "A-infinity bound C (must exceed C0(p))");
            auto* m = sub->add_option("--C-mult", o.C_mult, "C as a multiple of C0(p)");
            c->excludes(m);
        }
        if (needs_x) {
            sub->add_option("--x1", o.x1, "First coordinate of the point");
            sub->add_option("--x2", o.x2, "Second coordinate of the point");
        }
        sub->add_option("--out", o.out, "Write output to this file instead of stdout");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* eps0 = app.add_subcommand("eps0", "Closed-form John-Nirenberg constant omega(p)");
    add_common(eps0, false, false);

    auto* constants = app.add_subcommand("constants", "Transition constants for (p, C)");
    add_common(constants, true, false);

    auto* eval = app.add_subcommand("eval", "Evaluate the Bellman candidate at a point");
    add_common(eval, true, true);

    auto* grid = app.add_subcommand("grid", "Evaluate on a grid x2 = R e^{x1}");
    add_common(grid, true, false);
    grid->add_option("--x1-min", o.x1_min)->capture_default_str();
    grid->add_option("--x1-max", o.x1_max)->capture_default_str();
    grid->add_option("--n1", o.n1)->capture_default_str();
    grid->add_option("--r-min", o.r_min)->capture_default_str();
    grid->add_option("--r-max", o.r_max, "Defaults to C");
    grid->add_option("--n2", o.n2)->capture_default_str();

    auto* opt = app.add_subcommand("optimizer", "Sample the optimizer at a point");
    add_common(opt, true, true);
    opt->add_option("--samples", o.samples)->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run the verification suite");
    add_common(verify, true, false);
    verify->add_option("--seed", o.seed)->capture_default_str();

    auto* scan = app.add_subcommand("limit-scan", "b(0, C) against omega(p)^p along a list of C");
    add_common(scan, false, false);
    scan->add_option("--mults", o.mults, "Multiples of C0(p)")->delimiter(',')->capture_default_str();
    scan->add_option("--Cs", o.Cs, "Explicit values of C (override --mults)")->delimiter(',');

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitDomainError;
    }

    try {
        const QuadratureConfig cfg = QuadratureConfig::from_env();
        if (*eps0) return cmd_eps0(o, cfg, out);
        if (*constants) return cmd_constants(o, cfg, out);
        if (*eval) return cmd_eval(o, cfg, out);
        if (*grid) return cmd_grid(o, cfg, out);
        if (*opt) return cmd_optimizer(o, cfg, out);
        if (*verify) return cmd_verify(o, cfg, out);
        if (*scan) return cmd_limit_scan(o, cfg, out);
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitVerificationFailed;
    }
    return kExitDomainError;
}

}  // namespace jnb
