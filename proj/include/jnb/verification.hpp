#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "jnb/candidate.hpp"

namespace jnb {

// One checked claim. `worst_residual` is the largest value of the entry's
// residual over its samples; the entry passes when it stays within the
// entry's tolerance. Negative residuals on strict inequalities are margins.
struct VerificationEntry {
    std::string name;
    bool passed = false;
    double worst_residual = 0.0;
    long samples = 0;
};

struct VerificationReport {
    double p = 0.0;
    double C = 0.0;
    std::uint64_t seed = 0;
    std::vector<VerificationEntry> entries;

    bool all_passed() const;
    const VerificationEntry* find(std::string_view name) const;
};

std::string to_json(const VerificationReport& report);

// Parameters, transition constants and candidate shared by every check.
class SuiteContext {
  public:
    SuiteContext(double p, double C, std::uint64_t seed,
                 const QuadratureConfig& cfg = QuadratureConfig::from_env());

    const Parameters& params() const { return params_; }
    const TransitionConstants& transition() const { return tc_; }
    const BellmanCandidate& candidate() const { return candidate_; }
    const QuadratureConfig& quadrature() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }

  private:
    Parameters params_;
    QuadratureConfig cfg_;
    TransitionConstants tc_;
    BellmanCandidate candidate_;
    std::uint64_t seed_;
};

namespace checks {

std::vector<VerificationEntry> special_functions(const SuiteContext& ctx);
std::vector<VerificationEntry> geometry(const SuiteContext& ctx, int classify_samples = 10000);
std::vector<VerificationEntry> cup_lemmas(const SuiteContext& ctx);
std::vector<VerificationEntry> transition(const SuiteContext& ctx);

VerificationEntry boundary_condition(const SuiteContext& ctx, int points = 601);
// Value continuity and x2-derivative matching with D(w_bar) on the three
// internal boundaries.
std::vector<VerificationEntry> boundary_matching(const SuiteContext& ctx, int points = 100);
VerificationEntry convexity(const SuiteContext& ctx, int segments = 10000);
std::vector<VerificationEntry> h_positivity(const SuiteContext& ctx);
std::vector<VerificationEntry> monge_ampere(const SuiteContext& ctx, int points = 100);
VerificationEntry axis_top(const SuiteContext& ctx);
std::vector<VerificationEntry> optimizers(const SuiteContext& ctx, int points = 200);
std::vector<VerificationEntry> log_function(const SuiteContext& ctx);

}  // namespace checks

// Every check above, in a fixed order. Throws DomainError for p <= 2 or
// C <= C0(p); failed checks are recorded, never thrown.
VerificationReport run_suite(double p, double C, std::uint64_t seed,
                             const QuadratureConfig& cfg = QuadratureConfig::from_env());

struct LimitScanRow {
    double C = 0.0;
    double b0 = 0.0;        // b(0, C)
    double target = 0.0;    // omega(p)^p
    double gap = 0.0;       // target - b0
    double rel_gap = 0.0;   // gap / target
};

std::vector<LimitScanRow> limit_scan(double p, const std::vector<double>& Cs,
                                     const QuadratureConfig& cfg = QuadratureConfig::from_env());

// sup over J ⊂ (0,1) of <|phi0 - <phi0>_J|^p>_J^{1/p} for phi0 = log(1/t),
// searched over J = (c, 1).
double bmo_norm_log(double p, const QuadratureConfig& cfg = {});

// An A-infinity threshold of a function; `unbounded` when e^{eps phi} is in
// A-infinity for every eps > 0.
struct EpsBound {
    double value = 0.0;
    bool unbounded = false;

    static EpsBound finite(double v) { return {v, false}; }
    static EpsBound infinite() { return {0.0, true}; }
};

// omega(p) / min(eps_plus, eps_minus); 0 when both are unbounded.
double dist_lower_bound(double p, EpsBound eps_plus, EpsBound eps_minus);

}  // namespace jnb
