#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacbound/bounds.hpp"
#include "pacbound/environment.hpp"
#include "pacbound/posterior.hpp"

namespace pacbound {

// The in-probability bounds under Monte Carlo coverage test. Each promises
// its statement with probability at least 1 - delta over the sample.
enum class BoundKind {
    chernoff,         // fixed hypothesis, fixed eta
    union_fixed,      // ERM pick, fixed eta
    union_eta_opt,    // ERM pick, simultaneously for all eta > 0
    pac_bayes,        // posterior, fixed eta
    pac_bayes_grid,   // posterior, for all eta in [u, v]
    pac_hoeffding,    // posterior, R-form, for all eta in (0, v]
    pac_variance,     // posterior, R-form with second-moment slack
    excess_hoeffding, // excess risk vs h*, Hoeffding slack
    excess_variance,  // excess risk vs h*, second-moment slack
};

const char* bound_kind_name(BoundKind kind);
std::optional<BoundKind> parse_bound_kind(const std::string& name);

// eta configuration shared across bound kinds; each kind reads the fields
// it needs and ignores the rest.
struct EtaPolicy {
    double eta = 1.0;        // fixed-eta kinds; sweep evaluation point
    double grid_u = 0.01;    // uniform-in-eta grid (pac_bayes_grid)
    double grid_v = 1.0;
    double grid_alpha = 2.0;
    double v = 1.0;          // eta cap of the optimized PAC bounds
    double alpha = 2.0;      // their grid ratio
};

struct EstimatorSpec {
    enum class Kind { erm, gibbs };
    Kind kind = Kind::erm;
    GibbsParams gibbs; // used when kind == gibbs; gibbs.n is overwritten by the run's n
};

// Violation counts over Monte Carlo trials versus the promised delta.
// passed iff violation_rate <= pass_threshold = delta + 3 sqrt(delta(1-delta)/trials).
struct CoverageStats {
    long long trials = 0;
    long long violations = 0;
    double delta = 0.0;
    double violation_rate = 0.0;
    double pass_threshold = 0.0;
    bool passed = false;
};

// For each trial: sample a dataset, form the estimator's posterior, compute
// the bound's exact left side and its right side, and count a violation
// when left > right + 1e-12. Kinds that hold uniformly in eta are checked
// on a dense 50-point grid over their eta range. The prior defaults to
// uniform. Deterministic in (seed, trials) for any thread count.
CoverageStats run_coverage(const Environment& env, long long n, double delta,
                           const EtaPolicy& eta_policy, BoundKind kind,
                           const EstimatorSpec& estimator, long long trials,
                           std::uint64_t seed, int threads = 0,
                           const std::optional<ProbVector>& prior = std::nullopt);

// In-expectation PAC-Bayes check: the trial average of
// E_pi_hat[M_eta] - E_pi_hat[R_n] - KL/(eta n) must be <= 0 up to three
// standard errors.
struct ExpectationStats {
    long long trials = 0;
    double mean_slack = 0.0;
    double std_error = 0.0;
    double threshold = 0.0; // 3 * std_error
    bool passed = false;
};

ExpectationStats run_expectation_check(const Environment& env, long long n, double eta,
                                       const EstimatorSpec& estimator, long long trials,
                                       std::uint64_t seed, int threads = 0,
                                       const std::optional<ProbVector>& prior = std::nullopt);

// Monte Carlo means of bound totals and exact targets per (kind, n);
// gap = total - target.
struct SweepRow {
    BoundKind kind = BoundKind::chernoff;
    long long n = 0;
    double mean_total = 0.0;
    double mean_left = 0.0;
    double mean_gap = 0.0;
};

std::vector<SweepRow> tightness_sweep(const Environment& env,
                                      const std::vector<long long>& n_list, double delta,
                                      const std::vector<BoundKind>& kinds,
                                      const EtaPolicy& eta_policy,
                                      const EstimatorSpec& estimator, long long trials,
                                      std::uint64_t seed, int threads = 0,
                                      const std::optional<ProbVector>& prior = std::nullopt);

} // namespace pacbound
