#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pacbound/environment.hpp"
#include "pacbound/prob_vector.hpp"

namespace pacbound {

// Parameters of the Gibbs transform: weights proportional to
// prior(h) * exp(-(eta/alpha) n risk(h)).
struct GibbsParams {
    double eta = 1.0;
    double alpha = 1.0; // >= 1
    long long n = 1;
};

void check_gibbs_params(const GibbsParams& params);

// The bound-minimizing posterior for a fixed prior. Zero-prior hypotheses
// stay at zero; normalization runs through log-sum-exp.
ProbVector gibbs_posterior(const ProbVector& prior, const std::vector<double>& empirical_risks,
                           const GibbsParams& params);

// Same transform driven by true risks R(h): the localized prior pi'.
ProbVector localized_prior_true_risk(const ProbVector& base_prior,
                                     const std::vector<double>& true_risks,
                                     const GibbsParams& params);

// A randomized estimator: dataset in, posterior out.
using PosteriorRule = std::function<ProbVector(const Dataset&)>;

// Point mass on the empirical risk minimizer.
PosteriorRule erm_rule(std::size_t k);
// Gibbs posterior against a fixed base prior.
PosteriorRule gibbs_rule(ProbVector base_prior, GibbsParams params);

// The bound-optimal prior pi(h) = E_D[pi_hat(h)], estimated by averaging
// the rule's posterior over `trials` independently sampled datasets.
// Deterministic in (seed, trials) for any thread count.
ProbVector optimal_prior_monte_carlo(const Environment& env, const PosteriorRule& rule,
                                     long long n, long long trials, std::uint64_t seed,
                                     int threads = 0);

// Knobs for the bound value recorded in the fixed-point trace (the
// uniform-in-eta PAC-Bayes form). Zeroed grid fields are derived from the
// Gibbs parameters: alpha from params (floored at 2 when params.alpha = 1),
// and [u, v] a geometric window around params.eta.
struct FixedPointOptions {
    double delta = 0.05;
    double grid_u = 0.0;
    double grid_v = 0.0;
    double grid_alpha = 0.0;
    int threads = 0;
};

struct FixedPointRecord {
    int iteration = 0;
    ProbVector prior;
    double bound_value = 0.0;  // trial average of the grid bound total
    double bound_sigma = 0.0;  // standard error of that average
    double tv_to_previous = 0.0;
};

struct FixedPointResult {
    ProbVector prior;
    std::vector<FixedPointRecord> trace;
    bool converged = false;
};

// Alternating minimization from the two bound-reducing steps: Gibbs
// posterior per sampled dataset, then prior <- Monte Carlo average of the
// posteriors. Stops when the TV distance between successive priors drops
// below tol, or after max_iters (converged = false). Existence/uniqueness
// of a fixed point is open; the trace is the deliverable.
FixedPointResult fixed_point_iteration(const Environment& env, const ProbVector& init_prior,
                                       const GibbsParams& params, long long trials,
                                       int max_iters, double tol, std::uint64_t seed,
                                       const FixedPointOptions& options = {});

} // namespace pacbound
