#include "pacbound/posterior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacbound/bounds.hpp"
#include "pacbound/kernels.hpp"
#include "pacbound/parallel.hpp"
#include "pacbound/rng.hpp"

namespace pacbound {

void check_gibbs_params(const GibbsParams& params) {
    check_eta(params.eta);
    if (!(params.alpha >= 1.0) || !std::isfinite(params.alpha))
        throw std::invalid_argument("gibbs: alpha must be >= 1");
    check_sample_size(params.n);
}

ProbVector gibbs_posterior(const ProbVector& prior, const std::vector<double>& empirical_risks,
                           const GibbsParams& params) {
    check_gibbs_params(params);
    if (empirical_risks.size() != prior.size())
        throw std::invalid_argument("gibbs: risks/prior length mismatch");
    const double scale = params.eta / params.alpha * static_cast<double>(params.n);

    std::vector<double> log_weights;
    std::vector<std::size_t> alive;
    log_weights.reserve(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) {
        if (!std::isfinite(empirical_risks[i]))
            throw std::invalid_argument("gibbs: risks must be finite");
        if (prior[i] == 0.0) continue;
        alive.push_back(i);
        log_weights.push_back(std::log(prior[i]) - scale * empirical_risks[i]);
    }
    if (alive.empty()) throw std::invalid_argument("gibbs: prior has no mass");

    const double norm = log_sum_exp(log_weights);
    std::vector<double> weights(prior.size(), 0.0);
    for (std::size_t j = 0; j < alive.size(); ++j)
        weights[alive[j]] = std::exp(log_weights[j] - norm);
    return ProbVector(std::move(weights));
}

ProbVector localized_prior_true_risk(const ProbVector& base_prior,
                                     const std::vector<double>& true_risks,
                                     const GibbsParams& params) {
    return gibbs_posterior(base_prior, true_risks, params);
}

PosteriorRule erm_rule(std::size_t k) {
    return [k](const Dataset& data) {
        return ProbVector::point_mass(k, erm(data));
    };
}

PosteriorRule gibbs_rule(ProbVector base_prior, GibbsParams params) {
    check_gibbs_params(params);
    return [prior = std::move(base_prior), params](const Dataset& data) {
        return gibbs_posterior(prior, empirical_risks(data), params);
    };
}

ProbVector optimal_prior_monte_carlo(const Environment& env, const PosteriorRule& rule,
                                     long long n, long long trials, std::uint64_t seed,
                                     int threads) {
    if (trials < 1) throw std::invalid_argument("optimal_prior: trials must be >= 1");
    const std::size_t k = env.size();
    std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const Dataset data = sample_dataset(env, n, derive_seed(seed, t));
        per_trial[t] = rule(data).weights();
    });
    // reduce in trial order so the result is independent of thread count
    std::vector<double> mean(k, 0.0);
    for (const auto& w : per_trial)
        for (std::size_t i = 0; i < k; ++i) mean[i] += w[i];
    for (double& m : mean) m /= static_cast<double>(trials);
    return ProbVector::from_weights(mean);
}

FixedPointResult fixed_point_iteration(const Environment& env, const ProbVector& init_prior,
                                       const GibbsParams& params, long long trials,
                                       int max_iters, double tol, std::uint64_t seed,
                                       const FixedPointOptions& options) {
    check_gibbs_params(params);
    if (init_prior.size() != env.size())
        throw std::invalid_argument("fixed_point: prior/environment size mismatch");
    if (trials < 1) throw std::invalid_argument("fixed_point: trials must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("fixed_point: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("fixed_point: tol must be > 0");

    // trace bound: uniform-in-eta PAC-Bayes total at eta = params.eta. The
    // complexity weight matches the Gibbs alpha so both alternating steps
    // reduce the recorded value (up to Monte Carlo noise).
    const double grid_alpha =
        options.grid_alpha > 0.0 ? options.grid_alpha : std::max(params.alpha, 2.0);
    const double grid_u = options.grid_u > 0.0 ? options.grid_u : params.eta / 16.0;
    const double grid_v = options.grid_v > 0.0 ? options.grid_v : params.eta * 16.0;
    const EtaGrid grid = build_eta_grid(grid_u, grid_v, grid_alpha);
    if (params.eta < grid.u || params.eta > grid.v)
        throw std::invalid_argument("fixed_point: gibbs eta outside trace grid");

    const std::size_t k = env.size();
    FixedPointResult result{init_prior, {}, false};
    ProbVector prior = init_prior;

    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<std::vector<double>> posteriors(static_cast<std::size_t>(trials));
        std::vector<double> bound_values(static_cast<std::size_t>(trials));
        const std::uint64_t iter_seed = derive_seed(seed, static_cast<std::uint64_t>(iter));
        parallel_for(static_cast<std::size_t>(trials), options.threads, [&](std::size_t t) {
            const Dataset data = sample_dataset(env, params.n, derive_seed(iter_seed, t));
            const auto risks = empirical_risks(data);
            const ProbVector post = gibbs_posterior(prior, risks, params);
            double post_risk = 0.0;
            for (std::size_t h = 0; h < k; ++h) post_risk += post[h] * risks[h];
            bound_values[t] = pac_bayes_grid_bound(post_risk, kl_divergence(post, prior),
                                                   params.n, params.eta, grid,
                                                   options.delta)
                                  .total;
            posteriors[t] = post.weights();
        });

        std::vector<double> mean_weights(k, 0.0);
        double bound_sum = 0.0, bound_sq_sum = 0.0;
        for (long long t = 0; t < trials; ++t) {
            for (std::size_t i = 0; i < k; ++i)
                mean_weights[i] += posteriors[static_cast<std::size_t>(t)][i];
            bound_sum += bound_values[static_cast<std::size_t>(t)];
            bound_sq_sum += bound_values[static_cast<std::size_t>(t)] *
                            bound_values[static_cast<std::size_t>(t)];
        }
        for (double& m : mean_weights) m /= static_cast<double>(trials);
        const ProbVector next = ProbVector::from_weights(mean_weights);
        const double td = static_cast<double>(trials);
        const double mean_bound = bound_sum / td;
        const double var = std::max(0.0, bound_sq_sum / td - mean_bound * mean_bound);
        const double sigma = trials > 1 ? std::sqrt(var / (td - 1.0)) : 0.0;
        const double tv = tv_distance(next, prior);

        result.trace.push_back({iter, prior, mean_bound, sigma, tv});
        prior = next;
        if (tv < tol) {
            result.converged = true;
            break;
        }
    }
    result.prior = prior;
    return result;
}

} // namespace pacbound
