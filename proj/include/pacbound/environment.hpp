#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pacbound/distribution.hpp"

namespace pacbound {

// Synthetic data-generating process: one loss law per hypothesis, examples
// i.i.d. across rows. All supports must lie inside `range`.
class Environment {
public:
    Environment(std::vector<DiscreteLossDistribution> hypotheses, LossRange range,
                std::vector<std::string> labels = {});

    const std::vector<DiscreteLossDistribution>& hypotheses() const { return hypotheses_; }
    const DiscreteLossDistribution& hypothesis(std::size_t h) const;
    const LossRange& range() const { return range_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return hypotheses_.size(); }

private:
    std::vector<DiscreteLossDistribution> hypotheses_;
    LossRange range_;
    std::vector<std::string> labels_;
};

// Loss table of one sampled dataset: n rows (examples) x k columns
// (hypotheses), row-major.
struct Dataset {
    long long n = 0;
    std::size_t k = 0;
    std::vector<double> losses;

    double at(long long row, std::size_t h) const {
        return losses[static_cast<std::size_t>(row) * k + h];
    }
};

// Draws n i.i.d. examples. Per example one latent uniform feeds every
// hypothesis's inverse CDF, so all hypotheses are evaluated on the "same
// example" (columns are comonotone); deterministic in (env, n, seed).
Dataset sample_dataset(const Environment& env, long long n, std::uint64_t seed);

// R_n(D, h): column mean.
double empirical_risk(const Dataset& data, std::size_t h);

// All column means at once (single pass over the table).
std::vector<double> empirical_risks(const Dataset& data);

// R(h) = E[loss], exact from the law.
double true_risk(const Environment& env, std::size_t h);

// argmin_h R_n(D, h), ties broken by lowest index.
std::size_t erm(const Dataset& data);

// Index of the true-risk minimizer h*, ties broken by lowest index.
std::size_t best_hypothesis(const Environment& env);

enum class Coupling {
    shared,      // one latent uniform per example (matches sample_dataset)
    independent, // product law; useful as an enumeration cross-check
};

// Environment of relative losses l'(h) = l(h) - l(h*). Each hypothesis's
// law is the distribution of the difference under the chosen coupling of
// (l(h), l(h*)); supports lie in [a - b, b - a].
Environment relative_loss_env(const Environment& env,
                              Coupling coupling = Coupling::shared);

} // namespace pacbound
