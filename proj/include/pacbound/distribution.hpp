#pragma once

#include <cstddef>
#include <vector>

namespace pacbound {

// Closed interval [a, b] containing the losses.
struct LossRange {
    double a = 0.0;
    double b = 1.0;

    double width() const { return b - a; }
};

// Validates a <= b and both finite; throws std::invalid_argument otherwise.
LossRange make_loss_range(double a, double b);

// Finite-support law of a per-example loss. Everything the bounds need
// from a hypothesis (mean, second moment, exponential moments, quantiles)
// is exact for such a law.
class DiscreteLossDistribution {
public:
    // support: atom values; probs: nonnegative, summing to 1 within 1e-12.
    DiscreteLossDistribution(std::vector<double> support, std::vector<double> probs);

    static DiscreteLossDistribution point_mass(double value);
    static DiscreteLossDistribution bernoulli(double p, double lo = 0.0, double hi = 1.0);

    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return support_.size(); }

    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }
    double min_support() const { return min_support_; }
    double max_support() const { return max_support_; }

    // Inverse CDF for u in [0, 1): smallest atom value z with P(X <= z) > u.
    double quantile(double u) const;

    // CDF table backing quantile(): atom values sorted ascending (zero-mass
    // atoms dropped, duplicates merged) with cumulative probabilities ending
    // at exactly 1.
    const std::vector<double>& sorted_support() const { return sorted_values_; }
    const std::vector<double>& cumulative_probs() const { return cum_probs_; }

private:
    std::vector<double> support_;
    std::vector<double> probs_;
    // sorted atoms with cumulative probabilities, for quantile()
    std::vector<double> sorted_values_;
    std::vector<double> cum_probs_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
    double min_support_ = 0.0;
    double max_support_ = 0.0;
};

} // namespace pacbound
