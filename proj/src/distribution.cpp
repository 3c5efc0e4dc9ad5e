#include "pacbound/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pacbound {

LossRange make_loss_range(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("LossRange: endpoints must be finite");
    if (a > b) throw std::invalid_argument("LossRange: requires a <= b");
    return LossRange{a, b};
}

DiscreteLossDistribution::DiscreteLossDistribution(std::vector<double> support,
                                                   std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty()) throw std::invalid_argument("distribution: empty support");
    if (support_.size() != probs_.size())
        throw std::invalid_argument("distribution: support/probs length mismatch");

    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (!std::isfinite(support_[i]))
            throw std::invalid_argument("distribution: support values must be finite");
        if (!(probs_[i] >= 0.0))
            throw std::invalid_argument("distribution: probabilities must be >= 0");
        total += probs_[i];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("distribution: probabilities must sum to 1");

    mean_ = 0.0;
    second_moment_ = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        mean_ += probs_[i] * support_[i];
        second_moment_ += probs_[i] * support_[i] * support_[i];
    }
    min_support_ = *std::min_element(support_.begin(), support_.end());
    max_support_ = *std::max_element(support_.begin(), support_.end());

    // quantile table: atoms sorted by value, duplicates merged
    std::vector<std::size_t> order(support_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return support_[i] < support_[j]; });
    double cum = 0.0;
    for (std::size_t k : order) {
        if (probs_[k] == 0.0) continue;
        cum += probs_[k];
        if (!sorted_values_.empty() && sorted_values_.back() == support_[k]) {
            cum_probs_.back() = cum;
        } else {
            sorted_values_.push_back(support_[k]);
            cum_probs_.push_back(cum);
        }
    }
    if (sorted_values_.empty()) {
        // all-zero probabilities already rejected by the sum check; unreachable
        throw std::invalid_argument("distribution: no atom with positive mass");
    }
    cum_probs_.back() = 1.0; // absorb rounding so quantile(u) is total on [0,1)
}

DiscreteLossDistribution DiscreteLossDistribution::point_mass(double value) {
    return DiscreteLossDistribution({value}, {1.0});
}

DiscreteLossDistribution DiscreteLossDistribution::bernoulli(double p, double lo, double hi) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("bernoulli: p must be in [0,1]");
    return DiscreteLossDistribution({lo, hi}, {1.0 - p, p});
}

double DiscreteLossDistribution::quantile(double u) const {
    auto it = std::upper_bound(cum_probs_.begin(), cum_probs_.end(), u);
    if (it == cum_probs_.end()) --it;
    return sorted_values_[static_cast<std::size_t>(it - cum_probs_.begin())];
}

} // namespace pacbound
