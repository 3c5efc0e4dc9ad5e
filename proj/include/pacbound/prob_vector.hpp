#pragma once

#include <cstddef>
#include <vector>

namespace pacbound {

// Probability vector over a finite hypothesis class. Serves as both the
// prior pi and the posterior pi_hat.
class ProbVector {
public:
    // weights must be nonnegative and sum to 1 within 1e-10.
    explicit ProbVector(std::vector<double> weights);

    static ProbVector uniform(std::size_t k);
    static ProbVector point_mass(std::size_t k, std::size_t index);
    // Normalizes arbitrary nonnegative weights (not all zero).
    static ProbVector from_weights(const std::vector<double>& raw);

    const std::vector<double>& weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const { return weights_.size(); }

    bool operator==(const ProbVector& other) const { return weights_ == other.weights_; }

private:
    std::vector<double> weights_;
};

// D(post || prior) = sum post_i ln(post_i / prior_i), with 0 ln(0/q) = 0.
// Returns +inf when post puts mass where prior has none (the PAC-Bayes
// bounds stay formally valid there, just vacuous).
double kl_divergence(const ProbVector& post, const ProbVector& prior);

// Total variation distance, 0.5 * sum |p_i - q_i|.
double tv_distance(const ProbVector& p, const ProbVector& q);

} // namespace pacbound
