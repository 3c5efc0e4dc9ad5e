#include "pacbound/prob_vector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pacbound {

ProbVector::ProbVector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("ProbVector: empty");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("ProbVector: weights must be finite and >= 0");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-10)
        throw std::invalid_argument("ProbVector: weights must sum to 1");
}

ProbVector ProbVector::uniform(std::size_t k) {
    if (k == 0) throw std::invalid_argument("ProbVector: empty");
    return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

ProbVector ProbVector::point_mass(std::size_t k, std::size_t index) {
    if (index >= k) throw std::invalid_argument("ProbVector: point mass index out of range");
    std::vector<double> w(k, 0.0);
    w[index] = 1.0;
    return ProbVector(std::move(w));
}

ProbVector ProbVector::from_weights(const std::vector<double>& raw) {
    double total = 0.0;
    for (double w : raw) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("ProbVector: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("ProbVector: all weights are zero");
    std::vector<double> w(raw);
    for (double& x : w) x /= total;
    return ProbVector(std::move(w));
}

double kl_divergence(const ProbVector& post, const ProbVector& prior) {
    if (post.size() != prior.size())
        throw std::invalid_argument("kl_divergence: dimension mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
        const double p = post[i];
        if (p == 0.0) continue;
        if (prior[i] == 0.0) return std::numeric_limits<double>::infinity();
        kl += p * std::log(p / prior[i]);
    }
    return kl < 0.0 ? 0.0 : kl; // clamp -1e-17 style rounding noise
}

double tv_distance(const ProbVector& p, const ProbVector& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("tv_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return 0.5 * s;
}

} // namespace pacbound
