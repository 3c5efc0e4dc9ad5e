#include "pacbound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pacbound {

double phi(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("phi: x must be finite");
    // For |x| < 0.5 the closed form loses up to ~1e-12 to cancellation, so we
    // sum the series phi(x) = sum_{k>=0} x^k/(k+2)!. Below |x| ~ 1e-4 the loop
    // exits after the terms 1/2 + x/6 + x^2/24 + x^3/120.
    if (std::fabs(x) < 0.5) {
        double term = 0.5;
        double sum = 0.5;
        for (int k = 1; k < 40; ++k) {
            term *= x / static_cast<double>(k + 2);
            sum += term;
            if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
        }
        return sum;
    }
    return (std::expm1(x) - x) / (x * x);
}

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    double max_term = -std::numeric_limits<double>::infinity();
    for (double t : terms) max_term = std::max(max_term, t);
    if (std::isinf(max_term) && max_term < 0) return max_term; // all -inf
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

double m_eta(const DiscreteLossDistribution& dist, double eta) {
    check_eta(eta);
    // -(1/eta) lse{ln p_i - eta z_i}; zero-mass atoms dropped to avoid ln 0.
    std::vector<double> terms;
    terms.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.probs()[i] > 0.0)
            terms.push_back(std::log(dist.probs()[i]) - eta * dist.support()[i]);
    }
    return -log_sum_exp(terms) / eta;
}

double second_moment(const DiscreteLossDistribution& dist) {
    return dist.second_moment();
}

std::pair<double, double> minimize_eta(const std::function<double(double)>& objective,
                                       double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_eta: requires lo < hi");
    constexpr double inv_phi = 0.6180339887498949; // (sqrt(5)-1)/2
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    // interval shrinks by inv_phi per step; 60 steps reach ~3e-13 relative
    for (int it = 0; it < 60 && (b - a) > 1e-10 * (hi - lo); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

void check_eta(double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("eta must be positive and finite");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("delta must be in (0, 1]");
}

void check_sample_size(long long n) {
    if (n < 1) throw std::invalid_argument("sample size n must be >= 1");
}

} // namespace pacbound
