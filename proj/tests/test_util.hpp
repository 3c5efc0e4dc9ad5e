#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pacbound/distribution.hpp"
#include "pacbound/prob_vector.hpp"
#include "pacbound/rng.hpp"

namespace test_util {

// random finite law with 1..max_atoms support points in [lo, hi]
inline pacbound::DiscreteLossDistribution random_law(pacbound::SplitMix64& rng,
                                                     std::size_t max_atoms, double lo,
                                                     double hi) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.next() % max_atoms);
    std::vector<double> support(k);
    std::vector<double> probs(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        support[i] = lo + (hi - lo) * rng.uniform01();
        probs[i] = 0.05 + rng.uniform01();
        total += probs[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        probs[i] /= total;
        acc += probs[i];
    }
    probs[k - 1] = 1.0 - acc; // exact unit sum
    return pacbound::DiscreteLossDistribution(std::move(support), std::move(probs));
}

inline pacbound::ProbVector random_prob_vector(pacbound::SplitMix64& rng, std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = 0.01 + rng.uniform01();
        total += w[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        w[i] /= total;
        acc += w[i];
    }
    w[k - 1] = 1.0 - acc;
    return pacbound::ProbVector(std::move(w));
}

// independent high-precision reference for phi = (e^x - x - 1)/x^2
inline long double phi_oracle(long double x) {
    if (x == 0.0L) return 0.5L;
    if (fabsl(x) < 1.0L) {
        long double term = 0.5L, sum = 0.5L;
        for (int k = 1; k < 80; ++k) {
            term *= x / static_cast<long double>(k + 2);
            sum += term;
            if (fabsl(term) < 1e-30L * fabsl(sum)) break;
        }
        return sum;
    }
    return (expm1l(x) - x) / (x * x);
}

} // namespace test_util
