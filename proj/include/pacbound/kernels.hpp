#pragma once

#include <functional>
#include <span>
#include <utility>

#include "pacbound/distribution.hpp"

namespace pacbound {

// phi(x) = (e^x - x - 1)/x^2, phi(0) = 1/2. Nonnegative and increasing.
// Evaluated by series for small |x| where the closed form cancels.
double phi(double x);

// ln sum_i e^{t_i} with max-subtraction. Entries may be -inf; the list must
// be nonempty. Exact for single-element input.
double log_sum_exp(std::span<const double> terms);

// M_eta = -(1/eta) ln E[e^{-eta * loss}], the Cramer-Chernoff surrogate for
// the mean. Requires eta > 0. Always <= mean, nonincreasing in eta.
double m_eta(const DiscreteLossDistribution& dist, double eta);

// E[loss^2], exact.
double second_moment(const DiscreteLossDistribution& dist);

// Golden-section search on [lo, hi] for a unimodal objective. Returns the
// minimizer and its value; |eta - argmin| <= 1e-9 * (hi - lo).
std::pair<double, double> minimize_eta(const std::function<double(double)>& objective,
                                       double lo, double hi);

// Argument validation shared by the bound operations.
void check_eta(double eta);         // eta > 0 and finite
void check_delta(double delta);     // delta in (0, 1]
void check_sample_size(long long n); // n >= 1

} // namespace pacbound
