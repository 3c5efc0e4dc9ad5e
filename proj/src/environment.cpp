#include "pacbound/environment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pacbound/rng.hpp"

namespace pacbound {

namespace {

// merge exactly-equal atom values; laws built from couplings produce them
DiscreteLossDistribution law_from_atoms(std::map<double, double>& atoms) {
    std::vector<double> values;
    std::vector<double> probs;
    values.reserve(atoms.size());
    probs.reserve(atoms.size());
    double total = 0.0;
    for (const auto& [value, mass] : atoms) {
        if (mass <= 0.0) continue;
        values.push_back(value);
        probs.push_back(mass);
        total += mass;
    }
    // renormalize the last atom so accumulated rounding cannot trip validation
    probs.back() += 1.0 - total;
    return DiscreteLossDistribution(std::move(values), std::move(probs));
}

} // namespace

Environment::Environment(std::vector<DiscreteLossDistribution> hypotheses,
                         LossRange range, std::vector<std::string> labels)
    : hypotheses_(std::move(hypotheses)), range_(range), labels_(std::move(labels)) {
    if (hypotheses_.empty()) throw std::invalid_argument("environment: no hypotheses");
    if (range_.a > range_.b) throw std::invalid_argument("environment: bad range");
    for (const auto& h : hypotheses_) {
        if (h.min_support() < range_.a - 1e-9 || h.max_support() > range_.b + 1e-9)
            throw std::invalid_argument("environment: support outside declared range");
    }
    if (labels_.empty()) {
        labels_.reserve(hypotheses_.size());
        for (std::size_t i = 0; i < hypotheses_.size(); ++i)
            labels_.push_back("h" + std::to_string(i));
    } else if (labels_.size() != hypotheses_.size()) {
        throw std::invalid_argument("environment: labels/hypotheses length mismatch");
    }
}

const DiscreteLossDistribution& Environment::hypothesis(std::size_t h) const {
    if (h >= hypotheses_.size())
        throw std::out_of_range("environment: hypothesis index out of range");
    return hypotheses_[h];
}

Dataset sample_dataset(const Environment& env, long long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
    Dataset data;
    data.n = n;
    data.k = env.size();
    data.losses.resize(static_cast<std::size_t>(n) * env.size());
    SplitMix64 rng(derive_seed(seed, 0));
    for (long long i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        for (std::size_t h = 0; h < env.size(); ++h)
            data.losses[static_cast<std::size_t>(i) * env.size() + h] =
                env.hypothesis(h).quantile(u);
    }
    return data;
}

double empirical_risk(const Dataset& data, std::size_t h) {
    if (h >= data.k) throw std::out_of_range("empirical_risk: index out of range");
    if (data.n < 1) throw std::invalid_argument("empirical_risk: empty dataset");
    double sum = 0.0;
    for (long long i = 0; i < data.n; ++i) sum += data.at(i, h);
    return sum / static_cast<double>(data.n);
}

std::vector<double> empirical_risks(const Dataset& data) {
    std::vector<double> sums(data.k, 0.0);
    for (long long i = 0; i < data.n; ++i)
        for (std::size_t h = 0; h < data.k; ++h) sums[h] += data.at(i, h);
    for (double& s : sums) s /= static_cast<double>(data.n);
    return sums;
}

double true_risk(const Environment& env, std::size_t h) {
    return env.hypothesis(h).mean();
}

std::size_t erm(const Dataset& data) {
    if (data.n < 1 || data.k == 0) throw std::invalid_argument("erm: empty dataset");
    const auto risks = empirical_risks(data);
    std::size_t best = 0;
    for (std::size_t h = 1; h < risks.size(); ++h)
        if (risks[h] < risks[best]) best = h;
    return best;
}

std::size_t best_hypothesis(const Environment& env) {
    std::size_t best = 0;
    for (std::size_t h = 1; h < env.size(); ++h)
        if (true_risk(env, h) < true_risk(env, best)) best = h;
    return best;
}

namespace {

// law of X - Y for X, Y pushed through their inverse CDFs by one shared
// uniform: walk the merged CDF breakpoints, one atom per segment
DiscreteLossDistribution comonotone_difference(const DiscreteLossDistribution& x,
                                               const DiscreteLossDistribution& y) {
    // quantiles are step functions constant between cumulative-probability
    // breakpoints of either law; one atom per merged segment
    std::vector<double> cuts;
    cuts.insert(cuts.end(), x.cumulative_probs().begin(), x.cumulative_probs().end());
    cuts.insert(cuts.end(), y.cumulative_probs().begin(), y.cumulative_probs().end());
    std::sort(cuts.begin(), cuts.end());

    std::map<double, double> atoms;
    double prev = 0.0;
    for (double c : cuts) {
        if (c <= prev) continue;
        const double mid = 0.5 * (prev + c);
        atoms[x.quantile(mid) - y.quantile(mid)] += c - prev;
        prev = c;
        if (prev >= 1.0) break;
    }
    return law_from_atoms(atoms);
}

DiscreteLossDistribution independent_difference(const DiscreteLossDistribution& x,
                                                const DiscreteLossDistribution& y) {
    std::map<double, double> atoms;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            atoms[x.support()[i] - y.support()[j]] += x.probs()[i] * y.probs()[j];
    return law_from_atoms(atoms);
}

} // namespace

Environment relative_loss_env(const Environment& env, Coupling coupling) {
    const std::size_t star = best_hypothesis(env);
    const auto& ref = env.hypothesis(star);
    std::vector<DiscreteLossDistribution> laws;
    laws.reserve(env.size());
    for (std::size_t h = 0; h < env.size(); ++h) {
        if (h == star) {
            laws.push_back(DiscreteLossDistribution::point_mass(0.0));
        } else if (coupling == Coupling::shared) {
            laws.push_back(comonotone_difference(env.hypothesis(h), ref));
        } else {
            laws.push_back(independent_difference(env.hypothesis(h), ref));
        }
    }
    const LossRange r{env.range().a - env.range().b, env.range().b - env.range().a};
    return Environment(std::move(laws), r, env.labels());
}

} // namespace pacbound
