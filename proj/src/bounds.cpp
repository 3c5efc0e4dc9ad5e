#include "pacbound/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacbound/kernels.hpp"

namespace pacbound {

namespace {

constexpr double kE = 2.718281828459045235360287;

BoundReport make_report(double empirical, double slack, double complexity,
                        std::optional<double> eta) {
    BoundReport r;
    r.empirical_term = empirical;
    r.slack_term = slack;
    r.complexity_term = complexity;
    r.total = empirical + slack + complexity;
    r.eta = eta;
    return r;
}

double log_base(double x, double alpha) { return std::log(x) / std::log(alpha); }

void check_kl(double kl) {
    if (std::isnan(kl) || kl < 0.0)
        throw std::invalid_argument("kl must be >= 0 (may be +inf)");
}

void check_alpha_ratio(double alpha) {
    if (!(alpha > 1.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be > 1");
}

void check_cap(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("v must be > 0");
}

// phi(-v a) for a <= 0; when a = 0 the value is phi(0) = 1/2 for every v,
// which is what permits the v = +infinity sentinel.
double phi_factor(double a, double v) {
    if (a > 0.0) throw std::invalid_argument("variance bounds require a <= 0");
    if (a == 0.0) return 0.5;
    if (std::isinf(v)) throw std::invalid_argument("v = inf requires a = 0");
    return phi(-v * a);
}

// ln(0.5 log_alpha n + C); C >= e keeps this >= 1.
double grid_log_factor(long long n, double alpha, double C) {
    return std::log(0.5 * log_base(static_cast<double>(n), alpha) + C);
}

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

} // namespace

BoundReport chernoff_bound(double empirical_risk, long long n, double eta, double delta) {
    check_sample_size(n);
    check_eta(eta);
    check_delta(delta);
    const double complexity = std::log(1.0 / delta) / (eta * static_cast<double>(n));
    return make_report(empirical_risk, 0.0, complexity, eta);
}

BoundReport hoeffding_bound(double empirical_risk, long long n, LossRange range,
                            double delta) {
    check_sample_size(n);
    check_delta(delta);
    if (range.a > range.b) throw std::invalid_argument("range: requires a <= b");
    const double width = range.width();
    if (delta == 1.0) {
        // ln(1/delta) = 0: the optimal eta is 0 and the bound collapses
        return make_report(empirical_risk, 0.0, 0.0, 0.0);
    }
    if (width == 0.0) {
        // degenerate range: optimal eta is infinite, both terms vanish
        return make_report(empirical_risk, 0.0, 0.0, std::nullopt);
    }
    const double log_term = std::log(1.0 / delta);
    const double eta = std::sqrt(8.0 * log_term / (static_cast<double>(n) * width * width));
    const double slack = eta * width * width / 8.0;
    const double complexity = log_term / (eta * static_cast<double>(n));
    return make_report(empirical_risk, slack, complexity, eta);
}

BoundReport variance_bound(double empirical_risk, double sec_moment, long long n,
                           double a, double v, double eta, double delta) {
    check_sample_size(n);
    check_eta(eta);
    check_delta(delta);
    check_cap(v);
    if (sec_moment < 0.0) throw std::invalid_argument("sec_moment must be >= 0");
    if (eta > v) throw std::invalid_argument("eta out of range: requires eta <= v");
    const double slack = eta * phi_factor(a, v) * sec_moment;
    const double complexity = std::log(1.0 / delta) / (eta * static_cast<double>(n));
    return make_report(empirical_risk, slack, complexity, eta);
}

BoundReport union_bound(const std::vector<double>& empirical_risks,
                        const ProbVector& prior, std::size_t selected, long long n,
                        double eta, double delta) {
    check_sample_size(n);
    check_eta(eta);
    check_delta(delta);
    if (selected >= prior.size() || empirical_risks.size() != prior.size())
        throw std::invalid_argument("union_bound: index/size mismatch");
    if (prior[selected] == 0.0)
        throw std::invalid_argument("union_bound: selected hypothesis has zero prior mass");
    const double complexity = (std::log(1.0 / prior[selected]) + std::log(1.0 / delta)) /
                              (eta * static_cast<double>(n));
    return make_report(empirical_risks[selected], 0.0, complexity, eta);
}

BoundReport union_bound_eta_opt(const std::vector<double>& empirical_risks,
                                const ProbVector& prior, std::size_t selected,
                                long long n, double delta, const SlackModel& slack) {
    check_sample_size(n);
    check_delta(delta);
    if (selected >= prior.size() || empirical_risks.size() != prior.size())
        throw std::invalid_argument("union_bound: index/size mismatch");
    if (prior[selected] == 0.0)
        throw std::invalid_argument("union_bound: selected hypothesis has zero prior mass");
    const double risk = empirical_risks[selected];
    const double nd = static_cast<double>(n);
    // complexity numerator ln(1/(pi(h) delta)), shared by both slack models
    const double L = std::log(1.0 / prior[selected]) + std::log(1.0 / delta);

    if (const auto* hs = std::get_if<HoeffdingSlack>(&slack)) {
        const double width = hs->range.width();
        if (L == 0.0 || width == 0.0) {
            // optimum runs to eta = 0 (no complexity) or eta = inf (no slack)
            return make_report(risk, 0.0, 0.0,
                               L == 0.0 ? std::optional<double>(0.0) : std::nullopt);
        }
        const double eta = std::sqrt(8.0 * L / (nd * width * width));
        return make_report(risk, eta * width * width / 8.0, L / (eta * nd), eta);
    }

    const auto& vs = std::get<VarianceSlack>(slack);
    check_cap(vs.v);
    if (vs.sec_moment < 0.0) throw std::invalid_argument("sec_moment must be >= 0");
    const double factor = phi_factor(vs.a, vs.v);
    if (L == 0.0) return make_report(risk, 0.0, 0.0, 0.0);
    if (vs.sec_moment == 0.0) {
        // no slack at any eta; push eta to the cap to kill the complexity
        if (std::isinf(vs.v)) return make_report(risk, 0.0, 0.0, std::nullopt);
        return make_report(risk, 0.0, L / (vs.v * nd), vs.v);
    }
    const double A = factor * vs.sec_moment;
    // bracket around sqrt(B/A), the unconstrained optimum of eta A + B/eta
    const double eta_hint = std::sqrt(L / (nd * A));
    const double hi = std::isinf(vs.v) ? eta_hint * 100.0 : vs.v;
    const double lo = std::min(eta_hint, hi) / 100.0;
    auto [eta, value] = minimize_eta(
        [&](double e) { return e * A + L / (e * nd); }, lo, hi);
    (void)value;
    return make_report(risk, eta * A, L / (eta * nd), eta);
}

BoundReport pac_bayes_bound(double posterior_empirical_risk, double kl, long long n,
                            double eta, double delta) {
    check_sample_size(n);
    check_eta(eta);
    check_delta(delta);
    check_kl(kl);
    const double complexity = (kl + std::log(1.0 / delta)) / (eta * static_cast<double>(n));
    return make_report(posterior_empirical_risk, 0.0, complexity, eta);
}

BoundReport pac_bayes_expectation_bound(double posterior_empirical_risk, double kl,
                                        long long n, double eta) {
    check_sample_size(n);
    check_eta(eta);
    check_kl(kl);
    const double complexity = kl / (eta * static_cast<double>(n));
    return make_report(posterior_empirical_risk, 0.0, complexity, eta);
}

EtaGrid build_eta_grid(double u, double v, double alpha) {
    if (!(u > 0.0) || !(u < v) || !std::isfinite(v))
        throw std::invalid_argument("eta grid: requires 0 < u < v finite");
    check_alpha_ratio(alpha);
    // cardinality ceil(log_alpha(v/u)); the epsilon keeps an exact power of
    // alpha from picking up a spurious extra point through log rounding
    double count = std::ceil(log_base(v / u, alpha) - 1e-12);
    long long m = count < 1.0 ? 1 : static_cast<long long>(count);
    // covering needs u alpha^m >= v; restore it if the log rounded down
    while (u * std::pow(alpha, static_cast<double>(m)) < v) ++m;

    EtaGrid grid;
    grid.u = u;
    grid.v = v;
    grid.alpha = alpha;
    grid.points.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i)
        grid.points.push_back(u * std::pow(alpha, static_cast<double>(i)));
    return grid;
}

BoundReport pac_bayes_grid_bound(double posterior_empirical_risk, double kl,
                                 long long n, double eta, const EtaGrid& grid,
                                 double delta) {
    check_sample_size(n);
    check_eta(eta);
    check_delta(delta);
    check_kl(kl);
    if (grid.points.empty()) throw std::invalid_argument("eta grid: empty");
    if (eta < grid.u || eta > grid.v)
        throw std::invalid_argument("eta outside grid range [u, v]");
    const double count = static_cast<double>(grid.cardinality());
    const double complexity =
        grid.alpha * (kl + std::log(1.0 / delta) + std::log(count)) /
        (eta * static_cast<double>(n));
    return make_report(posterior_empirical_risk, 0.0, complexity, eta);
}

double eta_truncation_penalty(double A, double B, double v) {
    if (!(A > 0.0) || !(B > 0.0)) throw std::invalid_argument("requires A, B > 0");
    check_cap(v);
    return 2.0 * B / v;
}

GridBoundConstants pac_hoeffding_constants(long long n, LossRange range, double alpha,
                                           double v) {
    check_sample_size(n);
    check_alpha_ratio(alpha);
    check_cap(v);
    const double width = range.width();
    if (width == 0.0) throw std::invalid_argument("degenerate range: a = b");
    GridBoundConstants c;
    c.C = std::max(log_base(v * width / std::sqrt(8.0 * alpha), alpha), 0.0) + kE;
    c.u = std::min(std::sqrt(8.0 * alpha / (width * width)), v) /
          std::sqrt(static_cast<double>(n));
    c.log_factor = grid_log_factor(n, alpha, c.C);
    return c;
}

GridBoundConstants pac_variance_constants(long long n, double a, double b, double alpha,
                                          double v) {
    check_sample_size(n);
    check_alpha_ratio(alpha);
    check_cap(v);
    if (a > b) throw std::invalid_argument("range: requires a <= b");
    const double sq = std::max(a * a, b * b);
    if (sq == 0.0) throw std::invalid_argument("degenerate range: max{a^2, b^2} = 0");
    const double factor = phi_factor(a, v);
    GridBoundConstants c;
    c.C = std::max(0.5 * log_base(v * sq * factor / alpha, alpha), 0.0) + kE;
    c.u = std::min(std::sqrt(alpha / (factor * sq)), v) / std::sqrt(static_cast<double>(n));
    c.log_factor = grid_log_factor(n, alpha, c.C);
    return c;
}

GridBoundConstants excess_hoeffding_constants(long long n, double b, double alpha,
                                              double v) {
    // relative losses live in [-b, b]: width 2b
    if (!(b > 0.0)) throw std::invalid_argument("requires b > 0");
    return pac_hoeffding_constants(n, LossRange{-b, b}, alpha, v);
}

GridBoundConstants excess_variance_constants(long long n, double b, double alpha,
                                             double v) {
    check_sample_size(n);
    check_alpha_ratio(alpha);
    check_cap(v);
    if (!(b > 0.0)) throw std::invalid_argument("requires b > 0");
    const double factor = phi(b * v); // phi(-a v) at a = -b
    GridBoundConstants c;
    c.C = std::max(0.5 * log_base(v * b * b * factor / alpha, alpha), 0.0) + kE;
    c.u = std::min(std::sqrt(alpha / (factor * b * b)), v) / std::sqrt(static_cast<double>(n));
    c.log_factor = grid_log_factor(n, alpha, c.C);
    return c;
}

namespace {

// Shared assembly for the eta-optimized PAC bounds: slack eta * slack_coeff,
// complexity alpha * L / (eta n) with L = kl + ln(1/delta) + log_factor.
// The closed-form optimizer sqrt(alpha L / (n slack_coeff)) is clamped to
// [u, v]; the bound stays valid anywhere in the range.
BoundReport grid_optimized_report(double empirical, double kl, long long n,
                                  double slack_coeff, double alpha, double v,
                                  double delta, const GridBoundConstants& c,
                                  std::optional<double> eta_in) {
    check_kl(kl);
    const double nd = static_cast<double>(n);
    const double L = kl + std::log(1.0 / delta) + c.log_factor;
    double eta;
    if (eta_in.has_value()) {
        check_eta(*eta_in);
        if (*eta_in > v) throw std::invalid_argument("eta out of range: requires eta <= v");
        eta = *eta_in;
    } else if (std::isinf(L)) {
        eta = v; // vacuous bound; any eta gives +inf
    } else {
        eta = slack_coeff > 0.0 ? std::sqrt(alpha * L / (nd * slack_coeff))
                                : std::numeric_limits<double>::infinity();
        eta = clamp(eta, c.u, v);
    }
    return make_report(empirical, eta * slack_coeff, alpha * L / (eta * nd), eta);
}

} // namespace

BoundReport pac_hoeffding_bound(double posterior_empirical_risk, double kl, long long n,
                                LossRange range, double alpha, double v, double delta,
                                std::optional<double> eta) {
    check_delta(delta);
    const auto c = pac_hoeffding_constants(n, range, alpha, v);
    const double width = range.width();
    return grid_optimized_report(posterior_empirical_risk, kl, n, width * width / 8.0,
                                 alpha, v, delta, c, eta);
}

BoundReport pac_variance_bound(double posterior_empirical_risk, double kl,
                               double posterior_sec_moment, long long n, double a,
                               double b, double alpha, double v, double delta,
                               std::optional<double> eta) {
    check_delta(delta);
    if (posterior_sec_moment < 0.0)
        throw std::invalid_argument("posterior_sec_moment must be >= 0");
    const auto c = pac_variance_constants(n, a, b, alpha, v);
    const double slack_coeff = phi_factor(a, v) * posterior_sec_moment;
    return grid_optimized_report(posterior_empirical_risk, kl, n, slack_coeff, alpha, v,
                                 delta, c, eta);
}

BoundReport excess_risk_bounds(double posterior_empirical_risk,
                               double ref_empirical_risk, double kl,
                               double posterior_sec_moment_relative, long long n,
                               double b, double alpha, double v, double delta,
                               ExcessFlavor flavor, std::optional<double> eta) {
    check_delta(delta);
    if (!(b > 0.0)) throw std::invalid_argument("requires b > 0");
    const double empirical = posterior_empirical_risk - ref_empirical_risk;
    if (flavor == ExcessFlavor::hoeffding) {
        const auto c = excess_hoeffding_constants(n, b, alpha, v);
        // range width 2b, so the Hoeffding slack is eta b^2 / 2
        return grid_optimized_report(empirical, kl, n, b * b / 2.0, alpha, v, delta, c,
                                     eta);
    }
    if (posterior_sec_moment_relative < 0.0)
        throw std::invalid_argument("posterior_sec_moment_relative must be >= 0");
    const auto c = excess_variance_constants(n, b, alpha, v);
    const double slack_coeff = phi(b * v) * posterior_sec_moment_relative;
    return grid_optimized_report(empirical, kl, n, slack_coeff, alpha, v, delta, c, eta);
}

} // namespace pacbound
