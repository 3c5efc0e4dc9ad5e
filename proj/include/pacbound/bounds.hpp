#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "pacbound/distribution.hpp"
#include "pacbound/prob_vector.hpp"

namespace pacbound {

// Every bound decomposes as empirical + slack + complexity = total.
//  - empirical_term: R_n or E_{pi_hat}[R_n] (minus a reference risk for
//    the excess-risk bounds)
//  - slack_term: the eta-proportional part, 0 where the bound has none
//  - complexity_term: the (1/eta n)- or (alpha/eta n)-scaled log part
// eta: the eta the report was evaluated at; nullopt when the degenerate
// optimum is eta -> infinity (zero-width range) and no finite eta applies.
struct BoundReport {
    double empirical_term = 0.0;
    double slack_term = 0.0;
    double complexity_term = 0.0;
    double total = 0.0;
    std::optional<double> eta;
};

// Geometric grid {u * alpha^i} covering [u, v]: every eta in [u, v] has a
// grid point eta_i with eta_i <= eta <= alpha * eta_i.
struct EtaGrid {
    double u = 0.0;
    double v = 0.0;
    double alpha = 0.0;
    std::vector<double> points;

    std::size_t cardinality() const { return points.size(); }
};

// Fixed-eta Chernoff bound: M_eta <= R_n + ln(1/delta)/(eta n).
BoundReport chernoff_bound(double empirical_risk, long long n, double eta, double delta);

// Hoeffding's inequality at the optimal eta = sqrt(8 ln(1/delta) / (n (b-a)^2)):
// R <= R_n + sqrt(ln(1/delta) (b-a)^2 / (2n)). Degenerate cases (delta = 1,
// or a = b) return the finite limit total = R_n.
BoundReport hoeffding_bound(double empirical_risk, long long n, LossRange range,
                            double delta);

// Variance-flavoured bound for losses >= a with a <= 0 and eta in (0, v]:
// R <= R_n + eta phi(-v a) E[loss^2] + ln(1/delta)/(eta n).
// v may be +infinity only when a = 0 (then phi(-v a) = 1/2).
BoundReport variance_bound(double empirical_risk, double sec_moment, long long n,
                           double a, double v, double eta, double delta);

// Union bound over a countable class with prior pi:
// M_eta(h) <= R_n(h) + ln(1/(pi(h) delta))/(eta n) for the selected h.
BoundReport union_bound(const std::vector<double>& empirical_risks,
                        const ProbVector& prior, std::size_t selected, long long n,
                        double eta, double delta);

// Slack models converting M_eta to R for the eta-optimized union bound.
struct HoeffdingSlack {
    LossRange range;
};
struct VarianceSlack {
    double sec_moment = 0.0;
    double a = 0.0; // lower loss endpoint, <= 0
    double v = 0.0; // eta cap; +infinity allowed when a = 0
};
using SlackModel = std::variant<HoeffdingSlack, VarianceSlack>;

// Union bound with eta optimized per selected hypothesis. Valid at the
// stated delta simultaneously over all hypotheses: the loss-rescaling trick
// makes the optimization free of any extra union cost over eta.
BoundReport union_bound_eta_opt(const std::vector<double>& empirical_risks,
                                const ProbVector& prior, std::size_t selected,
                                long long n, double delta, const SlackModel& slack);

// PAC-Bayes bound in probability:
// E_pi_hat[M_eta] <= E_pi_hat[R_n] + (KL + ln(1/delta))/(eta n).
BoundReport pac_bayes_bound(double posterior_empirical_risk, double kl, long long n,
                            double eta, double delta);

// PAC-Bayes bound in expectation (no delta):
// E_D E_pi_hat[M_eta] <= E_D[E_pi_hat[R_n] + KL/(eta n)].
BoundReport pac_bayes_expectation_bound(double posterior_empirical_risk, double kl,
                                        long long n, double eta);

// Grid {u alpha^i}, i = 0 .. ceil(log_alpha(v/u)) - 1. Requires 0 < u < v
// and alpha > 1; the covering property is ensured constructively.
EtaGrid build_eta_grid(double u, double v, double alpha);

// Uniform-in-eta PAC-Bayes bound over [grid.u, grid.v]:
// E_pi_hat[M_eta] <= E_pi_hat[R_n] + alpha (KL + ln(1/delta) + ln |grid|)/(eta n).
BoundReport pac_bayes_grid_bound(double posterior_empirical_risk, double kl,
                                 long long n, double eta, const EtaGrid& grid,
                                 double delta);

// The cost of capping eta at v: min_{0<eta<=v}(eta A + B/eta) exceeds the
// unconstrained minimum by at most 2B/v. Returns 2B/v.
double eta_truncation_penalty(double A, double B, double v);

// Constants shared by the eta-optimized PAC bounds: the statement's C, the
// grid floor u, and the log factor ln(0.5 log_alpha n + C).
struct GridBoundConstants {
    double C = 0.0;
    double u = 0.0;
    double log_factor = 0.0;
};

GridBoundConstants pac_hoeffding_constants(long long n, LossRange range, double alpha,
                                           double v);
GridBoundConstants pac_variance_constants(long long n, double a, double b, double alpha,
                                          double v);
GridBoundConstants excess_hoeffding_constants(long long n, double b, double alpha,
                                              double v);
GridBoundConstants excess_variance_constants(long long n, double b, double alpha,
                                             double v);

// PAC-Hoeffding: for all eta in (0, v],
// E_pi_hat[R] <= E_pi_hat[R_n] + eta (b-a)^2/8
//               + alpha (KL + ln(1/delta) + ln(0.5 log_alpha n + C))/(eta n).
// When eta is omitted, uses the closed-form minimizer clamped to [u, v].
BoundReport pac_hoeffding_bound(double posterior_empirical_risk, double kl, long long n,
                                LossRange range, double alpha, double v, double delta,
                                std::optional<double> eta = std::nullopt);

// PAC-Variance: slack eta phi(-a v) E_pi_hat[loss^2]; same complexity shape
// with this bound's C. Requires a <= 0 <= max|range| and alpha > 1, v > 0.
BoundReport pac_variance_bound(double posterior_empirical_risk, double kl,
                               double posterior_sec_moment, long long n, double a,
                               double b, double alpha, double v, double delta,
                               std::optional<double> eta = std::nullopt);

enum class ExcessFlavor { hoeffding, variance };

// Excess-risk bounds via the relative loss l'(h) = l(h) - l(h*), for losses
// in [0, b] so l' in [-b, b]. empirical_term = posterior empirical risk
// minus the reference hypothesis's; the bound targets E_pi_hat[R] - R(h*).
BoundReport excess_risk_bounds(double posterior_empirical_risk,
                               double ref_empirical_risk, double kl,
                               double posterior_sec_moment_relative, long long n,
                               double b, double alpha, double v, double delta,
                               ExcessFlavor flavor,
                               std::optional<double> eta = std::nullopt);

} // namespace pacbound
