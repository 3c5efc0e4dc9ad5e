#include "pacbound/coverage.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pacbound/kernels.hpp"
#include "pacbound/parallel.hpp"
#include "pacbound/rng.hpp"

namespace pacbound {

namespace {

constexpr double kViolationTol = 1e-12; // absorbs float noise in left/right
constexpr int kCheckGridSize = 50;      // eta points for uniform-in-eta kinds

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(count));
    if (hi <= lo || count == 1) {
        pts.push_back(lo);
        return pts;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i) {
        double x = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                      static_cast<double>(count - 1));
        pts.push_back(std::min(std::max(x, lo), hi));
    }
    return pts;
}

// Per-run precomputation shared by every trial.
struct RunContext {
    const Environment* env = nullptr;
    long long n = 0;
    double delta = 0.0;
    EtaPolicy policy;
    EstimatorSpec estimator;
    BoundKind kind = BoundKind::chernoff;
    ProbVector prior = ProbVector::uniform(1);

    std::vector<double> means;
    std::vector<double> sec_moments;
    std::size_t star = 0;            // true-risk minimizer (excess kinds)
    std::vector<double> rel_means;   // R(h) - R(h*)
    std::vector<double> rel_sec;     // E[l'(h)^2] under the shared coupling
    std::vector<double> check_etas;
    std::vector<std::vector<double>> m_table; // [eta index][h]
    EtaGrid grid;                             // pac_bayes_grid
    double var_a = 0.0;                       // lower endpoint used by variance kinds
};

bool is_excess(BoundKind kind) {
    return kind == BoundKind::excess_hoeffding || kind == BoundKind::excess_variance;
}

RunContext make_context(const Environment& env, long long n, double delta,
                        const EtaPolicy& policy, BoundKind kind,
                        const EstimatorSpec& estimator,
                        const std::optional<ProbVector>& prior) {
    check_sample_size(n);
    check_delta(delta);
    RunContext ctx;
    ctx.env = &env;
    ctx.n = n;
    ctx.delta = delta;
    ctx.policy = policy;
    ctx.estimator = estimator;
    ctx.kind = kind;
    ctx.prior = prior.value_or(ProbVector::uniform(env.size()));
    if (ctx.prior.size() != env.size())
        throw std::invalid_argument("coverage: prior/environment size mismatch");
    if (ctx.estimator.kind == EstimatorSpec::Kind::gibbs) {
        ctx.estimator.gibbs.n = n;
        check_gibbs_params(ctx.estimator.gibbs);
    }

    const std::size_t k = env.size();
    ctx.means.resize(k);
    ctx.sec_moments.resize(k);
    for (std::size_t h = 0; h < k; ++h) {
        ctx.means[h] = true_risk(env, h);
        ctx.sec_moments[h] = env.hypothesis(h).second_moment();
    }
    ctx.var_a = std::min(env.range().a, 0.0);

    switch (kind) {
        case BoundKind::chernoff:
        case BoundKind::union_fixed:
        case BoundKind::pac_bayes:
            ctx.check_etas = {policy.eta};
            break;
        case BoundKind::union_eta_opt:
            // the statement is "for all eta > 0"; a wide fixed grid plus the
            // per-trial optimized eta is the strongest finite check
            ctx.check_etas = log_spaced(1e-2, 1e2, kCheckGridSize);
            break;
        case BoundKind::pac_bayes_grid:
            ctx.grid = build_eta_grid(policy.grid_u, policy.grid_v, policy.grid_alpha);
            ctx.check_etas = log_spaced(ctx.grid.u, ctx.grid.v, kCheckGridSize);
            break;
        case BoundKind::pac_hoeffding: {
            const auto c = pac_hoeffding_constants(n, env.range(), policy.alpha, policy.v);
            ctx.check_etas = log_spaced(std::min(c.u, policy.v), policy.v, kCheckGridSize);
            break;
        }
        case BoundKind::pac_variance: {
            const auto c = pac_variance_constants(n, ctx.var_a, env.range().b,
                                                  policy.alpha, policy.v);
            ctx.check_etas = log_spaced(std::min(c.u, policy.v), policy.v, kCheckGridSize);
            break;
        }
        case BoundKind::excess_hoeffding:
        case BoundKind::excess_variance: {
            if (env.range().a < 0.0)
                throw std::invalid_argument("excess-risk kinds need losses in [0, b]");
            const double b = env.range().b;
            const auto c = kind == BoundKind::excess_hoeffding
                               ? excess_hoeffding_constants(n, b, policy.alpha, policy.v)
                               : excess_variance_constants(n, b, policy.alpha, policy.v);
            ctx.check_etas = log_spaced(std::min(c.u, policy.v), policy.v, kCheckGridSize);
            break;
        }
    }

    if (is_excess(kind)) {
        ctx.star = best_hypothesis(env);
        const Environment rel = relative_loss_env(env, Coupling::shared);
        ctx.rel_means.resize(k);
        ctx.rel_sec.resize(k);
        for (std::size_t h = 0; h < k; ++h) {
            ctx.rel_means[h] = ctx.means[h] - ctx.means[ctx.star];
            ctx.rel_sec[h] = rel.hypothesis(h).second_moment();
        }
    }

    // exact M_eta per (check eta, hypothesis) for the M-form kinds
    const bool m_form = kind == BoundKind::chernoff || kind == BoundKind::union_fixed ||
                        kind == BoundKind::union_eta_opt || kind == BoundKind::pac_bayes ||
                        kind == BoundKind::pac_bayes_grid;
    if (m_form) {
        ctx.m_table.resize(ctx.check_etas.size());
        for (std::size_t j = 0; j < ctx.check_etas.size(); ++j) {
            ctx.m_table[j].resize(k);
            for (std::size_t h = 0; h < k; ++h)
                ctx.m_table[j][h] = m_eta(env.hypothesis(h), ctx.check_etas[j]);
        }
    }
    return ctx;
}

ProbVector trial_posterior(const RunContext& ctx, const std::vector<double>& risks,
                           std::size_t erm_pick) {
    if (ctx.estimator.kind == EstimatorSpec::Kind::erm)
        return ProbVector::point_mass(ctx.env->size(), erm_pick);
    return gibbs_posterior(ctx.prior, risks, ctx.estimator.gibbs);
}

double dot(const ProbVector& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

bool trial_violates(const RunContext& ctx, std::uint64_t trial_seed) {
    const Environment& env = *ctx.env;
    const Dataset data = sample_dataset(env, ctx.n, trial_seed);
    const auto risks = empirical_risks(data);
    const double nd = static_cast<double>(ctx.n);

    switch (ctx.kind) {
        case BoundKind::chernoff: {
            // fixed hypothesis: the first one
            const double right =
                chernoff_bound(risks[0], ctx.n, ctx.policy.eta, ctx.delta).total;
            return ctx.m_table[0][0] > right + kViolationTol;
        }
        case BoundKind::union_fixed: {
            const std::size_t pick = erm(data);
            const double right =
                union_bound(risks, ctx.prior, pick, ctx.n, ctx.policy.eta, ctx.delta)
                    .total;
            return ctx.m_table[0][pick] > right + kViolationTol;
        }
        case BoundKind::union_eta_opt: {
            const std::size_t pick = erm(data);
            const double L =
                std::log(1.0 / ctx.prior[pick]) + std::log(1.0 / ctx.delta);
            for (std::size_t j = 0; j < ctx.check_etas.size(); ++j) {
                const double eta = ctx.check_etas[j];
                if (ctx.m_table[j][pick] > risks[pick] + L / (eta * nd) + kViolationTol)
                    return true;
            }
            // also probe the data-dependent optimized eta (Hoeffding form)
            const double width = env.range().width();
            if (L > 0.0 && width > 0.0) {
                const double eta = std::sqrt(8.0 * L / (nd * width * width));
                if (m_eta(env.hypothesis(pick), eta) >
                    risks[pick] + L / (eta * nd) + kViolationTol)
                    return true;
            }
            return false;
        }
        default:
            break;
    }

    // posterior-based kinds
    const ProbVector post = trial_posterior(ctx, risks, erm(data));
    const double post_risk = dot(post, risks);
    const double kl = kl_divergence(post, ctx.prior);

    switch (ctx.kind) {
        case BoundKind::pac_bayes: {
            const double left = dot(post, ctx.m_table[0]);
            const double right =
                pac_bayes_bound(post_risk, kl, ctx.n, ctx.policy.eta, ctx.delta).total;
            return left > right + kViolationTol;
        }
        case BoundKind::pac_bayes_grid: {
            for (std::size_t j = 0; j < ctx.check_etas.size(); ++j) {
                const double right = pac_bayes_grid_bound(post_risk, kl, ctx.n,
                                                          ctx.check_etas[j], ctx.grid,
                                                          ctx.delta)
                                         .total;
                if (dot(post, ctx.m_table[j]) > right + kViolationTol) return true;
            }
            return false;
        }
        case BoundKind::pac_hoeffding: {
            const double left = dot(post, ctx.means);
            for (double eta : ctx.check_etas) {
                const double right =
                    pac_hoeffding_bound(post_risk, kl, ctx.n, env.range(),
                                        ctx.policy.alpha, ctx.policy.v, ctx.delta, eta)
                        .total;
                if (left > right + kViolationTol) return true;
            }
            return false;
        }
        case BoundKind::pac_variance: {
            const double left = dot(post, ctx.means);
            const double post_sec = dot(post, ctx.sec_moments);
            for (double eta : ctx.check_etas) {
                const double right =
                    pac_variance_bound(post_risk, kl, post_sec, ctx.n, ctx.var_a,
                                       env.range().b, ctx.policy.alpha, ctx.policy.v,
                                       ctx.delta, eta)
                        .total;
                if (left > right + kViolationTol) return true;
            }
            return false;
        }
        case BoundKind::excess_hoeffding:
        case BoundKind::excess_variance: {
            const double left = dot(post, ctx.rel_means);
            const double rel_sec = dot(post, ctx.rel_sec);
            const auto flavor = ctx.kind == BoundKind::excess_hoeffding
                                    ? ExcessFlavor::hoeffding
                                    : ExcessFlavor::variance;
            for (double eta : ctx.check_etas) {
                const double right =
                    excess_risk_bounds(post_risk, risks[ctx.star], kl, rel_sec, ctx.n,
                                       env.range().b, ctx.policy.alpha, ctx.policy.v,
                                       ctx.delta, flavor, eta)
                        .total;
                if (left > right + kViolationTol) return true;
            }
            return false;
        }
        default:
            throw std::invalid_argument("unknown bound kind");
    }
}

} // namespace

const char* bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::chernoff: return "chernoff";
        case BoundKind::union_fixed: return "union";
        case BoundKind::union_eta_opt: return "union_eta_opt";
        case BoundKind::pac_bayes: return "pac_bayes";
        case BoundKind::pac_bayes_grid: return "pac_bayes_grid";
        case BoundKind::pac_hoeffding: return "pac_hoeffding";
        case BoundKind::pac_variance: return "pac_variance";
        case BoundKind::excess_hoeffding: return "excess_hoeffding";
        case BoundKind::excess_variance: return "excess_variance";
    }
    return "?";
}

std::optional<BoundKind> parse_bound_kind(const std::string& name) {
    for (BoundKind kind :
         {BoundKind::chernoff, BoundKind::union_fixed, BoundKind::union_eta_opt,
          BoundKind::pac_bayes, BoundKind::pac_bayes_grid, BoundKind::pac_hoeffding,
          BoundKind::pac_variance, BoundKind::excess_hoeffding,
          BoundKind::excess_variance}) {
        if (name == bound_kind_name(kind)) return kind;
    }
    return std::nullopt;
}

CoverageStats run_coverage(const Environment& env, long long n, double delta,
                           const EtaPolicy& eta_policy, BoundKind kind,
                           const EstimatorSpec& estimator, long long trials,
                           std::uint64_t seed, int threads,
                           const std::optional<ProbVector>& prior) {
    if (trials < 100) throw std::invalid_argument("coverage: trials must be >= 100");
    const RunContext ctx = make_context(env, n, delta, eta_policy, kind, estimator, prior);

    std::vector<std::uint8_t> violated(static_cast<std::size_t>(trials), 0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        violated[t] = trial_violates(ctx, derive_seed(seed, t)) ? 1 : 0;
    });

    CoverageStats stats;
    stats.trials = trials;
    for (std::uint8_t v : violated) stats.violations += v;
    stats.delta = delta;
    stats.violation_rate =
        static_cast<double>(stats.violations) / static_cast<double>(trials);
    stats.pass_threshold =
        delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
    stats.passed = stats.violation_rate <= stats.pass_threshold;
    return stats;
}

ExpectationStats run_expectation_check(const Environment& env, long long n, double eta,
                                       const EstimatorSpec& estimator, long long trials,
                                       std::uint64_t seed, int threads,
                                       const std::optional<ProbVector>& prior) {
    if (trials < 2) throw std::invalid_argument("expectation check: trials must be >= 2");
    check_sample_size(n);
    check_eta(eta);
    EstimatorSpec est = estimator;
    if (est.kind == EstimatorSpec::Kind::gibbs) {
        est.gibbs.n = n;
        check_gibbs_params(est.gibbs);
    }
    const ProbVector pi = prior.value_or(ProbVector::uniform(env.size()));
    if (pi.size() != env.size())
        throw std::invalid_argument("expectation check: prior/environment size mismatch");

    std::vector<double> m_values(env.size());
    for (std::size_t h = 0; h < env.size(); ++h)
        m_values[h] = m_eta(env.hypothesis(h), eta);

    std::vector<double> slack(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const Dataset data = sample_dataset(env, n, derive_seed(seed, t));
        const auto risks = empirical_risks(data);
        const ProbVector post = est.kind == EstimatorSpec::Kind::erm
                                    ? ProbVector::point_mass(env.size(), erm(data))
                                    : gibbs_posterior(pi, risks, est.gibbs);
        const double kl = kl_divergence(post, pi);
        slack[t] = dot(post, m_values) - dot(post, risks) -
                   kl / (eta * static_cast<double>(n));
    });

    double sum = 0.0, sq_sum = 0.0;
    for (double s : slack) {
        sum += s;
        sq_sum += s * s;
    }
    ExpectationStats stats;
    stats.trials = trials;
    const double td = static_cast<double>(trials);
    stats.mean_slack = sum / td;
    const double var = std::max(0.0, (sq_sum / td - stats.mean_slack * stats.mean_slack));
    stats.std_error = std::sqrt(var / (td - 1.0));
    stats.threshold = 3.0 * stats.std_error;
    stats.passed = stats.mean_slack <= stats.threshold;
    return stats;
}

namespace {

// One (left, right) evaluation per trial at the kind's representative eta;
// optimized-eta kinds use their internal closed-form optimum.
std::pair<double, double> trial_left_right(const RunContext& ctx, std::uint64_t trial_seed) {
    const Environment& env = *ctx.env;
    const Dataset data = sample_dataset(env, ctx.n, trial_seed);
    const auto risks = empirical_risks(data);

    switch (ctx.kind) {
        case BoundKind::chernoff:
            return {ctx.m_table[0][0],
                    chernoff_bound(risks[0], ctx.n, ctx.policy.eta, ctx.delta).total};
        case BoundKind::union_fixed: {
            const std::size_t pick = erm(data);
            return {ctx.m_table[0][pick],
                    union_bound(risks, ctx.prior, pick, ctx.n, ctx.policy.eta, ctx.delta)
                        .total};
        }
        case BoundKind::union_eta_opt: {
            const std::size_t pick = erm(data);
            const auto report = union_bound_eta_opt(risks, ctx.prior, pick, ctx.n,
                                                    ctx.delta,
                                                    HoeffdingSlack{env.range()});
            return {ctx.means[pick], report.total};
        }
        default:
            break;
    }

    const ProbVector post = trial_posterior(ctx, risks, erm(data));
    const double post_risk = dot(post, risks);
    const double kl = kl_divergence(post, ctx.prior);

    switch (ctx.kind) {
        case BoundKind::pac_bayes:
            return {dot(post, ctx.m_table[0]),
                    pac_bayes_bound(post_risk, kl, ctx.n, ctx.policy.eta, ctx.delta).total};
        case BoundKind::pac_bayes_grid: {
            const double eta =
                std::min(std::max(ctx.policy.eta, ctx.grid.u), ctx.grid.v);
            double left = 0.0;
            for (std::size_t h = 0; h < env.size(); ++h)
                left += post[h] * m_eta(env.hypothesis(h), eta);
            return {left,
                    pac_bayes_grid_bound(post_risk, kl, ctx.n, eta, ctx.grid, ctx.delta)
                        .total};
        }
        case BoundKind::pac_hoeffding:
            return {dot(post, ctx.means),
                    pac_hoeffding_bound(post_risk, kl, ctx.n, env.range(),
                                        ctx.policy.alpha, ctx.policy.v, ctx.delta)
                        .total};
        case BoundKind::pac_variance:
            return {dot(post, ctx.means),
                    pac_variance_bound(post_risk, kl, dot(post, ctx.sec_moments), ctx.n,
                                       ctx.var_a, env.range().b, ctx.policy.alpha,
                                       ctx.policy.v, ctx.delta)
                        .total};
        case BoundKind::excess_hoeffding:
        case BoundKind::excess_variance: {
            const auto flavor = ctx.kind == BoundKind::excess_hoeffding
                                    ? ExcessFlavor::hoeffding
                                    : ExcessFlavor::variance;
            return {dot(post, ctx.rel_means),
                    excess_risk_bounds(post_risk, risks[ctx.star], kl,
                                       dot(post, ctx.rel_sec), ctx.n, env.range().b,
                                       ctx.policy.alpha, ctx.policy.v, ctx.delta, flavor)
                        .total};
        }
        default:
            throw std::invalid_argument("unknown bound kind");
    }
}

} // namespace

std::vector<SweepRow> tightness_sweep(const Environment& env,
                                      const std::vector<long long>& n_list, double delta,
                                      const std::vector<BoundKind>& kinds,
                                      const EtaPolicy& eta_policy,
                                      const EstimatorSpec& estimator, long long trials,
                                      std::uint64_t seed, int threads,
                                      const std::optional<ProbVector>& prior) {
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    if (n_list.empty() || kinds.empty())
        throw std::invalid_argument("sweep: empty n_list or kinds");
    std::vector<SweepRow> rows;
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            const RunContext ctx = make_context(env, n_list[ni], delta, eta_policy,
                                                kinds[ki], estimator, prior);
            const std::uint64_t run_seed = derive_seed(derive_seed(seed, ki), ni);
            std::vector<double> lefts(static_cast<std::size_t>(trials));
            std::vector<double> rights(static_cast<std::size_t>(trials));
            parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
                auto [l, r] = trial_left_right(ctx, derive_seed(run_seed, t));
                lefts[t] = l;
                rights[t] = r;
            });
            SweepRow row;
            row.kind = kinds[ki];
            row.n = n_list[ni];
            double sl = 0.0, sr = 0.0;
            for (long long t = 0; t < trials; ++t) {
                sl += lefts[static_cast<std::size_t>(t)];
                sr += rights[static_cast<std::size_t>(t)];
            }
            row.mean_left = sl / static_cast<double>(trials);
            row.mean_total = sr / static_cast<double>(trials);
            row.mean_gap = row.mean_total - row.mean_left;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace pacbound
