// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here; the checks are oracle- and property-based
// because the underlying results are inequalities, not tables.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "pacbound/bounds.hpp"
#include "pacbound/coverage.hpp"
#include "pacbound/environment.hpp"
#include "pacbound/experiment.hpp"
#include "pacbound/kernels.hpp"
#include "pacbound/posterior.hpp"
#include "pacbound/rng.hpp"
#include "test_util.hpp"

using namespace pacbound;
using test_util::phi_oracle;
using test_util::random_law;
using test_util::random_prob_vector;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& what) {
        if (ok) detail = what;
        ok = false;
    }

    void expect(bool condition, const std::string& what) {
        if (!condition) fail(what);
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// ---- criterion 1: phi ------------------------------------------------------

void criterion_phi(Check& c) {
    c.expect(phi(0.0) == 0.5, "phi(0) != 1/2 exactly");
    for (int i = 0; i < 500; ++i) {
        const double mag =
            std::exp(std::log(1e-9) + (std::log(30.0) - std::log(1e-9)) * i / 499.0);
        for (double x : {mag, -mag}) {
            const long double ref = phi_oracle(x);
            const double err =
                static_cast<double>(fabsl(static_cast<long double>(phi(x)) - ref));
            const double tol = 1e-13 * std::max(1.0, static_cast<double>(fabsl(ref)));
            if (err > tol) c.fail("phi oracle mismatch at x=" + fmt(x));
        }
    }
    SplitMix64 rng(101);
    for (int i = 0; i < 10000; ++i) {
        double x = -50.0 + 100.0 * rng.uniform01();
        double y = -50.0 + 100.0 * rng.uniform01();
        if (x > y) std::swap(x, y);
        if (phi(x) > phi(y) + 1e-12) c.fail("phi not monotone at " + fmt(x));
    }
}

// ---- criterion 2: M_eta ----------------------------------------------------

void criterion_m_eta(Check& c) {
    SplitMix64 rng(102);
    std::vector<double> etas;
    for (int j = 0; j < 20; ++j)
        etas.push_back(std::exp(std::log(1e-3) + (std::log(1e2) - std::log(1e-3)) * j / 19.0));
    for (int i = 0; i < 1000; ++i) {
        const auto law = random_law(rng, 6, -2.0, 3.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double eta : etas) {
            const double m = m_eta(law, eta);
            if (m > prev + 1e-10) c.fail("M_eta increased in eta");
            if (m > law.mean() + 1e-10) c.fail("M_eta above the mean");
            prev = m;
        }
    }
}

// ---- criterion 3: i.i.d. product identity ----------------------------------

void criterion_iid(Check& c) {
    SplitMix64 rng(103);
    for (int rep = 0; rep < 100; ++rep) {
        const auto law = random_law(rng, 3, -1.0, 2.0);
        const double eta = 0.1 + 3.0 * rng.uniform01();
        for (int n = 1; n <= 3; ++n) {
            double lhs = 0.0;
            std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
            while (true) {
                double prob = 1.0, sum = 0.0;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    prob *= law.probs()[idx[j]];
                    sum += law.support()[idx[j]];
                }
                lhs += prob * std::exp(-eta * sum);
                std::size_t pos = 0;
                while (pos < idx.size() && ++idx[pos] == law.size()) idx[pos++] = 0;
                if (pos == idx.size()) break;
            }
            double moment = 0.0;
            for (std::size_t j = 0; j < law.size(); ++j)
                moment += law.probs()[j] * std::exp(-eta * law.support()[j]);
            if (std::fabs(lhs - std::pow(moment, n)) > 1e-12)
                c.fail("enumeration != product form at n=" + std::to_string(n));
        }
    }
}

// ---- criterion 4: surrogate-to-mean inequalities ---------------------------

void criterion_surrogate_inequalities(Check& c) {
    const LossRange ranges[] = {{0.0, 1.0}, {-1.0, 1.0}, {-0.3, 0.7}};
    for (const auto& r : ranges) {
        for (int pi = 0; pi <= 10; ++pi) {
            const double p = 0.1 * pi;
            const DiscreteLossDistribution law({r.a, r.b}, {1.0 - p, p});
            for (double eta : {0.01, 0.1, 1.0, 10.0}) {
                if (law.mean() >
                    m_eta(law, eta) + eta * r.width() * r.width() / 8.0 + 1e-12)
                    c.fail("range slack inequality failed at p=" + fmt(p));
            }
        }
    }
    SplitMix64 rng(104);
    for (int rep = 0; rep < 400; ++rep) {
        const double a = -2.0 * rng.uniform01();
        const double b = 2.0 * rng.uniform01();
        const auto law = random_law(rng, 6, a, b);
        for (double v : {0.5, 1.0, 5.0}) {
            for (double eta : {0.3 * v, v}) {
                const double slack = eta * phi(-v * a) * second_moment(law);
                if (law.mean() > m_eta(law, eta) + slack + 1e-12)
                    c.fail("second-moment slack inequality failed");
            }
        }
    }
}

// ---- criterion 5: point-mass reductions ------------------------------------

void criterion_reductions(Check& c) {
    SplitMix64 rng(105);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 1 + rng.next() % 7;
        const auto prior = random_prob_vector(rng, k);
        const std::size_t pick = rng.next() % k;
        std::vector<double> risks(k);
        for (double& x : risks) x = rng.uniform01();
        const long long n = 1 + static_cast<long long>(rng.next() % 2000);
        const double eta = 0.01 + 5.0 * rng.uniform01();
        const double delta = 0.01 + 0.99 * rng.uniform01();

        const auto ub = union_bound(risks, prior, pick, n, eta, delta);
        const auto pb =
            pac_bayes_bound(risks[pick], std::log(1.0 / prior[pick]), n, eta, delta);
        const double scale = std::max(1.0, std::fabs(ub.total));
        if (std::fabs(ub.total - pb.total) > 1e-12 * scale)
            c.fail("pac_bayes != union under point mass");

        const auto single = union_bound({risks[pick]}, ProbVector::uniform(1), 0, n,
                                        eta, delta);
        const auto chern = chernoff_bound(risks[pick], n, eta, delta);
        if (std::fabs(single.total - chern.total) > 1e-12 * scale)
            c.fail("union over one hypothesis != chernoff");
    }
}

// ---- criterion 6: eta-grid machinery ---------------------------------------

void criterion_grid(Check& c) {
    SplitMix64 rng(106);
    for (int i = 0; i < 1000; ++i) {
        const double u = 1e-4 + rng.uniform01();
        const double v = u * (1.5 + 200.0 * rng.uniform01());
        const double alpha = 1.05 + 4.0 * rng.uniform01();
        const auto grid = build_eta_grid(u, v, alpha);
        const auto expected =
            static_cast<std::size_t>(std::ceil(std::log(v / u) / std::log(alpha)));
        if (grid.cardinality() != expected) c.fail("grid cardinality formula violated");

        const double eta = u + (v - u) * rng.uniform01();
        bool covered = false;
        for (double p : grid.points)
            if (p <= eta * (1 + 1e-12) && eta <= alpha * p * (1 + 1e-12)) covered = true;
        if (!covered) c.fail("grid covering property violated");

        // uniform-in-eta complexity inflation versus the fixed-eta bound
        const double kl = 2.0 * rng.uniform01();
        const double delta = 0.02 + 0.9 * rng.uniform01();
        const long long n = 10 + static_cast<long long>(rng.next() % 1000);
        const auto uniform_form = pac_bayes_grid_bound(0.2, kl, n, eta, grid, delta);
        const auto fixed_form = pac_bayes_bound(0.2, kl, n, eta, delta);
        const double m = static_cast<double>(grid.cardinality());
        const double factor = alpha * (kl + std::log(1.0 / delta) + std::log(m)) /
                              (kl + std::log(1.0 / delta));
        const double measured = uniform_form.complexity_term / fixed_form.complexity_term;
        if (std::fabs(measured - factor) > 1e-12 * factor)
            c.fail("grid complexity inflation factor mismatch");
    }
}

// ---- criterion 7: closed-form eta vs numeric minimizer ---------------------

void criterion_closed_form_eta(Check& c) {
    SplitMix64 rng(107);
    int hoeffding_done = 0, variance_done = 0;
    while (hoeffding_done < 100 || variance_done < 100) {
        const double kl = 2.0 * rng.uniform01();
        const double delta = 0.02 + 0.5 * rng.uniform01();
        const long long n = 50 + static_cast<long long>(rng.next() % 4000);
        const double alpha = 1.3 + 2.5 * rng.uniform01();
        const double v = 0.4 + 4.0 * rng.uniform01();
        const double nd = static_cast<double>(n);

        if (hoeffding_done < 100) {
            const auto ch = pac_hoeffding_constants(n, {0.0, 1.0}, alpha, v);
            const double L = kl + std::log(1.0 / delta) + ch.log_factor;
            const double closed = std::sqrt(8.0 * alpha * L / nd);
            if (closed > ch.u * 1.05 && closed < v * 0.95) {
                ++hoeffding_done;
                const auto r = pac_hoeffding_bound(0.2, kl, n, {0.0, 1.0}, alpha, v, delta);
                auto [eta_num, val] = minimize_eta(
                    [&](double e) { return e / 8.0 + alpha * L / (e * nd); }, ch.u, v);
                (void)val;
                if (std::fabs(eta_num - *r.eta) > 1e-6 * *r.eta)
                    c.fail("numeric eta disagrees with closed form (range slack)");
            }
        }
        if (variance_done < 100) {
            const double sec = 0.05 + 0.6 * rng.uniform01();
            const auto cv = pac_variance_constants(n, 0.0, 1.0, alpha, v);
            const double L = kl + std::log(1.0 / delta) + cv.log_factor;
            const double closed = std::sqrt(alpha * L / (nd * 0.5 * sec));
            if (closed > cv.u * 1.05 && closed < v * 0.95) {
                ++variance_done;
                const auto r =
                    pac_variance_bound(0.2, kl, sec, n, 0.0, 1.0, alpha, v, delta);
                auto [eta_num, val] = minimize_eta(
                    [&](double e) { return e * 0.5 * sec + alpha * L / (e * nd); },
                    cv.u, v);
                (void)val;
                if (std::fabs(eta_num - *r.eta) > 1e-6 * *r.eta)
                    c.fail("numeric eta disagrees with closed form (variance slack)");
            }
        }
    }
}

// ---- criterion 8: truncation penalty ---------------------------------------

void criterion_truncation(Check& c) {
    SplitMix64 rng(108);
    for (int i = 0; i < 1000; ++i) {
        const double A = 0.05 + 10.0 * rng.uniform01();
        const double B = 0.05 + 10.0 * rng.uniform01();
        const double v = 0.05 + 10.0 * rng.uniform01();
        const double interior = std::min(std::sqrt(B / A), v);
        double constrained = interior * A + B / interior;
        for (int j = 1; j <= 2000; ++j) {
            const double eta = v * j / 2000.0;
            constrained = std::min(constrained, eta * A + B / eta);
        }
        if (constrained >
            2.0 * std::sqrt(A * B) + eta_truncation_penalty(A, B, v) + 1e-12)
            c.fail("truncation inequality violated");
    }
}

// ---- criterion 9: Gibbs optimality -----------------------------------------

void criterion_gibbs_optimality(Check& c) {
    SplitMix64 rng(109);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 2 + rng.next() % 7;
        const auto prior = random_prob_vector(rng, k);
        std::vector<double> risks(k);
        for (double& r : risks) r = rng.uniform01();
        const GibbsParams params{0.2 + 2.0 * rng.uniform01(),
                                 1.0 + 2.0 * rng.uniform01(),
                                 1 + static_cast<long long>(rng.next() % 500)};
        const double weight =
            params.alpha / (params.eta * static_cast<double>(params.n));
        auto objective = [&](const ProbVector& post) {
            double risk = 0.0;
            for (std::size_t j = 0; j < k; ++j) risk += post[j] * risks[j];
            return risk + weight * kl_divergence(post, prior);
        };
        const double at_gibbs = objective(gibbs_posterior(prior, risks, params));
        for (std::size_t j = 0; j < k; ++j) {
            if (prior[j] > 0.0 &&
                at_gibbs > objective(ProbVector::point_mass(k, j)) + 1e-10)
                c.fail("Gibbs beaten by a point mass");
        }
        for (int p = 0; p < 100; ++p) {
            if (at_gibbs > objective(random_prob_vector(rng, k)) + 1e-10)
                c.fail("Gibbs beaten by a random perturbation");
        }
    }
}

// ---- criterion 10: coverage of every in-probability bound ------------------

void criterion_coverage(Check& c) {
    const Environment envs[] = {preset_environment("bernoulli_single"),
                                preset_environment("bernoulli_grid10"),
                                preset_environment("asymmetric3")};
    const char* env_names[] = {"bernoulli_single", "bernoulli_grid10", "asymmetric3"};
    EtaPolicy policy;
    policy.eta = 1.0;
    policy.grid_u = 0.01;
    policy.grid_v = 1.0;
    policy.grid_alpha = 2.0;
    policy.v = 1.0;
    policy.alpha = 2.0;
    const EstimatorSpec erm_est;
    const EstimatorSpec gibbs_est{EstimatorSpec::Kind::gibbs, {1.0, 2.0, 100}};

    const std::pair<BoundKind, const EstimatorSpec*> cases[] = {
        {BoundKind::chernoff, &erm_est},
        {BoundKind::union_fixed, &erm_est},
        {BoundKind::union_eta_opt, &erm_est},
        {BoundKind::pac_bayes, &gibbs_est},
        {BoundKind::pac_bayes_grid, &gibbs_est},
        {BoundKind::pac_hoeffding, &gibbs_est},
        {BoundKind::pac_variance, &gibbs_est},
        {BoundKind::excess_hoeffding, &gibbs_est},
        {BoundKind::excess_variance, &gibbs_est},
    };
    for (double delta : {0.05, 0.1}) {
        for (std::size_t e = 0; e < 3; ++e) {
            for (const auto& [kind, est] : cases) {
                const auto stats =
                    run_coverage(envs[e], 100, delta, policy, kind, *est, 2000, 20260810);
                if (!stats.passed)
                    c.fail(std::string(bound_kind_name(kind)) + " on " + env_names[e] +
                           " at delta " + fmt(delta) + ": rate " +
                           fmt(stats.violation_rate) + " > " + fmt(stats.pass_threshold));
            }
        }
    }
}

// ---- criterion 11: in-expectation bound ------------------------------------

void criterion_expectation(Check& c) {
    const EstimatorSpec gibbs_est{EstimatorSpec::Kind::gibbs, {1.0, 2.0, 100}};
    for (const char* name : {"bernoulli_single", "asymmetric3"}) {
        const auto stats = run_expectation_check(preset_environment(name), 100, 1.0,
                                                 gibbs_est, 2000, 7);
        if (!stats.passed)
            c.fail(std::string(name) + ": mean slack " + fmt(stats.mean_slack) +
                   " above 3se " + fmt(stats.threshold));
    }
}

// ---- criterion 12: fixed-point trace through the CLI -----------------------

struct TraceRow {
    double tv = 0.0;
    double bound = 0.0;
    double sigma = 0.0;
};

std::vector<TraceRow> parse_trace(const std::string& csv) {
    std::vector<TraceRow> rows;
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line); // header
    while (std::getline(ss, line)) {
        TraceRow row;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // iteration
        std::getline(ls, cell, ',');
        row.tv = std::strtod(cell.c_str(), nullptr);
        std::getline(ls, cell, ',');
        row.bound = std::strtod(cell.c_str(), nullptr);
        std::getline(ls, cell, ',');
        row.sigma = std::strtod(cell.c_str(), nullptr);
        rows.push_back(row);
    }
    return rows;
}

void criterion_fixed_point(Check& c) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pacbound_acceptance";
    fs::create_directories(dir);
    const fs::path out1 = dir / "trace1.csv";
    const fs::path out2 = dir / "trace2.csv";

    // eta/alpha * n = 10 keeps the prior from collapsing to a point mass
    // before ten iterations have accumulated
    auto config_for = [&](const fs::path& out) {
        return std::string(R"({
            "command": "fixpoint",
            "environment": {"range": [0, 1],
                            "hypotheses": [{"support": [0, 1], "probs": [0.7, 0.3]},
                                           {"support": [0, 1], "probs": [0.5, 0.5]}]},
            "n": 100,
            "gibbs": {"eta": 0.2, "alpha": 2.0},
            "trials": 10000, "max_iters": 10, "tol": 1e-12, "seed": 99,
            "out": ")") + out.string() + "\"}";
    };
    const fs::path cfg1 = dir / "fix1.json";
    const fs::path cfg2 = dir / "fix2.json";
    std::ofstream(cfg1) << config_for(out1);
    std::ofstream(cfg2) << config_for(out2);

    auto run = [&](const fs::path& cfg) {
        const std::string cmd = std::string(PACBOUND_CLI_PATH) + " --config " +
                                cfg.string() + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    if (!run(cfg1) || !run(cfg2)) {
        c.fail("fixpoint CLI run failed");
        return;
    }
    std::ifstream f1(out1, std::ios::binary), f2(out2, std::ios::binary);
    std::ostringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    if (s1.str() != s2.str() || s1.str().empty()) {
        c.fail("trace not byte-identical across reruns");
        return;
    }

    const auto rows = parse_trace(s1.str());
    if (rows.size() < 10) {
        c.fail("expected at least 10 iterations, got " + std::to_string(rows.size()));
        return;
    }
    for (std::size_t t = 0; t + 1 < rows.size(); ++t) {
        const double noise = 3.0 * std::sqrt(rows[t].sigma * rows[t].sigma +
                                             rows[t + 1].sigma * rows[t + 1].sigma);
        if (rows[t + 1].bound > rows[t].bound + noise)
            c.fail("bound rose from iteration " + std::to_string(t) + ": " +
                   fmt(rows[t].bound) + " -> " + fmt(rows[t + 1].bound));
    }
}

// ---- criterion 13: determinism across thread counts ------------------------

void criterion_determinism(Check& c) {
    const auto env = preset_environment("bernoulli_grid10");
    EtaPolicy policy;
    const EstimatorSpec gibbs_est{EstimatorSpec::Kind::gibbs, {1.0, 2.0, 100}};

    long long reference = -1;
    for (int threads : {1, 4, 8}) {
        const auto stats = run_coverage(env, 100, 0.05, policy, BoundKind::pac_bayes_grid,
                                        gibbs_est, 500, 31337, threads);
        if (reference < 0) reference = stats.violations;
        if (stats.violations != reference)
            c.fail("coverage violations differ at threads=" + std::to_string(threads));
    }

    const auto two = Environment({DiscreteLossDistribution::bernoulli(0.3),
                                  DiscreteLossDistribution::bernoulli(0.5)},
                                 {0.0, 1.0});
    FixedPointOptions opt1, opt4;
    opt1.threads = 1;
    opt4.threads = 4;
    const auto a = fixed_point_iteration(two, ProbVector::uniform(2), {1.0, 2.0, 100},
                                         1000, 5, 1e-12, 5, opt1);
    const auto b = fixed_point_iteration(two, ProbVector::uniform(2), {1.0, 2.0, 100},
                                         1000, 5, 1e-12, 5, opt4);
    if (a.trace.size() != b.trace.size()) {
        c.fail("fixpoint trace lengths differ across thread counts");
        return;
    }
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
        if (a.trace[t].bound_value != b.trace[t].bound_value ||
            !(a.trace[t].prior == b.trace[t].prior))
            c.fail("fixpoint trace differs at iteration " + std::to_string(t));
    }

    const auto s1 = tightness_sweep(env, {100}, 0.05, {BoundKind::pac_hoeffding},
                                    policy, gibbs_est, 200, 77, 1);
    const auto s4 = tightness_sweep(env, {100}, 0.05, {BoundKind::pac_hoeffding},
                                    policy, gibbs_est, 200, 77, 4);
    if (s1[0].mean_total != s4[0].mean_total || s1[0].mean_left != s4[0].mean_left)
        c.fail("sweep means differ across thread counts");
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "phi exactness, oracle agreement, monotonicity", criterion_phi},
        {2, "M_eta nonincreasing and below the mean", criterion_m_eta},
        {3, "i.i.d. exponential-moment product identity", criterion_iid},
        {4, "range and second-moment slack inequalities", criterion_surrogate_inequalities},
        {5, "point-mass reduction chain", criterion_reductions},
        {6, "eta-grid covering, cardinality, inflation factor", criterion_grid},
        {7, "closed-form eta matches numeric minimizer", criterion_closed_form_eta},
        {8, "eta truncation penalty 2B/v", criterion_truncation},
        {9, "Gibbs posterior optimality", criterion_gibbs_optimality},
        {10, "1-delta coverage for all bound kinds", criterion_coverage},
        {11, "in-expectation bound has nonpositive mean slack", criterion_expectation},
        {12, "fixed-point trace decreases; CLI output reproducible", criterion_fixed_point},
        {13, "bitwise determinism for any thread count", criterion_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Check check;
        criterion.run(check);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n",
                    check.ok ? "PASS" : "FAIL", criterion.id, criterion.name, seconds,
                    check.ok ? "" : " -- ", check.ok ? "" : check.detail.c_str());
        std::fflush(stdout);
        if (!check.ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
