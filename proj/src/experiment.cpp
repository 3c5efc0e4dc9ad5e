#include "pacbound/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "pacbound/bounds.hpp"
#include "pacbound/coverage.hpp"
#include "pacbound/csv.hpp"
#include "pacbound/kernels.hpp"
#include "pacbound/posterior.hpp"

namespace pacbound {

using nlohmann::json;

Environment preset_environment(const std::string& name) {
    using D = DiscreteLossDistribution;
    if (name == "bernoulli_single") {
        return Environment({D::bernoulli(0.5)}, LossRange{0.0, 1.0}, {"bern05"});
    }
    if (name == "bernoulli_grid10") {
        std::vector<D> laws;
        std::vector<std::string> labels;
        for (int i = 1; i <= 10; ++i) {
            laws.push_back(D::bernoulli(0.05 * i));
            labels.push_back("bern" + std::to_string(5 * i));
        }
        return Environment(std::move(laws), LossRange{0.0, 1.0}, std::move(labels));
    }
    if (name == "asymmetric3") {
        return Environment({D({0.0, 0.1, 1.0}, {0.7, 0.2, 0.1}),
                            D({0.0, 0.2, 1.0}, {0.5, 0.4, 0.1}),
                            D({0.0, 0.5, 1.0}, {0.6, 0.3, 0.1})},
                           LossRange{0.0, 1.0}, {"skew_a", "skew_b", "skew_c"});
    }
    if (name == "lowvar") {
        return Environment({D::bernoulli(0.01), D::bernoulli(0.02), D::bernoulli(0.05)},
                           LossRange{0.0, 1.0}, {"rare1", "rare2", "rare5"});
    }
    throw std::invalid_argument("unknown environment preset: " + name);
}

namespace {

// Typed access to one JSON object; every key read is marked used, and
// done() rejects anything left over (unknown keys are errors).
class Section {
public:
    Section(const json& j, std::string prefix) : j_(&j), prefix_(std::move(prefix)) {
        if (!j.is_object()) throw ConfigError(prefix_, "expected an object");
    }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    bool has(const std::string& key) const { return j_->contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_->at(key);
    }

    std::string require_string(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> optional_string(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return require_string(key);
    }

    // numbers may be given as the string "inf" where an infinite cap is legal
    double require_number(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (v.is_string() && v.get<std::string>() == "inf")
            return std::numeric_limits<double>::infinity();
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return require_number(key);
    }

    long long require_integer(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
        return v.get<long long>();
    }

    std::optional<long long> optional_integer(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return require_integer(key);
    }

    std::uint64_t require_seed(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw ConfigError(path(key), "expected an integer seed");
        if (v.is_number_integer() && v.get<long long>() < 0)
            throw ConfigError(path(key), "seed must be >= 0");
        return v.get<std::uint64_t>();
    }

    std::vector<double> require_number_list(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_array() || v.empty())
            throw ConfigError(path(key), "expected a nonempty array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError(path(key), "expected numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    void done() const {
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            if (!used_.count(it.key()))
                throw ConfigError(path(it.key()), "unknown key");
        }
    }

private:
    void require(const std::string& key) const {
        if (!j_->contains(key)) throw ConfigError(path(key), "missing required key");
    }

    const json* j_;
    std::string prefix_;
    std::set<std::string> used_;
};

LossRange parse_range(Section& s, const std::string& key) {
    const auto pair = s.require_number_list(key);
    if (pair.size() != 2) throw ConfigError(s.path(key), "expected [a, b]");
    if (!(pair[0] <= pair[1])) throw ConfigError(s.path(key), "requires a <= b");
    return LossRange{pair[0], pair[1]};
}

Environment parse_environment(Section& parent, const std::string& key) {
    Section env(parent.raw(key), parent.path(key));
    if (env.has("preset")) {
        const std::string name = env.require_string("preset");
        env.done();
        try {
            return preset_environment(name);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(parent.path(key) + ".preset", e.what());
        }
    }
    const LossRange range = parse_range(env, "range");
    const json& hyp = env.raw("hypotheses");
    if (!hyp.is_array() || hyp.empty())
        throw ConfigError(env.path("hypotheses"), "expected a nonempty array");
    std::vector<DiscreteLossDistribution> laws;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
        Section law(hyp[i], env.path("hypotheses") + "[" + std::to_string(i) + "]");
        auto support = law.require_number_list("support");
        auto probs = law.require_number_list("probs");
        law.done();
        try {
            laws.emplace_back(std::move(support), std::move(probs));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(env.path("hypotheses") + "[" + std::to_string(i) + "]",
                              e.what());
        }
    }
    std::vector<std::string> labels;
    if (env.has("labels")) {
        const json& ls = env.raw("labels");
        if (!ls.is_array()) throw ConfigError(env.path("labels"), "expected an array");
        for (const auto& l : ls) {
            if (!l.is_string()) throw ConfigError(env.path("labels"), "expected strings");
            labels.push_back(l.get<std::string>());
        }
    }
    env.done();
    try {
        return Environment(std::move(laws), range, std::move(labels));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(parent.path(key), e.what());
    }
}

std::optional<ProbVector> parse_prior(Section& s, const std::string& key, std::size_t k) {
    if (!s.has(key)) return std::nullopt;
    const json& v = s.raw(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "uniform") return ProbVector::uniform(k);
        throw ConfigError(s.path(key), "expected \"uniform\" or an array of weights");
    }
    if (!v.is_array()) throw ConfigError(s.path(key), "expected an array of weights");
    std::vector<double> w;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(s.path(key), "expected numbers");
        w.push_back(x.get<double>());
    }
    try {
        return ProbVector(std::move(w));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(s.path(key), e.what());
    }
}

EstimatorSpec parse_estimator(Section& parent, const std::string& key, long long n) {
    EstimatorSpec spec;
    if (!parent.has(key)) return spec; // ERM default
    Section est(parent.raw(key), parent.path(key));
    const std::string rule = est.require_string("rule");
    if (rule == "erm") {
        spec.kind = EstimatorSpec::Kind::erm;
    } else if (rule == "gibbs") {
        spec.kind = EstimatorSpec::Kind::gibbs;
        spec.gibbs.eta = est.optional_number("eta").value_or(1.0);
        spec.gibbs.alpha = est.optional_number("alpha").value_or(2.0);
        spec.gibbs.n = n;
        try {
            check_gibbs_params(spec.gibbs);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(parent.path(key), e.what());
        }
    } else {
        throw ConfigError(est.path("rule"), "expected \"erm\" or \"gibbs\"");
    }
    est.done();
    return spec;
}

EtaGrid parse_grid(Section& parent, const std::string& key) {
    Section g(parent.raw(key), parent.path(key));
    const double u = g.require_number("u");
    const double v = g.require_number("v");
    const double alpha = g.require_number("alpha");
    g.done();
    try {
        return build_eta_grid(u, v, alpha);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(parent.path(key), e.what());
    }
}

EtaPolicy parse_eta_policy(Section& s) {
    EtaPolicy policy;
    if (auto eta = s.optional_number("eta")) policy.eta = *eta;
    if (s.has("grid")) {
        const EtaGrid grid = parse_grid(s, "grid");
        policy.grid_u = grid.u;
        policy.grid_v = grid.v;
        policy.grid_alpha = grid.alpha;
    }
    if (auto v = s.optional_number("v")) policy.v = *v;
    if (auto alpha = s.optional_number("alpha")) policy.alpha = *alpha;
    return policy;
}

void emit(const Table& table, const std::string& out, const std::string& format,
          bool echo) {
    const std::string content = format == "text" ? to_text(table) : to_csv(table);
    if (!out.empty()) write_file(out, content);
    if (echo || out.empty()) std::cout << to_text(table);
}

std::string eta_cell(const std::optional<double>& eta) {
    return eta.has_value() ? format_double(*eta) : "";
}

void check_finite_total(const BoundReport& report) {
    if (!std::isfinite(report.total))
        throw NumericError("bound total is not finite (check kl and inputs)");
}

// ---- bound command -------------------------------------------------------

BoundReport compute_bound(Section& s, const std::string& kind) {
    if (kind == "chernoff") {
        return chernoff_bound(s.require_number("empirical_risk"), s.require_integer("n"),
                              s.require_number("eta"), s.require_number("delta"));
    }
    if (kind == "hoeffding") {
        return hoeffding_bound(s.require_number("empirical_risk"), s.require_integer("n"),
                               parse_range(s, "range"), s.require_number("delta"));
    }
    if (kind == "variance") {
        return variance_bound(s.require_number("empirical_risk"),
                              s.require_number("sec_moment"), s.require_integer("n"),
                              s.require_number("a"), s.require_number("v"),
                              s.require_number("eta"), s.require_number("delta"));
    }
    if (kind == "union" || kind == "union_eta_opt") {
        const auto risks = s.require_number_list("risks");
        auto prior = parse_prior(s, "prior", risks.size());
        if (!prior) throw ConfigError("prior", "missing required key");
        const long long selected = s.require_integer("selected");
        if (selected < 0 || static_cast<std::size_t>(selected) >= risks.size())
            throw ConfigError("selected", "index out of range");
        if (kind == "union") {
            return union_bound(risks, *prior, static_cast<std::size_t>(selected),
                               s.require_integer("n"), s.require_number("eta"),
                               s.require_number("delta"));
        }
        Section sm(s.raw("slack_model"), "slack_model");
        const std::string type = sm.require_string("type");
        SlackModel model = HoeffdingSlack{};
        if (type == "hoeffding") {
            model = HoeffdingSlack{parse_range(sm, "range")};
        } else if (type == "variance") {
            model = VarianceSlack{sm.require_number("sec_moment"), sm.require_number("a"),
                                  sm.require_number("v")};
        } else {
            throw ConfigError("slack_model.type", "expected \"hoeffding\" or \"variance\"");
        }
        sm.done();
        return union_bound_eta_opt(risks, *prior, static_cast<std::size_t>(selected),
                                   s.require_integer("n"), s.require_number("delta"),
                                   model);
    }
    if (kind == "pac_bayes") {
        return pac_bayes_bound(s.require_number("empirical_risk"), s.require_number("kl"),
                               s.require_integer("n"), s.require_number("eta"),
                               s.require_number("delta"));
    }
    if (kind == "pac_bayes_exp") {
        return pac_bayes_expectation_bound(s.require_number("empirical_risk"),
                                           s.require_number("kl"), s.require_integer("n"),
                                           s.require_number("eta"));
    }
    if (kind == "pac_bayes_grid") {
        return pac_bayes_grid_bound(s.require_number("empirical_risk"),
                                    s.require_number("kl"), s.require_integer("n"),
                                    s.require_number("eta"), parse_grid(s, "grid"),
                                    s.require_number("delta"));
    }
    // alpha defaults to 2 for the grid-backed bounds
    if (kind == "pac_hoeffding") {
        return pac_hoeffding_bound(s.require_number("empirical_risk"),
                                   s.require_number("kl"), s.require_integer("n"),
                                   parse_range(s, "range"),
                                   s.optional_number("alpha").value_or(2.0),
                                   s.require_number("v"), s.require_number("delta"),
                                   s.optional_number("eta"));
    }
    if (kind == "pac_variance") {
        return pac_variance_bound(s.require_number("empirical_risk"),
                                  s.require_number("kl"), s.require_number("sec_moment"),
                                  s.require_integer("n"), s.require_number("a"),
                                  s.require_number("b"),
                                  s.optional_number("alpha").value_or(2.0),
                                  s.require_number("v"), s.require_number("delta"),
                                  s.optional_number("eta"));
    }
    if (kind == "excess_hoeffding" || kind == "excess_variance") {
        const auto flavor = kind == "excess_hoeffding" ? ExcessFlavor::hoeffding
                                                       : ExcessFlavor::variance;
        return excess_risk_bounds(
            s.require_number("empirical_risk"), s.require_number("ref_empirical_risk"),
            s.require_number("kl"),
            flavor == ExcessFlavor::variance ? s.require_number("sec_moment_relative")
                                             : 0.0,
            s.require_integer("n"), s.require_number("b"),
            s.optional_number("alpha").value_or(2.0), s.require_number("v"),
            s.require_number("delta"), flavor, s.optional_number("eta"));
    }
    throw ConfigError("bound_kind", "unknown bound kind: " + kind);
}

int run_bound(Section& s, const std::string& out, const std::string& format) {
    const std::string kind = s.require_string("bound_kind");
    BoundReport report;
    try {
        report = compute_bound(s, kind);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bound_kind", std::string(e.what()));
    }
    s.done();
    check_finite_total(report);

    Table table;
    table.header = {"bound_kind", "empirical_term", "slack_term", "complexity_term",
                    "total", "eta"};
    table.rows.push_back({kind, format_double(report.empirical_term),
                          format_double(report.slack_term),
                          format_double(report.complexity_term),
                          format_double(report.total), eta_cell(report.eta)});
    emit(table, out, format, /*echo=*/true);
    return 0;
}

// ---- coverage command ----------------------------------------------------

int run_coverage_command(Section& s, const std::string& out, const std::string& format,
                         std::uint64_t seed, int threads) {
    const Environment env = parse_environment(s, "environment");
    const long long n = s.require_integer("n");
    if (n < 1) throw ConfigError("n", "must be >= 1");
    const long long trials = s.require_integer("trials");
    const std::string kind_name = s.require_string("bound_kind");
    const EstimatorSpec estimator = parse_estimator(s, "estimator", n);
    const auto prior = parse_prior(s, "prior", env.size());

    if (kind_name == "pac_bayes_exp") {
        if (trials < 2) throw ConfigError("trials", "must be >= 2");
        const double eta = s.require_number("eta");
        s.done();
        const ExpectationStats stats =
            run_expectation_check(env, n, eta, estimator, trials, seed, threads, prior);
        Table table;
        table.header = {"bound_kind", "n",         "trials",    "mean_slack",
                        "std_error",  "threshold", "passed"};
        table.rows.push_back({kind_name, format_int(n), format_int(stats.trials),
                              format_double(stats.mean_slack),
                              format_double(stats.std_error),
                              format_double(stats.threshold),
                              stats.passed ? "true" : "false"});
        emit(table, out, format, /*echo=*/false);
        std::cout << "mean slack " << format_double(stats.mean_slack) << " vs 3se "
                  << format_double(stats.threshold)
                  << (stats.passed ? "  [ok]" : "  [violated]") << "\n";
        return 0;
    }

    const auto kind = parse_bound_kind(kind_name);
    if (!kind) throw ConfigError("bound_kind", "unknown bound kind: " + kind_name);
    if (trials < 100) throw ConfigError("trials", "must be >= 100");
    const double delta = s.require_number("delta");
    const EtaPolicy policy = parse_eta_policy(s);
    s.done();

    CoverageStats stats;
    try {
        stats = run_coverage(env, n, delta, policy, *kind, estimator, trials, seed,
                             threads, prior);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bound_kind", std::string(e.what()));
    }

    Table table;
    table.header = {"bound_kind", "n", "delta", "trials", "violations",
                    "violation_rate", "pass_threshold", "passed"};
    table.rows.push_back({kind_name, format_int(n), format_double(delta),
                          format_int(stats.trials), format_int(stats.violations),
                          format_double(stats.violation_rate),
                          format_double(stats.pass_threshold),
                          stats.passed ? "true" : "false"});
    emit(table, out, format, /*echo=*/false);
    std::cout << "violation rate " << format_double(stats.violation_rate) << " vs "
              << format_double(stats.pass_threshold)
              << (stats.passed ? "  [ok]" : "  [violated]") << "\n";
    return 0;
}

// ---- sweep command -------------------------------------------------------

int run_sweep_command(Section& s, const std::string& out, const std::string& format,
                      std::uint64_t seed, int threads) {
    const Environment env = parse_environment(s, "environment");
    const json& nlist_json = s.raw("n_list");
    if (!nlist_json.is_array() || nlist_json.empty())
        throw ConfigError("n_list", "expected a nonempty array of integers");
    std::vector<long long> n_list;
    for (const auto& x : nlist_json) {
        if (!x.is_number_integer() || x.get<long long>() < 1)
            throw ConfigError("n_list", "entries must be integers >= 1");
        n_list.push_back(x.get<long long>());
    }
    const json& kinds_json = s.raw("bound_kinds");
    if (!kinds_json.is_array() || kinds_json.empty())
        throw ConfigError("bound_kinds", "expected a nonempty array of names");
    std::vector<BoundKind> kinds;
    for (const auto& x : kinds_json) {
        if (!x.is_string()) throw ConfigError("bound_kinds", "expected strings");
        const auto kind = parse_bound_kind(x.get<std::string>());
        if (!kind)
            throw ConfigError("bound_kinds",
                              "unknown bound kind: " + x.get<std::string>());
        kinds.push_back(*kind);
    }
    const double delta = s.require_number("delta");
    const long long trials = s.require_integer("trials");
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
    const EstimatorSpec estimator = parse_estimator(s, "estimator", n_list.front());
    const auto prior = parse_prior(s, "prior", env.size());
    const EtaPolicy policy = parse_eta_policy(s);
    s.done();

    const auto rows = tightness_sweep(env, n_list, delta, kinds, policy, estimator,
                                      trials, seed, threads, prior);
    Table table;
    table.header = {"bound_kind", "n", "mean_total", "mean_left", "mean_gap"};
    for (const auto& row : rows) {
        table.rows.push_back({bound_kind_name(row.kind), format_int(row.n),
                              format_double(row.mean_total), format_double(row.mean_left),
                              format_double(row.mean_gap)});
    }
    emit(table, out, format, /*echo=*/out.empty());
    std::cout << rows.size() << " sweep rows written\n";
    return 0;
}

// ---- fixpoint command ----------------------------------------------------

int run_fixpoint_command(Section& s, const std::string& out, const std::string& format,
                         std::uint64_t seed, int threads) {
    const Environment env = parse_environment(s, "environment");
    const long long n = s.require_integer("n");
    if (n < 1) throw ConfigError("n", "must be >= 1");
    GibbsParams params;
    params.n = n;
    if (s.has("gibbs")) {
        Section g(s.raw("gibbs"), "gibbs");
        params.eta = g.optional_number("eta").value_or(1.0);
        params.alpha = g.optional_number("alpha").value_or(2.0);
        g.done();
    }
    try {
        check_gibbs_params(params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("gibbs", e.what());
    }
    const long long trials = s.require_integer("trials");
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
    const long long max_iters = s.require_integer("max_iters");
    if (max_iters < 1) throw ConfigError("max_iters", "must be >= 1");
    const double tol = s.optional_number("tol").value_or(1e-4);
    if (!(tol > 0.0)) throw ConfigError("tol", "must be > 0");
    auto init = parse_prior(s, "init_prior", env.size());
    FixedPointOptions options;
    options.threads = threads;
    if (auto d = s.optional_number("delta")) options.delta = *d;
    if (s.has("grid")) {
        const EtaGrid grid = parse_grid(s, "grid");
        options.grid_u = grid.u;
        options.grid_v = grid.v;
        options.grid_alpha = grid.alpha;
    }
    s.done();

    FixedPointResult result{ProbVector::uniform(env.size()), {}, false};
    try {
        result = fixed_point_iteration(env, init.value_or(ProbVector::uniform(env.size())),
                                       params, trials, static_cast<int>(max_iters), tol,
                                       seed, options);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("gibbs", e.what());
    }

    Table table;
    table.header = {"iteration", "tv", "bound", "bound_sigma"};
    for (std::size_t h = 0; h < env.size(); ++h)
        table.header.push_back("w_" + env.labels()[h]);
    for (const auto& rec : result.trace) {
        std::vector<std::string> row = {format_int(rec.iteration),
                                        format_double(rec.tv_to_previous),
                                        format_double(rec.bound_value),
                                        format_double(rec.bound_sigma)};
        for (double w : rec.prior.weights()) row.push_back(format_double(w));
        table.rows.push_back(std::move(row));
    }
    emit(table, out, format, /*echo=*/out.empty());
    std::cout << (result.converged ? "converged" : "max iterations reached") << " after "
              << result.trace.size() << " iterations\n";
    return 0;
}

} // namespace

int run_experiment(const std::string& config_path, const Overrides& overrides) {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("config", "cannot open config file: " + config_path);
    json root;
    try {
        root = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("parse error: ") + e.what());
    }

    Section s(root, "");
    const std::string command = s.require_string("command");
    if (command != "bound" && command != "coverage" && command != "sweep" &&
        command != "fixpoint")
        throw ConfigError("command",
                          "expected one of bound, coverage, sweep, fixpoint");
    std::string out = s.optional_string("out").value_or("");
    std::string format = s.optional_string("format").value_or("csv");
    if (overrides.out) out = *overrides.out;
    if (overrides.format) format = *overrides.format;
    if (format != "csv" && format != "text")
        throw ConfigError("format", "expected \"csv\" or \"text\"");
    int threads = 0;
    if (auto t = s.optional_integer("threads")) threads = static_cast<int>(*t);
    if (overrides.threads) threads = *overrides.threads;
    if (threads < 0) throw ConfigError("threads", "must be >= 0");

    if (command == "bound") {
        return run_bound(s, out, format);
    }

    // stochastic commands require a seed (config key or --seed)
    std::uint64_t seed = 0;
    if (overrides.seed) {
        seed = *overrides.seed;
        if (s.has("seed")) s.require_seed("seed"); // mark used; value overridden
    } else {
        seed = s.require_seed("seed");
    }

    if (command == "coverage")
        return run_coverage_command(s, out, format, seed, threads);
    if (command == "sweep") return run_sweep_command(s, out, format, seed, threads);
    return run_fixpoint_command(s, out, format, seed, threads);
}

} // namespace pacbound
