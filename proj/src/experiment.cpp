#include "dice/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include "dice/datagen.hpp"
#include "dice/debias.hpp"
#include "dice/errors.hpp"
#include "dice/hub.hpp"
#include "dice/rng.hpp"

namespace dice {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool wants(const ExperimentConfig& c, Estimator e) {
    return std::find(c.estimators.begin(), c.estimators.end(), e) != c.estimators.end();
}

MetricsRecord evaluate(Estimator e, const DenseSymMatrix& dense, const SparseSymMatrix& support,
                       const GroundTruthModel& model, const ExperimentConfig& config,
                       std::size_t trial, double wall_ms) {
    MetricsRecord r;
    r.estimator = std::string(to_string(e));
    r.mse = frobenius_sq_error(dense, model.theta);
    r.linf = linf_error(dense, model.theta);
    const auto rates = support_metrics(support, model);
    r.fpr = rates.fpr;
    r.fnr = rates.fnr;
    r.trial = trial;
    r.machines = config.machines;
    r.beta = config.beta;
    r.wall_ms = config.record_timing ? wall_ms : 0.0;
    return r;
}

std::vector<MetricsRecord> run_trial(const ExperimentConfig& config, const GroundTruthModel& model,
                                     std::size_t trial) {
    const auto seed = trial_seed(config.base_seed, trial);
    const DataMatrix pooled = sample_pooled(model, config.n, config.machines, seed);
    const auto blocks = split_samples(pooled, config.machines);

    std::vector<MetricsRecord> out;
    std::vector<MachineFit> fits;
    double machine_ms = 0.0;
    if (wants(config, Estimator::distributed) || wants(config, Estimator::naive)) {
        const auto start = Clock::now();
        fits.reserve(blocks.size());
        for (std::size_t m = 0; m < blocks.size(); ++m) {
            try {
                fits.push_back(fit_machine(blocks[m], config.lambda(), config.effective_budget(),
                                           static_cast<std::uint32_t>(m), config.glasso));
            } catch (const std::exception& e) {
                throw Error("machine " + std::to_string(m) + ": " + e.what());
            }
        }
        machine_ms = ms_since(start);
    }

    if (wants(config, Estimator::distributed)) {
        const auto start = Clock::now();
        std::vector<SparseUpdate> updates;
        for (const auto& f : fits) updates.push_back(f.update);
        const HubEstimate hub = combine_updates(updates, config.tau());
        const double ms = machine_ms + ms_since(start);
        out.push_back(evaluate(Estimator::distributed, hub.theta_final.to_dense(), hub.theta_final,
                               model, config, trial, ms));
    }
    if (wants(config, Estimator::naive)) {
        const auto start = Clock::now();
        std::vector<DenseSymMatrix> thetas;
        for (const auto& f : fits) thetas.push_back(f.glasso.theta_hat);
        const DenseSymMatrix naive = naive_estimator(thetas);
        const double ms = machine_ms + ms_since(start);
        out.push_back(evaluate(Estimator::naive, naive, SparseSymMatrix::from_dense(naive), model,
                               config, trial, ms));
    }
    if (wants(config, Estimator::full) || wants(config, Estimator::full_debiased)) {
        const auto start = Clock::now();
        const FullEstimates full =
            full_estimators(pooled, config.lambda_full(), config.tau_full(), config.glasso);
        const double ms = ms_since(start);
        if (wants(config, Estimator::full)) {
            out.push_back(evaluate(Estimator::full, full.glasso.theta_hat,
                                   SparseSymMatrix::from_dense(full.glasso.theta_hat), model,
                                   config, trial, ms));
        }
        if (wants(config, Estimator::full_debiased)) {
            out.push_back(evaluate(Estimator::full_debiased, full.debiased.to_dense(),
                                   full.debiased, model, config, trial, ms));
        }
    }
    return out;
}

} // namespace

std::string_view to_string(Estimator e) {
    switch (e) {
    case Estimator::distributed: return "distributed";
    case Estimator::naive: return "naive";
    case Estimator::full: return "full";
    case Estimator::full_debiased: return "full_debiased";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    for (auto e : all_estimators()) {
        if (to_string(e) == name) return e;
    }
    throw InvalidParameter("unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> all_estimators() {
    return {Estimator::distributed, Estimator::naive, Estimator::full, Estimator::full_debiased};
}

std::uint64_t ExperimentConfig::effective_budget() const {
    return budget == 0 ? 10 * static_cast<std::uint64_t>(p) : budget;
}

double ExperimentConfig::lambda() const {
    return beta * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double ExperimentConfig::tau() const {
    return beta * std::sqrt(std::log(static_cast<double>(p)) /
                            (static_cast<double>(machines) * static_cast<double>(n)));
}

double ExperimentConfig::lambda_full() const {
    return std::sqrt(std::log(static_cast<double>(p)) /
                     (static_cast<double>(machines) * static_cast<double>(n)));
}

double ExperimentConfig::tau_full() const { return lambda_full(); }

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidParameter("config: " + msg); };
    if (p < 2) fail("p must be at least 2");
    if (n < 1) fail("n must be at least 1");
    if (machines < 1) fail("M must be at least 1");
    if (trials < 1) fail("trials must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive");
    if (!(std::abs(a) < 0.5)) fail("|a| must be below 0.5");
    if (effective_budget() < p) fail("B must be at least p");
    if (estimators.empty()) fail("no estimators selected");
    if (threads < 1) fail("threads must be at least 1");
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const GroundTruthModel model = chain_precision(config.p, config.a);

    std::vector<std::vector<MetricsRecord>> per_trial(config.trials);
    std::vector<std::exception_ptr> errors(config.trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t = next++; t < config.trials; t = next++) {
            try {
                per_trial[t] = run_trial(config, model, t);
            } catch (const std::exception& e) {
                errors[t] = std::make_exception_ptr(
                    Error("trial " + std::to_string(t) + ": " + e.what()));
            }
        }
    };
    const std::size_t workers = std::min(config.threads, config.trials);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<MetricsRecord> out;
    for (auto& rows : per_trial) {
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) {
        throw InvalidParameter("quartiles: empty sample");
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records) {
    struct Group {
        const MetricsRecord* first;
        std::vector<double> mse, linf, fpr, fnr;
    };
    std::vector<Group> groups;
    for (const auto& r : records) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
            return g.first->machines == r.machines && g.first->beta == r.beta &&
                   g.first->estimator == r.estimator;
        });
        if (it == groups.end()) {
            groups.push_back(Group{&r, {}, {}, {}, {}});
            it = std::prev(groups.end());
        }
        it->mse.push_back(r.mse);
        it->linf.push_back(r.linf);
        it->fpr.push_back(r.fpr);
        it->fnr.push_back(r.fnr);
    }
    std::vector<SummaryRow> rows;
    for (auto& g : groups) {
        rows.push_back(SummaryRow{g.first->machines, g.first->beta, g.first->estimator,
                                  g.mse.size(), quartiles(g.mse), quartiles(g.linf),
                                  quartiles(g.fpr), quartiles(g.fnr)});
    }
    return rows;
}

std::vector<SummaryRow> sweep_machines(const ExperimentConfig& config,
                                       const std::vector<Index>& machine_values,
                                       std::vector<MetricsRecord>* trial_records) {
    std::vector<MetricsRecord> all;
    for (const auto m : machine_values) {
        ExperimentConfig c = config;
        c.machines = m;
        auto records = run_experiment(c);
        all.insert(all.end(), records.begin(), records.end());
    }
    if (trial_records) trial_records->insert(trial_records->end(), all.begin(), all.end());
    return summarize(all);
}

std::vector<SummaryRow> sweep_beta(const ExperimentConfig& config,
                                   const std::vector<double>& beta_values,
                                   std::vector<MetricsRecord>* trial_records) {
    std::vector<MetricsRecord> all;
    for (const auto beta : beta_values) {
        ExperimentConfig c = config;
        c.beta = beta;
        auto records = run_experiment(c);
        all.insert(all.end(), records.begin(), records.end());
    }
    if (trial_records) trial_records->insert(trial_records->end(), all.begin(), all.end());
    return summarize(all);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trial_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
    out << "trial,M,beta,estimator,mse,linf,fpr,fnr,wall_ms\n";
    for (const auto& r : records) {
        out << r.trial << ',' << r.machines << ',' << format_double(r.beta) << ',' << r.estimator
            << ',' << format_double(r.mse) << ',' << format_double(r.linf) << ','
            << format_double(r.fpr) << ',' << format_double(r.fnr) << ','
            << format_double(r.wall_ms) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "M,beta,estimator,trials";
    for (const char* metric : {"mse", "linf", "fpr", "fnr"}) {
        out << ',' << metric << "_q1," << metric << "_median," << metric << "_q3";
    }
    out << '\n';
    for (const auto& r : rows) {
        out << r.machines << ',' << format_double(r.beta) << ',' << r.estimator << ',' << r.trials;
        for (const auto* q : {&r.mse, &r.linf, &r.fpr, &r.fnr}) {
            out << ',' << format_double(q->q1) << ',' << format_double(q->median) << ','
                << format_double(q->q3);
        }
        out << '\n';
    }
}

} // namespace dice
