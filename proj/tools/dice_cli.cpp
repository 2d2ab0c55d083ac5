// Command-line front end: simulation sweeps plus the networked hub and worker.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dice/datagen.hpp"
#include "dice/errors.hpp"
#include "dice/experiment.hpp"
#include "dice/metrics.hpp"
#include "dice/protocol.hpp"
#include "dice/rng.hpp"

namespace {

struct Options {
    dice::ExperimentConfig config;
    std::vector<std::string> estimators;
    std::vector<dice::Index> machine_values{2, 4, 8};
    std::vector<double> beta_values{0.2, 0.6, 1.0, 1.4, 2.0};
    std::string out;
    std::string trials_out;
    std::string host = "127.0.0.1";
    std::uint16_t port = 5555;
    std::int64_t timeout_ms = 30000;
    std::uint32_t machine_id = 0;
};

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw dice::InvalidParameter("cannot open " + path + " for writing");
    fn(file);
}

void apply_estimators(Options& o, std::vector<dice::Estimator> fallback) {
    if (o.estimators.empty()) {
        o.config.estimators = std::move(fallback);
        return;
    }
    o.config.estimators.clear();
    for (const auto& name : o.estimators) {
        o.config.estimators.push_back(dice::parse_estimator(name));
    }
}

dice::HubConfig hub_config(const Options& o) {
    const auto& c = o.config;
    dice::HubConfig h;
    h.p = static_cast<std::uint32_t>(c.p);
    h.n = static_cast<std::uint32_t>(c.n);
    h.machines = static_cast<std::uint32_t>(c.machines);
    h.lambda = c.lambda();
    h.tau = c.tau();
    h.budget = c.effective_budget();
    h.base_seed = dice::trial_seed(c.base_seed, 0);
    h.timeout = std::chrono::milliseconds(o.timeout_ms);
    return h;
}

int run_hub(Options& o) {
    o.config.validate();
    const auto hub = hub_config(o);
    dice::TcpListener listener(o.host, o.port);
    std::cerr << "hub listening on " << o.host << ":" << listener.port() << " for " << hub.machines
              << " workers\n";
    const dice::HubEstimate est = dice::hub_serve(hub, listener);
    const auto model = dice::chain_precision(o.config.p, o.config.a);
    const auto dense = est.theta_final.to_dense();
    const auto rates = dice::support_metrics(est.theta_final, model);
    std::cerr << "mse=" << dice::format_double(dice::frobenius_sq_error(dense, model.theta))
              << " linf=" << dice::format_double(dice::linf_error(dense, model.theta))
              << " fpr=" << dice::format_double(rates.fpr)
              << " fnr=" << dice::format_double(rates.fnr) << '\n';
    with_output(o.out, [&](std::ostream& out) {
        out << "i,j,v\n";
        for (const auto& e : est.theta_final.entries()) {
            out << e.i << ',' << e.j << ',' << dice::format_double(e.v) << '\n';
        }
    });
    return 0;
}

int run_worker(const Options& o) {
    const double a = o.config.a;
    const auto id = o.machine_id;
    auto provider = [a, id](const dice::wire::Config& cfg) {
        const auto model = dice::chain_precision(cfg.p, a);
        return dice::sample_gaussian(model, cfg.n, dice::machine_seed(cfg.base_seed, id));
    };
    const auto status = dice::worker_run(provider, o.host, o.port, id,
                                         std::chrono::milliseconds(o.timeout_ms));
    if (status != dice::wire::AckStatus::ok) {
        std::cerr << "hub rejected machine " << id << '\n';
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed sparse inverse covariance estimation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value file; command-line flags take precedence");

    Options o;
    auto& c = o.config;
    app.add_option("--p", c.p, "dimension")->capture_default_str();
    app.add_option("--n", c.n, "samples per machine")->capture_default_str();
    app.add_option("--M", c.machines, "number of machines")->capture_default_str();
    app.add_option("--trials", c.trials, "number of trials")->capture_default_str();
    app.add_option("--a", c.a, "chain off-diagonal value")->capture_default_str();
    app.add_option("--beta", c.beta, "tuning multiplier for lambda and tau")->capture_default_str();
    app.add_option("--B", c.budget, "bandwidth budget in matrix cells (0 = 10 p)")->capture_default_str();
    app.add_option("--base_seed", c.base_seed, "seed of trial 0")->capture_default_str();
    app.add_option("--estimators", o.estimators,
                   "subset of distributed,naive,full,full_debiased")
        ->delimiter(',');
    app.add_option("--threads", c.threads, "trials run in parallel")->capture_default_str();
    app.add_flag("--record_timing", c.record_timing, "fill wall_ms (breaks byte-identical reruns)");
    app.add_option("--tol", c.glasso.tol, "graphical lasso KKT tolerance")->capture_default_str();
    app.add_option("--max_iter", c.glasso.max_iter, "graphical lasso sweep cap")->capture_default_str();
    app.add_option("--M_values", o.machine_values, "machine counts for sweep-machines")->delimiter(',');
    app.add_option("--beta_values", o.beta_values, "multipliers for sweep-beta")->delimiter(',');
    app.add_option("--out", o.out, "output CSV path (default stdout)");
    app.add_option("--trials_out", o.trials_out, "per-trial CSV for sweeps");
    app.add_option("--host", o.host, "hub address")->capture_default_str();
    app.add_option("--port", o.port, "hub port (0 = ephemeral, hub only)")->capture_default_str();
    app.add_option("--timeout_ms", o.timeout_ms, "per-connection deadline")->capture_default_str();
    app.add_option("--machine_id", o.machine_id, "worker id in [0, M)")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "run trials and write one CSV row per (trial, estimator)");
    auto* sweep_m = app.add_subcommand("sweep-machines", "summaries over --M_values");
    auto* sweep_b = app.add_subcommand("sweep-beta", "summaries over --beta_values");
    auto* hub = app.add_subcommand("hub", "collect one update from each of M workers over TCP");
    auto* worker = app.add_subcommand("worker", "compute and send one machine's update");
    for (auto* sub : {simulate, sweep_m, sweep_b, hub, worker}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            apply_estimators(o, dice::all_estimators());
            const auto records = dice::run_experiment(c);
            with_output(o.out, [&](std::ostream& out) { dice::write_trial_csv(out, records); });
        } else if (sweep_m->parsed() || sweep_b->parsed()) {
            std::vector<dice::MetricsRecord> trials;
            std::vector<dice::SummaryRow> rows;
            if (sweep_m->parsed()) {
                apply_estimators(o, dice::all_estimators());
                rows = dice::sweep_machines(c, o.machine_values, &trials);
            } else {
                apply_estimators(o, {dice::Estimator::distributed});
                c.validate();
                rows = dice::sweep_beta(c, o.beta_values, &trials);
            }
            with_output(o.out, [&](std::ostream& out) { dice::write_summary_csv(out, rows); });
            if (!o.trials_out.empty()) {
                with_output(o.trials_out,
                            [&](std::ostream& out) { dice::write_trial_csv(out, trials); });
            }
        } else if (hub->parsed()) {
            return run_hub(o);
        } else if (worker->parsed()) {
            return run_worker(o);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
