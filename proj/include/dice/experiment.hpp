#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dice/glasso.hpp"
#include "dice/metrics.hpp"

namespace dice {

enum class Estimator { distributed, naive, full, full_debiased };

std::string_view to_string(Estimator e);
/// Accepts the names printed by to_string. Throws InvalidParameter.
Estimator parse_estimator(std::string_view name);
std::vector<Estimator> all_estimators();

struct ExperimentConfig {
    Index p = 100;
    /// Samples per machine.
    Index n = 100;
    Index machines = 10;
    std::size_t trials = 10;
    /// Chain off-diagonal value.
    double a = 0.4;
    /// Multiplier on both tuning rules.
    double beta = 1.0;
    /// Cells per machine update; 0 selects 10 p.
    std::uint64_t budget = 0;
    std::uint64_t base_seed = 1;
    std::vector<Estimator> estimators = all_estimators();
    std::size_t threads = 1;
    /// When false the wall_ms column is written as 0 so reruns are byte-identical.
    bool record_timing = false;
    GlassoOptions glasso{};

    std::uint64_t effective_budget() const;
    /// beta sqrt(log p / n)
    double lambda() const;
    /// beta sqrt(log p / (M n))
    double tau() const;
    /// sqrt(log p / (M n)), used for both the Full penalty and the Full Debiased threshold.
    double lambda_full() const;
    double tau_full() const;

    /// Throws InvalidParameter on M < 1, trials < 1, B < p, beta <= 0, p < 2, n < 1, |a| >= 0.5.
    void validate() const;
};

/// One record per (trial, estimator), ordered by trial then by the canonical estimator order.
/// Trial t draws from trial_seed(base_seed, t); all estimators share that trial's data.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config);

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation quantiles of a non-empty sample.
Quartiles quartiles(std::vector<double> values);

struct SummaryRow {
    std::size_t machines = 0;
    double beta = 0.0;
    std::string estimator;
    std::size_t trials = 0;
    Quartiles mse;
    Quartiles linf;
    Quartiles fpr;
    Quartiles fnr;
};

/// Groups records by (M, beta, estimator) in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records);

/// run_experiment per M value. Per-trial records are appended to `trial_records` when given.
std::vector<SummaryRow> sweep_machines(const ExperimentConfig& config,
                                       const std::vector<Index>& machine_values,
                                       std::vector<MetricsRecord>* trial_records = nullptr);

std::vector<SummaryRow> sweep_beta(const ExperimentConfig& config,
                                   const std::vector<double>& beta_values,
                                   std::vector<MetricsRecord>* trial_records = nullptr);

/// Columns: trial,M,beta,estimator,mse,linf,fpr,fnr,wall_ms
void write_trial_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

} // namespace dice
