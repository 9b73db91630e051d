#pragma once

// Replicated simulation studies: RVR experiments, the source-threshold scan
// and the subsample bootstrap.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailcv/core.hpp"
#include "tailcv/distributions.hpp"
#include "tailcv/estimators.hpp"

namespace tailcv {

struct ExperimentConfig {
    double gamma_t = 0.25;
    /// Scale of the Pareto target marginal.
    double y_m = 1e-3;
    Marginal source_marginal = ParetoMarginal{0.5, 1e-3};
    double theta = 5.0;
    std::size_t n = 1000;
    std::size_t k = 100;
    std::size_t k_source = 100;
    std::size_t m = 5000;
    std::size_t replications = 2000;
    std::uint64_t seed = 1;
    std::vector<Method> estimators = {Method::Hill, Method::Moment, Method::TransferredHill,
                                      Method::TransferredMoment};
};

/// round(0.1 n), at least 1.
std::size_t default_k(std::size_t n);

/// Throws Error describing the first violated constraint.
void validate(const ExperimentConfig& config);

/// Number of worker threads: `requested` if non-zero, else the TAILCV_THREADS
/// environment variable, else the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

/// Deterministic in (config.seed, replication). Coupled pairs come from the
/// Gumbel copula pushed through the marginal quantiles; the m extra source
/// values use fresh uniforms on the source marginal.
SemiSupervisedDataset generate_dataset(const ExperimentConfig& config, std::uint64_t replication);

inline constexpr std::size_t kMethodCount = 4;
std::size_t method_index(Method method);

struct ReplicationRecord {
    std::uint64_t replication = 0;
    bool ok = false;
    std::string error;
    std::array<std::optional<double>, kMethodCount> estimates{};
    std::optional<double> lambda_hat;
    std::optional<double> corr_ab;
    std::optional<double> corr_cd;
    std::optional<double> c_ab;
    std::optional<double> c_ad;
    std::optional<double> asymptotic_rvr;
};

struct MethodSummary {
    Method method = Method::Hill;
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    /// mean - gamma_t
    double bias = 0.0;
};

struct RvrPair {
    Method baseline = Method::Hill;
    Method transferred = Method::TransferredHill;
    double var_base = 0.0;
    double var_new = 0.0;
    /// (var_base - var_new) / var_base
    double rvr = 0.0;
};

/// Mean of a diagnostic over the replications where it was computable.
struct AveragedValue {
    double mean = 0.0;
    std::size_t count = 0;
};

struct AveragedDependence {
    AveragedValue lambda_hat;
    AveragedValue corr_ab;
    AveragedValue corr_cd;
    AveragedValue c_ab;
    AveragedValue c_ad;
    double p_hat = 0.0;
};

struct RvrReport {
    ExperimentConfig config;
    std::size_t replications_completed = 0;
    std::size_t replications_failed = 0;
    std::vector<MethodSummary> methods;
    std::vector<RvrPair> pairs;
    AveragedDependence dependence;
    AveragedValue asymptotic_rvr;
    std::vector<ReplicationRecord> records;

    const RvrPair* pair(Method transferred) const;
    const MethodSummary* summary(Method method) const;
};

/// Evaluates one replication without aggregating.
ReplicationRecord run_replication(const ExperimentConfig& config, std::uint64_t replication);

/// Runs all replications (concurrently when threads > 1). The aggregation is
/// done in replication order, so the report does not depend on the thread
/// count. Throws "unstable configuration" when more than 10% of the
/// replications fail.
RvrReport run_rvr_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// Aggregates pre-computed records; the reduction behind run_rvr_experiment.
RvrReport summarize(const ExperimentConfig& config, std::vector<ReplicationRecord> records);

struct ThresholdScanRow {
    std::size_t l = 0;
    std::size_t count = 0;
    std::size_t failed = 0;
    std::size_t negative = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double mean = 0.0;
};

/// For each number of source extremes l, the distribution over replications of
/// the plug-in variance of the transferred Hill estimator: the Hill plug-in
/// variance gamma^2 / k_eff minus variance_difference_plugin at k_source = l.
/// Negative values are kept and counted.
std::vector<ThresholdScanRow> source_threshold_scan(const ExperimentConfig& config,
                                                    const std::vector<std::size_t>& l_values,
                                                    unsigned threads = 0);

/// One replication's analytical variances, one entry per l (NaN on failure).
std::vector<double> analytical_variances(const SemiSupervisedDataset& dataset, std::size_t k,
                                         const std::vector<std::size_t>& l_values);

struct BootstrapOptions {
    std::size_t n_sub = 0;
    std::size_t resamples = 500;
    std::size_t k = 0;
    /// Defaults to k.
    std::optional<std::size_t> k_source;
    std::vector<Method> methods = {Method::Hill, Method::TransferredHill};
    std::uint64_t seed = 1;
    bool with_replacement = false;
};

struct BootstrapSeries {
    Method method = Method::Hill;
    std::vector<double> values;
    std::size_t failures = 0;
};

/// Draws n_sub joint pairs from the pool's coupled observations as the coupled
/// set; every pool source value not drawn, plus the pool's own extra source,
/// becomes the extra source. Drawn indices keep pool order.
std::vector<BootstrapSeries> bootstrap_study(const SemiSupervisedDataset& pool,
                                             const BootstrapOptions& options);

}  // namespace tailcv
