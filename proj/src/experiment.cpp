#include "tailcv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "tailcv/acv.hpp"
#include "tailcv/dependence.hpp"
#include "tailcv/transfer.hpp"

namespace tailcv {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    workers.reserve(used);
    for (unsigned t = 0; t < used; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
}

AveragedValue average(const std::vector<double>& values) {
    AveragedValue out;
    CompensatedSum s;
    for (double v : values) s.add(v);
    out.count = values.size();
    out.mean = values.empty() ? 0.0 : s.value() / static_cast<double>(values.size());
    return out;
}

// Sample mean and n-1 variance, both reduced in the given order.
std::pair<double, double> mean_and_variance(const std::vector<double>& values) {
    const double mu = average(values).mean;
    if (values.size() < 2) return {mu, 0.0};
    CompensatedSum s;
    for (double v : values) s.add((v - mu) * (v - mu));
    return {mu, s.value() / static_cast<double>(values.size() - 1)};
}

// Linear interpolation between order statistics (the common "type 7" rule).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool contains(const std::vector<Method>& methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

}  // namespace

std::size_t default_k(std::size_t n) {
    const auto k = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
    return std::max<std::size_t>(k, 1);
}

namespace {

// The constraints that matter for drawing a single dataset.
void validate_sampling(const ExperimentConfig& c) {
    if (!(c.gamma_t > 0.0)) throw Error("gamma_t must be positive");
    if (!(c.y_m > 0.0)) throw Error("y_m must be positive");
    if (!(c.theta >= 1.0) || !std::isfinite(c.theta)) throw Error("theta must be >= 1");
    if (c.n < 3) throw Error("n must be at least 3");
    if (c.k < 1 || c.k >= c.n) throw Error("k must satisfy 1 <= k < n");
    if (c.k_source < 1 || c.k_source >= c.n) throw Error("k_source must satisfy 1 <= k_source < n");
    if (const auto* p = std::get_if<ParetoMarginal>(&c.source_marginal)) {
        if (!(p->gamma > 0.0) || !(p->y_m > 0.0)) {
            throw Error("Pareto source needs gamma_s > 0 and y_m > 0");
        }
    }
    if (const auto* b = std::get_if<BetaMarginal>(&c.source_marginal)) {
        if (!(b->shape_b > 0.0)) throw Error("Beta source needs shape_b > 0");
    }
}

}  // namespace

void validate(const ExperimentConfig& c) {
    validate_sampling(c);
    if (c.replications < 2) throw Error("replications must be at least 2");
    if (c.estimators.empty()) throw Error("no estimators requested");
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TAILCV_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SemiSupervisedDataset generate_dataset(const ExperimentConfig& config, std::uint64_t replication) {
    validate_sampling(config);
    const ParetoMarginal target_marginal{config.gamma_t, config.y_m};

    StreamRng pair_rng(config.seed, replication, StreamRole::CoupledPairs);
    const auto pairs = sample_gumbel_copula(config.theta, config.n, pair_rng);
    std::vector<double> target(config.n);
    std::vector<double> source(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        target[i] = marginal_quantile(pairs[i].u1, target_marginal);
        source[i] = marginal_quantile(pairs[i].u2, config.source_marginal);
    }

    StreamRng extra_rng(config.seed, replication, StreamRole::ExtraSource);
    std::vector<double> extra(config.m);
    for (auto& y : extra) y = marginal_quantile(uniform_open(extra_rng), config.source_marginal);

    return SemiSupervisedDataset(std::move(target), std::move(source), std::move(extra));
}

std::size_t method_index(Method method) { return static_cast<std::size_t>(method); }

ReplicationRecord run_replication(const ExperimentConfig& config, std::uint64_t replication) {
    ReplicationRecord rec;
    rec.replication = replication;
    try {
        const auto ds = generate_dataset(config, replication);
        const auto vars = build_cv_variables(ds, config.k, config.k_source);
        for (Method m : config.estimators) {
            double value = 0.0;
            switch (m) {
                case Method::Hill: value = hill(ds.paired_target(), config.k).value; break;
                case Method::Moment: value = moment(ds.paired_target(), config.k).value; break;
                case Method::TransferredHill: value = transferred_hill(vars).value; break;
                case Method::TransferredMoment: value = transferred_moment(vars).value; break;
            }
            rec.estimates[method_index(m)] = value;
        }
        rec.ok = true;

        // Diagnostics are best effort; a failure here does not void the
        // replication.
        rec.lambda_hat = tail_dependence(ds.paired_target(), ds.paired_source(), config.k);
        try {
            const auto corr = cv_correlations(vars);
            rec.corr_ab = corr.corr_ab;
            rec.corr_cd = corr.corr_cd;
        } catch (const Error&) {
        }
        try {
            const double g_t = hill(ds.paired_target(), config.k).value;
            const double g_s = hill(ds.paired_source(), config.k_source).value;
            const auto coeffs = extremal_coefficients(vars, g_t, g_s);
            rec.c_ab = coeffs.c_ab;
            rec.c_ad = coeffs.c_ad;
            const double p = static_cast<double>(config.k) / static_cast<double>(config.n);
            rec.asymptotic_rvr = asymptotic_rvr_closed_form(*rec.lambda_hat, p, coeffs.c_ab,
                                                            coeffs.c_ad, config.n, config.m);
        } catch (const Error&) {
        }
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

const RvrPair* RvrReport::pair(Method transferred) const {
    for (const auto& p : pairs) {
        if (p.transferred == transferred) return &p;
    }
    return nullptr;
}

const MethodSummary* RvrReport::summary(Method method) const {
    for (const auto& s : methods) {
        if (s.method == method) return &s;
    }
    return nullptr;
}

RvrReport summarize(const ExperimentConfig& config, std::vector<ReplicationRecord> records) {
    RvrReport report;
    report.config = config;
    for (const auto& r : records) {
        if (r.ok) {
            ++report.replications_completed;
        } else {
            ++report.replications_failed;
        }
    }
    if (10 * report.replications_failed > records.size()) {
        throw Error("unstable configuration: " + std::to_string(report.replications_failed) +
                    " of " + std::to_string(records.size()) + " replications failed");
    }

    for (Method m : {Method::Hill, Method::Moment, Method::TransferredHill,
                     Method::TransferredMoment}) {
        if (!contains(config.estimators, m)) continue;
        std::vector<double> values;
        for (const auto& r : records) {
            if (r.ok) values.push_back(*r.estimates[method_index(m)]);
        }
        const auto [mu, var] = mean_and_variance(values);
        report.methods.push_back({m, values.size(), mu, var, mu - config.gamma_t});
    }

    for (auto [base, transferred] : {std::pair{Method::Hill, Method::TransferredHill},
                                     std::pair{Method::Moment, Method::TransferredMoment}}) {
        const auto* b = report.summary(base);
        const auto* t = report.summary(transferred);
        if (b == nullptr || t == nullptr) continue;
        report.pairs.push_back(
            {base, transferred, b->variance, t->variance, (b->variance - t->variance) / b->variance});
    }

    std::vector<double> lambda, corr_ab, corr_cd, c_ab, c_ad, arvr;
    for (const auto& r : records) {
        if (!r.ok) continue;
        if (r.lambda_hat) lambda.push_back(*r.lambda_hat);
        if (r.corr_ab) corr_ab.push_back(*r.corr_ab);
        if (r.corr_cd) corr_cd.push_back(*r.corr_cd);
        if (r.c_ab) c_ab.push_back(*r.c_ab);
        if (r.c_ad) c_ad.push_back(*r.c_ad);
        if (r.asymptotic_rvr) arvr.push_back(*r.asymptotic_rvr);
    }
    report.dependence.lambda_hat = average(lambda);
    report.dependence.corr_ab = average(corr_ab);
    report.dependence.corr_cd = average(corr_cd);
    report.dependence.c_ab = average(c_ab);
    report.dependence.c_ad = average(c_ad);
    report.dependence.p_hat = static_cast<double>(config.k) / static_cast<double>(config.n);
    report.asymptotic_rvr = average(arvr);
    report.records = std::move(records);
    return report;
}

RvrReport run_rvr_experiment(const ExperimentConfig& config, unsigned threads) {
    validate(config);
    std::vector<ReplicationRecord> records(config.replications);
    parallel_for(config.replications, resolve_threads(threads),
                 [&](std::size_t i) { records[i] = run_replication(config, i); });
    return summarize(config, std::move(records));
}

std::vector<double> analytical_variances(const SemiSupervisedDataset& dataset, std::size_t k,
                                         const std::vector<std::size_t>& l_values) {
    std::vector<double> out(l_values.size(), std::numeric_limits<double>::quiet_NaN());
    const auto base = hill(dataset.paired_target(), k);
    const double base_variance = *base.variance_estimate;
    for (std::size_t j = 0; j < l_values.size(); ++j) {
        try {
            const auto vars = build_cv_variables(dataset, k, l_values[j]);
            out[j] = base_variance - variance_difference_plugin(vars, base.value);
        } catch (const Error&) {
        }
    }
    return out;
}

std::vector<ThresholdScanRow> source_threshold_scan(const ExperimentConfig& config,
                                                    const std::vector<std::size_t>& l_values,
                                                    unsigned threads) {
    validate(config);
    if (l_values.empty()) throw Error("no source extreme counts to scan");
    for (std::size_t l : l_values) {
        if (l < 1 || l >= config.n) throw Error("invalid k");
    }

    std::vector<std::vector<double>> per_rep(config.replications);
    parallel_for(config.replications, resolve_threads(threads), [&](std::size_t i) {
        try {
            per_rep[i] = analytical_variances(generate_dataset(config, i), config.k, l_values);
        } catch (const Error&) {
            per_rep[i].assign(l_values.size(), std::numeric_limits<double>::quiet_NaN());
        }
    });

    std::vector<ThresholdScanRow> rows;
    for (std::size_t j = 0; j < l_values.size(); ++j) {
        ThresholdScanRow row;
        row.l = l_values[j];
        std::vector<double> values;
        for (const auto& rep : per_rep) {
            if (std::isnan(rep[j])) {
                ++row.failed;
            } else {
                values.push_back(rep[j]);
                if (rep[j] < 0.0) ++row.negative;
            }
        }
        row.count = values.size();
        if (!values.empty()) {
            row.mean = average(values).mean;
            std::sort(values.begin(), values.end());
            row.median = quantile_sorted(values, 0.5);
            row.q1 = quantile_sorted(values, 0.25);
            row.q3 = quantile_sorted(values, 0.75);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<BootstrapSeries> bootstrap_study(const SemiSupervisedDataset& pool,
                                             const BootstrapOptions& options) {
    const std::size_t pool_size = pool.n();
    if (options.n_sub > pool_size) throw Error("n_sub exceeds the number of joint observations");
    if (options.n_sub < 2) throw Error("n_sub must be at least 2");
    if (options.resamples == 0) throw Error("resamples must be positive");
    if (options.methods.empty()) throw Error("no estimators requested");
    const std::size_t k_source = options.k_source.value_or(options.k);

    std::vector<BootstrapSeries> out;
    for (Method m : options.methods) out.push_back({m, {}, 0});

    std::vector<std::size_t> perm(pool_size);
    std::vector<char> drawn(pool_size);
    for (std::size_t r = 0; r < options.resamples; ++r) {
        StreamRng rng(options.seed, r, StreamRole::Bootstrap);
        std::vector<std::size_t> chosen;
        chosen.reserve(options.n_sub);
        if (options.with_replacement) {
            std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
            for (std::size_t i = 0; i < options.n_sub; ++i) chosen.push_back(pick(rng));
        } else {
            for (std::size_t i = 0; i < pool_size; ++i) perm[i] = i;
            for (std::size_t i = 0; i < options.n_sub; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool_size - 1);
                std::swap(perm[i], perm[pick(rng)]);
                chosen.push_back(perm[i]);
            }
        }
        std::sort(chosen.begin(), chosen.end());

        std::fill(drawn.begin(), drawn.end(), 0);
        std::vector<double> target, source, extra;
        for (std::size_t idx : chosen) {
            target.push_back(pool.paired_target()[idx]);
            source.push_back(pool.paired_source()[idx]);
            drawn[idx] = 1;
        }
        for (std::size_t i = 0; i < pool_size; ++i) {
            if (!drawn[i]) extra.push_back(pool.paired_source()[i]);
        }
        extra.insert(extra.end(), pool.extra_source().begin(), pool.extra_source().end());

        const SemiSupervisedDataset sub(std::move(target), std::move(source), std::move(extra));
        for (auto& series : out) {
            try {
                series.values.push_back(estimate(series.method, sub, options.k, k_source).value);
            } catch (const Error&) {
                ++series.failures;
            }
        }
    }
    return out;
}

}  // namespace tailcv
