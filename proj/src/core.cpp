#include "tailcv/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tailcv {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(std::string("non-finite value in ") + what);
        }
    }
}

}  // namespace

SemiSupervisedDataset::SemiSupervisedDataset(std::vector<double> paired_target,
                                             std::vector<double> paired_source,
                                             std::vector<double> extra_source)
    : target_(std::move(paired_target)),
      source_(std::move(paired_source)),
      extra_(std::move(extra_source)) {
    if (target_.size() != source_.size()) {
        throw Error("paired target and source must have equal length");
    }
    if (target_.size() < 2) {
        throw Error("at least 2 coupled observations are required");
    }
    require_finite(target_, "paired target");
    require_finite(source_, "paired source");
    require_finite(extra_, "extra source");
}

std::vector<double> SemiSupervisedDataset::all_source() const {
    std::vector<double> out;
    out.reserve(source_.size() + extra_.size());
    out.insert(out.end(), source_.begin(), source_.end());
    out.insert(out.end(), extra_.begin(), extra_.end());
    return out;
}

std::vector<double> order_statistics(std::span<const double> sample) {
    if (sample.empty()) throw Error("empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

double threshold_at(std::span<const double> sample, std::size_t k) {
    const std::size_t n = sample.size();
    if (k < 1 || n < 2 || k > n - 1) throw Error("invalid k");
    std::vector<double> work(sample.begin(), sample.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(n - k - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

ExceedanceSeries exceedances(std::span<const double> sample, double threshold) {
    if (!(threshold > 0.0)) throw Error("log-transform undefined: non-positive threshold");
    ExceedanceSeries out;
    out.excess.assign(sample.size(), 0.0);
    out.indicator.assign(sample.size(), 0.0);
    out.squared_excess.assign(sample.size(), 0.0);
    const double log_u = std::log(threshold);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample[i] > threshold) {
            const double e = std::log(sample[i]) - log_u;
            out.excess[i] = e;
            out.indicator[i] = 1.0;
            out.squared_excess[i] = e * e;
            ++out.count;
        }
    }
    return out;
}

CvVariables build_cv_variables(const SemiSupervisedDataset& dataset, std::size_t k,
                               std::size_t k_source) {
    CvVariables vars;
    vars.k_target = k;
    vars.k_source = k_source;
    vars.target_threshold = threshold_at(dataset.paired_target(), k);
    // The source threshold comes from the coupled observations only and is
    // then applied to every source value, coupled or not.
    vars.source_threshold = threshold_at(dataset.paired_source(), k_source);

    auto target = exceedances(dataset.paired_target(), vars.target_threshold);
    auto source = exceedances(dataset.all_source(), vars.source_threshold);
    vars.a = std::move(target.excess);
    vars.c = std::move(target.indicator);
    vars.g = std::move(target.squared_excess);
    vars.b = std::move(source.excess);
    vars.d = std::move(source.indicator);
    vars.h = std::move(source.squared_excess);
    return vars;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw Error("empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace tailcv
