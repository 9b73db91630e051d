#pragma once

// Domain types shared by every estimator: the semi-supervised sample layout,
// order statistics, and the control-variate variables built from it.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailcv {

/// Every computational failure in the library surfaces as this exception.
/// The message is meant to be shown to users as-is.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// n coupled (target, source) observations plus m unpaired source
/// observations. Construction validates the layout; the object is immutable.
class SemiSupervisedDataset {
public:
    SemiSupervisedDataset(std::vector<double> paired_target,
                          std::vector<double> paired_source,
                          std::vector<double> extra_source = {});

    const std::vector<double>& paired_target() const noexcept { return target_; }
    const std::vector<double>& paired_source() const noexcept { return source_; }
    const std::vector<double>& extra_source() const noexcept { return extra_; }

    std::size_t n() const noexcept { return target_.size(); }
    std::size_t m() const noexcept { return extra_.size(); }

    /// paired_source followed by extra_source (length n + m).
    std::vector<double> all_source() const;

private:
    std::vector<double> target_;
    std::vector<double> source_;
    std::vector<double> extra_;
};

/// Realized control variates. Target-side sequences (a, c, g) cover the n
/// coupled indices; source-side sequences (b, d, h) cover all n + m source
/// observations, coupled ones first.
struct CvVariables {
    std::vector<double> a, c, g;
    std::vector<double> b, d, h;
    double target_threshold = 0.0;
    double source_threshold = 0.0;
    std::size_t k_target = 0;
    std::size_t k_source = 0;

    std::size_t n() const noexcept { return a.size(); }
    std::size_t m() const noexcept { return b.size() - a.size(); }

    std::span<const double> b_coupled() const noexcept { return {b.data(), n()}; }
    std::span<const double> d_coupled() const noexcept { return {d.data(), n()}; }
    std::span<const double> h_coupled() const noexcept { return {h.data(), n()}; }
};

/// Log-excess and exceedance indicator for one sample against a fixed threshold:
/// excess_i = (ln y_i - ln u) 1{y_i > u}, indicator_i = 1{y_i > u}.
struct ExceedanceSeries {
    std::vector<double> excess;
    std::vector<double> indicator;
    std::vector<double> squared_excess;
    std::size_t count = 0;
};

std::vector<double> order_statistics(std::span<const double> sample);

/// The (n - k)-th ascending order statistic, i.e. the k-th largest value is
/// the first one strictly above it for tie-free samples.
double threshold_at(std::span<const double> sample, std::size_t k);

/// Threshold must be > 0. Exceedance is strict, so values tied with the
/// threshold contribute zeros.
ExceedanceSeries exceedances(std::span<const double> sample, double threshold);

CvVariables build_cv_variables(const SemiSupervisedDataset& dataset, std::size_t k,
                               std::size_t k_source);

/// Arithmetic mean; all estimators go through this so that equivalent code
/// paths produce bit-identical values.
double mean(std::span<const double> values);

}  // namespace tailcv
