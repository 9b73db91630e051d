#pragma once

// Baseline extreme value index estimators on a single sample.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailcv/core.hpp"

namespace tailcv {

enum class Method { Hill, Moment, TransferredHill, TransferredMoment };

std::string_view to_string(Method method);
/// Accepts the snake_case names used on the command line and in reports.
Method parse_method(std::string_view name);
bool is_transferred(Method method);

/// Control-variate coefficients attached to a transferred estimate. The primed
/// pair only carries information for the moment estimator (second log-moment).
struct TransferCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_prime = 0.0;
    double beta_prime = 0.0;
    bool degenerate = false;
    bool degenerate_prime = false;
};

struct EviEstimate {
    double value = 0.0;
    Method method = Method::Hill;
    std::size_t k = 0;
    /// Number of strict exceedances of the target threshold.
    std::size_t exceedances = 0;
    std::optional<TransferCoefficients> coefficients;
    std::optional<double> variance_estimate;
};

struct HillPlotSeries {
    std::vector<std::size_t> k_values;
    /// Empty where the Hill estimator failed at that k.
    std::vector<std::optional<double>> estimates;
};

/// Ratio-of-means Hill estimator: mean(a) / mean(c) over the sample's
/// log-excesses a and exceedance indicators c. For tie-free samples this is
/// the classical average of the top-k log-spacings.
EviEstimate hill(std::span<const double> sample, std::size_t k);

/// Moment estimator from the first two empirical log-moments.
EviEstimate moment(std::span<const double> sample, std::size_t k);

/// M1 + 1 - 1/2 (1 - M1^2 / M2)^-1. Throws when M2 <= M1^2 up to rounding.
double moment_from_log_moments(double m1, double m2);

HillPlotSeries hill_plot(std::span<const double> sample, std::size_t k_min,
                         std::size_t k_max, std::size_t step = 1);

}  // namespace tailcv
