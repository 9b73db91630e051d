#include "tailcv/estimators.hpp"

#include <cmath>

namespace tailcv {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Hill: return "hill";
        case Method::Moment: return "moment";
        case Method::TransferredHill: return "transferred_hill";
        case Method::TransferredMoment: return "transferred_moment";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "hill") return Method::Hill;
    if (name == "moment") return Method::Moment;
    if (name == "transferred_hill") return Method::TransferredHill;
    if (name == "transferred_moment") return Method::TransferredMoment;
    throw Error("unknown method '" + std::string(name) + "'");
}

bool is_transferred(Method method) {
    return method == Method::TransferredHill || method == Method::TransferredMoment;
}

EviEstimate hill(std::span<const double> sample, std::size_t k) {
    const double u = threshold_at(sample, k);
    const auto ex = exceedances(sample, u);
    if (ex.count == 0) throw Error("no exceedances");

    EviEstimate est;
    est.method = Method::Hill;
    est.k = k;
    est.exceedances = ex.count;
    est.value = mean(ex.excess) / mean(ex.indicator);
    est.variance_estimate = est.value * est.value / static_cast<double>(ex.count);
    return est;
}

double moment_from_log_moments(double m1, double m2) {
    if (!(m2 > 0.0) || m2 - m1 * m1 <= 1e-12 * m2) {
        throw Error("moment estimator undefined");
    }
    return m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2);
}

EviEstimate moment(std::span<const double> sample, std::size_t k) {
    const double u = threshold_at(sample, k);
    const auto ex = exceedances(sample, u);
    if (ex.count == 0) throw Error("no exceedances");

    const double c_bar = mean(ex.indicator);
    const double m1 = mean(ex.excess) / c_bar;
    const double m2 = mean(ex.squared_excess) / c_bar;

    EviEstimate est;
    est.method = Method::Moment;
    est.k = k;
    est.exceedances = ex.count;
    est.value = moment_from_log_moments(m1, m2);
    return est;
}

HillPlotSeries hill_plot(std::span<const double> sample, std::size_t k_min,
                         std::size_t k_max, std::size_t step) {
    if (step == 0 || k_min < 1 || k_min > k_max || sample.size() < 2 ||
        k_max > sample.size() - 1) {
        throw Error("empty k range");
    }
    HillPlotSeries series;
    for (std::size_t k = k_min; k <= k_max; k += step) {
        series.k_values.push_back(k);
        try {
            series.estimates.emplace_back(hill(sample, k).value);
        } catch (const Error&) {
            series.estimates.emplace_back(std::nullopt);
        }
    }
    return series;
}

}  // namespace tailcv
