#include "tailcv/transfer.hpp"

#include <cmath>

namespace tailcv {

namespace {

std::size_t exceedance_count(const CvVariables& vars) {
    std::size_t count = 0;
    for (double c : vars.c) count += c > 0.0 ? 1 : 0;
    return count;
}

}  // namespace

EviEstimate transferred_hill(const CvVariables& vars) {
    const std::size_t k_eff = exceedance_count(vars);
    if (k_eff == 0) throw Error("no exceedances");

    const AcvCoefficients coeffs = acv_ratio_coefficients(vars);

    EviEstimate est;
    est.method = Method::TransferredHill;
    est.k = vars.k_target;
    est.exceedances = k_eff;
    est.value = acv_ratio_estimate(vars, coeffs);
    est.coefficients = TransferCoefficients{coeffs.alpha, coeffs.beta, 0.0, 0.0,
                                            coeffs.degenerate, false};

    // Baseline plug-in variance gamma^2 / k_eff minus the predicted reduction.
    const double baseline = mean(vars.a) / mean(vars.c);
    double variance = baseline * baseline / static_cast<double>(k_eff);
    if (!coeffs.degenerate) variance -= variance_difference_plugin(vars, baseline);
    if (variance >= 0.0) est.variance_estimate = variance;
    return est;
}

EviEstimate transferred_hill(const SemiSupervisedDataset& dataset, std::size_t k,
                             std::size_t k_source) {
    return transferred_hill(build_cv_variables(dataset, k, k_source));
}

double transferred_moment_value(const CvVariables& vars, const TransferCoefficients& coeffs) {
    const double m1 = acv_ratio_estimate(vars.a, vars.b, vars.c, vars.d, coeffs.alpha,
                                         coeffs.beta);
    const double m2 = acv_ratio_estimate(vars.g, vars.h, vars.c, vars.d, coeffs.alpha_prime,
                                         coeffs.beta_prime);
    return moment_from_log_moments(m1, m2);
}

EviEstimate transferred_moment(const CvVariables& vars) {
    const std::size_t k_eff = exceedance_count(vars);
    if (k_eff == 0) throw Error("no exceedances");

    const double c_bar = mean(vars.c);
    const double m1 = mean(vars.a) / c_bar;
    const double m2 = mean(vars.g) / c_bar;
    const AcvCoefficients first =
        acv_ratio_coefficients(vars.a, vars.b_coupled(), vars.c, vars.d_coupled(), m1);
    const AcvCoefficients second =
        acv_ratio_coefficients(vars.g, vars.h_coupled(), vars.c, vars.d_coupled(), m2);

    TransferCoefficients coeffs{first.alpha, first.beta, second.alpha, second.beta,
                                first.degenerate, second.degenerate};

    EviEstimate est;
    est.method = Method::TransferredMoment;
    est.k = vars.k_target;
    est.exceedances = k_eff;
    est.value = transferred_moment_value(vars, coeffs);
    est.coefficients = coeffs;
    return est;
}

EviEstimate transferred_moment(const SemiSupervisedDataset& dataset, std::size_t k,
                               std::size_t k_source) {
    return transferred_moment(build_cv_variables(dataset, k, k_source));
}

EviEstimate estimate(Method method, const SemiSupervisedDataset& dataset, std::size_t k,
                     std::size_t k_source) {
    switch (method) {
        case Method::Hill: return hill(dataset.paired_target(), k);
        case Method::Moment: return moment(dataset.paired_target(), k);
        case Method::TransferredHill: return transferred_hill(dataset, k, k_source);
        case Method::TransferredMoment: return transferred_moment(dataset, k, k_source);
    }
    throw Error("unknown method");
}

}  // namespace tailcv
