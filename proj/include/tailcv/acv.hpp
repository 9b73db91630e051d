#pragma once

// Control-variate machinery for a ratio of means E[A] / E[C].
//
// The approximate control variate (ACV) estimator corrects both sample means
// with the difference between a large-sample and a small-sample mean of a
// correlated auxiliary variable:
//
//   R_hat = (mean_n(A) + alpha (mean_{n+m}(B) - mean_n(B)))
//         / (mean_n(C) + beta  (mean_{n+m}(D) - mean_n(D)))
//
// Coefficients are estimated on the same n coupled observations that feed the
// estimate. All second moments use the n - 1 divisor.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "tailcv/core.hpp"

namespace tailcv {

/// Means and covariance matrix of a fixed set of equally long sequences.
class MomentStatistics {
public:
    MomentStatistics(std::initializer_list<std::span<const double>> variables);

    std::size_t sample_size() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return means_.size(); }
    double mean(std::size_t i) const { return means_.at(i); }
    double variance(std::size_t i) const { return covariance(i, i); }
    double covariance(std::size_t i, std::size_t j) const {
        return cov_.at(i * means_.size() + j);
    }
    double correlation(std::size_t i, std::size_t j) const;

private:
    std::size_t n_ = 0;
    std::vector<double> means_;
    std::vector<double> cov_;
};

struct AcvCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    /// Var(B) Var(D) - Cov(B, D)^2 of the control variates.
    double determinant = 0.0;
    /// True when the control variates are (numerically) collinear or the
    /// plug-in ratio is zero; alpha and beta are then both zero.
    bool degenerate = false;
};

/// Exact control-variate coefficient Cov(a, b) / Var(b).
double cv_coefficient(std::span<const double> a, std::span<const double> b);

/// Variance-optimal (alpha, beta) for the ACV/ACV ratio estimator. All four
/// sequences cover the n coupled observations; r_plugin stands in for the
/// unknown ratio E[A] / E[C].
AcvCoefficients acv_ratio_coefficients(std::span<const double> a,
                                       std::span<const double> b,
                                       std::span<const double> c,
                                       std::span<const double> d, double r_plugin);

/// Coefficients for the Hill-type ratio of a CvVariables bundle, with the
/// baseline ratio mean(a) / mean(c) as plug-in.
AcvCoefficients acv_ratio_coefficients(const CvVariables& vars);

/// General form: numerator target/source, denominator target/source. The
/// target sequences have length n, the source sequences length n + m with the
/// coupled observations first.
double acv_ratio_estimate(std::span<const double> num_target,
                          std::span<const double> num_source,
                          std::span<const double> den_target,
                          std::span<const double> den_source, double alpha, double beta);

double acv_ratio_estimate(const CvVariables& vars, const AcvCoefficients& coeffs);

/// Plug-in estimate of Var(Hill) - Var(transferred Hill) from the asymptotic
/// ACV/ACV variance formula, with gamma_hat in place of the target EVI.
double variance_difference_plugin(const CvVariables& vars, double gamma_hat);

}  // namespace tailcv
