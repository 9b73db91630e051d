#pragma once

// Dependence diagnostics between target and source extremes, and the
// closed-form asymptotic relative variance reduction of the transferred Hill
// estimator for a heavy-tailed source.

#include <cstddef>
#include <optional>
#include <span>

#include "tailcv/core.hpp"

namespace tailcv {

struct CvCorrelations {
    double corr_ab = 0.0;
    double corr_cd = 0.0;
};

/// Conditional means over the joint-exceedance set of the scaled target
/// log-excess Z_T = a / gamma_t and source log-excess Z_S = b / gamma_s:
/// c_ad = mean(Z_T - 1), c_ab = mean((Z_T - 1) Z_S).
struct ExtremalCoefficients {
    double c_ad = 0.0;
    double c_ab = 0.0;
    std::size_t joint_exceedances = 0;
};

struct DependenceReport {
    /// Unclipped; may exceed 1 under ties. lambda_clipped marks that case.
    double lambda_hat = 0.0;
    bool lambda_clipped = false;
    double corr_ab = 0.0;
    double corr_cd = 0.0;
    /// Empty when fewer than two joint exceedances exist or the EVI
    /// estimates used for scaling are not positive.
    std::optional<double> c_ad_hat;
    std::optional<double> c_ab_hat;
    /// Nominal k / n.
    double p_hat = 0.0;
    std::size_t target_exceedances = 0;
    std::size_t joint_exceedances = 0;
};

/// (1/k) #{i : target_i and source_i both strictly exceed their own
/// (n - k)-th order statistic}. Rank-based, hence invariant to strictly
/// increasing transformations of either margin.
double tail_dependence(std::span<const double> paired_target,
                       std::span<const double> paired_source, std::size_t k);

/// Pearson correlations of (a, b) and (c, d) over the coupled indices.
CvCorrelations cv_correlations(const CvVariables& vars);

ExtremalCoefficients extremal_coefficients(const CvVariables& vars, double gamma_t_hat,
                                           double gamma_s_hat);

/// lambda^2 m/(n+m) (c_ab^2 + c_ad^2 (2-p)/(1-p) - 2 c_ab c_ad), with lambda
/// clipped to [0, 1]. This is the reduction relative to Var(Hill) ~ gamma^2/(n p).
double asymptotic_rvr_closed_form(double lambda, double p, double c_ab, double c_ad,
                                  std::size_t n, std::size_t m);

/// Plug-in asymptotic RVR. gamma estimates default to the Hill estimates of
/// the coupled target (at k) and coupled source (at k_source).
double asymptotic_rvr(const SemiSupervisedDataset& dataset, std::size_t k,
                      std::size_t k_source, std::optional<double> gamma_t_hat = std::nullopt,
                      std::optional<double> gamma_s_hat = std::nullopt);

DependenceReport dependence_report(const SemiSupervisedDataset& dataset, std::size_t k,
                                   std::size_t k_source,
                                   std::optional<double> gamma_t_hat = std::nullopt,
                                   std::optional<double> gamma_s_hat = std::nullopt);

}  // namespace tailcv
