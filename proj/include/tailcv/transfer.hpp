#pragma once

// Transferred EVI estimators: the Hill and moment estimators written as ratios
// of means, with every mean corrected by an approximate control variate built
// from the abundant source sample.

#include <cstddef>

#include "tailcv/acv.hpp"
#include "tailcv/core.hpp"
#include "tailcv/estimators.hpp"

namespace tailcv {

/// Falls back to the plain Hill estimate when the source control variates are
/// degenerate (alpha = beta = 0), in which case the value is bit-identical to
/// hill(dataset.paired_target(), k).
EviEstimate transferred_hill(const SemiSupervisedDataset& dataset, std::size_t k,
                             std::size_t k_source);

EviEstimate transferred_hill(const CvVariables& vars);

/// Each log-moment gets its own coefficient pair: (alpha, beta) for
/// M1 = E[A]/E[C] and (alpha', beta') for M2 = E[G]/E[C]. The pairs minimize
/// the variance of each moment separately, not of the final estimate.
EviEstimate transferred_moment(const SemiSupervisedDataset& dataset, std::size_t k,
                               std::size_t k_source);

EviEstimate transferred_moment(const CvVariables& vars);

/// Both log-moments of the transferred moment estimator with explicit
/// coefficients; exposed so the estimator can be evaluated at chosen
/// coefficient values.
double transferred_moment_value(const CvVariables& vars, const TransferCoefficients& coeffs);

/// Evaluates any method on a dataset. Baselines only look at paired_target.
EviEstimate estimate(Method method, const SemiSupervisedDataset& dataset, std::size_t k,
                     std::size_t k_source);

}  // namespace tailcv
