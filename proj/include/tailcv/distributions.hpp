#pragma once

// Marginal distributions and the Gumbel copula used by the simulation study.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tailcv/rng.hpp"

namespace tailcv {

/// Pareto with extreme value index gamma: F(y) = 1 - (y / y_m)^(-1/gamma) for
/// y >= y_m, so that the quantile is y_m (1 - u)^(-gamma).
struct ParetoMarginal {
    double gamma = 0.5;
    double y_m = 1e-3;
};

struct StandardNormalMarginal {};

/// Beta(1, b); extreme value index -1/b.
struct BetaMarginal {
    double shape_b = 2.0;
};

using Marginal = std::variant<ParetoMarginal, StandardNormalMarginal, BetaMarginal>;

/// Pareto for gamma > 0, standard normal for gamma == 0, Beta(1, -1/gamma)
/// for gamma < 0.
Marginal marginal_for_evi(double gamma, double y_m = 1e-3);

double marginal_quantile(double u, const Marginal& marginal);
double marginal_cdf(double y, const Marginal& marginal);
double marginal_evi(const Marginal& marginal);
std::string describe(const Marginal& marginal);

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against erfc.
double standard_normal_quantile(double u);

struct CopulaPair {
    double u1 = 0.0;
    double u2 = 0.0;
};

/// Positive stable variate with Laplace transform exp(-t^alpha), 0 < alpha <= 1,
/// by the Chambers-Mallows-Stuck (Kanter) representation.
double positive_stable(double alpha, StreamRng& rng);

/// Gumbel copula C(u1, u2) = exp(-((-ln u1)^theta + (-ln u2)^theta)^(1/theta))
/// by the Marshall-Olkin frailty construction: with S positive stable of index
/// 1/theta and E_i standard exponential, U_i = exp(-(E_i / S)^(1/theta)).
std::vector<CopulaPair> sample_gumbel_copula(double theta, std::size_t count, StreamRng& rng);

/// Upper tail dependence 2 - 2^(1/theta).
double gumbel_tail_dependence(double theta);

}  // namespace tailcv
